#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "helpers.hpp"
#include "msreg/elm.hpp"

using namespace msreg;

TEST_CASE("default hidden layer size") {
    CHECK(default_hidden_nodes(1) == 1);
    CHECK(default_hidden_nodes(30) == 20);
    CHECK(default_hidden_nodes(301) == 200);
    CHECK(default_hidden_nodes(7000) == 200);
}

TEST_CASE("hidden layer is seeded, uniform on [-1, 1] and reproducible") {
    Matrix w1, w2;
    Vector b1, b2;
    draw_hidden_layer(5, 4, 50, w1, b1);
    draw_hidden_layer(5, 4, 50, w2, b2);
    CHECK(w1 == w2);
    CHECK(b1 == b2);
    CHECK(w1.rows() == 4);
    CHECK(w1.cols() == 50);
    CHECK(w1.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(std::abs(w1.mean()) < 0.15);
    draw_hidden_layer(6, 4, 50, w2, b2);
    CHECK(w1 != w2);
}

TEST_CASE("activations") {
    CHECK(activation_from_name("sigmoid") == Activation::Sigmoid);
    CHECK(activation_from_name("tanh") == Activation::Tanh);
    CHECK(activation_name(Activation::Tanh) == "tanh");
    CHECK_THROWS(activation_from_name("relu"));
    const Matrix x = testing::gaussian_matrix(5, 2, 1);
    const ElmModel m = fit_elm(x, testing::gaussian_vector(5, 2), 3, Activation::Sigmoid, 4);
    const Matrix h = m.hidden(x);
    const Matrix pre = (x * m.input_weights).rowwise() + m.biases.transpose();
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 3; ++j) CHECK(h(i, j) == doctest::Approx(1.0 / (1.0 + std::exp(-pre(i, j)))));
    const ElmModel t = fit_elm(x, testing::gaussian_vector(5, 2), 3, Activation::Tanh, 4);
    CHECK(t.hidden(x)(0, 0) == doctest::Approx(std::tanh(pre(0, 0))));
}

TEST_CASE("with as many hidden nodes as rows the network interpolates") {
    const Matrix x = testing::gaussian_matrix(40, 3, 3);
    const Vector y = testing::gaussian_vector(40, 4);
    const ElmModel m = fit_elm(x, y, 40, Activation::Tanh, 7);
    CHECK((m.predict(x) - y).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("zero outcome gives zero output weights") {
    const Matrix x = testing::gaussian_matrix(30, 2, 5);
    const ElmModel m = fit_elm(x, Vector::Zero(30), 10);
    CHECK(m.output_weights.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("output weights solve the normal equations") {
    const Matrix x = testing::gaussian_matrix(200, 4, 6);
    const Vector y = x.col(0).array().sin().matrix() + 0.1 * testing::gaussian_vector(200, 7);
    const ElmModel m = fit_elm(x, y, 25, Activation::Sigmoid, 8);
    const Matrix h = m.hidden(x);
    const Vector r = y - h * m.output_weights;
    CHECK((h.transpose() * r).cwiseAbs().maxCoeff() < 1e-6 * h.norm() * y.norm());
    // no perturbation of beta lowers the residual
    for (Index j = 0; j < 25; ++j) {
        Vector b = m.output_weights;
        b[j] += 1e-3;
        CHECK((y - h * b).squaredNorm() >= r.squaredNorm());
    }
}

TEST_CASE("min_norm_least_squares matches a JacobiSVD pseudo-inverse") {
    // wide and rank-deficient systems
    const Matrix wide = testing::gaussian_matrix(10, 30, 9);
    Matrix deficient = testing::gaussian_matrix(40, 6, 10);
    deficient.col(5) = deficient.col(0) + deficient.col(1);
    for (const Matrix& h : {wide, deficient}) {
        const Vector y = testing::gaussian_vector(h.rows(), 11);
        const Vector beta = min_norm_least_squares(h, y);
        const Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vector s = svd.singularValues();
        Vector inv = Vector::Zero(s.size());
        for (Index i = 0; i < s.size(); ++i)
            if (s[i] > 1e-10 * s[0]) inv[i] = 1.0 / s[i];
        const Vector oracle = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * y;
        CHECK((beta - oracle).cwiseAbs().maxCoeff() < 1e-9);
        // minimum norm: beta lies in the row space of h
        const Vector proj = svd.matrixV() * (svd.matrixV().transpose() * beta);
        CHECK((proj - beta).norm() < 1e-9);
    }
}

TEST_CASE("model JSON regenerates the hidden layer from the seed") {
    const Matrix x = testing::gaussian_matrix(60, 3, 12);
    const Vector y = testing::gaussian_vector(60, 13);
    const ElmModel m = fit_elm(x, y, 15, Activation::Tanh, 99);
    const nlohmann::json j = m.to_json();
    CHECK(!j.contains("input_weights"));
    const ElmModel back = ElmModel::from_json(j);
    CHECK(back.input_weights == m.input_weights);
    CHECK(testing::bitwise_equal(back.predict(x), m.predict(x)));
}

TEST_CASE("fit is deterministic in the seed") {
    const Matrix x = testing::gaussian_matrix(50, 2, 14);
    const Vector y = testing::gaussian_vector(50, 15);
    CHECK(fit_elm(x, y, 10, Activation::Sigmoid, 1).output_weights ==
          fit_elm(x, y, 10, Activation::Sigmoid, 1).output_weights);
    CHECK(fit_elm(x, y, 10, Activation::Sigmoid, 1).output_weights !=
          fit_elm(x, y, 10, Activation::Sigmoid, 2).output_weights);
    CHECK_THROWS(fit_elm(x, y, 0));
}
