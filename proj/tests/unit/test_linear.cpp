#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "msreg/linear.hpp"

using namespace msreg;

namespace {

double soft_threshold(double z, double t) { return z > t ? z - t : (z < -t ? z + t : 0.0); }

// Centered columns with x'x / n = I, from a QR of a random matrix.
Matrix orthonormal_design(Index n, Index p, std::uint64_t seed) {
    Matrix a = testing::gaussian_matrix(n, p + 1, seed);
    a.col(0).setOnes();
    const Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix q = qr.householderQ() * Matrix::Identity(n, p + 1);
    return q.rightCols(p) * std::sqrt(static_cast<double>(n));
}

struct Problem {
    Matrix x;
    Vector y;
};

Problem sparse_problem(Index n, Index p, std::uint64_t seed, double noise = 0.5) {
    Problem pr{testing::gaussian_matrix(n, p, seed), Vector()};
    Vector beta = Vector::Zero(p);
    beta[0] = 2.0;
    beta[1] = -1.5;
    if (p > 3) beta[3] = 0.7;
    pr.y = (pr.x * beta).array() + 1.0;
    pr.y += noise * testing::gaussian_vector(n, seed + 1000);
    return pr;
}

}  // namespace

TEST_CASE("fold assignment is balanced and seeded") {
    const auto f = fold_assignment(103, 10, 4);
    std::vector<int> sizes(10, 0);
    for (int v : f) ++sizes[static_cast<std::size_t>(v)];
    for (int s : sizes) CHECK((s == 10 || s == 11));
    CHECK(fold_assignment(103, 10, 4) == f);
    CHECK(fold_assignment(103, 10, 5) != f);
}

TEST_CASE("elastic net at lambda 0 is ordinary least squares") {
    const Problem pr = sparse_problem(80, 5, 1);
    ElasticNetOptions o;
    o.lambda = 0.0;
    o.tolerance = 1e-12;
    const ElasticNetFit fit = fit_elastic_net(pr.x, pr.y, o);
    const Vector ols = testing::ols_with_intercept(pr.x, pr.y);
    CHECK(fit.model.intercept == doctest::Approx(ols[0]).epsilon(1e-8));
    for (Index j = 0; j < 5; ++j) CHECK(std::abs(fit.model.coefficients[j] - ols[j + 1]) < 1e-8);
}

TEST_CASE("elastic net is exactly zero at and above lambda_max") {
    const Problem pr = sparse_problem(60, 6, 2);
    for (double alpha : {0.0, 0.5, 0.9}) {
        const double lmax = elastic_net_lambda_max(pr.x, pr.y, alpha);
        // independent formula
        const Vector yc = pr.y.array() - pr.y.mean();
        const Matrix xc = pr.x.rowwise() - pr.x.colwise().mean();
        const double expected = (xc.transpose() * yc).cwiseAbs().maxCoeff() / 60.0 / (1.0 - alpha);
        CHECK(lmax == doctest::Approx(expected).epsilon(1e-12));
        ElasticNetOptions o;
        o.alpha = alpha;
        for (double scale : {1.0, 1.5}) {
            o.lambda = lmax * scale;
            const ElasticNetFit fit = fit_elastic_net(pr.x, pr.y, o);
            CHECK(fit.model.coefficients.cwiseAbs().maxCoeff() == 0.0);
            CHECK(fit.model.intercept == doctest::Approx(pr.y.mean()));
        }
        o.lambda = lmax * 0.95;
        CHECK(fit_elastic_net(pr.x, pr.y, o).model.coefficients.cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("elastic net solution is not improved by coordinate perturbations") {
    const Problem pr = sparse_problem(100, 8, 3);
    ElasticNetOptions o;
    o.alpha = 0.5;
    o.lambda = 0.05;
    o.tolerance = 1e-12;
    const ElasticNetFit fit = fit_elastic_net(pr.x, pr.y, o);
    const double best = elastic_net_objective(pr.x, pr.y, fit.model.intercept, fit.model.coefficients, 0.5, 0.05);
    for (Index j = 0; j < 8; ++j)
        for (double eps : {1e-4, -1e-4, 1e-2, -1e-2}) {
            Vector b = fit.model.coefficients;
            b[j] += eps;
            CHECK(elastic_net_objective(pr.x, pr.y, fit.model.intercept, b, 0.5, 0.05) >= best - 1e-12);
        }
    for (double eps : {1e-3, -1e-3})
        CHECK(elastic_net_objective(pr.x, pr.y, fit.model.intercept + eps, fit.model.coefficients, 0.5, 0.05) >= best);
}

TEST_CASE("orthonormal design gives the closed-form shrinkage") {
    const Index n = 50;
    const Matrix x = orthonormal_design(n, 4, 7);
    const Vector y = testing::gaussian_vector(n, 8) * 2.0;
    const Vector z = x.transpose() * (y.array() - y.mean()).matrix() / static_cast<double>(n);
    for (double alpha : {0.0, 0.3, 1.0})
        for (double lambda : {0.01, 0.2, 0.7}) {
            ElasticNetOptions o;
            o.alpha = alpha;
            o.lambda = lambda;
            o.tolerance = 1e-13;
            const ElasticNetFit fit = fit_elastic_net(x, y, o);
            for (Index j = 0; j < 4; ++j) {
                const double expected = soft_threshold(z[j], lambda * (1 - alpha)) / (1 + 2 * lambda * alpha);
                CHECK(std::abs(fit.model.coefficients[j] - expected) < 1e-10);
            }
        }
}

TEST_CASE("coordinate descent objective never increases between sweeps") {
    const Problem pr = sparse_problem(120, 10, 4);
    const auto obj = elastic_net_sweep_objectives(pr.x, pr.y, 0.5, 0.02, 200);
    REQUIRE(obj.size() >= 2);
    for (std::size_t s = 1; s < obj.size(); ++s) CHECK(obj[s] <= obj[s - 1] + 1e-14);
}

TEST_CASE("cross-validated elastic net recovers the sparse support") {
    const Problem pr = sparse_problem(300, 10, 5, 0.3);
    ElasticNetOptions o;
    o.seed = 11;
    const ElasticNetFit fit = fit_elastic_net(pr.x, pr.y, o);
    CHECK(fit.folds_used == 10);
    CHECK(fit.lambda_grid.size() == 100);
    CHECK(fit.lambda_grid.front() == doctest::Approx(elastic_net_lambda_max(pr.x, pr.y, 0.5)));
    CHECK(fit.lambda_grid.back() == doctest::Approx(1e-4 * fit.lambda_grid.front()));
    const auto best = std::min_element(fit.cv_error.begin(), fit.cv_error.end());
    CHECK(fit.lambda == fit.lambda_grid[static_cast<std::size_t>(best - fit.cv_error.begin())]);
    CHECK(fit.model.coefficients[0] == doctest::Approx(2.0).epsilon(0.1));
    CHECK(fit.model.coefficients[1] == doctest::Approx(-1.5).epsilon(0.1));
    CHECK(fit_elastic_net(pr.x, pr.y, o).model.coefficients == fit.model.coefficients);
}

TEST_CASE("small samples fall back to 3 folds, then to a fixed penalty") {
    const Problem pr = sparse_problem(7, 2, 6);
    const ElasticNetFit three = fit_elastic_net(pr.x, pr.y);
    CHECK(three.folds_used == 3);
    const Problem tiny = sparse_problem(2, 2, 7);
    const ElasticNetFit fixed = fit_elastic_net(tiny.x, tiny.y);
    CHECK(fixed.folds_used == 0);
    CHECK(fixed.lambda == doctest::Approx(0.01 * elastic_net_lambda_max(tiny.x, tiny.y, 0.5)));
    CHECK_THROWS_AS(fit_elastic_net(tiny.x.topRows(1), tiny.y.head(1)), DataError);
    // constant outcome: intercept only
    const ElasticNetFit flat = fit_elastic_net(pr.x, Vector::Constant(7, 3.0));
    CHECK(flat.model.coefficients.cwiseAbs().maxCoeff() == 0.0);
    CHECK(flat.model.intercept == 3.0);
}

TEST_CASE("single-predictor homotopy path ends at least squares") {
    const Matrix x = testing::gaussian_matrix(40, 1, 9);
    const Vector y = 3.0 * x.col(0) + testing::gaussian_vector(40, 10);
    LassoOptions o;
    o.cross_validate = false;
    const LassoPath path = fit_lasso_homotopy(x, y, o);
    REQUIRE(path.points.size() >= 2);
    const Vector xc = x.col(0).array() - x.col(0).mean();
    const Vector yc = y.array() - y.mean();
    CHECK(path.points.front().lambda == doctest::Approx(std::abs(xc.dot(yc))).epsilon(1e-12));
    CHECK(path.points.back().lambda == 0.0);
    CHECK(path.points.back().event == PathEvent::End);
    const Vector ols = testing::ols_with_intercept(x, y);
    CHECK(path.points.back().coefficients[0] == doctest::Approx(ols[1]).epsilon(1e-10));
    // on a single predictor the path is linear: beta(lambda) = (|xc'yc| - lambda) / xc'xc
    const double mid = path.points.front().lambda / 2;
    CHECK(path.coefficients_at(mid)[0] == doctest::Approx((std::abs(xc.dot(yc)) - mid) / xc.squaredNorm()).epsilon(1e-10));
    CHECK(path.coefficients_at(2 * path.points.front().lambda)[0] == 0.0);
}

TEST_CASE("homotopy path satisfies KKT and moves one variable per breakpoint") {
    const Problem pr = sparse_problem(150, 12, 12, 1.0);
    LassoOptions o;
    o.cross_validate = false;
    const LassoPath path = fit_lasso_homotopy(pr.x, pr.y, o);
    CHECK(lasso_kkt_violation(path, pr.x, pr.y) < 1e-8);
    for (std::size_t t = 1; t < path.points.size(); ++t) {
        const auto& a = path.points[t - 1];
        const auto& b = path.points[t];
        CHECK(b.lambda < a.lambda);
        std::set<Index> sa(a.active.begin(), a.active.end()), sb(b.active.begin(), b.active.end());
        std::vector<Index> diff;
        std::set_symmetric_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(diff));
        if (b.event == PathEvent::Enter || b.event == PathEvent::Leave) {
            CHECK(diff.size() == 1);
            CHECK(diff[0] == b.variable);
        } else {
            CHECK(diff.empty());
        }
    }
}

TEST_CASE("homotopy agrees with coordinate descent at alpha 0") {
    const Problem pr = sparse_problem(120, 6, 13, 1.0);
    const Index n = pr.x.rows();
    LassoOptions o;
    o.cross_validate = false;
    const LassoPath path = fit_lasso_homotopy(pr.x, pr.y, o);
    const double top = path.points.front().lambda;
    for (double frac : {0.9, 0.5, 0.2, 0.05, 0.001}) {
        const double lambda = top * frac;
        ElasticNetOptions eo;
        eo.alpha = 0.0;
        eo.lambda = lambda / static_cast<double>(n);
        eo.tolerance = 1e-13;
        const ElasticNetFit cd = fit_elastic_net(pr.x, pr.y, eo);
        const Vector beta = path.coefficients_at(lambda);
        CHECK((beta - cd.model.coefficients).cwiseAbs().maxCoeff() < 1e-5);
        CHECK(path.intercept_for(beta) == doctest::Approx(cd.model.intercept).epsilon(1e-6));
    }
}

TEST_CASE("path stops once the active set saturates the centered rank") {
    const Matrix x = testing::gaussian_matrix(6, 10, 14);
    const Vector y = testing::gaussian_vector(6, 15);
    LassoOptions o;
    o.cross_validate = false;
    const LassoPath path = fit_lasso_homotopy(x, y, o);
    CHECK(path.points.back().active.size() == 5);
    CHECK(path.points.back().lambda > 0.0);
    CHECK(lasso_kkt_violation(path, x, y) < 1e-7);
}

TEST_CASE("a rescaled copy of a column never joins the original") {
    const Problem pr = sparse_problem(60, 3, 16);
    Matrix x(60, 4);
    x << pr.x, pr.x.col(0) * 2.0;
    LassoOptions o;
    o.cross_validate = false;
    const LassoPath path = fit_lasso_homotopy(x, pr.y, o);
    for (const PathPoint& pt : path.points) CHECK(pt.coefficients[0] == 0.0);
    CHECK(lasso_kkt_violation(path, x, pr.y) < 1e-7);
}

TEST_CASE("cross-validated lasso path round-trips through JSON") {
    const Problem pr = sparse_problem(200, 8, 15);
    LassoOptions o;
    o.seed = 3;
    const LassoPath path = fit_lasso_homotopy(pr.x, pr.y, o);
    CHECK(path.cv_error.size() == path.points.size());
    const auto best = std::min_element(path.cv_error.begin(), path.cv_error.end()) - path.cv_error.begin();
    CHECK(path.chosen == best);
    const LassoPath back = LassoPath::from_json(path.to_json());
    CHECK(back.chosen == path.chosen);
    CHECK(back.chosen_model().predict(pr.x) == path.chosen_model().predict(pr.x));
}

TEST_CASE("boosting on one centered predictor follows 2 (1 - 0.9^m)") {
    Matrix x = testing::gaussian_matrix(50, 1, 16);
    x.col(0).array() -= x.col(0).mean();
    const Vector y = 2.0 * x.col(0);
    for (int m : {1, 5, 40}) {
        const BoostedModel b = fit_boosted_linear(x, y, m, 0.1);
        CHECK(b.steps.size() == static_cast<std::size_t>(m));
        CHECK(b.aggregate()[0] == doctest::Approx(2.0 * (1.0 - std::pow(0.9, m))).epsilon(1e-12));
    }
}

TEST_CASE("boosting picks the interaction that explains the outcome first") {
    const Matrix x = testing::gaussian_matrix(200, 3, 17);
    const Vector y = x.col(0).cwiseProduct(x.col(2));
    const BoostedModel b = fit_boosted_linear(x, y, 10, 0.1, true, {"a", "b", "c"});
    REQUIRE(!b.steps.empty());
    CHECK(b.feature_names[static_cast<std::size_t>(b.steps[0].feature)] == "a:c");
    CHECK(b.aggregate().size() == 6);
    const BoostedModel back = BoostedModel::from_json(b.to_json());
    CHECK(back.predict(x) == b.predict(x));
}

TEST_CASE("boosting training error never increases and scales linearly") {
    const Problem pr = sparse_problem(150, 6, 18);
    const BoostedModel b = fit_boosted_linear(pr.x, pr.y, 100, 0.1);
    const auto mse = boosting_training_mse(b, pr.x, pr.y);
    CHECK(mse.size() == 101);
    for (std::size_t t = 1; t < mse.size(); ++t) CHECK(mse[t] <= mse[t - 1] + 1e-12);
    const BoostedModel twice = fit_boosted_linear(pr.x, 2.0 * pr.y, 100, 0.1);
    CHECK(twice.aggregate() == 2.0 * b.aggregate());
    CHECK(twice.intercept == 2.0 * b.intercept);
    CHECK_THROWS_AS(fit_boosted_linear(pr.x, pr.y, 0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(fit_boosted_linear(pr.x, pr.y, 10, 1.5), std::invalid_argument);
}
