#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "msreg/tweedie.hpp"

using namespace msreg;

namespace {

struct Moments {
    double mean = 0, var = 0, zero_fraction = 0;
};

Moments sample_moments(double mu, double phi, double xi, int draws, std::uint64_t seed) {
    Rng rng(seed);
    double s = 0, s2 = 0;
    int zeros = 0;
    for (int i = 0; i < draws; ++i) {
        const double v = sample_tweedie(mu, phi, xi, rng);
        s += v;
        s2 += v * v;
        zeros += v == 0.0;
    }
    Moments m;
    m.mean = s / draws;
    m.var = s2 / draws - m.mean * m.mean;
    m.zero_fraction = static_cast<double>(zeros) / draws;
    return m;
}

}  // namespace

TEST_CASE("draws match the Tweedie mean, variance and zero mass") {
    const int draws = 200000;
    for (double xi : {1.0, 1.2, 1.5, 1.8, 2.0})
        for (double mu : {0.3, 2.0})
            for (double phi : {0.5, 2.0}) {
                CAPTURE(xi);
                CAPTURE(mu);
                CAPTURE(phi);
                const Moments m = sample_moments(mu, phi, xi, draws, 17);
                const double var = phi * std::pow(mu, xi);
                // mean within 5 standard errors
                CHECK(std::abs(m.mean - mu) < 5.0 * std::sqrt(var / draws));
                CHECK(m.var == doctest::Approx(var).epsilon(0.06));
                const double p0 = tweedie_zero_mass(mu, phi, xi);
                CHECK(std::abs(m.zero_fraction - p0) < 5.0 * std::sqrt(p0 * (1 - p0) / draws) + 1e-9);
            }
}

TEST_CASE("support of the boundary cases") {
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const double pois = sample_tweedie(1.2, 0.5, 1.0, rng);
        CHECK(std::fmod(pois, 0.5) == 0.0);
        CHECK(sample_tweedie(1.2, 0.5, 2.0, rng) > 0.0);
        CHECK(sample_tweedie(1.2, 0.5, 1.5, rng) >= 0.0);
    }
    CHECK(tweedie_zero_mass(2.0, 1.0, 2.0) == 0.0);
    CHECK(tweedie_zero_mass(2.0, 1.0, 1.0) == doctest::Approx(std::exp(-2.0)));
    // exp(-mu^(2-xi) / (phi (2-xi))) at mu = 4, xi = 1.5, phi = 1: exp(-4)
    CHECK(tweedie_zero_mass(4.0, 1.0, 1.5) == doctest::Approx(std::exp(-4.0)));
    CHECK_THROWS_AS(sample_tweedie(-1.0, 1.0, 1.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_tweedie(1.0, 0.0, 1.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_tweedie(1.0, 1.0, 2.5, rng), std::invalid_argument);
}

TEST_CASE("mean functions at hand-computed points") {
    Matrix x(1, 5);
    x << 1.0, 0.5, -1.0, 2.0, 9.0;
    CHECK(linear_predictor(x, Relationship::Linear)[0] == doctest::Approx(0.5 + 0.2 - 0.3 + 0.4));
    CHECK(linear_predictor(x, Relationship::Nonlinear)[0] ==
          doctest::Approx(0.5 * std::sin(std::numbers::pi) + 0.4 * 0.25 / 2 + 0.3 * -2.0 + 0.2 * 2.0));
    CHECK(linear_predictor(x, Relationship::Mixed)[0] ==
          doctest::Approx(0.5 + 0.2 + 0.3 * std::sin(-std::numbers::pi) + 0.2 * -2.0));
    CHECK(mean_function(x, Relationship::Linear)[0] == doctest::Approx(std::exp(0.8)));
    Matrix big(2, 4);
    big << 100, 0, 0, 0, -100, 0, 0, 0;
    CHECK(mean_function(big, Relationship::Linear)[0] == 1e3);
    CHECK(mean_function(big, Relationship::Linear)[1] == 1e-3);
    CHECK_THROWS_AS(linear_predictor(x.leftCols(3), Relationship::Linear), DataError);
}

TEST_CASE("log mean is exactly linear in the first four predictors for the linear cell") {
    SimConfig c;
    c.n = 500;
    c.seed = 4;
    const Dataset d = simulate_dataset(c);
    const Vector logmu = mean_function(d.features, Relationship::Linear).array().log();
    const Vector ols = testing::ols_with_intercept(d.features, logmu);
    const double expected[] = {0.0, 0.5, 0.4, 0.3, 0.2};
    for (Index j = 0; j < 5; ++j) CHECK(std::abs(ols[j] - expected[j]) < 1e-9);
    for (Index j = 5; j < 16; ++j) CHECK(std::abs(ols[j]) < 1e-9);
}

TEST_CASE("simulated predictors are independent standard normals") {
    SimConfig c;
    c.n = 20000;
    c.seed = 5;
    c.relationship = Relationship::Mixed;
    const Dataset d = simulate_dataset(c);
    REQUIRE(d.cols() == 15);
    CHECK(d.feature_names.front() == "x1");
    CHECK(d.feature_names.back() == "x15");
    const double bound = 5.0 / std::sqrt(20000.0);
    for (Index j = 0; j < 15; ++j) {
        const Vector col = d.features.col(j);
        CHECK(std::abs(col.mean()) < bound);
        CHECK(std::abs((col.array() - col.mean()).square().mean() - 1.0) < 5.0 * std::sqrt(2.0 / 20000));
    }
    // noise columns carry no signal about the outcome
    const Vector yc = d.outcome.array() - d.outcome.mean();
    for (Index j = 4; j < 15; ++j) {
        const Vector xc = d.features.col(j).array() - d.features.col(j).mean();
        CHECK(std::abs(xc.dot(yc) / std::sqrt(xc.squaredNorm() * yc.squaredNorm())) < bound);
    }
    // the outcome averages the conditional means
    CHECK(d.outcome.mean() == doctest::Approx(mean_function(d.features, c.relationship).mean()).epsilon(0.05));
}

TEST_CASE("simulation is reproducible and seed-sensitive") {
    SimConfig c;
    c.n = 100;
    c.seed = 8;
    const Dataset a = simulate_dataset(c);
    const Dataset b = simulate_dataset(c);
    CHECK(a.features == b.features);
    CHECK(a.outcome == b.outcome);
    c.seed = 9;
    CHECK(simulate_dataset(c).outcome != a.outcome);
    // a prefix of rows is stable when n grows
    SimConfig big = c;
    big.seed = 8;
    big.n = 150;
    CHECK(simulate_dataset(big).features.topRows(100) == a.features);
}

TEST_CASE("config names, validation and JSON") {
    SimConfig c;
    c.xi = 1.5;
    c.phi = 2;
    c.relationship = Relationship::Nonlinear;
    CHECK(c.cell_id() == "nonlinear_xi1.5_phi2");
    const SimConfig back = SimConfig::from_json(c.to_json());
    CHECK(back.cell_id() == c.cell_id());
    CHECK(c.to_json().contains("eta"));
    c.xi = 3;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.xi = 1.5;
    c.phi = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK(relationship_from_name("mixed") == Relationship::Mixed);
    CHECK_THROWS_AS(relationship_from_name("quadratic"), std::invalid_argument);
}
