#include "msreg/tweedie.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace msreg {

Relationship relationship_from_name(const std::string& name) {
    if (name == "linear") return Relationship::Linear;
    if (name == "nonlinear") return Relationship::Nonlinear;
    if (name == "mixed") return Relationship::Mixed;
    throw std::invalid_argument("unknown relationship '" + name + "' (expected linear, nonlinear or mixed)");
}

std::string relationship_name(Relationship r) {
    switch (r) {
    case Relationship::Linear: return "linear";
    case Relationship::Nonlinear: return "nonlinear";
    case Relationship::Mixed: return "mixed";
    }
    return "linear";
}

void SimConfig::validate() const {
    require(xi >= 1.0 && xi <= 2.0, "Tweedie power xi must lie in [1, 2]");
    require(phi > 0.0 && std::isfinite(phi), "dispersion phi must be positive");
    require(n >= 1, "sample size must be positive");
    require(p_true == 4, "the mean functions use exactly 4 true predictors");
    require(p_noise >= 0, "p_noise must be non-negative");
}

std::string SimConfig::cell_id() const {
    std::ostringstream os;
    os << relationship_name(relationship) << "_xi" << xi << "_phi" << phi;
    return os.str();
}

nlohmann::json SimConfig::to_json() const {
    return {{"xi", xi},
            {"phi", phi},
            {"relationship", relationship_name(relationship)},
            {"n", n},
            {"p_true", p_true},
            {"p_noise", p_noise},
            {"seed", seed},
            {"predictors", "iid standard normal"},
            {"link", "log; mu = exp(eta) clipped to [1e-3, 1e3]"},
            {"eta",
             {{"linear", "0.5*x1 + 0.4*x2 + 0.3*x3 + 0.2*x4"},
              {"nonlinear", "0.5*sin(pi*x1) + 0.4*x2^2/2 + 0.3*x3*x4 + 0.2*|x4|"},
              {"mixed", "0.5*x1 + 0.4*x2 + 0.3*sin(pi*x3) + 0.2*x3*x4"}}}};
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
    SimConfig c;
    c.xi = j.value("xi", c.xi);
    c.phi = j.value("phi", c.phi);
    c.relationship = relationship_from_name(j.value("relationship", std::string("linear")));
    c.n = j.value("n", c.n);
    c.p_true = j.value("p_true", c.p_true);
    c.p_noise = j.value("p_noise", c.p_noise);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
}

Matrix make_predictors(const SimConfig& config, Rng& rng) {
    config.validate();
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix x(config.n, config.p_true + config.p_noise);
    // row-major fill so a prefix of rows is stable when n grows
    for (Index r = 0; r < x.rows(); ++r)
        for (Index c = 0; c < x.cols(); ++c) x(r, c) = normal(rng);
    return x;
}

Vector linear_predictor(const Matrix& x, Relationship relationship) {
    if (x.cols() < 4) throw DataError("mean function needs at least 4 predictor columns");
    const auto x1 = x.col(0).array(), x2 = x.col(1).array(), x3 = x.col(2).array(), x4 = x.col(3).array();
    constexpr double pi = std::numbers::pi;
    switch (relationship) {
    case Relationship::Linear: return 0.5 * x1 + 0.4 * x2 + 0.3 * x3 + 0.2 * x4;
    case Relationship::Nonlinear:
        return 0.5 * (pi * x1).sin() + 0.4 * x2.square() / 2.0 + 0.3 * x3 * x4 + 0.2 * x4.abs();
    case Relationship::Mixed: return 0.5 * x1 + 0.4 * x2 + 0.3 * (pi * x3).sin() + 0.2 * x3 * x4;
    }
    return Vector::Zero(x.rows());
}

Vector mean_function(const Matrix& x, Relationship relationship) {
    return linear_predictor(x, relationship).array().exp().min(1e3).max(1e-3);
}

double tweedie_zero_mass(double mu, double phi, double xi) {
    if (xi == 1.0) return std::exp(-mu / phi);
    if (xi == 2.0) return 0.0;
    return std::exp(-std::pow(mu, 2.0 - xi) / (phi * (2.0 - xi)));
}

double sample_tweedie(double mu, double phi, double xi, Rng& rng) {
    require(mu > 0.0 && std::isfinite(mu), "Tweedie mean must be positive");
    require(phi > 0.0 && std::isfinite(phi), "Tweedie dispersion must be positive");
    require(xi >= 1.0 && xi <= 2.0, "Tweedie power must lie in [1, 2]");
    if (xi == 1.0) {
        std::poisson_distribution<long long> pois(mu / phi);
        return phi * static_cast<double>(pois(rng));
    }
    if (xi == 2.0) {
        std::gamma_distribution<double> gam(1.0 / phi, phi * mu);
        return gam(rng);
    }
    const double lambda = std::pow(mu, 2.0 - xi) / (phi * (2.0 - xi));
    const double shape = (2.0 - xi) / (xi - 1.0);
    const double scale = phi * (xi - 1.0) * std::pow(mu, xi - 1.0);
    std::poisson_distribution<long long> pois(lambda);
    const long long count = pois(rng);
    if (count == 0) return 0.0;
    // a sum of N iid Gamma(shape, scale) is Gamma(N * shape, scale)
    std::gamma_distribution<double> gam(static_cast<double>(count) * shape, scale);
    return gam(rng);
}

Dataset simulate_dataset(const SimConfig& config) {
    config.validate();
    Rng rng(mix_seed(config.seed, 0x7EED));
    Dataset ds;
    ds.features = make_predictors(config, rng);
    const Vector mu = mean_function(ds.features, config.relationship);
    ds.outcome.resize(config.n);
    for (Index i = 0; i < config.n; ++i) ds.outcome[i] = sample_tweedie(mu[i], config.phi, config.xi, rng);
    for (Index c = 0; c < ds.features.cols(); ++c) ds.feature_names.push_back("x" + std::to_string(c + 1));
    ds.outcome_name = "y";
    return ds;
}

}  // namespace msreg
