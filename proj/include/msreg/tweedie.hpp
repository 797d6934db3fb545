#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "msreg/common.hpp"
#include "msreg/dataset.hpp"

namespace msreg {

enum class Relationship { Linear, Nonlinear, Mixed };

Relationship relationship_from_name(const std::string& name);
std::string relationship_name(Relationship r);

/// One simulation cell: Tweedie power xi, dispersion phi, mean structure, size, seed.
struct SimConfig {
    double xi = 1.5;
    double phi = 1.0;
    Relationship relationship = Relationship::Linear;
    Index n = 10000;
    Index p_true = 4;
    Index p_noise = 11;
    std::uint64_t seed = 0;

    void validate() const;
    std::string cell_id() const;  // e.g. "linear_xi1.5_phi2"
    /// Includes the mean-function formulas and link so reports are self-describing.
    nlohmann::json to_json() const;
    static SimConfig from_json(const nlohmann::json& j);
};

/// n x (p_true + p_noise) i.i.d. standard normal.
Matrix make_predictors(const SimConfig& config, Rng& rng);

/// Linear predictor eta from the first four columns.
///   linear:    0.5 x1 + 0.4 x2 + 0.3 x3 + 0.2 x4
///   nonlinear: 0.5 sin(pi x1) + 0.4 x2^2 / 2 + 0.3 x3 x4 + 0.2 |x4|
///   mixed:     0.5 x1 + 0.4 x2 + 0.3 sin(pi x3) + 0.2 x3 x4
Vector linear_predictor(const Matrix& x, Relationship relationship);

/// mu = exp(eta) clipped to [1e-3, 1e3].
Vector mean_function(const Matrix& x, Relationship relationship);

/// One Tweedie draw with mean mu and variance phi * mu^xi, 1 <= xi <= 2.
///   xi = 1: phi * Poisson(mu / phi)
///   xi = 2: Gamma(shape 1/phi, scale phi mu)
///   otherwise compound Poisson-gamma: N ~ Poisson(mu^(2-xi) / (phi (2-xi))), sum of N
///   Gamma(shape (2-xi)/(xi-1), scale phi (xi-1) mu^(xi-1)) variables.
double sample_tweedie(double mu, double phi, double xi, Rng& rng);

/// Probability of an exact zero: exp(-mu^(2-xi) / (phi (2-xi))) for 1 < xi < 2,
/// exp(-mu/phi) for xi = 1, 0 for xi = 2.
double tweedie_zero_mass(double mu, double phi, double xi);

/// Features x1..x(p), outcome "y".
Dataset simulate_dataset(const SimConfig& config);

}  // namespace msreg
