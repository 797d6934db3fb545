#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "msreg/common.hpp"

namespace msreg {

/// Fold id in [0, folds) per row from a seeded permutation. Learners given the same seed
/// see the same folds.
std::vector<int> fold_assignment(Index n, int folds, std::uint64_t seed);

/// y_hat = intercept + x . coefficients
struct LinearModel {
    double intercept = 0.0;
    Vector coefficients;
    std::vector<std::string> feature_names;

    Vector predict(const Matrix& x) const;
    nlohmann::json to_json() const;
    static LinearModel from_json(const nlohmann::json& j);
};

// ---------------------------------------------------------------------------
// Elastic net: (1/2n)||y - b0 - X beta||^2 + lambda * (alpha ||beta||^2 + (1 - alpha) ||beta||_1)
// ---------------------------------------------------------------------------

struct ElasticNetOptions {
    double alpha = 0.5;                 // weight of the squared l2 term
    std::optional<double> lambda;       // fixed penalty; CV over the grid when empty
    int folds = 10;
    int n_lambda = 100;
    double lambda_min_ratio = 1e-4;     // grid spans four decades below lambda_max
    double tolerance = 1e-7;            // max absolute coefficient change per sweep
    int max_sweeps = 100000;
    std::uint64_t seed = 0;
};

struct ElasticNetFit {
    LinearModel model;
    double lambda = 0.0;
    std::vector<double> lambda_grid;  // empty when lambda was fixed
    std::vector<double> cv_error;
    int folds_used = 0;               // 0 when lambda was fixed
};

/// Smallest lambda with an all-zero solution; (max_j |x_j' (y - ybar)| / n) / (1 - alpha).
double elastic_net_lambda_max(const Matrix& x, const Vector& y, double alpha);
double elastic_net_objective(const Matrix& x, const Vector& y, double intercept, const Vector& beta, double alpha,
                             double lambda);

ElasticNetFit fit_elastic_net(const Matrix& x, const Vector& y, const ElasticNetOptions& options = {});

/// Objective value after every coordinate-descent sweep at a fixed lambda from beta = 0.
std::vector<double> elastic_net_sweep_objectives(const Matrix& x, const Vector& y, double alpha, double lambda,
                                                 int max_sweeps = 1000);

// ---------------------------------------------------------------------------
// LASSO homotopy path. Penalty on the unnormalized scale: at a breakpoint with
// penalty lambda, |x_j' r| = lambda on the active set and <= lambda elsewhere
// (x, y centered). This lambda equals n times the elastic-net lambda at alpha = 0.
// ---------------------------------------------------------------------------

enum class PathEvent { Start, Enter, Leave, End };

struct PathPoint {
    double lambda = 0.0;
    Vector coefficients;
    std::vector<Index> active;  // ascending
    PathEvent event = PathEvent::Start;
    Index variable = -1;        // entering / leaving variable
};

struct LassoOptions {
    bool cross_validate = true;
    int folds = 10;
    std::uint64_t seed = 0;
    double collinearity_tolerance = 1e-10;
};

struct LassoPath {
    std::vector<PathPoint> points;  // lambda strictly decreasing
    Index chosen = 0;
    std::vector<double> cv_error;   // per point, when cross-validated
    Vector x_mean;
    double y_mean = 0.0;
    std::vector<std::string> feature_names;
    std::vector<Index> excluded;    // dropped as exactly collinear with the active set
    bool collinear_warning = false;

    /// Linear interpolation between breakpoints; zero above the first, last point below the end.
    Vector coefficients_at(double lambda) const;
    double intercept_for(const Vector& coefficients) const;
    LinearModel model_at(Index point) const;
    LinearModel chosen_model() const { return model_at(chosen); }

    nlohmann::json to_json() const;
    static LassoPath from_json(const nlohmann::json& j);
};

LassoPath fit_lasso_homotopy(const Matrix& x, const Vector& y, const LassoOptions& options = {});

/// Max over breakpoints of the KKT violation: | |c_j| - lambda | on the active set and
/// max(0, |c_j| - lambda) off it, where c = X_c'(y_c - X_c beta).
double lasso_kkt_violation(const LassoPath& path, const Matrix& x, const Vector& y);

// ---------------------------------------------------------------------------
// Componentwise L2 boosting with univariate least-squares base learners.
// ---------------------------------------------------------------------------

struct BoostStep {
    Index feature;
    double coefficient;  // already multiplied by the step length
};

struct BoostedModel {
    double intercept = 0.0;  // mean(y)
    double nu = 0.1;
    std::vector<BoostStep> steps;
    Index input_columns = 0;
    bool interactions = false;
    std::vector<std::string> feature_names;  // model space (after expansion)

    /// Summed coefficient per model-space column.
    Vector aggregate() const;
    Vector predict(const Matrix& x) const;  // x in input space; expanded here when flagged
    nlohmann::json to_json() const;
    static BoostedModel from_json(const nlohmann::json& j);
};

BoostedModel fit_boosted_linear(const Matrix& x, const Vector& y, int m_stop = 500, double nu = 0.1,
                                bool with_interactions = false, const std::vector<std::string>& names = {});

/// Training MSE after each iteration (index 0 = intercept only).
std::vector<double> boosting_training_mse(const BoostedModel& model, const Matrix& x, const Vector& y);

}  // namespace msreg
