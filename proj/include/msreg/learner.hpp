#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "msreg/common.hpp"
#include "msreg/elm.hpp"
#include "msreg/linear.hpp"
#include "msreg/tree.hpp"

namespace msreg {

/// Hyperparameters for every learner; each learner reads its own block.
struct LearnerConfig {
    double enet_alpha = 0.5;
    int cv_folds = 10;
    double ctree_alpha = 0.05;
    Index ctree_min_node = 7;
    int forest_trees = 500;
    Index forest_min_node = 5;
    Index forest_mtry = 0;     // 0: round(p / 3)
    Index elm_hidden = 0;      // 0: min(200, 2n/3) per fit
    Activation elm_activation = Activation::Sigmoid;
    int boost_m_stop = 500;
    double boost_nu = 0.1;
    Index min_viable = 0;      // 0: learner default
    int jobs = 1;

    nlohmann::json to_json() const;
    static LearnerConfig from_json(const nlohmann::json& j);
};

class FittedModel {
public:
    virtual ~FittedModel() = default;
    virtual Vector predict(const Matrix& x) const = 0;
    /// Carries a "type" tag understood by model_from_json.
    virtual nlohmann::json to_json() const = 0;
    /// Learner-defined interpretability payload on (x, y); {"type": "none"} when there is none.
    virtual nlohmann::json payload(const Matrix& x, const Vector& y, std::uint64_t seed) const = 0;
};

using ModelPtr = std::shared_ptr<const FittedModel>;

class Regressor {
public:
    virtual ~Regressor() = default;
    virtual std::string name() const = 0;
    /// Smallest partition this learner is fitted on inside a piecewise model.
    virtual Index min_viable() const = 0;
    virtual ModelPtr fit(const Matrix& x, const Vector& y, const std::vector<std::string>& names,
                         std::uint64_t seed) const = 0;
};

/// enet, lasso (homotopy path over pairwise interactions), boost (componentwise, with
/// interactions), ctree, forest, elm, mean.
const std::vector<std::string>& learner_names();
std::unique_ptr<Regressor> make_learner(const std::string& name, const LearnerConfig& config = {});
ModelPtr model_from_json(const nlohmann::json& j);

}  // namespace msreg
