#include "msreg/learner.hpp"

#include <algorithm>
#include <cmath>

#include "msreg/dataset.hpp"

namespace msreg {

nlohmann::json LearnerConfig::to_json() const {
    return {{"enet_alpha", enet_alpha},         {"cv_folds", cv_folds},
            {"ctree_alpha", ctree_alpha},       {"ctree_min_node", ctree_min_node},
            {"forest_trees", forest_trees},     {"forest_min_node", forest_min_node},
            {"forest_mtry", forest_mtry},       {"elm_hidden", elm_hidden},
            {"elm_activation", activation_name(elm_activation)},
            {"boost_m_stop", boost_m_stop},     {"boost_nu", boost_nu},
            {"min_viable", min_viable}};
}

LearnerConfig LearnerConfig::from_json(const nlohmann::json& j) {
    LearnerConfig c;
    c.enet_alpha = j.value("enet_alpha", c.enet_alpha);
    c.cv_folds = j.value("cv_folds", c.cv_folds);
    c.ctree_alpha = j.value("ctree_alpha", c.ctree_alpha);
    c.ctree_min_node = j.value("ctree_min_node", c.ctree_min_node);
    c.forest_trees = j.value("forest_trees", c.forest_trees);
    c.forest_min_node = j.value("forest_min_node", c.forest_min_node);
    c.forest_mtry = j.value("forest_mtry", c.forest_mtry);
    c.elm_hidden = j.value("elm_hidden", c.elm_hidden);
    c.elm_activation = activation_from_name(j.value("elm_activation", std::string("sigmoid")));
    c.boost_m_stop = j.value("boost_m_stop", c.boost_m_stop);
    c.boost_nu = j.value("boost_nu", c.boost_nu);
    c.min_viable = j.value("min_viable", c.min_viable);
    return c;
}

namespace {

std::vector<std::string> default_names(Index p) {
    std::vector<std::string> names;
    for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
    return names;
}

nlohmann::json coefficient_payload(double intercept, const Vector& coef, const std::vector<std::string>& names) {
    nlohmann::json c = nlohmann::json::array();
    for (Index j = 0; j < coef.size(); ++j)
        c.push_back({{"feature", j < static_cast<Index>(names.size()) ? names[static_cast<std::size_t>(j)]
                                                                      : "x" + std::to_string(j + 1)},
                     {"value", coef[j]}});
    return {{"type", "coefficients"}, {"intercept", intercept}, {"coefficients", c}};
}

// --- mean -------------------------------------------------------------------

class MeanModel final : public FittedModel {
public:
    explicit MeanModel(double v) : value_(v) {}
    Vector predict(const Matrix& x) const override { return Vector::Constant(x.rows(), value_); }
    nlohmann::json to_json() const override { return {{"type", "mean"}, {"value", value_}}; }
    nlohmann::json payload(const Matrix&, const Vector&, std::uint64_t) const override {
        return {{"type", "mean"}, {"value", value_}};
    }

private:
    double value_;
};

class MeanLearner final : public Regressor {
public:
    explicit MeanLearner(const LearnerConfig& c) : c_(c) {}
    std::string name() const override { return "mean"; }
    Index min_viable() const override { return c_.min_viable > 0 ? c_.min_viable : 1; }
    ModelPtr fit(const Matrix&, const Vector& y, const std::vector<std::string>&, std::uint64_t) const override {
        if (y.size() == 0) throw DataError("mean model needs at least one row");
        return std::make_shared<MeanModel>(y.mean());
    }

private:
    LearnerConfig c_;
};

// --- linear (elastic net, interaction LASSO) -----------------------------------

class LinearFitted final : public FittedModel {
public:
    LinearFitted(LinearModel m, std::string type, bool interactions, Index input_columns, nlohmann::json extra)
        : m_(std::move(m)), type_(std::move(type)), interactions_(interactions), input_columns_(input_columns),
          extra_(std::move(extra)) {}

    Vector predict(const Matrix& x) const override {
        if (x.cols() != input_columns_) throw DataError(type_ + ": column count mismatch");
        return interactions_ ? m_.predict(expand_interactions(x)) : m_.predict(x);
    }
    nlohmann::json to_json() const override {
        nlohmann::json j = m_.to_json();
        j["type"] = type_;
        j["interactions"] = interactions_;
        j["input_columns"] = input_columns_;
        j["fit"] = extra_;
        return j;
    }
    nlohmann::json payload(const Matrix&, const Vector&, std::uint64_t) const override {
        return coefficient_payload(m_.intercept, m_.coefficients, m_.feature_names);
    }

private:
    LinearModel m_;
    std::string type_;
    bool interactions_;
    Index input_columns_;
    nlohmann::json extra_;
};

class ElasticNetLearner final : public Regressor {
public:
    explicit ElasticNetLearner(const LearnerConfig& c) : c_(c) {}
    std::string name() const override { return "enet"; }
    Index min_viable() const override { return c_.min_viable > 0 ? c_.min_viable : 30; }
    ModelPtr fit(const Matrix& x, const Vector& y, const std::vector<std::string>& names,
                 std::uint64_t seed) const override {
        ElasticNetOptions o;
        o.alpha = c_.enet_alpha;
        o.folds = c_.cv_folds;
        o.seed = seed;
        ElasticNetFit f = fit_elastic_net(x, y, o);
        f.model.feature_names = names.empty() ? default_names(x.cols()) : names;
        return std::make_shared<LinearFitted>(f.model, "enet", false, x.cols(),
                                              nlohmann::json{{"lambda", f.lambda}, {"alpha", o.alpha},
                                                             {"folds_used", f.folds_used}});
    }

private:
    LearnerConfig c_;
};

// Pairwise interactions are added, every model column is scaled to unit sd inside the fit
// and the chosen path point is mapped back to the unscaled expanded columns.
class LassoLearner final : public Regressor {
public:
    explicit LassoLearner(const LearnerConfig& c) : c_(c) {}
    std::string name() const override { return "lasso"; }
    Index min_viable() const override { return c_.min_viable > 0 ? c_.min_viable : 30; }
    ModelPtr fit(const Matrix& x, const Vector& y, const std::vector<std::string>& names,
                 std::uint64_t seed) const override {
        const auto base = names.empty() ? default_names(x.cols()) : names;
        const Matrix z = expand_interactions(x);
        const Index q = z.cols();
        const Vector mean = z.colwise().mean().transpose();
        Vector scale(q);
        const double denom = std::max<double>(1.0, static_cast<double>(z.rows() - 1));
        for (Index j = 0; j < q; ++j) {
            const double sd = std::sqrt((z.col(j).array() - mean[j]).square().sum() / denom);
            scale[j] = sd > 0.0 ? sd : 1.0;
        }
        Matrix zs = (z.rowwise() - mean.transpose());
        zs.array().rowwise() /= scale.transpose().array();
        LassoOptions o;
        o.folds = c_.cv_folds;
        o.seed = seed;
        const LassoPath path = fit_lasso_homotopy(zs, y, o);
        const LinearModel scaled = path.chosen_model();
        LinearModel m;
        m.coefficients = scaled.coefficients.array() / scale.array();
        m.intercept = scaled.intercept - mean.dot(m.coefficients);
        m.feature_names = interaction_names(base);
        const PathPoint& chosen = path.points[static_cast<std::size_t>(path.chosen)];
        nlohmann::json extra = {{"lambda", chosen.lambda},
                                {"breakpoints", path.points.size()},
                                {"active", chosen.active.size()},
                                {"collinear_warning", path.collinear_warning}};
        return std::make_shared<LinearFitted>(std::move(m), "lasso", true, x.cols(), std::move(extra));
    }

private:
    LearnerConfig c_;
};

// --- boosting -------------------------------------------------------------------

class BoostFitted final : public FittedModel {
public:
    explicit BoostFitted(BoostedModel m) : m_(std::move(m)) {}
    Vector predict(const Matrix& x) const override { return m_.predict(x); }
    nlohmann::json to_json() const override {
        nlohmann::json j = m_.to_json();
        j["type"] = "boost";
        return j;
    }
    nlohmann::json payload(const Matrix&, const Vector&, std::uint64_t) const override {
        return coefficient_payload(m_.intercept, m_.aggregate(), m_.feature_names);
    }

private:
    BoostedModel m_;
};

class BoostLearner final : public Regressor {
public:
    explicit BoostLearner(const LearnerConfig& c) : c_(c) {}
    std::string name() const override { return "boost"; }
    Index min_viable() const override { return c_.min_viable > 0 ? c_.min_viable : 30; }
    ModelPtr fit(const Matrix& x, const Vector& y, const std::vector<std::string>& names,
                 std::uint64_t) const override {
        const auto base = names.empty() ? default_names(x.cols()) : names;
        return std::make_shared<BoostFitted>(fit_boosted_linear(x, y, c_.boost_m_stop, c_.boost_nu, true, base));
    }

private:
    LearnerConfig c_;
};

// --- trees ------------------------------------------------------------------------

class TreeFitted final : public FittedModel {
public:
    TreeFitted(Tree t, std::vector<std::string> names) : t_(std::move(t)), names_(std::move(names)) {}
    Vector predict(const Matrix& x) const override { return t_.predict(x); }
    nlohmann::json to_json() const override {
        nlohmann::json j = t_.to_json();
        j["type"] = "ctree";
        j["feature_names"] = names_;
        return j;
    }
    nlohmann::json payload(const Matrix&, const Vector&, std::uint64_t) const override {
        nlohmann::json nodes = nlohmann::json::array();
        for (std::size_t i = 0; i < t_.nodes.size(); ++i) {
            const TreeNode& n = t_.nodes[i];
            nlohmann::json node = {{"id", i}, {"count", n.count}, {"value", n.value}};
            if (n.feature >= 0) {
                node["feature"] = names_[static_cast<std::size_t>(n.feature)];
                node["threshold"] = n.threshold;
                node["left"] = n.left;
                node["right"] = n.right;
                node["p_value"] = n.p_value;
            }
            nodes.push_back(std::move(node));
        }
        return {{"type", "splits"}, {"leaves", t_.leaf_count()}, {"depth", t_.depth()}, {"nodes", nodes}};
    }

private:
    Tree t_;
    std::vector<std::string> names_;
};

class CtreeLearner final : public Regressor {
public:
    explicit CtreeLearner(const LearnerConfig& c) : c_(c) {}
    std::string name() const override { return "ctree"; }
    Index min_viable() const override { return c_.min_viable > 0 ? c_.min_viable : 50; }
    ModelPtr fit(const Matrix& x, const Vector& y, const std::vector<std::string>& names,
                 std::uint64_t) const override {
        return std::make_shared<TreeFitted>(fit_ctree(x, y, {c_.ctree_alpha, c_.ctree_min_node}),
                                            names.empty() ? default_names(x.cols()) : names);
    }

private:
    LearnerConfig c_;
};

class ForestFitted final : public FittedModel {
public:
    ForestFitted(Forest f, std::vector<std::string> names) : f_(std::move(f)), names_(std::move(names)) {}
    Vector predict(const Matrix& x) const override { return f_.predict(x); }
    nlohmann::json to_json() const override {
        nlohmann::json j = f_.to_json();
        j["feature_names"] = names_;
        return j;
    }
    nlohmann::json payload(const Matrix& x, const Vector& y, std::uint64_t seed) const override {
        return {{"type", "importance"}, {"features", permutation_importance(f_, x, y, seed, names_).to_json()}};
    }

private:
    Forest f_;
    std::vector<std::string> names_;
};

class ForestLearner final : public Regressor {
public:
    explicit ForestLearner(const LearnerConfig& c) : c_(c) {}
    std::string name() const override { return "forest"; }
    Index min_viable() const override { return c_.min_viable > 0 ? c_.min_viable : 50; }
    ModelPtr fit(const Matrix& x, const Vector& y, const std::vector<std::string>& names,
                 std::uint64_t seed) const override {
        ForestOptions o;
        o.n_trees = c_.forest_trees;
        o.min_node = c_.forest_min_node;
        if (c_.forest_mtry > 0) {
            o.mtry_policy = MtryPolicy::Fixed;
            o.mtry = c_.forest_mtry;
        }
        o.seed = seed;
        o.jobs = c_.jobs;
        return std::make_shared<ForestFitted>(fit_random_forest(x, y, o),
                                              names.empty() ? default_names(x.cols()) : names);
    }

private:
    LearnerConfig c_;
};

// --- ELM --------------------------------------------------------------------------

class ElmFitted final : public FittedModel {
public:
    explicit ElmFitted(ElmModel m) : m_(std::move(m)) {}
    Vector predict(const Matrix& x) const override { return m_.predict(x); }
    nlohmann::json to_json() const override { return m_.to_json(); }
    nlohmann::json payload(const Matrix&, const Vector&, std::uint64_t) const override {
        return {{"type", "none"}};
    }

private:
    ElmModel m_;
};

class ElmLearner final : public Regressor {
public:
    explicit ElmLearner(const LearnerConfig& c) : c_(c) {}
    std::string name() const override { return "elm"; }
    Index min_viable() const override {
        if (c_.min_viable > 0) return c_.min_viable;
        return std::max<Index>(50, c_.elm_hidden);
    }
    ModelPtr fit(const Matrix& x, const Vector& y, const std::vector<std::string>&,
                 std::uint64_t seed) const override {
        Index hidden = c_.elm_hidden > 0 ? std::min(c_.elm_hidden, x.rows()) : default_hidden_nodes(x.rows());
        return std::make_shared<ElmFitted>(fit_elm(x, y, hidden, c_.elm_activation, seed));
    }

private:
    LearnerConfig c_;
};

}  // namespace

const std::vector<std::string>& learner_names() {
    static const std::vector<std::string> names = {"enet", "lasso", "boost", "ctree", "forest", "elm", "mean"};
    return names;
}

std::unique_ptr<Regressor> make_learner(const std::string& name, const LearnerConfig& config) {
    if (name == "enet") return std::make_unique<ElasticNetLearner>(config);
    if (name == "lasso") return std::make_unique<LassoLearner>(config);
    if (name == "boost") return std::make_unique<BoostLearner>(config);
    if (name == "ctree") return std::make_unique<CtreeLearner>(config);
    if (name == "forest") return std::make_unique<ForestLearner>(config);
    if (name == "elm") return std::make_unique<ElmLearner>(config);
    if (name == "mean") return std::make_unique<MeanLearner>(config);
    std::string valid;
    for (const auto& n : learner_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown learner '" + name + "' (valid: " + valid + ")");
}

ModelPtr model_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "mean") return std::make_shared<MeanModel>(j.at("value").get<double>());
    if (type == "enet" || type == "lasso")
        return std::make_shared<LinearFitted>(LinearModel::from_json(j), type, j.at("interactions").get<bool>(),
                                              j.at("input_columns").get<Index>(), j.value("fit", nlohmann::json::object()));
    if (type == "boost") return std::make_shared<BoostFitted>(BoostedModel::from_json(j));
    if (type == "ctree")
        return std::make_shared<TreeFitted>(Tree::from_json(j), j.at("feature_names").get<std::vector<std::string>>());
    if (type == "forest")
        return std::make_shared<ForestFitted>(Forest::from_json(j),
                                              j.at("feature_names").get<std::vector<std::string>>());
    if (type == "elm") return std::make_shared<ElmFitted>(ElmModel::from_json(j));
    throw DataError("unknown model type '" + type + "'");
}

}  // namespace msreg
