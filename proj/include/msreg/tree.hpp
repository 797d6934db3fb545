#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "msreg/common.hpp"

namespace msreg {

/// Internal nodes route x[feature] <= threshold to `left`. Leaves have feature == -1.
struct TreeNode {
    Index feature = -1;
    double threshold = 0.0;
    Index left = -1;
    Index right = -1;
    double value = 0.0;  // mean of routed training outcomes
    Index count = 0;
    double p_value = 1.0;  // adjusted p-value of the node test (conditional inference trees)
};

struct TreeGrowth {
    std::string kind = "cart";  // "ctree" or "cart"
    double alpha = 0.0;
    Index min_node = 5;
    Index mtry = 0;
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    Index input_columns = 0;
    TreeGrowth growth;

    Index leaf_of(const Matrix& x, Index row, Index swap_feature = -1, double swap_value = 0.0) const;
    double predict_row(const Matrix& x, Index row, Index swap_feature = -1, double swap_value = 0.0) const {
        return nodes[static_cast<std::size_t>(leaf_of(x, row, swap_feature, swap_value))].value;
    }
    Vector predict(const Matrix& x) const;
    bool uses_feature(Index feature) const;
    Index leaf_count() const;
    Index depth() const;

    nlohmann::json to_json() const;
    static Tree from_json(const nlohmann::json& j);
};

struct CtreeOptions {
    double alpha = 0.05;
    Index min_node = 7;
};

/// Statistically gated recursive partitioning. At each node every feature is tested for
/// linear association with the outcome (Pearson t statistic, two-sided); p-values are
/// Bonferroni-adjusted across features. The node becomes a leaf when no adjusted p-value is
/// at most alpha or it holds fewer than 2 * min_node rows; otherwise the most significant
/// feature is split at the squared-error-optimal midpoint leaving at least min_node rows per side.
Tree fit_ctree(const Matrix& x, const Vector& y, const CtreeOptions& options = {});

/// Bonferroni-adjusted two-sided p-value of the correlation test for each column of `x`.
std::vector<double> ctree_node_pvalues(const Matrix& x, const Vector& y);

/// Least-squares regression tree on the given rows; nodes with fewer than min_node rows are
/// leaves; each split considers `mtry` features drawn without replacement from `rng`
/// (all features when mtry >= p).
Tree fit_regression_tree(const Matrix& x, const Vector& y, const std::vector<Index>& rows, Index min_node, Index mtry,
                         Rng& rng);

enum class MtryPolicy { Third, All, Fixed };

struct ForestOptions {
    int n_trees = 500;
    MtryPolicy mtry_policy = MtryPolicy::Third;
    Index mtry = 0;  // used with MtryPolicy::Fixed
    Index min_node = 5;
    bool bootstrap = true;  // false: every tree sees the rows as given
    std::uint64_t seed = 0;
    int jobs = 1;
};

/// max(1, round(p / 3)) for Third.
Index resolve_mtry(Index p, const ForestOptions& options);

struct Forest {
    std::vector<Tree> trees;
    std::vector<std::vector<Index>> oob;  // per tree, rows not drawn into its bootstrap sample
    Index mtry = 0;
    Index input_columns = 0;

    Vector predict(const Matrix& x) const;
    nlohmann::json to_json() const;
    static Forest from_json(const nlohmann::json& j);
};

/// Trees use RNG streams derived from (seed, tree index), so results do not depend on `jobs`.
Forest fit_random_forest(const Matrix& x, const Vector& y, const ForestOptions& options = {});

struct ImportanceReport {
    std::vector<std::string> feature_names;
    std::vector<double> importance;  // mean OOB squared-error increase under permutation
    std::vector<Index> rank;         // 1 = most important

    nlohmann::json to_json() const;
    void write_csv(const std::filesystem::path& path) const;
};

/// For each tree and feature, permutes the feature among the tree's OOB rows and records the
/// increase in OOB mean squared error; averages over trees with non-empty OOB sets.
ImportanceReport permutation_importance(const Forest& forest, const Matrix& x, const Vector& y, std::uint64_t seed,
                                        const std::vector<std::string>& names = {});

/// Ranks by descending score; ties keep the lower index first.
std::vector<Index> rank_descending(const std::vector<double>& scores);

}  // namespace msreg
