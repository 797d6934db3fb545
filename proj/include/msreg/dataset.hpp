#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "msreg/common.hpp"

namespace msreg {

/// Tabular regression data: n rows of p predictors plus one outcome.
struct Dataset {
    Matrix features;
    Vector outcome;
    std::vector<std::string> feature_names;
    std::string outcome_name = "y";

    Index rows() const { return features.rows(); }
    Index cols() const { return features.cols(); }

    /// Throws DataError unless shapes agree, n >= 1, p >= 1, values finite and names unique.
    void validate() const;

    Dataset subset(const std::vector<Index>& rows) const;
};

/// Per-column centering and scaling fitted on one dataset and replayable on another.
struct ScalingParams {
    std::vector<std::string> names;  // retained columns, in output order
    std::vector<double> mean;
    std::vector<double> sd;          // strictly positive
    std::vector<std::string> dropped;

    /// Selects the retained columns of `ds` by name and scales them.
    Dataset apply(const Dataset& ds) const;
    Matrix apply(const Matrix& features, const std::vector<std::string>& feature_names) const;
    /// Inverse of apply on already-retained columns.
    Matrix unscale(const Matrix& scaled) const;

    nlohmann::json to_json() const;
    static ScalingParams from_json(const nlohmann::json& j);
};

/// Every other column is a feature. With outcome_required == false a missing outcome column
/// yields a zero outcome and an empty outcome_name.
Dataset load_csv(const std::filesystem::path& path, const std::string& outcome_column, bool outcome_required = true);
Dataset parse_csv(const std::string& text, const std::string& outcome_column, bool outcome_required = true);
void write_csv(const std::filesystem::path& path, const Dataset& ds);

/// Column means zero and sample sd (n - 1 denominator) one. Constant columns are dropped
/// and listed in ScalingParams::dropped. Throws DataError when every column is constant.
std::pair<Dataset, ScalingParams> standardize(const Dataset& ds);

struct SplitIndices {
    std::vector<Index> train;
    std::vector<Index> test;
};

/// Uniform random permutation; train gets round(n * train_fraction) rows.
SplitIndices split_indices(Index n, double train_fraction, std::uint64_t seed);
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double train_fraction, std::uint64_t seed);

/// Appends all pairwise products x_j * x_k (j < k), named "a:b".
Dataset expand_interactions(const Dataset& ds);
Matrix expand_interactions(const Matrix& x);
std::vector<std::string> interaction_names(const std::vector<std::string>& names);

}  // namespace msreg
