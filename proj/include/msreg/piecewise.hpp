#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msreg/dataset.hpp"
#include "msreg/learner.hpp"
#include "msreg/morse_smale.hpp"

namespace msreg {

/// One learner per Morse-Smale partition plus a global model fitted on all rows.
/// Partitions smaller than the learner's minimum viable size carry no model of their own
/// (models[label] == nullptr) and are predicted by the global model.
struct MsrModel {
    std::string learner;
    LearnerConfig learner_config;
    MsParams ms_params;
    std::uint64_t seed = 0;
    Matrix train_features;  // routing reference for assign_new
    std::vector<std::string> feature_names;
    Partitioning partitioning;
    std::vector<ModelPtr> models;
    ModelPtr global;

    bool is_fallback(Index label) const { return models[static_cast<std::size_t>(label)] == nullptr; }
    const FittedModel& model_for(Index label) const;
    std::vector<Index> route(const Matrix& x) const;
    Vector predict(const Matrix& x) const;

    nlohmann::json to_json() const;
    static MsrModel from_json(const nlohmann::json& j);
};

/// Seed used for the model of partition `label`. With a single partition the global model
/// is reused, so the piecewise model predicts exactly like the bare learner.
std::uint64_t partition_seed(std::uint64_t seed, Index label);

/// build_knn -> ... -> partition_at on train, then per-partition fits.
MsrModel fit_msr(const Dataset& train, const Regressor& learner, const MsParams& ms_params, std::uint64_t seed);

/// Same, with a partitioning computed elsewhere (shared across learners in a benchmark trial).
/// `global`, when given, must be learner.fit on all of `train` with `seed`; it is reused as is.
MsrModel fit_msr(const Dataset& train, const Regressor& learner, const MsParams& ms_params, std::uint64_t seed,
                 const Partitioning& partitioning, ModelPtr global = nullptr);

Vector predict_msr(const MsrModel& model, const Matrix& x);

/// Top two principal-component scores of each row of `x` (centered at the column means of
/// `reference`). Component signs are fixed so the largest-magnitude loading is positive.
Matrix pca_2d(const Matrix& reference, const Matrix& x);

/// {"schema_version", "learner", "n", "partition_count", "partitions": [{label, size,
/// fallback, outcome_stats, payload_type, payload, extrema}]}
nlohmann::json partition_report(const MsrModel& model, const Dataset& train);

/// Flattens coefficient and importance payloads: partition,payload_type,feature,value,rank.
void write_report_csv(const std::filesystem::path& path, const nlohmann::json& report);

}  // namespace msreg
