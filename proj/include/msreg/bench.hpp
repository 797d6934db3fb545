#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "msreg/dataset.hpp"
#include "msreg/learner.hpp"
#include "msreg/morse_smale.hpp"
#include "msreg/tweedie.hpp"

namespace msreg {

/// MSR, TR, MSTR, RF, MSRF, ELM, MSELM, BR, MSBR, LH, MSLH, MEAN.
const std::vector<std::string>& algorithm_names();

struct AlgorithmSpec {
    std::string learner;  // learner_names() entry
    bool morse_smale = false;
};

/// Throws std::invalid_argument listing the valid names.
AlgorithmSpec algorithm_spec(const std::string& algorithm);

/// Mean of squared differences.
double mse(const Vector& predictions, const Vector& truth);

struct BenchOptions {
    LearnerConfig learner;
    MsParams ms;
    double train_fraction = 0.7;
    bool single_partition = false;  // force one partition for every MS variant
    int jobs = 1;                   // trials in flight

    nlohmann::json to_json() const;
};

struct AlgorithmResult {
    std::string algorithm;
    bool ok = false;
    std::string error;
    double mse = 0.0;
    double fit_seconds = 0.0;
    std::vector<Index> partition_sizes;  // MS variants
    Index fallback_partitions = 0;
};

struct TrialResult {
    std::string cell;
    int trial = 0;
    std::uint64_t seed = 0;
    Index n_train = 0;
    Index n_test = 0;
    std::vector<AlgorithmResult> results;
    std::string error;  // trial-level failure (data generation, split)

    const AlgorithmResult* find(const std::string& algorithm) const;
    nlohmann::json to_json() const;  // fit times excluded so reports are reproducible
};

/// One 70/30 split (seeded), standardization fitted on train and applied to test, every
/// algorithm fitted on train and scored on test. The Morse-Smale partitioning is computed
/// once and shared by all MS variants; learner CV folds derive from the same seed.
/// Algorithm failures are recorded, not thrown.
TrialResult run_trial(const Dataset& data, const std::vector<std::string>& algorithms, std::uint64_t seed,
                      const BenchOptions& options = {});
TrialResult run_trial(const SimConfig& config, const std::vector<std::string>& algorithms,
                      const BenchOptions& options = {});

struct AlgorithmSummary {
    std::string algorithm;
    double mean_mse = 0.0;
    double sd_mse = 0.0;
    Index trials_ok = 0;
    std::vector<std::string> failures;
    double mean_fit_seconds = 0.0;
    bool degenerate = false;  // mean MSE above 3x the MEAN baseline
};

struct CellSummary {
    std::string cell;
    nlohmann::json config;
    std::vector<TrialResult> trials;
    std::vector<AlgorithmSummary> algorithms;

    const AlgorithmSummary* find(const std::string& algorithm) const;
};

struct BenchReport {
    std::vector<std::string> algorithms;
    std::uint64_t base_seed = 0;
    int trials_per_cell = 0;
    nlohmann::json options;
    std::vector<CellSummary> cells;

    const CellSummary* find(const std::string& cell) const;
    nlohmann::json to_json() const;
    /// cell,algorithm,mean_mse,sd_mse,mean_fit_seconds
    void write_csv(const std::filesystem::path& path) const;
    /// cell,trial,algorithm,partition,size
    void write_partition_csv(const std::filesystem::path& path) const;
};

CellSummary summarize_cell(std::string cell, nlohmann::json config, std::vector<TrialResult> trials,
                           const std::vector<std::string>& algorithms);

/// Trial t of every cell uses seed base_seed + t (data generation, split, folds, learners).
/// Trials run on options.jobs threads; results do not depend on the thread count.
BenchReport run_benchmark(const std::vector<SimConfig>& grid, int trials_per_cell,
                          const std::vector<std::string>& algorithms, std::uint64_t base_seed,
                          const BenchOptions& options = {});

/// Trials on a fixed dataset (re-split per trial), reported as a single cell.
BenchReport run_dataset_benchmark(const Dataset& data, const std::string& cell, int trials,
                                  const std::vector<std::string>& algorithms, std::uint64_t base_seed,
                                  const BenchOptions& options = {});

/// 3 relationships x xi in {1, 1.5, 2} x phi in {1, 2, 4}.
std::vector<SimConfig> simulation_grid(Index n);

}  // namespace msreg
