#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "msreg/dataset.hpp"
#include "msreg/learner.hpp"
#include "msreg/morse_smale.hpp"
#include "msreg/piecewise.hpp"

namespace msreg {

/// A fitted algorithm (one of algorithm_names()) together with the standardization it was
/// trained under. Bare algorithms are held as a single-partition piecewise model.
struct Pipeline {
    std::string algorithm;
    std::string outcome;
    ScalingParams scaling;
    MsrModel model;

    bool morse_smale() const;
    /// Selects and scales the training feature columns of `raw` by name.
    Vector predict(const Dataset& raw) const;
    /// partition_report on `raw` (the training data for piecewise models).
    nlohmann::json report(const Dataset& raw) const;

    /// Bare algorithms serialize only their learner's model under "model".
    nlohmann::json to_json() const;
    static Pipeline from_json(const nlohmann::json& j);
};

Pipeline fit_pipeline(const Dataset& raw, const std::string& algorithm, const LearnerConfig& learner,
                      const MsParams& ms, std::uint64_t seed, bool single_partition_override = false);

}  // namespace msreg
