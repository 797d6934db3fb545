#include "msreg/pipeline.hpp"

#include "msreg/bench.hpp"

namespace msreg {

bool Pipeline::morse_smale() const { return algorithm_spec(algorithm).morse_smale; }

Vector Pipeline::predict(const Dataset& raw) const {
    return model.predict(scaling.apply(raw.features, raw.feature_names));
}

nlohmann::json Pipeline::report(const Dataset& raw) const {
    Dataset scaled = scaling.apply(raw);
    if (morse_smale()) return partition_report(model, scaled);
    MsrModel single = model;
    single.partitioning = single_partition(scaled.outcome);
    single.train_features = scaled.features;
    return partition_report(single, scaled);
}

nlohmann::json Pipeline::to_json() const {
    return {{"schema_version", 1},
            {"algorithm", algorithm},
            {"outcome", outcome},
            {"scaling", scaling.to_json()},
            {"model", morse_smale() ? model.to_json() : model.global->to_json()}};
}

Pipeline Pipeline::from_json(const nlohmann::json& j) {
    Pipeline p;
    p.algorithm = j.at("algorithm").get<std::string>();
    p.outcome = j.at("outcome").get<std::string>();
    p.scaling = ScalingParams::from_json(j.at("scaling"));
    if (p.morse_smale()) {
        p.model = MsrModel::from_json(j.at("model"));
    } else {
        p.model.learner = algorithm_spec(p.algorithm).learner;
        p.model.feature_names = p.scaling.names;
        p.model.global = model_from_json(j.at("model"));
        p.model.models = {p.model.global};
        p.model.partitioning.labels.clear();
        p.model.partitioning.count = 1;
        p.model.train_features = Matrix(0, static_cast<Index>(p.scaling.names.size()));
    }
    return p;
}

Pipeline fit_pipeline(const Dataset& raw, const std::string& algorithm, const LearnerConfig& learner,
                      const MsParams& ms, std::uint64_t seed, bool single_partition_override) {
    const AlgorithmSpec spec = algorithm_spec(algorithm);
    raw.validate();
    auto [train, scaling] = standardize(raw);
    const auto reg = make_learner(spec.learner, learner);
    Pipeline p;
    p.algorithm = algorithm;
    p.outcome = raw.outcome_name;
    p.scaling = std::move(scaling);
    if (spec.morse_smale && !single_partition_override) {
        MsParams params = ms;
        params.policy.seed = seed;
        p.model = fit_msr(train, *reg, params, seed);
    } else {
        p.model = fit_msr(train, *reg, ms, seed, single_partition(train.outcome));
    }
    p.model.learner_config = learner;
    return p;
}

}  // namespace msreg
