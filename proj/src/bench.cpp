#include "msreg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <thread>

#include "msreg/piecewise.hpp"

namespace msreg {

namespace {

const std::vector<std::pair<std::string, AlgorithmSpec>>& algorithm_table() {
    static const std::vector<std::pair<std::string, AlgorithmSpec>> table = {
        {"MSR", {"enet", true}},   {"TR", {"ctree", false}},  {"MSTR", {"ctree", true}},
        {"RF", {"forest", false}}, {"MSRF", {"forest", true}}, {"ELM", {"elm", false}},
        {"MSELM", {"elm", true}},  {"BR", {"boost", false}},  {"MSBR", {"boost", true}},
        {"LH", {"lasso", false}},  {"MSLH", {"lasso", true}}, {"MEAN", {"mean", false}},
    };
    return table;
}

AlgorithmResult failed(const std::string& algorithm, const std::string& why) {
    AlgorithmResult r;
    r.algorithm = algorithm;
    r.error = why;
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, spec] : algorithm_table()) v.push_back(name);
        return v;
    }();
    return names;
}

AlgorithmSpec algorithm_spec(const std::string& algorithm) {
    for (const auto& [name, spec] : algorithm_table())
        if (name == algorithm) return spec;
    std::string valid;
    for (const auto& n : algorithm_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown algorithm '" + algorithm + "' (valid: " + valid + ")");
}

double mse(const Vector& predictions, const Vector& truth) {
    if (predictions.size() != truth.size()) throw DataError("mse: length mismatch");
    require(truth.size() >= 1, "mse needs at least one value");
    return (predictions - truth).squaredNorm() / static_cast<double>(truth.size());
}

nlohmann::json BenchOptions::to_json() const {
    return {{"learner", learner.to_json()},
            {"ms", ms.to_json()},
            {"train_fraction", train_fraction},
            {"single_partition", single_partition}};
}

const AlgorithmResult* TrialResult::find(const std::string& algorithm) const {
    for (const auto& r : results)
        if (r.algorithm == algorithm) return &r;
    return nullptr;
}

nlohmann::json TrialResult::to_json() const {
    nlohmann::json algos = nlohmann::json::object();
    for (const auto& r : results) {
        nlohmann::json a = {{"ok", r.ok}};
        if (r.ok) a["mse"] = r.mse;
        else a["error"] = r.error;
        if (algorithm_spec(r.algorithm).morse_smale && r.ok) {
            a["partition_sizes"] = r.partition_sizes;
            a["fallback_partitions"] = r.fallback_partitions;
        }
        algos[r.algorithm] = std::move(a);
    }
    nlohmann::json j = {{"trial", trial}, {"seed", seed}, {"n_train", n_train}, {"n_test", n_test}, {"algorithms", algos}};
    if (!error.empty()) j["error"] = error;
    return j;
}

TrialResult run_trial(const Dataset& data, const std::vector<std::string>& algorithms, std::uint64_t seed,
                      const BenchOptions& options) {
    std::vector<AlgorithmSpec> specs;
    for (const auto& a : algorithms) specs.push_back(algorithm_spec(a));

    TrialResult trial;
    trial.seed = seed;
    auto fail_all = [&](const std::string& why) {
        trial.error = why;
        for (const auto& a : algorithms) trial.results.push_back(failed(a, why));
        return trial;
    };

    Dataset train, test;
    try {
        data.validate();
        const SplitIndices split = split_indices(data.rows(), options.train_fraction, seed);
        auto [train_s, scaling] = standardize(data.subset(split.train));
        train = std::move(train_s);
        test = scaling.apply(data.subset(split.test));
    } catch (const std::exception& e) {
        return fail_all(std::string("split/standardize: ") + e.what());
    }
    trial.n_train = train.rows();
    trial.n_test = test.rows();

    // one partitioning shared by every Morse-Smale variant
    std::optional<Partitioning> partitioning;
    std::string partition_error;
    double partition_seconds = 0.0;
    if (std::any_of(specs.begin(), specs.end(), [](const AlgorithmSpec& s) { return s.morse_smale; })) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (options.single_partition) {
                partitioning = single_partition(train.outcome);
            } else {
                MsParams ms = options.ms;
                ms.policy.seed = seed;
                partitioning = fit_morse_smale(train.features, train.outcome, ms).partitioning;
            }
        } catch (const std::exception& e) {
            partition_error = std::string("morse-smale partitioning: ") + e.what();
        }
        partition_seconds = seconds_since(t0);
    }

    // the bare fit doubles as the global fallback of the matching MS variant
    std::map<std::string, std::pair<ModelPtr, double>> bare;
    auto bare_fit = [&](const Regressor& learner) {
        auto it = bare.find(learner.name());
        if (it != bare.end()) return it->second;
        const auto t0 = std::chrono::steady_clock::now();
        ModelPtr m = learner.fit(train.features, train.outcome, train.feature_names, seed);
        return bare[learner.name()] = {std::move(m), seconds_since(t0)};
    };

    for (std::size_t i = 0; i < algorithms.size(); ++i) {
        AlgorithmResult r;
        r.algorithm = algorithms[i];
        const AlgorithmSpec& spec = specs[i];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto learner = make_learner(spec.learner, options.learner);
            Vector pred;
            if (spec.morse_smale) {
                if (!partitioning) throw std::runtime_error(partition_error);
                const auto [global, global_seconds] = bare_fit(*learner);
                const auto t1 = std::chrono::steady_clock::now();
                const MsrModel m = fit_msr(train, *learner, options.ms, seed, *partitioning, global);
                r.fit_seconds = seconds_since(t1) + global_seconds + partition_seconds;
                pred = m.predict(test.features);
                r.partition_sizes = partitioning->sizes();
                for (Index l = 0; l < partitioning->count; ++l) r.fallback_partitions += m.is_fallback(l) ? 1 : 0;
            } else {
                const auto [m, seconds] = bare_fit(*learner);
                r.fit_seconds = seconds;
                pred = m->predict(test.features);
            }
            r.mse = mse(pred, test.outcome);
            if (!std::isfinite(r.mse)) throw std::runtime_error("non-finite test MSE");
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
            r.fit_seconds = seconds_since(t0);
        }
        trial.results.push_back(std::move(r));
    }
    return trial;
}

TrialResult run_trial(const SimConfig& config, const std::vector<std::string>& algorithms,
                      const BenchOptions& options) {
    for (const auto& a : algorithms) algorithm_spec(a);
    Dataset data;
    try {
        data = simulate_dataset(config);
    } catch (const std::exception& e) {
        TrialResult t;
        t.cell = config.cell_id();
        t.seed = config.seed;
        t.error = std::string("simulate: ") + e.what();
        for (const auto& a : algorithms) t.results.push_back(failed(a, t.error));
        return t;
    }
    TrialResult t = run_trial(data, algorithms, config.seed, options);
    t.cell = config.cell_id();
    return t;
}

const AlgorithmSummary* CellSummary::find(const std::string& algorithm) const {
    for (const auto& a : algorithms)
        if (a.algorithm == algorithm) return &a;
    return nullptr;
}

CellSummary summarize_cell(std::string cell, nlohmann::json config, std::vector<TrialResult> trials,
                           const std::vector<std::string>& algorithms) {
    CellSummary c;
    c.cell = std::move(cell);
    c.config = std::move(config);
    c.trials = std::move(trials);
    for (const auto& name : algorithms) {
        AlgorithmSummary s;
        s.algorithm = name;
        std::vector<double> values;
        double seconds = 0.0;
        for (const auto& t : c.trials) {
            const AlgorithmResult* r = t.find(name);
            if (r == nullptr) continue;
            seconds += r->fit_seconds;
            if (r->ok) values.push_back(r->mse);
            else s.failures.push_back("trial " + std::to_string(t.trial) + ": " + r->error);
        }
        s.trials_ok = static_cast<Index>(values.size());
        if (!values.empty()) {
            double sum = 0.0;
            for (double v : values) sum += v;
            s.mean_mse = sum / static_cast<double>(values.size());
            double ss = 0.0;
            for (double v : values) ss += (v - s.mean_mse) * (v - s.mean_mse);
            s.sd_mse = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
        }
        if (!c.trials.empty()) s.mean_fit_seconds = seconds / static_cast<double>(c.trials.size());
        c.algorithms.push_back(std::move(s));
    }
    if (const AlgorithmSummary* base = c.find("MEAN"); base != nullptr && base->trials_ok > 0)
        for (auto& s : c.algorithms) s.degenerate = s.trials_ok > 0 && s.mean_mse > 3.0 * base->mean_mse;
    return c;
}

const CellSummary* BenchReport::find(const std::string& cell) const {
    for (const auto& c : cells)
        if (c.cell == cell) return &c;
    return nullptr;
}

nlohmann::json BenchReport::to_json() const {
    nlohmann::json cj = nlohmann::json::array();
    for (const auto& c : cells) {
        nlohmann::json algos = nlohmann::json::object();
        for (const auto& s : c.algorithms) {
            nlohmann::json a = {{"trials_ok", s.trials_ok}, {"degenerate", s.degenerate}, {"failures", s.failures}};
            if (s.trials_ok > 0) {
                a["mean_mse"] = s.mean_mse;
                a["sd_mse"] = s.sd_mse;
            }
            algos[s.algorithm] = std::move(a);
        }
        nlohmann::json trials = nlohmann::json::array();
        for (const auto& t : c.trials) trials.push_back(t.to_json());
        nlohmann::json entry = {{"cell", c.cell}, {"config", c.config}, {"algorithms", algos}, {"trials", trials}};
        if (const AlgorithmSummary* base = c.find("MEAN"); base != nullptr && base->trials_ok > 0)
            entry["baseline_mse"] = base->mean_mse;
        cj.push_back(std::move(entry));
    }
    return {{"schema_version", 1},
            {"algorithms", algorithms},
            {"base_seed", base_seed},
            {"trials_per_cell", trials_per_cell},
            {"options", options},
            {"cells", cj}};
}

void BenchReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "cell,algorithm,mean_mse,sd_mse,mean_fit_seconds\n" << std::setprecision(17);
    for (const auto& c : cells)
        for (const auto& s : c.algorithms) {
            out << c.cell << ',' << s.algorithm << ',';
            if (s.trials_ok > 0) out << s.mean_mse << ',' << s.sd_mse;
            else out << "NA,NA";
            out << ',' << s.mean_fit_seconds << '\n';
        }
}

void BenchReport::write_partition_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "cell,trial,algorithm,partition,size\n";
    for (const auto& c : cells)
        for (const auto& t : c.trials)
            for (const auto& r : t.results)
                for (std::size_t p = 0; p < r.partition_sizes.size(); ++p)
                    out << c.cell << ',' << t.trial << ',' << r.algorithm << ',' << p << ',' << r.partition_sizes[p]
                        << '\n';
}

namespace {

// Runs task(i) for i in [0, count) on up to `jobs` threads; each task writes its own slot.
template <class Task>
void run_parallel(std::size_t count, int jobs, Task task) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) task(i);
        });
    for (auto& t : pool) t.join();
}

BenchOptions inner_options(const BenchOptions& options, std::size_t tasks) {
    BenchOptions inner = options;
    // parallelism goes to trials when there are several; otherwise to the forest
    inner.learner.jobs = tasks > 1 && options.jobs > 1 ? 1 : std::max(1, options.jobs);
    return inner;
}

}  // namespace

BenchReport run_benchmark(const std::vector<SimConfig>& grid, int trials_per_cell,
                          const std::vector<std::string>& algorithms, std::uint64_t base_seed,
                          const BenchOptions& options) {
    require(trials_per_cell >= 1, "trials_per_cell must be at least 1");
    for (const auto& a : algorithms) algorithm_spec(a);
    for (const auto& c : grid) c.validate();
    const std::size_t per = static_cast<std::size_t>(trials_per_cell);
    const std::size_t total = grid.size() * per;
    const BenchOptions inner = inner_options(options, total);
    std::vector<TrialResult> slots(total);
    run_parallel(total, options.jobs, [&](std::size_t i) {
        SimConfig cfg = grid[i / per];
        const int t = static_cast<int>(i % per);
        cfg.seed = base_seed + static_cast<std::uint64_t>(t);
        slots[i] = run_trial(cfg, algorithms, inner);
        slots[i].trial = t;
    });
    BenchReport report;
    report.algorithms = algorithms;
    report.base_seed = base_seed;
    report.trials_per_cell = trials_per_cell;
    report.options = options.to_json();
    for (std::size_t c = 0; c < grid.size(); ++c) {
        std::vector<TrialResult> trials(std::make_move_iterator(slots.begin() + static_cast<std::ptrdiff_t>(c * per)),
                                        std::make_move_iterator(slots.begin() + static_cast<std::ptrdiff_t>((c + 1) * per)));
        nlohmann::json cfg = grid[c].to_json();
        cfg.erase("seed");
        report.cells.push_back(summarize_cell(grid[c].cell_id(), std::move(cfg), std::move(trials), algorithms));
    }
    return report;
}

BenchReport run_dataset_benchmark(const Dataset& data, const std::string& cell, int trials,
                                  const std::vector<std::string>& algorithms, std::uint64_t base_seed,
                                  const BenchOptions& options) {
    require(trials >= 1, "trials must be at least 1");
    for (const auto& a : algorithms) algorithm_spec(a);
    const std::size_t total = static_cast<std::size_t>(trials);
    const BenchOptions inner = inner_options(options, total);
    std::vector<TrialResult> slots(total);
    run_parallel(total, options.jobs, [&](std::size_t i) {
        slots[i] = run_trial(data, algorithms, base_seed + i, inner);
        slots[i].cell = cell;
        slots[i].trial = static_cast<int>(i);
    });
    BenchReport report;
    report.algorithms = algorithms;
    report.base_seed = base_seed;
    report.trials_per_cell = trials;
    report.options = options.to_json();
    nlohmann::json cfg = {{"n", data.rows()}, {"p", data.cols()}, {"outcome", data.outcome_name},
                          {"features", data.feature_names}};
    report.cells.push_back(summarize_cell(cell, std::move(cfg), std::move(slots), algorithms));
    return report;
}

std::vector<SimConfig> simulation_grid(Index n) {
    std::vector<SimConfig> grid;
    for (Relationship r : {Relationship::Linear, Relationship::Nonlinear, Relationship::Mixed})
        for (double xi : {1.0, 1.5, 2.0})
            for (double phi : {1.0, 2.0, 4.0}) {
                SimConfig c;
                c.relationship = r;
                c.xi = xi;
                c.phi = phi;
                c.n = n;
                grid.push_back(c);
            }
    return grid;
}

}  // namespace msreg
