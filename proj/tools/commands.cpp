#include "commands.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msreg/bench.hpp"
#include "msreg/dataset.hpp"
#include "msreg/pipeline.hpp"
#include "msreg/tweedie.hpp"

namespace fs = std::filesystem;

namespace msreg::cli {

namespace {

struct Globals {
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out_dir = ".";
};

struct LearnerFlags {
    LearnerConfig config;
    std::string activation = "sigmoid";

    void add(CLI::App* app) {
        app->add_option("--enet-alpha", config.enet_alpha, "Elastic net weight of the squared l2 term")
            ->check(CLI::Range(0.0, 1.0))->capture_default_str();
        app->add_option("--cv-folds", config.cv_folds, "Folds for learner-internal cross-validation")
            ->check(CLI::Range(2, 100))->capture_default_str();
        app->add_option("--ctree-alpha", config.ctree_alpha, "Significance level of conditional inference splits")
            ->check(CLI::Range(1e-12, 1.0 - 1e-12))->capture_default_str();
        app->add_option("--ctree-min-node", config.ctree_min_node, "Minimum rows per conditional tree child")
            ->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--trees", config.forest_trees, "Random forest size")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--forest-min-node", config.forest_min_node, "Random forest minimum node size")
            ->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--mtry", config.forest_mtry, "Features tried per split (0: round(p/3))")
            ->check(CLI::NonNegativeNumber)->capture_default_str();
        app->add_option("--hidden", config.elm_hidden, "ELM hidden nodes (0: min(200, 2n/3))")
            ->check(CLI::NonNegativeNumber)->capture_default_str();
        app->add_option("--activation", activation, "ELM activation")
            ->check(CLI::IsMember({"sigmoid", "tanh"}))->capture_default_str();
        app->add_option("--m-stop", config.boost_m_stop, "Boosting iterations")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--nu", config.boost_nu, "Boosting step length")->check(CLI::Range(1e-9, 1.0))->capture_default_str();
        app->add_option("--min-viable", config.min_viable,
                        "Smallest partition given its own model (0: learner default)")
            ->check(CLI::NonNegativeNumber)->capture_default_str();
    }
    LearnerConfig resolve(int jobs) const {
        LearnerConfig c = config;
        c.elm_activation = activation_from_name(activation);
        c.jobs = jobs;
        return c;
    }
};

struct MsFlags {
    Index k = 0;
    std::string policy = "cv";
    Index partitions = 1;
    Index min_size = 150;
    Index max_partitions = 10;

    void add(CLI::App* app) {
        app->add_option("--k", k, "Neighbors in the KNN graph (0: max(15, 3 ceil(log2 n)))")
            ->check(CLI::NonNegativeNumber)->capture_default_str();
        app->add_option("--policy", policy, "Partition selection: cv, count or min-size")
            ->check(CLI::IsMember({"cv", "count", "min-size"}))->capture_default_str();
        app->add_option("--partitions", partitions, "Target partition count for --policy count")
            ->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--min-size", min_size, "Minimum partition size")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--max-partitions", max_partitions, "Largest partition count considered by --policy cv")
            ->check(CLI::PositiveNumber)->capture_default_str();
    }
    MsParams resolve(int jobs) const {
        MsParams p;
        p.k = k;
        if (policy == "count") p.policy = PartitionPolicy::crystal_count(partitions, min_size);
        else if (policy == "min-size") p.policy = PartitionPolicy::minimum_size(min_size);
        else p.policy = PartitionPolicy::cross_validated(min_size);
        p.policy.max_partitions = max_partitions;
        p.jobs = jobs;
        return p;
    }
};

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_predictions(const fs::path& path, const Vector& pred) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "prediction\n" << std::setprecision(17);
    for (Index i = 0; i < pred.size(); ++i) out << pred[i] << '\n';
}

fs::path in_dir(const Globals& g, const std::string& given, const std::string& fallback) {
    if (!given.empty()) return given;
    return fs::path(g.out_dir) / fallback;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Morse-Smale piecewise regression: simulate, fit, predict, benchmark, report"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    app.set_config("--config", "", "Read options from an INI/TOML file (flags take precedence)");

    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Directory for outputs")->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Write a simulated Tweedie dataset and its config sidecar");
    SimConfig sim_cfg;
    std::string rel = "linear";
    std::string sim_out;
    sim->add_option("--xi", sim_cfg.xi, "Tweedie power in [1, 2]")->check(CLI::Range(1.0, 2.0))->capture_default_str();
    sim->add_option("--phi", sim_cfg.phi, "Dispersion")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--rel", rel, "Mean structure")
        ->check(CLI::IsMember({"linear", "nonlinear", "mixed"}))->capture_default_str();
    sim->add_option("--n", sim_cfg.n, "Rows")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--p-noise", sim_cfg.p_noise, "Noise predictors")->check(CLI::NonNegativeNumber)->capture_default_str();
    sim->add_option("--out", sim_out, "CSV path (default <out-dir>/simulated.csv)");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit an algorithm and write the model and its partition report");
    std::string algo, fit_data, outcome = "y", model_out;
    bool force_single = false;
    LearnerFlags fit_learner;
    MsFlags fit_ms;
    fit->add_option("--algo", algo, "Algorithm")->required()->check(CLI::IsMember(algorithm_names()));
    fit->add_option("--data", fit_data, "Training CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--outcome", outcome, "Outcome column")->capture_default_str();
    fit->add_option("--model-out", model_out, "Model path (default <out-dir>/model.json)");
    fit->add_flag("--single-partition", force_single, "Force one partition for MS algorithms");
    fit_learner.add(fit);
    fit_ms.add(fit);

    // predict
    auto* pred = app.add_subcommand("predict", "Predict every row of a CSV with a saved model");
    std::string pred_model, pred_data, pred_out;
    pred->add_option("--model", pred_model, "Model JSON")->required()->check(CLI::ExistingFile);
    pred->add_option("--data", pred_data, "Input CSV")->required()->check(CLI::ExistingFile);
    pred->add_option("--out", pred_out, "Predictions CSV (default <out-dir>/predictions.csv)");

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "Run the simulation grid or a dataset trial across algorithms");
    std::string preset = "paper-grid", bench_data, bench_outcome = "Payment";
    Index bench_n = 10000;
    int trials = 10;
    std::vector<std::string> algos = algorithm_names();
    bool bench_single = false;
    LearnerFlags bench_learner;
    MsFlags bench_ms;
    bench->add_option("--preset", preset, "paper-grid or swedish")
        ->check(CLI::IsMember({"paper-grid", "swedish"}))->capture_default_str();
    bench->add_option("--n", bench_n, "Rows per simulated dataset")->check(CLI::Range(20, 100000000))->capture_default_str();
    bench->add_option("--trials", trials, "Trials per cell")->check(CLI::PositiveNumber)->capture_default_str();
    bench->add_option("--data", bench_data, "Dataset CSV for the swedish preset")->check(CLI::ExistingFile);
    bench->add_option("--outcome", bench_outcome, "Outcome column for dataset presets")->capture_default_str();
    bench->add_option("--algos", algos, "Algorithms to run")->check(CLI::IsMember(algorithm_names()))->delimiter(',')->capture_default_str();
    bench->add_flag("--single-partition", bench_single, "Force one partition for MS algorithms");
    bench_learner.add(bench);
    bench_ms.add(bench);

    // report
    auto* rep = app.add_subcommand("report", "Partition report of a saved model on its training data");
    std::string rep_model, rep_data, rep_out;
    rep->add_option("--model", rep_model, "Model JSON")->required()->check(CLI::ExistingFile);
    rep->add_option("--data", rep_data, "Training CSV")->required()->check(CLI::ExistingFile);
    rep->add_option("--out", rep_out, "Report JSON (default <out-dir>/report.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        fs::create_directories(g.out_dir);
        const fs::path out_dir(g.out_dir);
        auto echo_config = [&](const std::string& name) {
            std::ofstream out(out_dir / (name + ".resolved.ini"));
            out << app.config_to_str(true, false);
        };

        if (*sim) {
            sim_cfg.relationship = relationship_from_name(rel);
            sim_cfg.seed = g.seed;
            const fs::path csv = in_dir(g, sim_out, "simulated.csv");
            if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
            const Dataset ds = simulate_dataset(sim_cfg);
            write_csv(csv, ds);
            fs::path sidecar = csv;
            sidecar.replace_extension(".json");
            write_json(sidecar, {{"schema_version", 1}, {"simulation", sim_cfg.to_json()}});
            echo_config("simulate");
            std::cout << "wrote " << csv.string() << " (" << ds.rows() << " rows, " << ds.cols() + 1 << " columns)\n";
        } else if (*fit) {
            const Dataset ds = load_csv(fit_data, outcome);
            const Pipeline p = fit_pipeline(ds, algo, fit_learner.resolve(g.jobs), fit_ms.resolve(g.jobs), g.seed,
                                            force_single);
            const fs::path model_path = in_dir(g, model_out, "model.json");
            write_json(model_path, p.to_json());
            const nlohmann::json report = p.report(ds);
            write_json(out_dir / "report.json", report);
            write_report_csv(out_dir / "report.csv", report);
            write_predictions(out_dir / "fitted.csv", p.predict(ds));
            echo_config("fit");
            std::cout << "wrote " << model_path.string() << " (" << algo << ", " << p.model.partitioning.count
                      << " partition" << (p.model.partitioning.count == 1 ? "" : "s") << ")\n";
        } else if (*pred) {
            const Pipeline p = Pipeline::from_json(read_json(pred_model));
            const Dataset ds = load_csv(pred_data, p.outcome, false);
            const fs::path out = in_dir(g, pred_out, "predictions.csv");
            const Vector y = p.predict(ds);
            write_predictions(out, y);
            echo_config("predict");
            std::cout << "wrote " << out.string() << " (" << y.size() << " rows)\n";
        } else if (*bench) {
            BenchOptions opts;
            opts.learner = bench_learner.resolve(1);
            opts.ms = bench_ms.resolve(1);
            opts.single_partition = bench_single;
            opts.jobs = g.jobs;
            BenchReport report;
            if (preset == "paper-grid") {
                report = run_benchmark(simulation_grid(bench_n), trials, algos, g.seed, opts);
            } else {
                if (bench_data.empty()) throw CLI::ValidationError("--data", "the swedish preset needs --data");
                const Dataset ds = load_csv(bench_data, bench_outcome);
                report = run_dataset_benchmark(ds, "swedish", trials, algos, g.seed, opts);
            }
            write_json(out_dir / "bench.json", report.to_json());
            report.write_csv(out_dir / "bench.csv");
            report.write_partition_csv(out_dir / "partitions.csv");
            echo_config("benchmark");
            std::size_t failures = 0;
            for (const auto& c : report.cells)
                for (const auto& s : c.algorithms) failures += s.failures.size();
            std::cout << "wrote " << (out_dir / "bench.json").string() << " (" << report.cells.size() << " cells, "
                      << failures << " failed fits)\n";
        } else if (*rep) {
            const Pipeline p = Pipeline::from_json(read_json(rep_model));
            const Dataset ds = load_csv(rep_data, p.outcome);
            const nlohmann::json report = p.report(ds);
            const fs::path out = in_dir(g, rep_out, "report.json");
            write_json(out, report);
            fs::path csv = out;
            csv.replace_extension(".csv");
            write_report_csv(csv, report);
            echo_config("report");
            std::cout << "wrote " << out.string() << " (" << report.at("partition_count") << " partitions)\n";
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace msreg::cli
