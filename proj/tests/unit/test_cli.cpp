#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "msreg/dataset.hpp"

namespace fs = std::filesystem;
using namespace msreg;

namespace {

const fs::path kTmp = fs::path(MSREG_TEST_TMP) / "cli";

fs::path scratch(const std::string& name) {
    const fs::path d = kTmp / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// Runs the CLI with stdout/stderr captured in <dir>/stdout.txt and <dir>/stderr.txt.
int cli(const fs::path& dir, const std::string& args) {
    const std::string cmd = std::string("\"") + MSREG_CLI_PATH + "\" " + args + " > \"" + (dir / "stdout.txt").string() +
                            "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::vector<double> read_column(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<double> v;
    while (std::getline(in, line)) v.push_back(std::stod(line));
    return v;
}

// Same columns as the Swedish third-party motor insurance table, with synthetic values.
void write_insurance_standin(const fs::path& path, int rows) {
    Rng rng(42);
    std::ofstream out(path);
    out << "Kilometres,Zone,Bonus,Make,Insured,Claims,Payment\n";
    for (int i = 0; i < rows; ++i) {
        const int km = 1 + static_cast<int>(uniform_below(rng, 5));
        const int zone = 1 + static_cast<int>(uniform_below(rng, 7));
        const int bonus = 1 + static_cast<int>(uniform_below(rng, 7));
        const int make = 1 + static_cast<int>(uniform_below(rng, 9));
        const double insured = 1.0 + 500.0 * uniform01(rng);
        const int claims = static_cast<int>(insured * 0.05 * (1.0 + 0.1 * km) * uniform01(rng));
        const double payment = claims * (4000.0 + 800.0 * zone) * (0.5 + uniform01(rng));
        out << km << ',' << zone << ',' << bonus << ',' << make << ',' << insured << ',' << claims << ',' << payment
            << '\n';
    }
}

}  // namespace

TEST_CASE("simulate writes the requested shape and is byte-identical under a seed") {
    const fs::path d = scratch("simulate");
    REQUIRE(cli(d, "simulate --n 120 --xi 1.5 --phi 2 --rel mixed --seed 4 --out \"" + (d / "a.csv").string() + "\"") == 0);
    REQUIRE(cli(d, "simulate --n 120 --xi 1.5 --phi 2 --rel mixed --seed 4 --out \"" + (d / "b.csv").string() + "\"") == 0);
    const Dataset a = load_csv(d / "a.csv", "y");
    CHECK(a.rows() == 120);
    CHECK(a.cols() == 15);
    CHECK(slurp(d / "a.csv") == slurp(d / "b.csv"));
    const nlohmann::json side = read_json(d / "a.json");
    CHECK(side["simulation"]["xi"] == 1.5);
    CHECK(side["simulation"]["relationship"] == "mixed");
    CHECK(side["simulation"]["seed"] == 4);

    REQUIRE(cli(d, "simulate --n 120 --seed 5 --out \"" + (d / "c.csv").string() + "\"") == 0);
    CHECK(slurp(d / "a.csv") != slurp(d / "c.csv"));
}

TEST_CASE("invalid simulate arguments exit non-zero") {
    const fs::path d = scratch("simulate_bad");
    CHECK(cli(d, "simulate --xi 3 --n 10") != 0);
    CHECK(cli(d, "simulate --phi 0 --n 10") != 0);
    CHECK(cli(d, "simulate --rel cubic --n 10") != 0);
    CHECK(cli(d, "") != 0);
}

TEST_CASE("a MEAN model holds a single number: the training mean") {
    const fs::path d = scratch("fit_mean");
    REQUIRE(cli(d, "simulate --n 80 --seed 1 --out-dir \"" + d.string() + "\"") == 0);
    REQUIRE(cli(d, "fit --algo MEAN --data \"" + (d / "simulated.csv").string() + "\" --out-dir \"" + d.string() + "\"") == 0);
    const nlohmann::json m = read_json(d / "model.json");
    CHECK(m["algorithm"] == "MEAN");
    CHECK(m["model"]["type"] == "mean");
    CHECK(m["model"].size() == 2);
    const Dataset ds = load_csv(d / "simulated.csv", "y");
    CHECK(m["model"]["value"].get<double>() == doctest::Approx(ds.outcome.mean()).epsilon(1e-12));
    for (double v : read_column(d / "fitted.csv")) CHECK(v == m["model"]["value"].get<double>());
}

TEST_CASE("unknown algorithms are rejected with the valid names") {
    const fs::path d = scratch("fit_unknown");
    REQUIRE(cli(d, "simulate --n 40 --out-dir \"" + d.string() + "\"") == 0);
    CHECK(cli(d, "fit --algo SVM --data \"" + (d / "simulated.csv").string() + "\"") != 0);
    const std::string err = slurp(d / "stderr.txt");
    CHECK(err.find("MSRF") != std::string::npos);
    CHECK(err.find("MEAN") != std::string::npos);
}

TEST_CASE("MSRF fit report partitions every training row; predict covers every input row") {
    const fs::path d = scratch("fit_msrf");
    REQUIRE(cli(d, "simulate --n 400 --rel nonlinear --seed 2 --out-dir \"" + d.string() + "\"") == 0);
    const std::string data = (d / "simulated.csv").string();
    REQUIRE(cli(d, "fit --algo MSRF --trees 30 --policy count --partitions 3 --min-size 40 --data \"" + data +
                       "\" --out-dir \"" + d.string() + "\"") == 0);
    const nlohmann::json r = read_json(d / "report.json");
    Index total = 0;
    for (const auto& p : r["partitions"]) {
        total += p["size"].get<Index>();
        CHECK(p["size"].get<Index>() >= 40);
        CHECK((p["payload_type"] == "importance" || p["payload_type"] == "fallback"));
    }
    CHECK(total == 400);
    CHECK(fs::exists(d / "report.csv"));

    REQUIRE(cli(d, "simulate --n 57 --rel nonlinear --seed 3 --out \"" + (d / "new.csv").string() + "\"") == 0);
    REQUIRE(cli(d, "predict --model \"" + (d / "model.json").string() + "\" --data \"" + (d / "new.csv").string() +
                       "\" --out \"" + (d / "pred.csv").string() + "\"") == 0);
    CHECK(read_column(d / "pred.csv").size() == 57);

    // the report subcommand reproduces the fit-time report
    REQUIRE(cli(d, "report --model \"" + (d / "model.json").string() + "\" --data \"" + data + "\" --out \"" +
                       (d / "again.json").string() + "\"") == 0);
    CHECK(read_json(d / "again.json") == r);
}

TEST_CASE("a reloaded ELM reproduces its fitted values and interpolates small data") {
    const fs::path d = scratch("fit_elm");
    REQUIRE(cli(d, "simulate --n 30 --seed 6 --out-dir \"" + d.string() + "\"") == 0);
    const std::string data = (d / "simulated.csv").string();
    REQUIRE(cli(d, "fit --algo ELM --hidden 30 --activation tanh --data \"" + data + "\" --out-dir \"" + d.string() + "\"") == 0);
    // predict reads the CSV without its outcome column as well
    const Dataset ds = load_csv(data, "y");
    Dataset no_y = ds;
    no_y.outcome_name = "";
    {
        std::ofstream out(d / "features.csv");
        for (Index j = 0; j < ds.cols(); ++j) out << (j ? "," : "") << ds.feature_names[static_cast<std::size_t>(j)];
        out << '\n' << std::setprecision(17);
        for (Index i = 0; i < ds.rows(); ++i) {
            for (Index j = 0; j < ds.cols(); ++j) out << (j ? "," : "") << ds.features(i, j);
            out << '\n';
        }
    }
    REQUIRE(cli(d, "predict --model \"" + (d / "model.json").string() + "\" --data \"" + (d / "features.csv").string() +
                       "\" --out \"" + (d / "pred.csv").string() + "\"") == 0);
    const auto fitted = read_column(d / "fitted.csv");
    const auto pred = read_column(d / "pred.csv");
    REQUIRE(fitted.size() == 30);
    REQUIRE(pred.size() == 30);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(pred[i] == fitted[i]);
        CHECK(std::abs(fitted[i] - ds.outcome[static_cast<Index>(i)]) < 1e-4);
    }
}

TEST_CASE("data errors exit with status 1 and a message") {
    const fs::path d = scratch("bad_data");
    { std::ofstream(d / "empty.csv"); }
    CHECK(cli(d, "fit --algo MEAN --data \"" + (d / "empty.csv").string() + "\" --out-dir \"" + d.string() + "\"") == 1);
    CHECK(slurp(d / "stderr.txt").find("error:") != std::string::npos);
    { std::ofstream(d / "bad.csv") << "a,y\n1,2\nx,3\n"; }
    CHECK(cli(d, "fit --algo MEAN --data \"" + (d / "bad.csv").string() + "\" --out-dir \"" + d.string() + "\"") == 1);
    CHECK(slurp(d / "stderr.txt").find("row 3") != std::string::npos);
    CHECK(cli(d, "fit --algo MEAN --outcome z --data \"" + (d / "bad.csv").string() + "\"") == 1);
}

TEST_CASE("the simulation grid preset writes 27 deterministic cells") {
    const fs::path a = scratch("grid_a");
    const fs::path b = scratch("grid_b");
    const std::string args = "benchmark --preset paper-grid --n 60 --trials 1 --algos MSR,TR,MEAN --seed 1";
    REQUIRE(cli(a, args + " --out-dir \"" + a.string() + "\"") == 0);
    REQUIRE(cli(b, args + " --jobs 2 --out-dir \"" + b.string() + "\"") == 0);
    const nlohmann::json j = read_json(a / "bench.json");
    CHECK(j["cells"].size() == 27);
    CHECK(slurp(a / "bench.json") == slurp(b / "bench.json"));
    CHECK(fs::exists(a / "bench.csv"));
    CHECK(fs::exists(a / "partitions.csv"));
    CHECK(fs::exists(a / "benchmark.resolved.ini"));
}

TEST_CASE("command-line flags override the config file") {
    const fs::path d = scratch("config");
    { std::ofstream(d / "run.ini") << "seed=9\n[simulate]\nn=33\nrel=\"nonlinear\"\n"; }
    REQUIRE(cli(d, "--config \"" + (d / "run.ini").string() + "\" simulate --out \"" + (d / "a.csv").string() + "\"") == 0);
    CHECK(load_csv(d / "a.csv", "y").rows() == 33);
    CHECK(read_json(d / "a.json")["simulation"]["seed"] == 9);
    CHECK(read_json(d / "a.json")["simulation"]["relationship"] == "nonlinear");
    REQUIRE(cli(d, "--config \"" + (d / "run.ini").string() + "\" simulate --n 44 --out \"" + (d / "b.csv").string() + "\"") == 0);
    CHECK(load_csv(d / "b.csv", "y").rows() == 44);
    CHECK(read_json(d / "b.json")["simulation"]["relationship"] == "nonlinear");
}

TEST_CASE("the insurance preset runs all twelve algorithms on a same-schema stand-in") {
    const fs::path d = scratch("insurance");
    write_insurance_standin(d / "standin.csv", 300);
    REQUIRE(cli(d, "benchmark --preset swedish --data \"" + (d / "standin.csv").string() +
                       "\" --trials 1 --trees 30 --m-stop 50 --hidden 30 --out-dir \"" + d.string() + "\"") == 0);
    const nlohmann::json j = read_json(d / "bench.json");
    REQUIRE(j["cells"].size() == 1);
    CHECK(j["cells"][0]["algorithms"].size() == 12);
    CHECK(j["cells"][0]["config"]["outcome"] == "Payment");
    CHECK(cli(d, "benchmark --preset swedish --trials 1") != 0);
}
