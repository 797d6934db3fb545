#include "msreg/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace msreg {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto ws = " \t\r\n\"";
    s.erase(0, s.find_first_not_of(ws));
    const auto last = s.find_last_not_of(ws);
    s.erase(last == std::string::npos ? 0 : last + 1);
    return s;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

void Dataset::validate() const {
    if (features.rows() < 1 || features.cols() < 1) throw DataError("dataset needs at least one row and one feature");
    if (outcome.size() != features.rows()) throw DataError("outcome length does not match feature rows");
    if (static_cast<Index>(feature_names.size()) != features.cols())
        throw DataError("feature name count does not match feature columns");
    if (!features.allFinite() || !outcome.allFinite()) throw DataError("dataset contains non-finite values");
    std::set<std::string> seen;
    for (const auto& name : feature_names)
        if (!seen.insert(name).second) throw DataError("duplicate feature name '" + name + "'");
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
    return Dataset{take_rows(features, rows), take(outcome, rows), feature_names, outcome_name};
}

Dataset parse_csv(const std::string& text, const std::string& outcome_column, bool outcome_required) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("CSV is empty (no header row)");
    std::vector<std::string> header = split_line(line);
    for (auto& h : header) h = trim(h);

    Index outcome_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == outcome_column) outcome_col = static_cast<Index>(i);
    if (outcome_col < 0 && outcome_required)
        throw DataError("outcome column '" + outcome_column + "' not found in header");
    if (header.size() < (outcome_col < 0 ? 1u : 2u))
        throw DataError("CSV needs at least one feature column besides the outcome");

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size())
            throw DataError("row " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " cells, found " + std::to_string(cells.size()));
        std::vector<double> values(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string cell = trim(cells[c]);
            if (!parse_double(cell, values[c]))
                throw DataError("row " + std::to_string(line_no) + ", column '" + header[c] +
                                "': cannot parse '" + cell + "' as a finite number");
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw DataError("CSV has a header but no data rows");

    Dataset ds;
    const auto n = static_cast<Index>(rows.size());
    const auto p = static_cast<Index>(header.size()) - (outcome_col < 0 ? 0 : 1);
    ds.features.resize(n, p);
    ds.outcome = Vector::Zero(n);
    ds.outcome_name = outcome_col < 0 ? std::string() : outcome_column;
    for (Index c = 0, f = 0; c < static_cast<Index>(header.size()); ++c)
        if (c != outcome_col) ds.feature_names.push_back(header[static_cast<std::size_t>(c)]), ++f;
    for (Index r = 0; r < n; ++r) {
        const auto& values = rows[static_cast<std::size_t>(r)];
        for (Index c = 0, f = 0; c < static_cast<Index>(values.size()); ++c) {
            if (c == outcome_col)
                ds.outcome[r] = values[static_cast<std::size_t>(c)];
            else
                ds.features(r, f++) = values[static_cast<std::size_t>(c)];
        }
    }
    ds.validate();
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& outcome_column, bool outcome_required) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), outcome_column, outcome_required);
}

void write_csv(const std::filesystem::path& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << std::setprecision(17);
    for (const auto& name : ds.feature_names) out << name << ',';
    out << ds.outcome_name << '\n';
    for (Index r = 0; r < ds.rows(); ++r) {
        for (Index c = 0; c < ds.cols(); ++c) out << ds.features(r, c) << ',';
        out << ds.outcome[r] << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::pair<Dataset, ScalingParams> standardize(const Dataset& ds) {
    ScalingParams params;
    const Index n = ds.rows();
    std::vector<Index> kept;
    for (Index c = 0; c < ds.cols(); ++c) {
        const auto col = ds.features.col(c);
        const double mean = col.mean();
        const double ss = n > 1 ? (col.array() - mean).square().sum() / static_cast<double>(n - 1) : 0.0;
        const double sd = std::sqrt(ss);
        if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
            params.dropped.push_back(ds.feature_names[static_cast<std::size_t>(c)]);
            continue;
        }
        kept.push_back(c);
        params.names.push_back(ds.feature_names[static_cast<std::size_t>(c)]);
        params.mean.push_back(mean);
        params.sd.push_back(sd);
    }
    if (kept.empty()) throw DataError("every feature column is constant; nothing to standardize");
    return {params.apply(ds), params};
}

Matrix ScalingParams::apply(const Matrix& features, const std::vector<std::string>& feature_names) const {
    Matrix out(features.rows(), static_cast<Index>(names.size()));
    for (std::size_t k = 0; k < names.size(); ++k) {
        Index src = -1;
        for (std::size_t c = 0; c < feature_names.size(); ++c)
            if (feature_names[c] == names[k]) src = static_cast<Index>(c);
        if (src < 0) throw DataError("column '" + names[k] + "' required by scaling is missing");
        out.col(static_cast<Index>(k)) = (features.col(src).array() - mean[k]) / sd[k];
    }
    return out;
}

Dataset ScalingParams::apply(const Dataset& ds) const {
    return Dataset{apply(ds.features, ds.feature_names), ds.outcome, names, ds.outcome_name};
}

Matrix ScalingParams::unscale(const Matrix& scaled) const {
    if (scaled.cols() != static_cast<Index>(names.size())) throw DataError("unscale: column count mismatch");
    Matrix out(scaled.rows(), scaled.cols());
    for (Index c = 0; c < scaled.cols(); ++c)
        out.col(c) = scaled.col(c).array() * sd[static_cast<std::size_t>(c)] + mean[static_cast<std::size_t>(c)];
    return out;
}

nlohmann::json ScalingParams::to_json() const {
    return {{"names", names}, {"mean", mean}, {"sd", sd}, {"dropped", dropped}};
}

ScalingParams ScalingParams::from_json(const nlohmann::json& j) {
    ScalingParams p;
    j.at("names").get_to(p.names);
    j.at("mean").get_to(p.mean);
    j.at("sd").get_to(p.sd);
    if (j.contains("dropped")) j.at("dropped").get_to(p.dropped);
    if (p.mean.size() != p.names.size() || p.sd.size() != p.names.size())
        throw DataError("scaling parameters have inconsistent lengths");
    return p;
}

SplitIndices split_indices(Index n, double train_fraction, std::uint64_t seed) {
    require(train_fraction > 0.0 && train_fraction < 1.0, "train_fraction must lie in (0, 1)");
    require(n >= 1, "cannot split an empty dataset");
    std::vector<Index> perm(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    Rng rng(mix_seed(seed, 0x5111));
    shuffle_in_place(perm, rng);
    const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
    SplitIndices s;
    s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    return s;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    const auto s = split_indices(ds.rows(), train_fraction, seed);
    return {ds.subset(s.train), ds.subset(s.test)};
}

Matrix expand_interactions(const Matrix& x) {
    const Index p = x.cols();
    Matrix out(x.rows(), p + p * (p - 1) / 2);
    out.leftCols(p) = x;
    Index c = p;
    for (Index j = 0; j < p; ++j)
        for (Index k = j + 1; k < p; ++k) out.col(c++) = x.col(j).cwiseProduct(x.col(k));
    return out;
}

std::vector<std::string> interaction_names(const std::vector<std::string>& names) {
    std::vector<std::string> out = names;
    for (std::size_t j = 0; j < names.size(); ++j)
        for (std::size_t k = j + 1; k < names.size(); ++k) out.push_back(names[j] + ":" + names[k]);
    return out;
}

Dataset expand_interactions(const Dataset& ds) {
    return Dataset{expand_interactions(ds.features), ds.outcome, interaction_names(ds.feature_names), ds.outcome_name};
}

}  // namespace msreg
