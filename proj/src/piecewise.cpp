#include "msreg/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace msreg {

namespace {

std::size_t at(Index i) { return static_cast<std::size_t>(i); }

}  // namespace

std::uint64_t partition_seed(std::uint64_t seed, Index label) {
    return mix_seed(seed, 0x9A27, static_cast<std::uint64_t>(label));
}

const FittedModel& MsrModel::model_for(Index label) const {
    const ModelPtr& m = models[at(label)];
    return m ? *m : *global;
}

std::vector<Index> MsrModel::route(const Matrix& x) const {
    if (x.cols() != train_features.cols())
        throw DataError("piecewise model: expected " + std::to_string(train_features.cols()) + " columns, got " +
                        std::to_string(x.cols()));
    return assign_new(partitioning, train_features, x);
}

Vector MsrModel::predict(const Matrix& x) const {
    const auto labels = route(x);
    Vector out(x.rows());
    if (partitioning.count == 1) return model_for(0).predict(x);
    for (Index label = 0; label < partitioning.count; ++label) {
        std::vector<Index> rows;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) rows.push_back(static_cast<Index>(i));
        if (rows.empty()) continue;
        const Vector part = model_for(label).predict(take_rows(x, rows));
        for (std::size_t r = 0; r < rows.size(); ++r) out[rows[r]] = part[static_cast<Index>(r)];
    }
    return out;
}

Vector predict_msr(const MsrModel& model, const Matrix& x) { return model.predict(x); }

MsrModel fit_msr(const Dataset& train, const Regressor& learner, const MsParams& ms_params, std::uint64_t seed) {
    train.validate();
    const Partitioning p = train.rows() >= 2 ? fit_morse_smale(train.features, train.outcome, ms_params).partitioning
                                             : single_partition(train.outcome);
    return fit_msr(train, learner, ms_params, seed, p);
}

MsrModel fit_msr(const Dataset& train, const Regressor& learner, const MsParams& ms_params, std::uint64_t seed,
                 const Partitioning& partitioning, ModelPtr global) {
    train.validate();
    if (static_cast<Index>(partitioning.labels.size()) != train.rows())
        throw DataError("partitioning does not match training rows");
    MsrModel m;
    m.learner = learner.name();
    m.ms_params = ms_params;
    m.seed = seed;
    m.train_features = train.features;
    m.feature_names = train.feature_names;
    m.partitioning = partitioning;
    try {
        m.global = global ? std::move(global) : learner.fit(train.features, train.outcome, train.feature_names, seed);
    } catch (const std::exception& e) {
        throw std::runtime_error("global " + learner.name() + " fit: " + e.what());
    }
    m.models.assign(at(partitioning.count), nullptr);
    if (partitioning.count == 1) {
        m.models[0] = m.global;
        return m;
    }
    for (Index label = 0; label < partitioning.count; ++label) {
        const auto rows = partitioning.members(label);
        if (static_cast<Index>(rows.size()) < learner.min_viable()) continue;
        try {
            m.models[at(label)] = learner.fit(take_rows(train.features, rows), take(train.outcome, rows),
                                              train.feature_names, partition_seed(seed, label));
        } catch (const std::exception& e) {
            throw std::runtime_error("partition " + std::to_string(label) + " " + learner.name() + " fit: " + e.what());
        }
    }
    return m;
}

nlohmann::json MsrModel::to_json() const {
    nlohmann::json parts = nlohmann::json::array();
    for (const ModelPtr& p : models) parts.push_back(p && p != global ? p->to_json() : nlohmann::json(nullptr));
    std::vector<std::vector<double>> rows(at(train_features.rows()), std::vector<double>(at(train_features.cols())));
    for (Index r = 0; r < train_features.rows(); ++r)
        for (Index c = 0; c < train_features.cols(); ++c) rows[at(r)][at(c)] = train_features(r, c);
    return {{"type", "msr"},
            {"learner", learner},
            {"learner_config", learner_config.to_json()},
            {"ms_params", ms_params.to_json()},
            {"seed", seed},
            {"feature_names", feature_names},
            {"train_features", rows},
            {"partitioning", partitioning.to_json()},
            {"global", global->to_json()},
            {"models", parts}};
}

MsrModel MsrModel::from_json(const nlohmann::json& j) {
    MsrModel m;
    m.learner = j.at("learner").get<std::string>();
    m.learner_config = LearnerConfig::from_json(j.at("learner_config"));
    m.ms_params = MsParams::from_json(j.at("ms_params"));
    m.seed = j.at("seed").get<std::uint64_t>();
    j.at("feature_names").get_to(m.feature_names);
    const auto rows = j.at("train_features").get<std::vector<std::vector<double>>>();
    m.train_features.resize(static_cast<Index>(rows.size()), static_cast<Index>(m.feature_names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.feature_names.size()) throw DataError("piecewise model: ragged training features");
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m.train_features(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
    m.partitioning = Partitioning::from_json(j.at("partitioning"));
    m.global = model_from_json(j.at("global"));
    const auto& parts = j.at("models");
    if (static_cast<Index>(parts.size()) != m.partitioning.count) throw DataError("piecewise model: model count mismatch");
    for (const auto& p : parts) m.models.push_back(p.is_null() ? nullptr : model_from_json(p));
    if (m.partitioning.count == 1) m.models[0] = m.global;
    return m;
}

Matrix pca_2d(const Matrix& reference, const Matrix& x) {
    const Vector mean = reference.colwise().mean().transpose();
    const Matrix centered = reference.rowwise() - mean.transpose();
    const Matrix cov = centered.transpose() * centered / std::max<double>(1.0, static_cast<double>(reference.rows() - 1));
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    const Index p = reference.cols();
    Matrix basis = Matrix::Zero(p, 2);
    // eigenvalues ascend; take the last two
    for (Index c = 0; c < std::min<Index>(2, p); ++c) {
        Vector v = eig.eigenvectors().col(p - 1 - c);
        Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0) v = -v;
        basis.col(c) = v;
    }
    return (x.rowwise() - mean.transpose()) * basis;
}

nlohmann::json partition_report(const MsrModel& model, const Dataset& train) {
    if (train.rows() != static_cast<Index>(model.partitioning.labels.size()))
        throw DataError("partition_report: training rows do not match the model");
    const Partitioning& p = model.partitioning;
    const Matrix coords = pca_2d(train.features, train.features);
    nlohmann::json parts = nlohmann::json::array();
    for (Index label = 0; label < p.count; ++label) {
        const auto rows = p.members(label);
        const Matrix xp = take_rows(train.features, rows);
        const Vector yp = take(train.outcome, rows);
        const double mean = yp.mean();
        const double sd = yp.size() > 1 ? std::sqrt((yp.array() - mean).square().sum() / static_cast<double>(yp.size() - 1)) : 0.0;
        const bool fallback = model.is_fallback(label);
        nlohmann::json payload = fallback ? nlohmann::json{{"type", "fallback"}}
                                          : model.model_for(label).payload(xp, yp, partition_seed(model.seed, label));
        auto extremum = [&](Index point) {
            return nlohmann::json{{"row", point},
                                  {"y", train.outcome[point]},
                                  {"pc", {coords(point, 0), coords(point, 1)}}};
        };
        parts.push_back({{"label", label},
                         {"size", rows.size()},
                         {"fallback", fallback},
                         {"outcome_stats", {{"mean", mean}, {"sd", sd}, {"min", yp.minCoeff()}, {"max", yp.maxCoeff()}}},
                         {"payload_type", payload.at("type")},
                         {"payload", payload},
                         {"extrema", {{"max", extremum(p.max_point[at(label)])}, {"min", extremum(p.min_point[at(label)])}}}});
    }
    return {{"schema_version", 1},
            {"learner", model.learner},
            {"n", train.rows()},
            {"partition_count", p.count},
            {"partition_level", p.level},
            {"partitions", parts}};
}

void write_report_csv(const std::filesystem::path& path, const nlohmann::json& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "partition,payload_type,feature,value,rank\n" << std::setprecision(17);
    for (const auto& part : report.at("partitions")) {
        const auto& payload = part.at("payload");
        const std::string type = payload.at("type").get<std::string>();
        const auto label = part.at("label").get<Index>();
        if (type == "importance") {
            for (const auto& f : payload.at("features"))
                out << label << ",importance," << f.at("feature").get<std::string>() << ','
                    << f.at("importance").get<double>() << ',' << f.at("rank").get<Index>() << '\n';
        } else if (type == "coefficients") {
            std::vector<double> mag;
            for (const auto& c : payload.at("coefficients")) mag.push_back(std::abs(c.at("value").get<double>()));
            const auto rank = rank_descending(mag);
            std::size_t i = 0;
            for (const auto& c : payload.at("coefficients"))
                out << label << ",coefficient," << c.at("feature").get<std::string>() << ','
                    << c.at("value").get<double>() << ',' << rank[i++] << '\n';
        }
    }
}

}  // namespace msreg
