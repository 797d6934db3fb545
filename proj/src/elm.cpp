#include "msreg/elm.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace msreg {

Activation activation_from_name(const std::string& name) {
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "tanh") return Activation::Tanh;
    throw std::invalid_argument("unknown activation '" + name + "' (expected sigmoid or tanh)");
}

std::string activation_name(Activation a) { return a == Activation::Sigmoid ? "sigmoid" : "tanh"; }

void draw_hidden_layer(std::uint64_t seed, Index p, Index hidden_nodes, Matrix& weights, Vector& biases) {
    Rng rng(mix_seed(seed, 0xE1A));
    weights.resize(p, hidden_nodes);
    biases.resize(hidden_nodes);
    for (Index r = 0; r < p; ++r)
        for (Index c = 0; c < hidden_nodes; ++c) weights(r, c) = 2.0 * uniform01(rng) - 1.0;
    for (Index c = 0; c < hidden_nodes; ++c) biases[c] = 2.0 * uniform01(rng) - 1.0;
}

Index default_hidden_nodes(Index n) { return std::max<Index>(1, std::min<Index>(200, 2 * n / 3)); }

Matrix ElmModel::hidden(const Matrix& x) const {
    if (x.cols() != input_weights.rows()) throw DataError("ELM: column count mismatch");
    Matrix z = x * input_weights;
    z.rowwise() += biases.transpose();
    Matrix h = activation == Activation::Sigmoid ? Matrix((1.0 + (-z.array()).exp()).inverse()) : Matrix(z.array().tanh());
    if (!h.allFinite()) throw DataError("ELM: non-finite hidden activation");
    return h;
}

Vector ElmModel::predict(const Matrix& x) const { return hidden(x) * output_weights; }

Vector min_norm_least_squares(const Matrix& h, const Vector& y, double rcond) {
    const Eigen::BDCSVD<Matrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return Vector::Zero(h.cols());
    const double cut = rcond * s[0];
    Vector uty = svd.matrixU().transpose() * y;
    for (Index i = 0; i < s.size(); ++i) uty[i] = s[i] > cut ? uty[i] / s[i] : 0.0;
    return svd.matrixV() * uty;
}

ElmModel fit_elm(const Matrix& x, const Vector& y, Index hidden_nodes, Activation activation, std::uint64_t seed) {
    require(hidden_nodes >= 1, "ELM needs at least one hidden node");
    if (x.rows() != y.size()) throw DataError("feature rows and outcome length differ");
    if (!x.allFinite() || !y.allFinite()) throw DataError("non-finite values in ELM inputs");
    ElmModel m;
    m.activation = activation;
    m.seed = seed;
    draw_hidden_layer(seed, x.cols(), hidden_nodes, m.input_weights, m.biases);
    m.output_weights = min_norm_least_squares(m.hidden(x), y);
    return m;
}

nlohmann::json ElmModel::to_json() const {
    std::vector<double> beta(output_weights.data(), output_weights.data() + output_weights.size());
    return {{"type", "elm"},
            {"seed", seed},
            {"p", input_weights.rows()},
            {"hidden_nodes", hidden_nodes()},
            {"activation", activation_name(activation)},
            {"beta", beta}};
}

ElmModel ElmModel::from_json(const nlohmann::json& j) {
    ElmModel m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.activation = activation_from_name(j.at("activation").get<std::string>());
    draw_hidden_layer(m.seed, j.at("p").get<Index>(), j.at("hidden_nodes").get<Index>(), m.input_weights, m.biases);
    const auto beta = j.at("beta").get<std::vector<double>>();
    if (static_cast<Index>(beta.size()) != m.hidden_nodes()) throw DataError("ELM: beta length does not match L");
    m.output_weights = Eigen::Map<const Vector>(beta.data(), static_cast<Index>(beta.size()));
    return m;
}

}  // namespace msreg
