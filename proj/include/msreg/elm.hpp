#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "msreg/common.hpp"

namespace msreg {

enum class Activation { Sigmoid, Tanh };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation a);

/// Single random hidden layer; output weights are the minimum-norm least-squares solution
/// beta = pinv(H) y with H = g(X W + b).
struct ElmModel {
    Matrix input_weights;  // p x L, uniform on [-1, 1]
    Vector biases;         // L, uniform on [-1, 1]
    Vector output_weights; // L
    Activation activation = Activation::Sigmoid;
    std::uint64_t seed = 0;

    Index hidden_nodes() const { return biases.size(); }
    Matrix hidden(const Matrix& x) const;
    Vector predict(const Matrix& x) const;

    /// W and b are not stored; they are regenerated from (seed, p, L).
    nlohmann::json to_json() const;
    static ElmModel from_json(const nlohmann::json& j);
};

/// Draws W (p x L) and b (L) from the seeded stream, row-major W then b.
void draw_hidden_layer(std::uint64_t seed, Index p, Index hidden_nodes, Matrix& weights, Vector& biases);

/// min(200, floor(2n/3)), at least 1.
Index default_hidden_nodes(Index n);

/// pinv(H) y via SVD; singular values below rcond * sigma_max are treated as zero.
Vector min_norm_least_squares(const Matrix& h, const Vector& y, double rcond = 1e-10);

ElmModel fit_elm(const Matrix& x, const Vector& y, Index hidden_nodes, Activation activation = Activation::Sigmoid,
                 std::uint64_t seed = 0);

}  // namespace msreg
