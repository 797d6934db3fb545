#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "msreg/common.hpp"
#include "msreg/dataset.hpp"

namespace testing {

using msreg::Index;
using msreg::Matrix;
using msreg::Vector;

inline Matrix gaussian_matrix(Index n, Index p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix x(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) x(i, j) = z(rng);
    return x;
}

inline Vector gaussian_vector(Index n, std::uint64_t seed) { return gaussian_matrix(n, 1, seed).col(0); }

inline msreg::Dataset make_dataset(const Matrix& x, const Vector& y) {
    msreg::Dataset d;
    d.features = x;
    d.outcome = y;
    for (Index j = 0; j < x.cols(); ++j) d.feature_names.push_back("x" + std::to_string(j + 1));
    return d;
}

inline bool bitwise_equal(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) return false;
    for (Index i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

// Ordinary least squares with intercept via the normal equations in long double; an
// independent route from the library's decompositions.
inline Vector ols_with_intercept(const Matrix& x, const Vector& y) {
    const Index p = x.cols() + 1;
    Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> a(x.rows(), p);
    a.col(0).setOnes();
    a.rightCols(x.cols()) = x.cast<long double>();
    const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> ata = a.transpose() * a;
    const Eigen::Matrix<long double, Eigen::Dynamic, 1> aty = a.transpose() * y.cast<long double>();
    return ata.ldlt().solve(aty).cast<double>();
}

}  // namespace testing
