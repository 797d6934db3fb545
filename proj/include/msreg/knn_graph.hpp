#pragma once

#include <filesystem>
#include <vector>

#include "msreg/common.hpp"

namespace msreg {

struct Edge {
    Index to;
    double distance;
};

/// Symmetrized k-nearest-neighbor graph. `out_neighbors` keeps the directed lists
/// (exactly min(k, n-1) per point, nearest first); `neighbors` is their union with
/// reversed edges, sorted by neighbor index.
struct KnnGraph {
    Index k = 0;
    std::vector<std::vector<Edge>> out_neighbors;
    std::vector<std::vector<Edge>> neighbors;

    Index size() const { return static_cast<Index>(neighbors.size()); }
    std::size_t edge_count() const;  // undirected
};

/// Brute-force KNN over Euclidean distance; ties go to the lower point index.
/// Requires n >= 2 and 1 <= k <= n - 1. `jobs` > 1 splits rows across threads.
KnnGraph build_knn(const Matrix& x, Index k, int jobs = 1);

/// max(15, 3 * ceil(log2 n)), clamped to n - 1.
Index default_k(Index n);

/// Connected component id per point, numbered by smallest member.
std::vector<Index> connected_components(const KnnGraph& graph);

/// Edge list CSV (i,j,distance) with i < j.
void write_edge_csv(const std::filesystem::path& path, const KnnGraph& graph);

}  // namespace msreg
