#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "msreg/common.hpp"
#include "msreg/knn_graph.hpp"

namespace msreg {

/// Marks a point that is its own ascent (local max) or descent (local min) target.
inline constexpr Index kSelf = -1;

/// Steepest ascent/descent neighbor per point.
struct GradientFlow {
    std::vector<Index> ascent;
    std::vector<Index> descent;

    Index size() const { return static_cast<Index>(ascent.size()); }
};

/// Among neighbors with strictly larger (smaller) y, picks the largest difference quotient
/// |y_j - y_i| / dist(i, j). Coincident neighbors (distance 0) outrank all others and are
/// compared by raw difference. Remaining ties go to the lower index.
GradientFlow steepest_targets(const KnnGraph& graph, const Vector& y);

/// Terminal extremum of every point's ascent (descent) path, with path compression.
std::vector<Index> terminal_maxima(const GradientFlow& flow);
std::vector<Index> terminal_minima(const GradientFlow& flow);

struct Crystal {
    Index max_point = kSelf;
    Index min_point = kSelf;
    std::vector<Index> members;  // ascending
};

/// One crystal per distinct (terminal max, terminal min) pair, sorted by that pair.
std::vector<Crystal> build_crystals(const GradientFlow& flow);

enum class ExtremumKind { Maximum, Minimum };

struct Merge {
    double persistence = 0.0;
    ExtremumKind kind = ExtremumKind::Maximum;
    Index cancelled = kSelf;
    Index survivor = kSelf;
    double saddle = 0.0;  // boundary value that joins the two basins
};

/// Extremum never cancelled (one max and one min per connected component survive).
/// Its persistence is the outcome range of its component.
struct EssentialExtremum {
    ExtremumKind kind = ExtremumKind::Maximum;
    Index point = kSelf;
    double persistence = 0.0;
};

/// Crystal labeling at one hierarchy level; labels are contiguous, numbered by
/// first appearance in point order.
struct LevelLabels {
    std::vector<Index> labels;
    std::vector<Index> max_point;  // per label: surviving maximum
    std::vector<Index> min_point;  // per label: surviving minimum
    Index count() const { return static_cast<Index>(max_point.size()); }
};

/// Persistence simplification of the base complex. Level 0 is the base complex;
/// level l applies the first l merges.
struct MsHierarchy {
    std::vector<Index> base_max;  // terminal max per point
    std::vector<Index> base_min;
    std::vector<Crystal> base_crystals;
    std::vector<Merge> merges;  // persistence non-decreasing
    std::vector<EssentialExtremum> essential;
    Vector y;
    std::vector<std::pair<Index, Index>> edges;  // undirected, i < j

    Index levels() const { return static_cast<Index>(merges.size()) + 1; }
    LevelLabels labels_at(Index level) const;

    /// Merge list as JSON: [{persistence, kind, cancelled, survivor, saddle}, ...].
    nlohmann::json merges_json() const;
};

MsHierarchy build_hierarchy(const std::vector<Crystal>& crystals, const GradientFlow& flow, const KnnGraph& graph,
                            const Vector& y);

struct PartitionPolicy {
    enum class Kind { CrystalCount, MinSize, CrossValidated };

    Kind kind = Kind::CrossValidated;
    Index target_count = 1;  // CrystalCount
    Index min_size = 150;
    Index max_partitions = 10;  // CrossValidated candidate bound
    int cv_folds = 5;
    std::uint64_t seed = 0;

    static PartitionPolicy crystal_count(Index m, Index min_size = 1) {
        PartitionPolicy p;
        p.kind = Kind::CrystalCount;
        p.target_count = m;
        p.min_size = min_size;
        return p;
    }
    static PartitionPolicy minimum_size(Index min_size) {
        PartitionPolicy p;
        p.kind = Kind::MinSize;
        p.min_size = min_size;
        return p;
    }
    static PartitionPolicy cross_validated(Index min_size = 150, std::uint64_t seed = 0) {
        PartitionPolicy p;
        p.min_size = min_size;
        p.seed = seed;
        return p;
    }

    nlohmann::json to_json() const;
    static PartitionPolicy from_json(const nlohmann::json& j);
};

struct Partitioning {
    std::vector<Index> labels;     // 0..count-1 per training point
    Index count = 1;
    Index level = 0;               // hierarchy level the labeling was cut from
    bool inexact = false;          // requested crystal count was not attainable
    std::vector<Index> max_point;  // per partition: highest-outcome member
    std::vector<Index> min_point;  // per partition: lowest-outcome member
    double cv_mse = 0.0;           // CrossValidated policy only

    std::vector<Index> sizes() const;
    std::vector<Index> members(Index label) const;
    nlohmann::json to_json() const;
    static Partitioning from_json(const nlohmann::json& j);
};

/// Cuts the hierarchy under `policy`. `features` are the (standardized) training features;
/// they are only read by the CrossValidated policy, which scores every level with at most
/// max_partitions crystals (plus the single partition) by
/// k-fold MSE of per-partition least squares with held-out rows routed to the partition of
/// their nearest in-fold neighbor. Partitions smaller than min_size merge into the adjacent
/// partition across the flattest boundary edge; components that stay below min_size join the
/// largest partition.
Partitioning partition_at(const MsHierarchy& hierarchy, const PartitionPolicy& policy, const Matrix& features);

/// Every point in one partition.
Partitioning single_partition(const Vector& y);

/// Label of the nearest training point (Euclidean; lower index on ties).
std::vector<Index> assign_new(const Partitioning& partitioning, const Matrix& train_features, const Matrix& new_features);

/// Index of the nearest row of `reference` for each row of `queries`.
std::vector<Index> nearest_rows(const Matrix& reference, const Matrix& queries);

struct MsParams {
    Index k = 0;  // 0 selects default_k(n)
    PartitionPolicy policy;
    int jobs = 1;

    nlohmann::json to_json() const;
    static MsParams from_json(const nlohmann::json& j);
};

/// build_knn -> steepest_targets -> build_crystals -> build_hierarchy -> partition_at.
struct MsFit {
    KnnGraph graph;
    MsHierarchy hierarchy;
    Partitioning partitioning;
};
MsFit fit_morse_smale(const Matrix& features, const Vector& y, const MsParams& params);

}  // namespace msreg
