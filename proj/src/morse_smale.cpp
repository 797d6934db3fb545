#include "msreg/morse_smale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace msreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t at(Index i) { return static_cast<std::size_t>(i); }

Index find_root(std::vector<Index>& parent, Index v) {
    Index root = v;
    while (parent[at(root)] != root) root = parent[at(root)];
    while (parent[at(v)] != root) {
        const Index next = parent[at(v)];
        parent[at(v)] = root;
        v = next;
    }
    return root;
}

std::vector<Index> follow_to_terminal(const std::vector<Index>& target) {
    const auto n = target.size();
    std::vector<Index> terminal(n, kSelf);
    std::vector<Index> path;
    for (std::size_t s = 0; s < n; ++s) {
        if (terminal[s] != kSelf) continue;
        Index v = static_cast<Index>(s);
        path.clear();
        while (terminal[at(v)] == kSelf && target[at(v)] != kSelf) {
            path.push_back(v);
            v = target[at(v)];
        }
        const Index end = terminal[at(v)] != kSelf ? terminal[at(v)] : v;
        terminal[at(v)] = end;
        for (Index u : path) terminal[at(u)] = end;
    }
    return terminal;
}

std::vector<std::pair<Index, Index>> undirected_edges(const KnnGraph& graph) {
    std::vector<std::pair<Index, Index>> edges;
    for (Index i = 0; i < graph.size(); ++i)
        for (const Edge& e : graph.neighbors[at(i)])
            if (i < e.to) edges.emplace_back(i, e.to);
    return edges;
}

// (y, index) as a strict total order on extrema
bool outranks(const Vector& y, Index a, Index b) {
    return y[a] > y[b] || (y[a] == y[b] && a > b);
}

struct Candidate {
    double saddle;
    Index survivor = kSelf;
};

// Relabel so labels are 0..m-1 by first appearance in point order.
std::vector<Index> compact_labels(const std::vector<Index>& raw, Index& count) {
    std::map<Index, Index> remap;
    std::vector<Index> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto it = remap.find(raw[i]);
        if (it == remap.end()) it = remap.emplace(raw[i], static_cast<Index>(remap.size())).first;
        out[i] = it->second;
    }
    count = static_cast<Index>(remap.size());
    return out;
}

std::vector<Index> count_sizes(const std::vector<Index>& labels, Index count) {
    std::vector<Index> sizes(at(count), 0);
    for (Index l : labels) ++sizes[at(l)];
    return sizes;
}

// Merges partitions below min_size into the neighbor across their flattest boundary edge;
// leftovers with no neighbor (small graph components) join the largest partition.
std::vector<Index> merge_small(const std::vector<Index>& labels, Index count, const MsHierarchy& h, Index min_size,
                               Index& out_count) {
    std::vector<Index> size = count_sizes(labels, count);
    std::vector<std::map<Index, double>> adj(at(count));
    for (const auto& [i, j] : h.edges) {
        const Index a = labels[at(i)], b = labels[at(j)];
        if (a == b) continue;
        const double w = std::abs(h.y[i] - h.y[j]);
        auto upd = [&](Index u, Index v) {
            auto [it, inserted] = adj[at(u)].emplace(v, w);
            if (!inserted) it->second = std::min(it->second, w);
        };
        upd(a, b);
        upd(b, a);
    }
    std::vector<Index> alias(at(count));
    for (Index l = 0; l < count; ++l) alias[at(l)] = l;
    std::vector<bool> live(at(count), true);
    Index n_live = count;

    while (n_live > 1) {
        Index small = kSelf;
        for (Index l = 0; l < count; ++l)
            if (live[at(l)] && size[at(l)] < min_size && !adj[at(l)].empty() &&
                (small == kSelf || size[at(l)] < size[at(small)]))
                small = l;
        if (small == kSelf) break;
        Index target = kSelf;
        double best = kInf;
        for (const auto& [nb, w] : adj[at(small)])
            if (w < best) best = w, target = nb;  // map order gives lower label on ties
        size[at(target)] += size[at(small)];
        size[at(small)] = 0;
        live[at(small)] = false;
        alias[at(small)] = target;
        --n_live;
        for (const auto& [nb, w] : adj[at(small)]) {
            adj[at(nb)].erase(small);
            if (nb == target) continue;
            auto [it, inserted] = adj[at(target)].emplace(nb, w);
            if (!inserted) it->second = std::min(it->second, w);
            auto [it2, inserted2] = adj[at(nb)].emplace(target, w);
            if (!inserted2) it2->second = std::min(it2->second, w);
        }
        adj[at(small)].clear();
    }

    Index largest = kSelf;
    for (Index l = 0; l < count; ++l)
        if (live[at(l)] && (largest == kSelf || size[at(l)] > size[at(largest)])) largest = l;
    for (Index l = 0; l < count; ++l)
        if (live[at(l)] && l != largest && size[at(l)] < min_size) alias[at(l)] = largest;

    auto resolve = [&](Index l) {
        while (alias[at(l)] != l) l = alias[at(l)];
        return l;
    };
    std::vector<Index> merged(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) merged[i] = resolve(labels[i]);
    return compact_labels(merged, out_count);
}

Partitioning finish(std::vector<Index> labels, Index count, Index level, const Vector& y) {
    Partitioning p;
    p.labels = std::move(labels);
    p.count = count;
    p.level = level;
    p.max_point.assign(at(count), kSelf);
    p.min_point.assign(at(count), kSelf);
    for (Index i = 0; i < static_cast<Index>(p.labels.size()); ++i) {
        const Index l = p.labels[at(i)];
        Index& mx = p.max_point[at(l)];
        Index& mn = p.min_point[at(l)];
        if (mx == kSelf || y[i] > y[mx]) mx = i;
        if (mn == kSelf || y[i] < y[mn]) mn = i;
    }
    return p;
}

Vector ols_predict(const Matrix& x_train, const Vector& y_train, const Matrix& x_new) {
    Matrix design(x_train.rows(), x_train.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x_train.cols()) = x_train;
    const Vector coef = design.completeOrthogonalDecomposition().solve(y_train);
    return (x_new * coef.tail(x_train.cols())).array() + coef[0];
}

struct CvContext {
    std::vector<int> fold;
    std::vector<std::vector<Index>> train_rows, test_rows;
    std::vector<std::vector<Index>> route;  // per fold, per test row: nearest in-fold training point
};

CvContext make_cv(const Matrix& x, int folds, std::uint64_t seed) {
    const Index n = x.rows();
    CvContext cv;
    cv.fold.assign(at(n), 0);
    std::vector<Index> perm(at(n));
    for (Index i = 0; i < n; ++i) perm[at(i)] = i;
    Rng rng(mix_seed(seed, 0xC5));
    shuffle_in_place(perm, rng);
    for (Index i = 0; i < n; ++i) cv.fold[at(perm[at(i)])] = static_cast<int>(i % folds);
    cv.train_rows.resize(static_cast<std::size_t>(folds));
    cv.test_rows.resize(static_cast<std::size_t>(folds));
    cv.route.resize(static_cast<std::size_t>(folds));
    for (Index i = 0; i < n; ++i)
        for (int f = 0; f < folds; ++f)
            (cv.fold[at(i)] == f ? cv.test_rows : cv.train_rows)[static_cast<std::size_t>(f)].push_back(i);
    for (int f = 0; f < folds; ++f) {
        const auto& tr = cv.train_rows[static_cast<std::size_t>(f)];
        const auto nn = nearest_rows(take_rows(x, tr), take_rows(x, cv.test_rows[static_cast<std::size_t>(f)]));
        for (Index r : nn) cv.route[static_cast<std::size_t>(f)].push_back(tr[at(r)]);
    }
    return cv;
}

double cv_score(const CvContext& cv, const std::vector<Index>& labels, Index count, const Matrix& x, const Vector& y) {
    double sse = 0.0;
    Index total = 0;
    for (std::size_t f = 0; f < cv.train_rows.size(); ++f) {
        const auto& tr = cv.train_rows[f];
        const auto& te = cv.test_rows[f];
        if (tr.empty() || te.empty()) continue;
        std::vector<std::vector<Index>> part_train(at(count)), part_test(at(count));
        for (Index i : tr) part_train[at(labels[at(i)])].push_back(i);
        for (std::size_t t = 0; t < te.size(); ++t) part_test[at(labels[at(cv.route[f][t])])].push_back(te[t]);
        double fold_mean = 0.0;
        for (Index i : tr) fold_mean += y[i];
        fold_mean /= static_cast<double>(tr.size());
        for (Index l = 0; l < count; ++l) {
            const auto& te_rows = part_test[at(l)];
            if (te_rows.empty()) continue;
            const auto& tr_rows = part_train[at(l)];
            Vector pred;
            if (tr_rows.empty())
                pred = Vector::Constant(static_cast<Index>(te_rows.size()), fold_mean);
            else
                pred = ols_predict(take_rows(x, tr_rows), take(y, tr_rows), take_rows(x, te_rows));
            sse += (pred - take(y, te_rows)).squaredNorm();
            total += static_cast<Index>(te_rows.size());
        }
    }
    return total > 0 ? sse / static_cast<double>(total) : kInf;
}

const char* kind_name(ExtremumKind k) { return k == ExtremumKind::Maximum ? "max" : "min"; }

}  // namespace

GradientFlow steepest_targets(const KnnGraph& graph, const Vector& y) {
    const Index n = graph.size();
    if (y.size() != n) throw DataError("steepest_targets: outcome length does not match graph size");
    GradientFlow flow;
    flow.ascent.assign(at(n), kSelf);
    flow.descent.assign(at(n), kSelf);
    for (Index i = 0; i < n; ++i) {
        // (coincident?, steepness); neighbors visited in ascending index so strict '>' keeps the lower index
        std::pair<int, double> best_up{-1, 0.0}, best_down{-1, 0.0};
        for (const Edge& e : graph.neighbors[at(i)]) {
            const double diff = y[e.to] - y[i];
            if (diff == 0.0) continue;
            const std::pair<int, double> key =
                e.distance == 0.0 ? std::pair<int, double>{1, std::abs(diff)} : std::pair<int, double>{0, std::abs(diff) / e.distance};
            if (diff > 0.0 && key > best_up) best_up = key, flow.ascent[at(i)] = e.to;
            if (diff < 0.0 && key > best_down) best_down = key, flow.descent[at(i)] = e.to;
        }
    }
    return flow;
}

std::vector<Index> terminal_maxima(const GradientFlow& flow) { return follow_to_terminal(flow.ascent); }
std::vector<Index> terminal_minima(const GradientFlow& flow) { return follow_to_terminal(flow.descent); }

std::vector<Crystal> build_crystals(const GradientFlow& flow) {
    const auto tmax = terminal_maxima(flow);
    const auto tmin = terminal_minima(flow);
    std::map<std::pair<Index, Index>, std::vector<Index>> groups;
    for (std::size_t i = 0; i < tmax.size(); ++i) groups[{tmax[i], tmin[i]}].push_back(static_cast<Index>(i));
    std::vector<Crystal> crystals;
    crystals.reserve(groups.size());
    for (auto& [key, members] : groups) crystals.push_back({key.first, key.second, std::move(members)});
    return crystals;
}

MsHierarchy build_hierarchy(const std::vector<Crystal>& crystals, const GradientFlow& flow, const KnnGraph& graph,
                            const Vector& y) {
    const Index n = graph.size();
    if (y.size() != n || flow.size() != n) throw DataError("build_hierarchy: size mismatch");
    MsHierarchy h;
    h.y = y;
    h.base_crystals = crystals;
    h.base_max.assign(at(n), kSelf);
    h.base_min.assign(at(n), kSelf);
    for (const Crystal& c : crystals)
        for (Index m : c.members) h.base_max[at(m)] = c.max_point, h.base_min[at(m)] = c.min_point;
    h.edges = undirected_edges(graph);

    // per side: for every surviving extremum, the best boundary value towards each adjacent basin
    // (highest for maxima, lowest for minima); merged into the survivor on cancellation
    std::vector<std::map<Index, double>> boundary[2];
    std::vector<Index> active[2];
    const std::vector<Index>* base[2] = {&h.base_max, &h.base_min};
    for (int side = 0; side < 2; ++side) {
        const bool is_max = side == 0;
        boundary[side].resize(at(n));
        for (Index i = 0; i < n; ++i)
            if ((is_max ? flow.ascent : flow.descent)[at(i)] == kSelf) active[side].push_back(i);
        for (const auto& [i, j] : h.edges) {
            const Index a = (*base[side])[at(i)];
            const Index b = (*base[side])[at(j)];
            if (a == b) continue;
            const double sv = is_max ? std::min(y[i], y[j]) : std::max(y[i], y[j]);
            for (auto [u, v] : {std::pair{a, b}, std::pair{b, a}}) {
                auto [it, inserted] = boundary[side][at(u)].emplace(v, sv);
                if (!inserted) it->second = is_max ? std::max(it->second, sv) : std::min(it->second, sv);
            }
        }
    }

    for (;;) {
        Merge best;
        bool found = false;
        for (int side = 0; side < 2; ++side) {
            const bool is_max = side == 0;
            // ordered by (persistence, maxima first, lower index); sides are visited max first
            // and active lists ascend, so strict '<' keeps the earlier candidate on ties
            for (Index a : active[side]) {
                Candidate c{is_max ? -kInf : kInf, kSelf};
                for (const auto& [b, sv] : boundary[side][at(a)]) {
                    if (!(is_max ? outranks(y, b, a) : outranks(y, a, b))) continue;
                    // map order visits lower survivors first
                    if (is_max ? sv > c.saddle : sv < c.saddle) c = {sv, b};
                }
                if (c.survivor == kSelf) continue;
                const double pers = is_max ? y[a] - c.saddle : c.saddle - y[a];
                if (!found || pers < best.persistence) {
                    best = {pers, is_max ? ExtremumKind::Maximum : ExtremumKind::Minimum, a, c.survivor, c.saddle};
                    found = true;
                }
            }
        }
        if (!found) break;
        const int side = best.kind == ExtremumKind::Maximum ? 0 : 1;
        const bool is_max = side == 0;
        auto& bd = boundary[side];
        const Index gone = best.cancelled, keep = best.survivor;
        for (const auto& [nb, sv] : bd[at(gone)]) {
            bd[at(nb)].erase(gone);
            if (nb == keep) continue;
            for (auto [u, v] : {std::pair{keep, nb}, std::pair{nb, keep}}) {
                auto [it, inserted] = bd[at(u)].emplace(v, sv);
                if (!inserted) it->second = is_max ? std::max(it->second, sv) : std::min(it->second, sv);
            }
        }
        bd[at(gone)].clear();
        active[side].erase(std::find(active[side].begin(), active[side].end(), gone));
        h.merges.push_back(best);
    }

    // essential extrema: persistence is the outcome range of the component
    const auto comp = connected_components(graph);
    std::map<Index, std::pair<double, double>> range;
    for (Index i = 0; i < n; ++i) {
        auto [it, inserted] = range.emplace(comp[at(i)], std::pair<double, double>{y[i], y[i]});
        if (!inserted) it->second = {std::min(it->second.first, y[i]), std::max(it->second.second, y[i])};
    }
    for (Index m : active[0])
        h.essential.push_back({ExtremumKind::Maximum, m, y[m] - range[comp[at(m)]].first});
    for (Index m : active[1])
        h.essential.push_back({ExtremumKind::Minimum, m, range[comp[at(m)]].second - y[m]});
    return h;
}

LevelLabels MsHierarchy::labels_at(Index level) const {
    require(level >= 0 && level < levels(), "hierarchy level out of range");
    const auto n = base_max.size();
    std::vector<Index> pmax(n), pmin(n);
    for (std::size_t i = 0; i < n; ++i) pmax[i] = pmin[i] = static_cast<Index>(i);
    for (Index m = 0; m < level; ++m) {
        const Merge& mg = merges[at(m)];
        (mg.kind == ExtremumKind::Maximum ? pmax : pmin)[at(mg.cancelled)] = mg.survivor;
    }
    LevelLabels out;
    out.labels.resize(n);
    std::map<std::pair<Index, Index>, Index> ids;
    for (std::size_t i = 0; i < n; ++i) {
        const std::pair<Index, Index> key{find_root(pmax, base_max[i]), find_root(pmin, base_min[i])};
        auto it = ids.find(key);
        if (it == ids.end()) {
            it = ids.emplace(key, static_cast<Index>(ids.size())).first;
            out.max_point.push_back(key.first);
            out.min_point.push_back(key.second);
        }
        out.labels[i] = it->second;
    }
    return out;
}

nlohmann::json MsHierarchy::merges_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const Merge& m : merges)
        arr.push_back({{"persistence", m.persistence},
                       {"kind", kind_name(m.kind)},
                       {"cancelled", m.cancelled},
                       {"survivor", m.survivor},
                       {"saddle", m.saddle}});
    return arr;
}

Partitioning single_partition(const Vector& y) {
    return finish(std::vector<Index>(at(y.size()), 0), 1, 0, y);
}

Partitioning partition_at(const MsHierarchy& h, const PartitionPolicy& policy, const Matrix& features) {
    const Index n = static_cast<Index>(h.base_max.size());
    require(policy.min_size >= 1, "min_size must be positive");

    auto cut = [&](Index level, Index& count) {
        const LevelLabels lv = h.labels_at(level);
        return merge_small(lv.labels, lv.count(), h, policy.min_size, count);
    };

    switch (policy.kind) {
    case PartitionPolicy::Kind::CrystalCount: {
        require(policy.target_count >= 1, "target crystal count must be positive");
        if (policy.target_count == 1) return single_partition(h.y);
        Index best_level = 0, best_gap = std::numeric_limits<Index>::max(), best_count = 0;
        for (Index l = 0; l < h.levels(); ++l) {
            const Index c = h.labels_at(l).count();
            const Index gap = std::abs(c - policy.target_count);
            if (gap <= best_gap) best_gap = gap, best_level = l, best_count = c;  // later level wins ties
        }
        Index count = 0;
        auto labels = cut(best_level, count);
        Partitioning p = finish(std::move(labels), count, best_level, h.y);
        p.inexact = best_count != policy.target_count || count != policy.target_count;
        return p;
    }
    case PartitionPolicy::Kind::MinSize: {
        const auto comp = [&] {
            std::vector<Index> parent(at(n));
            for (Index i = 0; i < n; ++i) parent[at(i)] = i;
            for (const auto& [i, j] : h.edges) parent[at(find_root(parent, i))] = find_root(parent, j);
            std::vector<Index> c(at(n));
            for (Index i = 0; i < n; ++i) c[at(i)] = find_root(parent, i);
            return c;
        }();
        std::map<Index, Index> comp_size;
        for (Index c : comp) ++comp_size[c];
        Index chosen = h.levels() - 1;
        for (Index l = 0; l < h.levels(); ++l) {
            const LevelLabels lv = h.labels_at(l);
            auto sizes = count_sizes(lv.labels, lv.count());
            std::vector<Index> label_comp(sizes.size());
            for (Index i = 0; i < n; ++i) label_comp[at(lv.labels[at(i)])] = comp[at(i)];
            bool ok = true;
            for (std::size_t c = 0; c < sizes.size() && ok; ++c)
                ok = sizes[c] >= policy.min_size || comp_size[label_comp[c]] < policy.min_size;
            if (ok) {
                chosen = l;
                break;
            }
        }
        Index count = 0;
        auto labels = cut(chosen, count);
        return finish(std::move(labels), count, chosen, h.y);
    }
    case PartitionPolicy::Kind::CrossValidated: {
        require(features.rows() == n, "partition_at: feature rows do not match hierarchy size");
        require(policy.cv_folds >= 2, "cv_folds must be at least 2");
        const int folds = static_cast<int>(std::min<Index>(policy.cv_folds, n));
        if (n < 2 * folds) return single_partition(h.y);
        const CvContext cv = make_cv(features, folds, policy.seed);
        std::map<std::vector<Index>, double> scored;

        Partitioning best = single_partition(h.y);
        best.cv_mse = cv_score(cv, best.labels, 1, features, h.y);
        scored[best.labels] = best.cv_mse;
        for (Index l = h.levels() - 1; l >= 0; --l) {
            // crystal counts only grow towards finer levels
            const LevelLabels lv = h.labels_at(l);
            if (lv.count() > policy.max_partitions) break;
            Index count = 0;
            auto labels = merge_small(lv.labels, lv.count(), h, policy.min_size, count);
            if (scored.count(labels)) continue;
            const double score = cv_score(cv, labels, count, features, h.y);
            scored[labels] = score;
            if (score < best.cv_mse) {
                best = finish(std::move(labels), count, l, h.y);
                best.cv_mse = score;
            }
        }
        return best;
    }
    }
    return single_partition(h.y);
}

std::vector<Index> Partitioning::sizes() const { return count_sizes(labels, count); }

std::vector<Index> Partitioning::members(Index label) const {
    std::vector<Index> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) out.push_back(static_cast<Index>(i));
    return out;
}

nlohmann::json Partitioning::to_json() const {
    return {{"labels", labels}, {"count", count},         {"level", level},   {"inexact", inexact},
            {"max_point", max_point}, {"min_point", min_point}, {"cv_mse", cv_mse}};
}

Partitioning Partitioning::from_json(const nlohmann::json& j) {
    Partitioning p;
    j.at("labels").get_to(p.labels);
    j.at("count").get_to(p.count);
    j.at("level").get_to(p.level);
    j.at("inexact").get_to(p.inexact);
    j.at("max_point").get_to(p.max_point);
    j.at("min_point").get_to(p.min_point);
    if (j.contains("cv_mse") && !j.at("cv_mse").is_null()) j.at("cv_mse").get_to(p.cv_mse);
    return p;
}

std::vector<Index> nearest_rows(const Matrix& reference, const Matrix& queries) {
    if (reference.cols() != queries.cols()) throw DataError("nearest_rows: column count mismatch");
    require(reference.rows() >= 1, "nearest_rows: empty reference set");
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ref = reference;
    const Index p = reference.cols();
    std::vector<Index> out(at(queries.rows()));
    std::vector<double> q(at(p));
    for (Index r = 0; r < queries.rows(); ++r) {
        for (Index c = 0; c < p; ++c) q[at(c)] = queries(r, c);
        double best = kInf;
        Index arg = 0;
        for (Index i = 0; i < ref.rows(); ++i) {
            const double* xi = ref.data() + i * p;
            double s = 0.0;
            for (Index c = 0; c < p; ++c) {
                const double d = xi[c] - q[at(c)];
                s += d * d;
            }
            if (s < best) best = s, arg = i;
        }
        out[at(r)] = arg;
    }
    return out;
}

std::vector<Index> assign_new(const Partitioning& partitioning, const Matrix& train_features, const Matrix& new_features) {
    if (train_features.cols() != new_features.cols()) throw DataError("assign_new: column count mismatch");
    if (static_cast<Index>(partitioning.labels.size()) != train_features.rows())
        throw DataError("assign_new: partitioning does not match training rows");
    if (partitioning.count == 1) return std::vector<Index>(at(new_features.rows()), 0);
    const auto nn = nearest_rows(train_features, new_features);
    std::vector<Index> out(nn.size());
    for (std::size_t i = 0; i < nn.size(); ++i) out[i] = partitioning.labels[at(nn[i])];
    return out;
}

nlohmann::json PartitionPolicy::to_json() const {
    const char* names[] = {"crystal_count", "min_size", "cv"};
    return {{"kind", names[static_cast<int>(kind)]}, {"target_count", target_count}, {"min_size", min_size},
            {"max_partitions", max_partitions},      {"cv_folds", cv_folds},         {"seed", seed}};
}

PartitionPolicy PartitionPolicy::from_json(const nlohmann::json& j) {
    PartitionPolicy p;
    const auto kind = j.value("kind", std::string("cv"));
    if (kind == "crystal_count")
        p.kind = Kind::CrystalCount;
    else if (kind == "min_size")
        p.kind = Kind::MinSize;
    else if (kind == "cv")
        p.kind = Kind::CrossValidated;
    else
        throw DataError("unknown partition policy '" + kind + "'");
    p.target_count = j.value("target_count", p.target_count);
    p.min_size = j.value("min_size", p.min_size);
    p.max_partitions = j.value("max_partitions", p.max_partitions);
    p.cv_folds = j.value("cv_folds", p.cv_folds);
    p.seed = j.value("seed", p.seed);
    return p;
}

nlohmann::json MsParams::to_json() const { return {{"k", k}, {"policy", policy.to_json()}}; }

MsParams MsParams::from_json(const nlohmann::json& j) {
    MsParams p;
    p.k = j.value("k", Index{0});
    if (j.contains("policy")) p.policy = PartitionPolicy::from_json(j.at("policy"));
    return p;
}

MsFit fit_morse_smale(const Matrix& features, const Vector& y, const MsParams& params) {
    const Index n = features.rows();
    if (y.size() != n) throw DataError("fit_morse_smale: outcome length does not match feature rows");
    MsFit fit;
    if (n < 2 || (params.policy.kind == PartitionPolicy::Kind::CrystalCount && params.policy.target_count == 1)) {
        fit.partitioning = single_partition(y);
        return fit;
    }
    const Index k = std::min(params.k > 0 ? params.k : default_k(n), n - 1);
    fit.graph = build_knn(features, k, params.jobs);
    const GradientFlow flow = steepest_targets(fit.graph, y);
    fit.hierarchy = build_hierarchy(build_crystals(flow), flow, fit.graph, y);
    fit.partitioning = partition_at(fit.hierarchy, params.policy, features);
    return fit;
}

}  // namespace msreg
