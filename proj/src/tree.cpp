#include "msreg/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace msreg {

namespace {

std::size_t at(Index i) { return static_cast<std::size_t>(i); }

struct SplitSearch {
    Index feature = -1;
    double threshold = 0.0;
    double score = 0.0;  // SL^2/nL + SR^2/nR; larger is a lower child SSE
};

// Scans midpoints between distinct sorted values of one feature; ties keep the lower threshold.
void scan_feature(const Matrix& x, const Vector& y, const std::vector<Index>& rows, Index feature, Index min_child,
                  std::vector<std::pair<double, double>>& scratch, SplitSearch& best) {
    scratch.clear();
    double total = 0.0;
    for (Index r : rows) {
        scratch.emplace_back(x(r, feature), y[r]);
        total += y[r];
    }
    std::sort(scratch.begin(), scratch.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const auto m = static_cast<Index>(scratch.size());
    double left = 0.0;
    for (Index k = 0; k + 1 < m; ++k) {
        left += scratch[at(k)].second;
        const double lo = scratch[at(k)].first, hi = scratch[at(k + 1)].first;
        if (lo == hi) continue;
        const Index nl = k + 1, nr = m - nl;
        if (nl < min_child || nr < min_child) continue;
        const double right = total - left;
        const double score = left * left / static_cast<double>(nl) + right * right / static_cast<double>(nr);
        if (best.feature < 0 || score > best.score) {
            double mid = 0.5 * (lo + hi);
            if (!(mid >= lo && mid < hi)) mid = lo;
            best = {feature, mid, score};
        }
    }
}

struct NodeStats {
    double mean = 0.0;
    double sse = 0.0;
    double sum = 0.0;
};

NodeStats node_stats(const Vector& y, const std::vector<Index>& rows) {
    NodeStats s;
    for (Index r : rows) s.sum += y[r];
    s.mean = s.sum / static_cast<double>(rows.size());
    for (Index r : rows) s.sse += (y[r] - s.mean) * (y[r] - s.mean);
    return s;
}

Index add_leaf(Tree& t, const Vector& y, const std::vector<Index>& rows) {
    TreeNode node;
    node.value = node_stats(y, rows).mean;
    node.count = static_cast<Index>(rows.size());
    t.nodes.push_back(node);
    return static_cast<Index>(t.nodes.size()) - 1;
}

void partition_rows(const Matrix& x, const std::vector<Index>& rows, Index feature, double threshold,
                    std::vector<Index>& left, std::vector<Index>& right) {
    for (Index r : rows) (x(r, feature) <= threshold ? left : right).push_back(r);
}

struct CartGrower {
    const Matrix& x;
    const Vector& y;
    Index min_node;
    Index mtry;
    Rng& rng;
    Tree& tree;
    std::vector<std::pair<double, double>> scratch;
    std::vector<Index> features;

    Index grow(const std::vector<Index>& rows) {
        const NodeStats stats = node_stats(y, rows);
        const Index self = add_leaf(tree, y, rows);
        if (static_cast<Index>(rows.size()) < min_node || rows.size() < 2) return self;
        const double scale = std::max(stats.sse, 1e-300);
        if (stats.sse <= 1e-14 * (stats.sum * stats.sum / static_cast<double>(rows.size()) + 1.0)) return self;

        const Index p = x.cols();
        features.resize(at(p));
        std::iota(features.begin(), features.end(), Index{0});
        std::vector<Index> candidates;
        if (mtry >= p) {
            candidates = features;
        } else {
            // partial Fisher-Yates for mtry distinct features
            for (Index i = 0; i < mtry; ++i) {
                const auto j = static_cast<Index>(i + static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(p - i))));
                std::swap(features[at(i)], features[at(j)]);
            }
            candidates.assign(features.begin(), features.begin() + mtry);
            std::sort(candidates.begin(), candidates.end());
        }
        SplitSearch best;
        for (Index f : candidates) scan_feature(x, y, rows, f, 1, scratch, best);
        const double parent = stats.sum * stats.sum / static_cast<double>(rows.size());
        if (best.feature < 0 || best.score - parent <= 1e-12 * scale) return self;

        std::vector<Index> left, right;
        partition_rows(x, rows, best.feature, best.threshold, left, right);
        const Index l = grow(left);
        const Index r = grow(right);
        TreeNode& node = tree.nodes[at(self)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = l;
        node.right = r;
        return self;
    }
};

struct CtreeGrower {
    const Matrix& x;
    const Vector& y;
    CtreeOptions opt;
    Tree& tree;
    std::vector<std::pair<double, double>> scratch;

    Index grow(const std::vector<Index>& rows) {
        const Index self = add_leaf(tree, y, rows);
        const auto n = static_cast<Index>(rows.size());
        if (n < 2 * opt.min_node || n < 3) return self;
        const std::vector<double> padj = ctree_node_pvalues(take_rows(x, rows), take(y, rows));
        const auto winner = static_cast<Index>(std::min_element(padj.begin(), padj.end()) - padj.begin());
        tree.nodes[at(self)].p_value = padj[at(winner)];
        if (padj[at(winner)] > opt.alpha) return self;

        SplitSearch best;
        scan_feature(x, y, rows, winner, opt.min_node, scratch, best);
        if (best.feature < 0) return self;
        std::vector<Index> left, right;
        partition_rows(x, rows, best.feature, best.threshold, left, right);
        const Index l = grow(left);
        const Index r = grow(right);
        TreeNode& node = tree.nodes[at(self)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = l;
        node.right = r;
        return self;
    }
};

void check_xy(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size()) throw DataError("feature rows and outcome length differ");
    if (x.rows() < 1) throw DataError("tree fitting needs at least one row");
    if (!x.allFinite() || !y.allFinite()) throw DataError("non-finite values in tree inputs");
}

}  // namespace

Index Tree::leaf_of(const Matrix& x, Index row, Index swap_feature, double swap_value) const {
    Index v = 0;
    while (nodes[at(v)].feature >= 0) {
        const TreeNode& node = nodes[at(v)];
        const double value = node.feature == swap_feature ? swap_value : x(row, node.feature);
        v = value <= node.threshold ? node.left : node.right;
    }
    return v;
}

Vector Tree::predict(const Matrix& x) const {
    if (x.cols() != input_columns) throw DataError("tree: column count mismatch");
    if (!x.allFinite()) throw DataError("tree: non-finite feature value");
    Vector out(x.rows());
    for (Index r = 0; r < x.rows(); ++r) out[r] = predict_row(x, r);
    return out;
}

bool Tree::uses_feature(Index feature) const {
    return std::any_of(nodes.begin(), nodes.end(), [&](const TreeNode& n) { return n.feature == feature; });
}

Index Tree::leaf_count() const {
    return std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; });
}

Index Tree::depth() const {
    std::vector<Index> d(nodes.size(), 0);
    Index out = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out = std::max(out, d[i]);
        if (nodes[i].feature >= 0) d[at(nodes[i].left)] = d[at(nodes[i].right)] = d[i] + 1;
    }
    return out;
}

nlohmann::json Tree::to_json() const {
    std::vector<Index> feature, left, right, count;
    std::vector<double> threshold, value;
    for (const TreeNode& n : nodes) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        value.push_back(n.value);
        count.push_back(n.count);
    }
    return {{"input_columns", input_columns},
            {"growth", {{"kind", growth.kind}, {"alpha", growth.alpha}, {"min_node", growth.min_node}, {"mtry", growth.mtry}}},
            {"feature", feature},
            {"threshold", threshold},
            {"left", left},
            {"right", right},
            {"value", value},
            {"count", count}};
}

Tree Tree::from_json(const nlohmann::json& j) {
    Tree t;
    t.input_columns = j.at("input_columns").get<Index>();
    const auto& g = j.at("growth");
    t.growth = {g.at("kind").get<std::string>(), g.at("alpha").get<double>(), g.at("min_node").get<Index>(),
                g.at("mtry").get<Index>()};
    const auto feature = j.at("feature").get<std::vector<Index>>();
    const auto threshold = j.at("threshold").get<std::vector<double>>();
    const auto left = j.at("left").get<std::vector<Index>>();
    const auto right = j.at("right").get<std::vector<Index>>();
    const auto value = j.at("value").get<std::vector<double>>();
    const auto count = j.at("count").get<std::vector<Index>>();
    for (std::size_t i = 0; i < feature.size(); ++i)
        t.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i], count[i], 1.0});
    return t;
}

std::vector<double> ctree_node_pvalues(const Matrix& x, const Vector& y) {
    const Index n = x.rows();
    const Index p = x.cols();
    std::vector<double> out(at(p), 1.0);
    if (n < 3) return out;
    const double ym = y.mean();
    const Vector yc = y.array() - ym;
    const double syy = yc.squaredNorm();
    if (!(syy > 0.0)) return out;
    const boost::math::students_t dist(static_cast<double>(n - 2));
    for (Index j = 0; j < p; ++j) {
        const Vector xc = x.col(j).array() - x.col(j).mean();
        const double sxx = xc.squaredNorm();
        if (!(sxx > 0.0)) continue;
        const double r = std::clamp(xc.dot(yc) / std::sqrt(sxx * syy), -1.0, 1.0);
        double pv = 0.0;
        if (std::abs(r) < 1.0) {
            const double t = std::abs(r) * std::sqrt(static_cast<double>(n - 2)) / std::sqrt(1.0 - r * r);
            pv = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
        }
        out[at(j)] = std::min(1.0, pv * static_cast<double>(p));
    }
    return out;
}

Tree fit_ctree(const Matrix& x, const Vector& y, const CtreeOptions& options) {
    check_xy(x, y);
    require(options.alpha > 0.0 && options.alpha < 1.0, "ctree alpha must lie in (0, 1)");
    require(options.min_node >= 1, "min_node must be positive");
    Tree t;
    t.input_columns = x.cols();
    t.growth = {"ctree", options.alpha, options.min_node, x.cols()};
    std::vector<Index> rows(at(x.rows()));
    std::iota(rows.begin(), rows.end(), Index{0});
    CtreeGrower g{x, y, options, t, {}};
    g.grow(rows);
    return t;
}

Tree fit_regression_tree(const Matrix& x, const Vector& y, const std::vector<Index>& rows, Index min_node, Index mtry,
                         Rng& rng) {
    require(!rows.empty(), "regression tree needs at least one row");
    require(min_node >= 1, "min_node must be positive");
    Tree t;
    t.input_columns = x.cols();
    const Index eff_mtry = std::clamp<Index>(mtry, 1, x.cols());
    t.growth = {"cart", 0.0, min_node, eff_mtry};
    CartGrower g{x, y, min_node, eff_mtry, rng, t, {}, {}};
    g.grow(rows);
    return t;
}

Index resolve_mtry(Index p, const ForestOptions& options) {
    switch (options.mtry_policy) {
    case MtryPolicy::Third: return std::max<Index>(1, std::llround(static_cast<double>(p) / 3.0));
    case MtryPolicy::All: return p;
    case MtryPolicy::Fixed: return std::clamp<Index>(options.mtry, 1, p);
    }
    return p;
}

Forest fit_random_forest(const Matrix& x, const Vector& y, const ForestOptions& options) {
    check_xy(x, y);
    require(options.n_trees >= 1, "forest needs at least one tree");
    require(options.min_node >= 1, "min_node must be positive");
    const Index n = x.rows();
    Forest forest;
    forest.mtry = resolve_mtry(x.cols(), options);
    forest.input_columns = x.cols();
    forest.trees.resize(at(options.n_trees));
    forest.oob.resize(at(options.n_trees));

    auto grow_tree = [&](int t) {
        Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(t)));
        std::vector<Index> rows(at(n));
        std::vector<Index> oob;
        if (options.bootstrap) {
            std::vector<bool> drawn(at(n), false);
            for (Index i = 0; i < n; ++i) {
                rows[at(i)] = static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(n)));
                drawn[at(rows[at(i)])] = true;
            }
            for (Index i = 0; i < n; ++i)
                if (!drawn[at(i)]) oob.push_back(i);
        } else {
            std::iota(rows.begin(), rows.end(), Index{0});
        }
        forest.trees[at(t)] = fit_regression_tree(x, y, rows, options.min_node, forest.mtry, rng);
        forest.oob[at(t)] = std::move(oob);
    };

    const int jobs = std::clamp(options.jobs, 1, options.n_trees);
    if (jobs == 1) {
        for (int t = 0; t < options.n_trees; ++t) grow_tree(t);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&, w] {
                for (int t = w; t < options.n_trees; t += jobs) grow_tree(t);
            });
        for (auto& th : pool) th.join();
    }
    return forest;
}

Vector Forest::predict(const Matrix& x) const {
    if (x.cols() != input_columns) throw DataError("forest: column count mismatch");
    if (!x.allFinite()) throw DataError("forest: non-finite feature value");
    Vector sum = Vector::Zero(x.rows());
    for (const Tree& t : trees)
        for (Index r = 0; r < x.rows(); ++r) sum[r] += t.predict_row(x, r);
    return sum / static_cast<double>(trees.size());
}

nlohmann::json Forest::to_json() const {
    nlohmann::json tj = nlohmann::json::array();
    for (const Tree& t : trees) tj.push_back(t.to_json());
    return {{"type", "forest"}, {"mtry", mtry}, {"input_columns", input_columns}, {"trees", tj}, {"oob", oob}};
}

Forest Forest::from_json(const nlohmann::json& j) {
    Forest f;
    f.mtry = j.at("mtry").get<Index>();
    f.input_columns = j.at("input_columns").get<Index>();
    for (const auto& t : j.at("trees")) f.trees.push_back(Tree::from_json(t));
    j.at("oob").get_to(f.oob);
    return f;
}

std::vector<Index> rank_descending(const std::vector<double>& scores) {
    std::vector<Index> order(scores.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[at(a)] > scores[at(b)]; });
    std::vector<Index> rank(scores.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) rank[at(order[pos])] = static_cast<Index>(pos) + 1;
    return rank;
}

ImportanceReport permutation_importance(const Forest& forest, const Matrix& x, const Vector& y, std::uint64_t seed,
                                        const std::vector<std::string>& names) {
    if (x.cols() != forest.input_columns) throw DataError("importance: column count mismatch");
    if (x.rows() != y.size()) throw DataError("importance: outcome length mismatch");
    const Index p = x.cols();
    std::vector<double> total(at(p), 0.0);
    Index used_trees = 0;
    std::vector<Index> perm;
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
        const auto& oob = forest.oob[t];
        if (oob.empty()) continue;
        for (Index r : oob)
            if (r >= x.rows()) throw DataError("importance: OOB rows exceed the supplied data");
        ++used_trees;
        const Tree& tree = forest.trees[t];
        double base = 0.0;
        for (Index r : oob) {
            const double e = tree.predict_row(x, r) - y[r];
            base += e * e;
        }
        base /= static_cast<double>(oob.size());
        for (Index j = 0; j < p; ++j) {
            if (!tree.uses_feature(j)) continue;
            perm = oob;
            Rng rng(mix_seed(seed, t, static_cast<std::uint64_t>(j)));
            shuffle_in_place(perm, rng);
            double permuted = 0.0;
            for (std::size_t k = 0; k < oob.size(); ++k) {
                const double e = tree.predict_row(x, oob[k], j, x(perm[k], j)) - y[oob[k]];
                permuted += e * e;
            }
            total[at(j)] += permuted / static_cast<double>(oob.size()) - base;
        }
    }
    if (used_trees == 0) throw DataError("permutation importance: every tree has an empty out-of-bag set");
    ImportanceReport rep;
    for (Index j = 0; j < p; ++j) {
        rep.feature_names.push_back(at(j) < names.size() ? names[at(j)] : "x" + std::to_string(j + 1));
        rep.importance.push_back(total[at(j)] / static_cast<double>(used_trees));
    }
    rep.rank = rank_descending(rep.importance);
    return rep;
}

nlohmann::json ImportanceReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t j = 0; j < feature_names.size(); ++j)
        arr.push_back({{"feature", feature_names[j]}, {"importance", importance[j]}, {"rank", rank[j]}});
    return arr;
}

void ImportanceReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "feature,importance,rank\n" << std::setprecision(17);
    for (std::size_t j = 0; j < feature_names.size(); ++j)
        out << feature_names[j] << ',' << importance[j] << ',' << rank[j] << '\n';
}

}  // namespace msreg
