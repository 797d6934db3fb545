#include "msreg/knn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <thread>

namespace msreg {

std::size_t KnnGraph::edge_count() const {
    std::size_t twice = 0;
    for (const auto& list : neighbors) twice += list.size();
    return twice / 2;
}

Index default_k(Index n) {
    const auto log_term = static_cast<Index>(std::ceil(std::log2(static_cast<double>(std::max<Index>(n, 2)))));
    return std::min(std::max<Index>(15, 3 * log_term), std::max<Index>(n - 1, 1));
}

KnnGraph build_knn(const Matrix& x, Index k, int jobs) {
    const Index n = x.rows();
    require(n >= 2, "build_knn needs at least two points");
    require(k >= 1 && k <= n - 1, "k must lie in [1, n-1]");

    // row-major copy so each point is contiguous
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> pts = x;
    const Index p = x.cols();

    KnnGraph g;
    g.k = k;
    g.out_neighbors.assign(static_cast<std::size_t>(n), {});

    auto worker = [&](Index begin, Index end) {
        std::vector<std::pair<double, Index>> d2(static_cast<std::size_t>(n - 1));
        for (Index i = begin; i < end; ++i) {
            const double* xi = pts.data() + i * p;
            std::size_t m = 0;
            for (Index j = 0; j < n; ++j) {
                if (j == i) continue;
                const double* xj = pts.data() + j * p;
                double s = 0.0;
                for (Index c = 0; c < p; ++c) {
                    const double diff = xi[c] - xj[c];
                    s += diff * diff;
                }
                d2[m++] = {s, j};
            }
            // pair ordering gives (distance, lower index) tie-break
            std::partial_sort(d2.begin(), d2.begin() + k, d2.end());
            auto& out = g.out_neighbors[static_cast<std::size_t>(i)];
            out.reserve(static_cast<std::size_t>(k));
            for (Index t = 0; t < k; ++t) out.push_back({d2[static_cast<std::size_t>(t)].second, std::sqrt(d2[static_cast<std::size_t>(t)].first)});
        }
    };

    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n / 64) + 1));
    if (threads == 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        const Index chunk = (n + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const Index b = t * chunk, e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }

    g.neighbors.assign(static_cast<std::size_t>(n), {});
    for (Index i = 0; i < n; ++i)
        for (const Edge& e : g.out_neighbors[static_cast<std::size_t>(i)]) {
            g.neighbors[static_cast<std::size_t>(i)].push_back(e);
            g.neighbors[static_cast<std::size_t>(e.to)].push_back({i, e.distance});
        }
    for (auto& list : g.neighbors) {
        std::sort(list.begin(), list.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
        list.erase(std::unique(list.begin(), list.end(), [](const Edge& a, const Edge& b) { return a.to == b.to; }),
                   list.end());
    }
    return g;
}

std::vector<Index> connected_components(const KnnGraph& graph) {
    const Index n = graph.size();
    std::vector<Index> comp(static_cast<std::size_t>(n), -1);
    std::vector<Index> stack;
    for (Index s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        comp[static_cast<std::size_t>(s)] = s;
        stack.push_back(s);
        while (!stack.empty()) {
            const Index v = stack.back();
            stack.pop_back();
            for (const Edge& e : graph.neighbors[static_cast<std::size_t>(v)])
                if (comp[static_cast<std::size_t>(e.to)] < 0) {
                    comp[static_cast<std::size_t>(e.to)] = s;
                    stack.push_back(e.to);
                }
        }
    }
    return comp;
}

void write_edge_csv(const std::filesystem::path& path, const KnnGraph& graph) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "i,j,distance\n" << std::setprecision(17);
    for (Index i = 0; i < graph.size(); ++i)
        for (const Edge& e : graph.neighbors[static_cast<std::size_t>(i)])
            if (i < e.to) out << i << ',' << e.to << ',' << e.distance << '\n';
}

}  // namespace msreg
