#pragma once

// Finite metric spaces, weighted-graph length spaces and their constructors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "model_plane.hpp"
#include "rng.hpp"

namespace roughcat {

inline constexpr double kMetricTol = 1e-9;

struct Coord {
    double x = 0.0;
    double y = 0.0;
};

inline std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// ---------------------------------------------------------------- finite metrics

struct FiniteMetric {
    std::size_t n = 0;
    std::vector<double> d; // row-major n x n
    std::vector<std::string> labels;

    double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
    const double* row(std::size_t i) const { return d.data() + i * n; }
};

struct MetricCheck {
    bool ok = true;
    std::string problem; // empty when ok
    double worst_violation = 0.0;
    std::array<std::size_t, 3> triple{0, 0, 0}; // d(i,j) > d(i,k) + d(k,j)
};

// Full check without throwing. The worst triangle violation is reported
// even when within tolerance; ties go to the lexicographically first triple.
inline MetricCheck check_metric(std::size_t n, const std::function<double(std::size_t, std::size_t)>& d) {
    MetricCheck r;
    for (std::size_t i = 0; i < n && r.problem.empty(); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = d(i, j);
            if (!std::isfinite(v)) {
                r.problem = "matrix[" + std::to_string(i) + "][" + std::to_string(j) + "] is not finite";
                break;
            }
            if (i == j && v != 0.0) {
                r.problem = "nonzero diagonal at matrix[" + std::to_string(i) + "][" + std::to_string(i) + "]";
                break;
            }
            if (v < 0.0) {
                r.problem = "negative entry at matrix[" + std::to_string(i) + "][" + std::to_string(j) + "]";
                break;
            }
            if (v != d(j, i)) {
                r.problem = "asymmetry between matrix[" + std::to_string(i) + "][" + std::to_string(j) +
                            "] and matrix[" + std::to_string(j) + "][" + std::to_string(i) + "]";
                break;
            }
        }
    }
    if (!r.problem.empty()) {
        r.ok = false;
        return r;
    }
    double worst = -kInf;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dij = d(i, j);
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                const double v = dij - d(i, k) - d(k, j);
                if (v > worst) {
                    worst = v;
                    r.triple = {i, j, k};
                }
            }
        }
    r.worst_violation = n >= 3 ? worst : 0.0;
    if (r.worst_violation > kMetricTol) {
        r.ok = false;
        r.problem = "triangle inequality violated by " + fmt_num(r.worst_violation) + " at triple (" +
                    std::to_string(r.triple[0]) + "," + std::to_string(r.triple[1]) + "," +
                    std::to_string(r.triple[2]) + ")";
    }
    return r;
}

inline FiniteMetric validate_metric(const std::vector<std::vector<double>>& m, std::vector<std::string> labels = {}) {
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        if (m[i].size() != n)
            fail(ErrorKind::invalid_input, "matrix row " + std::to_string(i) + " has " + std::to_string(m[i].size()) +
                                               " entries, expected " + std::to_string(n));
    if (!labels.empty() && labels.size() != n) fail(ErrorKind::invalid_input, "labels: size does not match matrix");
    auto chk = check_metric(n, [&](std::size_t i, std::size_t j) { return m[i][j]; });
    if (!chk.ok) fail(ErrorKind::invalid_input, chk.problem);
    FiniteMetric fm;
    fm.n = n;
    fm.d.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) fm.d[i * n + j] = m[i][j];
    fm.labels = std::move(labels);
    return fm;
}

// ---------------------------------------------------------------- graphs

struct GraphEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    double w = 0.0;
};

struct GraphSpace {
    std::size_t n = 0;
    std::vector<std::string> ids; // optional
    std::vector<Coord> coords;    // optional, size n when present
    std::vector<GraphEdge> edges;

    // adjacency, built by finalize()
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> targets;
    std::vector<double> weights;

    bool has_coords() const { return coords.size() == n && n > 0; }

    // Builds the adjacency. Connectivity is part of the GraphSpace contract;
    // only tests of the no-path error pass false.
    void finalize(bool require_connected = true) {
        if (n >= std::numeric_limits<std::uint32_t>::max()) fail(ErrorKind::resource_limit, "graph too large");
        std::vector<std::size_t> deg(n, 0);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto& ed = edges[e];
            if (ed.u >= n || ed.v >= n)
                fail(ErrorKind::invalid_input, "edges[" + std::to_string(e) + "] refers to a missing node");
            if (!(ed.w > 0.0) || !std::isfinite(ed.w))
                fail(ErrorKind::invalid_input, "edges[" + std::to_string(e) + "] weight must be > 0");
            if (ed.u == ed.v) fail(ErrorKind::invalid_input, "edges[" + std::to_string(e) + "] is a self loop");
            ++deg[ed.u];
            ++deg[ed.v];
        }
        offsets.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + deg[i];
        targets.assign(offsets[n], 0);
        weights.assign(offsets[n], 0.0);
        std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
        for (const auto& ed : edges) {
            targets[fill[ed.u]] = static_cast<std::uint32_t>(ed.v);
            weights[fill[ed.u]++] = ed.w;
            targets[fill[ed.v]] = static_cast<std::uint32_t>(ed.u);
            weights[fill[ed.v]++] = ed.w;
        }
        // connectivity
        if (n > 0 && require_connected) {
            std::vector<char> seen(n, 0);
            std::vector<std::size_t> stack{0};
            seen[0] = 1;
            std::size_t count = 1;
            while (!stack.empty()) {
                const std::size_t v = stack.back();
                stack.pop_back();
                for (std::size_t e = offsets[v]; e < offsets[v + 1]; ++e)
                    if (!seen[targets[e]]) {
                        seen[targets[e]] = 1;
                        ++count;
                        stack.push_back(targets[e]);
                    }
            }
            if (count != n) {
                std::size_t missing = 0;
                while (seen[missing]) ++missing;
                fail(ErrorKind::invalid_input, "graph is disconnected: node " + std::to_string(missing) +
                                                   " unreachable from node 0");
            }
        }
    }

    double max_edge_weight() const {
        double m = 0.0;
        for (const auto& e : edges) m = std::max(m, e.w);
        return m;
    }
};

namespace detail {

struct HeapItem {
    double d;
    std::uint32_t v;
    bool operator>(const HeapItem& o) const { return d > o.d || (d == o.d && v > o.v); }
};

}  // namespace detail

// Single-source shortest paths. Predecessors change only on strict
// improvement, which makes the recovered paths deterministic.
inline void dijkstra(const GraphSpace& g, std::size_t src, std::vector<double>& dist, std::vector<std::uint32_t>* pred,
                     std::size_t stop_at = static_cast<std::size_t>(-1)) {
    constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
    dist.assign(g.n, kInf);
    if (pred) pred->assign(g.n, none);
    std::priority_queue<detail::HeapItem, std::vector<detail::HeapItem>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.push({0.0, static_cast<std::uint32_t>(src)});
    while (!pq.empty()) {
        const auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        if (v == stop_at) break;
        for (std::size_t e = g.offsets[v]; e < g.offsets[v + 1]; ++e) {
            const std::uint32_t w = g.targets[e];
            const double nd = d + g.weights[e];
            if (nd < dist[w]) {
                dist[w] = nd;
                if (pred) (*pred)[w] = v;
                pq.push({nd, w});
            }
        }
    }
}

struct GraphPath {
    double length = 0.0;
    std::vector<std::size_t> nodes;
};

inline GraphPath shortest_path(const GraphSpace& g, std::size_t s, std::size_t t) {
    if (s >= g.n || t >= g.n) fail(ErrorKind::invalid_input, "node index out of range");
    GraphPath p;
    if (s == t) {
        p.nodes = {s};
        return p;
    }
    std::vector<double> dist;
    std::vector<std::uint32_t> pred;
    dijkstra(g, s, dist, &pred, t);
    if (!std::isfinite(dist[t]))
        fail(ErrorKind::no_path, "no path between nodes " + std::to_string(s) + " and " + std::to_string(t));
    p.length = dist[t];
    for (std::size_t v = t; v != s; v = pred[v]) p.nodes.push_back(v);
    p.nodes.push_back(s);
    std::reverse(p.nodes.begin(), p.nodes.end());
    return p;
}

// ---------------------------------------------------------------- handle

class Space;
using SpaceHandle = std::shared_ptr<const Space>;

// Read-only view of one row of distances; keeps cached storage alive.
struct RowView {
    std::shared_ptr<const std::vector<double>> hold;
    const double* data = nullptr;
    std::size_t size = 0;
    double operator[](std::size_t j) const { return data[j]; }
};

class Space {
public:
    using Oracle = std::function<double(std::size_t, std::size_t)>;

    static std::shared_ptr<Space> from_finite(FiniteMetric m, std::string provenance) {
        auto s = std::shared_ptr<Space>(new Space());
        s->n_ = m.n;
        s->finite_ = std::make_shared<FiniteMetric>(std::move(m));
        s->provenance_ = std::move(provenance);
        return s;
    }

    static std::shared_ptr<Space> from_graph(GraphSpace g, std::string provenance) {
        if (g.offsets.size() != g.n + 1) g.finalize();
        auto s = std::shared_ptr<Space>(new Space());
        s->n_ = g.n;
        s->max_edge_ = g.max_edge_weight();
        s->graph_ = std::make_shared<GraphSpace>(std::move(g));
        s->provenance_ = std::move(provenance);
        return s;
    }

    // Implicit spaces (too large to store) answer distances from a closure.
    static std::shared_ptr<Space> from_oracle(std::size_t n, Oracle d, std::string provenance,
                                              std::function<std::string(std::size_t)> label = {},
                                              std::function<std::optional<Coord>(std::size_t)> coord = {}) {
        auto s = std::shared_ptr<Space>(new Space());
        s->n_ = n;
        s->oracle_ = std::move(d);
        s->oracle_label_ = std::move(label);
        s->oracle_coord_ = std::move(coord);
        s->provenance_ = std::move(provenance);
        return s;
    }

    std::size_t size() const { return n_; }
    const std::string& provenance() const { return provenance_; }

    bool has_graph() const { return graph_ != nullptr; }
    bool is_finite() const { return finite_ != nullptr; }
    bool is_oracle() const { return static_cast<bool>(oracle_); }
    const GraphSpace& graph() const {
        if (!graph_) fail(ErrorKind::invalid_input, "space has no graph structure");
        return *graph_;
    }
    const FiniteMetric& finite() const {
        if (!finite_) fail(ErrorKind::invalid_input, "space is not a stored finite metric");
        return *finite_;
    }

    double distance(std::size_t i, std::size_t j) const {
        check_index(i);
        check_index(j);
        if (i == j) return 0.0;
        if (finite_) return finite_->at(i, j);
        if (oracle_) return oracle_(i, j);
        // Always measured from i, so the value never depends on cache state.
        // A search stopped at j yields exactly the full-row value.
        if (auto r = cached_row(i)) return (*r)[j];
        std::vector<double> dist;
        dijkstra(*graph_, i, dist, nullptr, j);
        return dist[j];
    }

    RowView row(std::size_t i) const {
        check_index(i);
        if (finite_) return {nullptr, finite_->row(i), n_};
        if (oracle_) {
            auto v = std::make_shared<std::vector<double>>(n_);
            for (std::size_t j = 0; j < n_; ++j) (*v)[j] = i == j ? 0.0 : oracle_(i, j);
            return {v, v->data(), n_};
        }
        auto r = cached_row(i);
        if (!r) r = compute_row(i);
        return {r, r->data(), n_};
    }

    std::string label(std::size_t i) const {
        check_index(i);
        if (finite_ && finite_->labels.size() == n_) return finite_->labels[i];
        if (graph_ && graph_->ids.size() == n_) return graph_->ids[i];
        if (oracle_label_) return oracle_label_(i);
        if (auto c = coord(i)) return "(" + fmt_num(c->x) + "," + fmt_num(c->y) + ")";
        return std::to_string(i);
    }

    std::optional<Coord> coord(std::size_t i) const {
        if (graph_ && graph_->has_coords()) return graph_->coords[i];
        if (coords_.size() == n_ && n_ > 0) return coords_[i];
        if (oracle_coord_) return oracle_coord_(i);
        return std::nullopt;
    }

    // Max edge weight plus measured metric distortion; added to every
    // tolerance that involves this space.
    double max_edge_weight() const { return max_edge_; }
    double distortion() const { return distortion_; }
    double budget() const { return max_edge_ + distortion_; }

    void set_budget(double max_edge, double distortion) {
        max_edge_ = max_edge;
        distortion_ = distortion;
    }
    void set_coords(std::vector<Coord> c) { coords_ = std::move(c); }

    FiniteMetric materialize(std::size_t cap = 4000) const {
        if (n_ > cap)
            fail(ErrorKind::resource_limit,
                 "space of " + std::to_string(n_) + " points exceeds materialization cap " + std::to_string(cap));
        if (finite_) return *finite_;
        FiniteMetric m;
        m.n = n_;
        m.d.assign(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            auto r = row(i);
            for (std::size_t j = 0; j < n_; ++j) m.d[i * n_ + j] = r[j];
        }
        // path-metric rows are symmetric up to summation order; make exact
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double v = std::min(m.d[i * n_ + j], m.d[j * n_ + i]);
                m.d[i * n_ + j] = m.d[j * n_ + i] = v;
            }
        m.labels.reserve(n_);
        for (std::size_t i = 0; i < n_; ++i) m.labels.push_back(label(i));
        return m;
    }

private:
    Space() = default;

    void check_index(std::size_t i) const {
        if (i >= n_) fail(ErrorKind::invalid_input, "point index " + std::to_string(i) + " out of range");
    }

    std::shared_ptr<const std::vector<double>> cached_row(std::size_t i) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(i);
        return it == cache_.end() ? nullptr : it->second;
    }

    std::shared_ptr<const std::vector<double>> compute_row(std::size_t i) const {
        auto v = std::make_shared<std::vector<double>>();
        dijkstra(*graph_, i, *v, nullptr);
        std::lock_guard<std::mutex> lock(mu_);
        auto [it, inserted] = cache_.emplace(i, v);
        if (inserted) {
            order_.push_back(i);
            const std::size_t cap = std::max<std::size_t>(16, (std::size_t{1} << 24) / std::max<std::size_t>(1, n_));
            while (order_.size() > cap) {
                cache_.erase(order_.front());
                order_.pop_front();
            }
        }
        return it->second;
    }

    std::size_t n_ = 0;
    std::string provenance_;
    std::shared_ptr<const FiniteMetric> finite_;
    std::shared_ptr<const GraphSpace> graph_;
    Oracle oracle_;
    std::function<std::string(std::size_t)> oracle_label_;
    std::function<std::optional<Coord>(std::size_t)> oracle_coord_;
    std::vector<Coord> coords_;
    double max_edge_ = 0.0;
    double distortion_ = 0.0;

    mutable std::mutex mu_;
    mutable std::unordered_map<std::size_t, std::shared_ptr<const std::vector<double>>> cache_;
    mutable std::deque<std::size_t> order_;
};

inline std::size_t nearest_node(const Space& s, Coord c) {
    std::size_t best = 0;
    double bd = kInf;
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto p = s.coord(i);
        if (!p) fail(ErrorKind::invalid_input, "space has no coordinates");
        const double d = std::hypot(p->x - c.x, p->y - c.y);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

// ---------------------------------------------------------------- constructors

inline constexpr std::size_t kDefaultNodeCap = 2'000'000;
inline constexpr std::size_t kDefaultProductCap = 3000;

enum class GridNorm { l1, l2 };

inline std::size_t grid_index(const Space& grid, double x, double y) {
    const auto& g = grid.graph();
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(g.n))));
    const double step = g.coords[1].x - g.coords[0].x;
    const double x0 = g.coords[0].x;
    const auto ix = std::llround((x - x0) / step);
    const auto iy = std::llround((y - x0) / step);
    if (ix < 0 || iy < 0 || ix >= static_cast<long long>(side) || iy >= static_cast<long long>(side))
        fail(ErrorKind::invalid_input, "point (" + fmt_num(x) + "," + fmt_num(y) + ") is outside the grid");
    return static_cast<std::size_t>(iy) * side + static_cast<std::size_t>(ix);
}

// Largest excess of the grid path metric over the ideal norm, measured on
// full rows from the given sources. Returns {absolute, relative}.
inline std::pair<double, double> measure_grid_distortion(const Space& grid, GridNorm norm,
                                                         const std::vector<std::size_t>& sources,
                                                         double min_relative_distance = 0.0) {
    double abs_d = 0.0, rel_d = 0.0;
    for (std::size_t s : sources) {
        auto r = grid.row(s);
        const Coord a = *grid.coord(s);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (j == s) continue;
            const Coord b = *grid.coord(j);
            const double ideal =
                norm == GridNorm::l1 ? std::abs(a.x - b.x) + std::abs(a.y - b.y) : std::hypot(a.x - b.x, a.y - b.y);
            abs_d = std::max(abs_d, r[j] - ideal);
            if (ideal >= min_relative_distance) rel_d = std::max(rel_d, r[j] / ideal - 1.0);
        }
    }
    return {abs_d, rel_d};
}

inline std::vector<std::size_t> grid_probe_sources(const Space& grid) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(grid.size()))));
    const std::size_t c = side / 2;
    return {0, side - 1, c * side + c, c * side, c};
}

// Square grid on [-halfwidth, halfwidth]^2. Node (ix, iy) has index iy*side + ix.
inline std::shared_ptr<Space> make_grid_plane(double halfwidth, double step, GridNorm norm,
                                              std::size_t cap = kDefaultNodeCap) {
    if (!(step > 0.0) || !std::isfinite(step)) fail(ErrorKind::invalid_input, "step must be > 0");
    if (!(halfwidth >= step)) fail(ErrorKind::invalid_input, "halfwidth must be >= step");
    const auto k = static_cast<std::size_t>(std::floor(halfwidth / step + 1e-9));
    const std::size_t side = 2 * k + 1;
    if (side * side > cap)
        fail(ErrorKind::resource_limit, "grid of " + std::to_string(side * side) + " nodes exceeds cap");
    GraphSpace g;
    g.n = side * side;
    g.coords.resize(g.n);
    for (std::size_t iy = 0; iy < side; ++iy)
        for (std::size_t ix = 0; ix < side; ++ix)
            g.coords[iy * side + ix] = {(static_cast<double>(ix) - static_cast<double>(k)) * step,
                                        (static_cast<double>(iy) - static_cast<double>(k)) * step};
    std::vector<std::array<int, 2>> moves{{1, 0}, {0, 1}};
    if (norm == GridNorm::l2) {
        moves.insert(moves.end(), {{1, 1}, {1, -1}, {2, 1}, {2, -1}, {1, 2}, {1, -2}});
    }
    const auto s = static_cast<long long>(side);
    for (long long iy = 0; iy < s; ++iy)
        for (long long ix = 0; ix < s; ++ix)
            for (const auto& m : moves) {
                const long long jx = ix + m[0], jy = iy + m[1];
                if (jx < 0 || jy < 0 || jx >= s || jy >= s) continue;
                const double w = step * std::sqrt(static_cast<double>(m[0] * m[0] + m[1] * m[1]));
                g.edges.push_back({static_cast<std::size_t>(iy * s + ix), static_cast<std::size_t>(jy * s + jx), w});
            }
    g.finalize();
    auto sp = Space::from_graph(std::move(g), std::string("grid(norm=") + (norm == GridNorm::l1 ? "l1" : "l2") +
                                                  ",halfwidth=" + fmt_num(halfwidth) + ",step=" + fmt_num(step) + ")");
    if (norm == GridNorm::l2) {
        const auto [abs_d, rel_d] = measure_grid_distortion(*sp, norm, grid_probe_sources(*sp));
        (void)rel_d;
        sp->set_budget(sp->max_edge_weight(), abs_d);
    }
    return sp;
}

inline std::shared_ptr<Space> make_circle(std::size_t n, double circumference) {
    if (n < 3) fail(ErrorKind::invalid_input, "circle needs n >= 3");
    if (!(circumference > 0.0)) fail(ErrorKind::invalid_input, "circumference must be > 0");
    GraphSpace g;
    g.n = n;
    g.coords.resize(n);
    const double w = circumference / static_cast<double>(n);
    const double rad = circumference / (2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        g.coords[i] = {rad * std::cos(a), rad * std::sin(a)};
        g.edges.push_back({i, (i + 1) % n, w});
    }
    g.finalize();
    return Space::from_graph(std::move(g), "circle(n=" + std::to_string(n) + ",circumference=" +
                                               fmt_num(circumference) + ")");
}

inline std::shared_ptr<Space> make_star(std::size_t leaves, double len) {
    if (leaves < 1 || !(len > 0.0)) fail(ErrorKind::invalid_input, "star needs leaves >= 1 and len > 0");
    GraphSpace g;
    g.n = leaves + 1;
    for (std::size_t i = 1; i <= leaves; ++i) g.edges.push_back({0, i, len});
    g.finalize();
    return Space::from_graph(std::move(g), "tree(star,leaves=" + std::to_string(leaves) + ",len=" + fmt_num(len) + ")");
}

inline std::shared_ptr<Space> make_path_graph(std::size_t nodes, double len) {
    if (nodes < 1 || !(len > 0.0)) fail(ErrorKind::invalid_input, "path needs nodes >= 1 and len > 0");
    GraphSpace g;
    g.n = nodes;
    g.coords.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) g.coords[i] = {static_cast<double>(i) * len, 0.0};
    for (std::size_t i = 0; i + 1 < nodes; ++i) g.edges.push_back({i, i + 1, len});
    g.finalize();
    return Space::from_graph(std::move(g), "tree(path,nodes=" + std::to_string(nodes) + ",len=" + fmt_num(len) + ")");
}

// Random recursive tree: node i attaches to a uniform earlier node with a
// weight uniform in [wmin, wmax], rounded to a multiple of 1/64 so that path
// sums are exact in double precision.
inline std::shared_ptr<Space> make_random_tree(std::size_t nodes, std::uint64_t seed, double wmin = 0.5,
                                               double wmax = 2.0) {
    if (nodes < 1) fail(ErrorKind::invalid_input, "tree needs nodes >= 1");
    if (!(wmin > 0.0) || wmax < wmin) fail(ErrorKind::invalid_input, "tree weights need 0 < wmin <= wmax");
    Rng rng(seed);
    GraphSpace g;
    g.n = nodes;
    for (std::size_t i = 1; i < nodes; ++i) {
        const std::size_t parent = static_cast<std::size_t>(rng.index(i));
        const double w = std::max(1.0 / 64.0, std::round(rng.uniform(wmin, wmax) * 64.0) / 64.0);
        g.edges.push_back({parent, i, w});
    }
    g.finalize();
    return Space::from_graph(std::move(g), "tree(random,nodes=" + std::to_string(nodes) + ",seed=" +
                                               std::to_string(seed) + ")");
}

// Tree shape spec: "star:leaves=4,len=1", "path:nodes=5,len=1",
// "random:nodes=60,seed=3".
inline std::shared_ptr<Space> make_tree(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    std::unordered_map<std::string, std::string> kv;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) fail(ErrorKind::invalid_input, "tree spec item '" + item + "' lacks '='");
            kv[item.substr(0, eq)] = item.substr(eq + 1);
        }
    }
    auto num = [&](const std::string& key, double def) {
        auto it = kv.find(key);
        if (it == kv.end()) return def;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(key);
            return v;
        } catch (const std::exception&) {
            fail(ErrorKind::invalid_input, "tree spec field '" + key + "' is not a number");
        }
    };
    if (kind == "star") return make_star(static_cast<std::size_t>(num("leaves", 4)), num("len", 1));
    if (kind == "path") return make_path_graph(static_cast<std::size_t>(num("nodes", 5)), num("len", 1));
    if (kind == "random")
        return make_random_tree(static_cast<std::size_t>(num("nodes", 20)), static_cast<std::uint64_t>(num("seed", 0)),
                                num("wmin", 0.5), num("wmax", 2.0));
    fail(ErrorKind::invalid_input, "unknown tree shape '" + kind + "'");
}

// Points uniform (by hyperbolic area) in the disc of the given radius about
// the base point of M^2_kappa. Coordinates record the polar configuration
// drawn in the Euclidean plane.
inline std::shared_ptr<Space> make_hyperbolic_sample(double kappa, double radius, std::size_t count, std::uint64_t seed) {
    if (!(kappa < 0.0) || !std::isfinite(kappa)) fail(ErrorKind::invalid_input, "kappa must be finite and < 0");
    if (!(radius > 0.0)) fail(ErrorKind::invalid_input, "radius must be > 0");
    if (count < 1 || count > kDefaultProductCap) fail(ErrorKind::resource_limit, "count out of range");
    const auto k = Curvature::hyperbolic(kappa);
    const double a = k.scale();
    Rng rng(seed);
    std::vector<ModelPoint> pts;
    std::vector<Coord> cfg;
    for (std::size_t i = 0; i < count; ++i) {
        const double u = rng.uniform();
        const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double r = std::acosh(1.0 + u * (std::cosh(a * radius) - 1.0)) / a;
        pts.push_back(ModelPoint::polar(k, r, th));
        cfg.push_back({r * std::cos(th), r * std::sin(th)});
    }
    FiniteMetric m;
    m.n = count;
    m.d.assign(count * count, 0.0);
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j) m.d[i * count + j] = m.d[j * count + i] = model_distance(k, pts[i], pts[j]);
    auto s = Space::from_finite(std::move(m), "hyperbolic(kappa=" + fmt_num(kappa) + ",radius=" + fmt_num(radius) +
                                                  ",count=" + std::to_string(count) + ",seed=" + std::to_string(seed) + ")");
    s->set_coords(std::move(cfg));
    return s;
}

inline std::shared_ptr<Space> l2_product(const Space& a, const Space& b, std::size_t cap = kDefaultProductCap) {
    const std::size_t n1 = a.size(), n2 = b.size();
    if (n1 * n2 > cap)
        fail(ErrorKind::resource_limit,
             "product of " + std::to_string(n1) + " x " + std::to_string(n2) + " points exceeds cap " + std::to_string(cap));
    const FiniteMetric ma = a.materialize(cap), mb = b.materialize(cap);
    FiniteMetric m;
    m.n = n1 * n2;
    m.d.assign(m.n * m.n, 0.0);
    for (std::size_t i1 = 0; i1 < n1; ++i1)
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            const std::size_t p = i1 * n2 + i2;
            for (std::size_t j1 = 0; j1 < n1; ++j1)
                for (std::size_t j2 = 0; j2 < n2; ++j2) {
                    const std::size_t q = j1 * n2 + j2;
                    m.d[p * m.n + q] = std::hypot(ma.at(i1, j1), mb.at(i2, j2));
                }
            m.labels.push_back("(" + a.label(i1) + "," + b.label(i2) + ")");
        }
    auto s = Space::from_finite(std::move(m), "product(" + a.provenance() + "," + b.provenance() + ")");
    s->set_budget(std::max(a.max_edge_weight(), b.max_edge_weight()), a.distortion() + b.distortion());
    return s;
}

struct GlueResult {
    std::shared_ptr<Space> space;
    std::vector<std::size_t> map1; // X1 index -> glued index
    std::vector<std::size_t> map2; // X2 index -> glued index
};

// Glue X1 and X2 along S1[k] ~ S2[k]. When both pieces are graphs the union
// graph is returned (its path metric is the glued metric); otherwise the
// glued metric is materialized.
inline GlueResult glue(const Space& x1, const std::vector<std::size_t>& s1, const Space& x2,
                       const std::vector<std::size_t>& s2, std::size_t cap = kDefaultProductCap) {
    if (s1.empty() || s1.size() != s2.size()) fail(ErrorKind::invalid_gluing, "gluing sets must be non-empty and paired");
    for (std::size_t k = 0; k < s1.size(); ++k) {
        if (s1[k] >= x1.size() || s2[k] >= x2.size()) fail(ErrorKind::invalid_gluing, "gluing index out of range");
        for (std::size_t l = 0; l < k; ++l) {
            if (s1[k] == s1[l] || s2[k] == s2[l]) fail(ErrorKind::invalid_gluing, "pairing is not a bijection");
            const double gap = std::abs(x1.distance(s1[k], s1[l]) - x2.distance(s2[k], s2[l]));
            if (gap > kMetricTol)
                fail(ErrorKind::invalid_gluing, "pairing is not isometric at pair (" + std::to_string(l) + "," +
                                                    std::to_string(k) + "): distance gap " + fmt_num(gap));
        }
    }
    const std::size_t n1 = x1.size(), n2 = x2.size();
    GlueResult r;
    r.map1.resize(n1);
    for (std::size_t i = 0; i < n1; ++i) r.map1[i] = i;
    r.map2.assign(n2, static_cast<std::size_t>(-1));
    for (std::size_t k = 0; k < s2.size(); ++k) r.map2[s2[k]] = s1[k];
    std::size_t next = n1;
    for (std::size_t j = 0; j < n2; ++j)
        if (r.map2[j] == static_cast<std::size_t>(-1)) r.map2[j] = next++;
    const std::size_t n = next;
    const std::string prov = "glue(" + x1.provenance() + "," + x2.provenance() + ",|S|=" + std::to_string(s1.size()) + ")";

    if (x1.has_graph() && x2.has_graph()) {
        const auto& g1 = x1.graph();
        const auto& g2 = x2.graph();
        GraphSpace g;
        g.n = n;
        const bool coords = g1.has_coords() && g2.has_coords();
        if (coords) g.coords.resize(n);
        for (std::size_t i = 0; i < n1; ++i)
            if (coords) g.coords[i] = g1.coords[i];
        for (std::size_t j = 0; j < n2; ++j)
            if (coords && r.map2[j] >= n1) g.coords[r.map2[j]] = g2.coords[j];
        g.ids.resize(n);
        for (std::size_t i = 0; i < n1; ++i) g.ids[i] = "1:" + x1.label(i);
        for (std::size_t j = 0; j < n2; ++j)
            if (r.map2[j] >= n1) g.ids[r.map2[j]] = "2:" + x2.label(j);
        for (const auto& e : g1.edges) g.edges.push_back(e);
        for (const auto& e : g2.edges) {
            const std::size_t u = r.map2[e.u], v = r.map2[e.v];
            if (u < n1 && v < n1) continue; // both endpoints glued: the X1 copy already has it
            g.edges.push_back({u, v, e.w});
        }
        g.finalize();
        r.space = Space::from_graph(std::move(g), prov);
        r.space->set_budget(std::max(x1.max_edge_weight(), x2.max_edge_weight()),
                            std::max(x1.distortion(), x2.distortion()));
        return r;
    }

    if (n > cap) fail(ErrorKind::resource_limit, "glued space exceeds cap");
    FiniteMetric m;
    m.n = n;
    m.d.assign(n * n, 0.0);
    m.labels.resize(n);
    std::vector<std::size_t> inv2(n, static_cast<std::size_t>(-1));
    for (std::size_t j = 0; j < n2; ++j) inv2[r.map2[j]] = j;
    for (std::size_t i = 0; i < n1; ++i) m.labels[i] = "1:" + x1.label(i);
    for (std::size_t j = 0; j < n2; ++j)
        if (r.map2[j] >= n1) m.labels[r.map2[j]] = "2:" + x2.label(j);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) {
            double v;
            if (p < n1 && q < n1) {
                v = x1.distance(p, q);
            } else if (p >= n1 && q >= n1) {
                v = x2.distance(inv2[p], inv2[q]);
            } else {
                const std::size_t a = p < n1 ? p : q; // in X1
                const std::size_t b = p < n1 ? q : p; // X2-only
                v = kInf;
                for (std::size_t k = 0; k < s1.size(); ++k)
                    v = std::min(v, x1.distance(a, s1[k]) + x2.distance(s2[k], inv2[b]));
            }
            m.d[p * n + q] = m.d[q * n + p] = v;
        }
    r.space = Space::from_finite(std::move(m), prov);
    r.space->set_budget(std::max(x1.max_edge_weight(), x2.max_edge_weight()), std::max(x1.distortion(), x2.distortion()));
    return r;
}

// Two Euclidean half-planes {y >= 0}, sampled on a step grid over
// x in [-n_max, n_max], y in [0, depth], whose edges are joined by a ladder
// with rungs of length exp(-|n|) at the integer stations. The half-planes are
// convex, so distances between their sample points are exact Euclidean
// distances; crossings minimise over the rungs. Distances are exact glued
// distances on the sample, so the space is served by an oracle.
class WarpedLadder {
public:
    WarpedLadder(int n_max, double depth, double step, int rung_segments = 4)
        : n_max_(n_max), depth_(depth), step_(step), rung_segments_(rung_segments) {
        if (n_max < 1) fail(ErrorKind::invalid_input, "n_max must be >= 1");
        if (!(depth > 0.0) || !(step > 0.0)) fail(ErrorKind::invalid_input, "depth and step must be > 0");
        const double per_unit = 1.0 / step;
        if (std::abs(per_unit - std::round(per_unit)) > 1e-9)
            fail(ErrorKind::invalid_input, "step must divide 1 so that every station is a sample point");
        if (rung_segments < 2 || rung_segments % 2) fail(ErrorKind::invalid_input, "rung_segments must be even and >= 2");
        per_unit_ = static_cast<std::size_t>(std::llround(per_unit));
        nx_ = 2 * static_cast<std::size_t>(n_max) * per_unit_ + 1;
        ny_ = static_cast<std::size_t>(std::floor(depth / step + 1e-9)) + 1;
        plane_ = nx_ * ny_;
        stations_ = 2 * static_cast<std::size_t>(n_max) + 1;
        if (plane_ > (std::size_t{1} << 40)) fail(ErrorKind::resource_limit, "ladder too large");
    }

    std::size_t size() const { return 2 * plane_ + stations_ * static_cast<std::size_t>(rung_segments_ - 1); }
    double rung_length(int m) const { return std::exp(-std::abs(static_cast<double>(m))); }
    double step() const { return step_; }
    int n_max() const { return n_max_; }

    std::size_t plane_node(int side, double x, double y) const {
        const auto ix = std::llround((x + n_max_) / step_);
        const auto iy = std::llround(y / step_);
        if (ix < 0 || iy < 0 || ix >= static_cast<long long>(nx_) || iy >= static_cast<long long>(ny_))
            fail(ErrorKind::invalid_input, "ladder point outside the sampled strip");
        return static_cast<std::size_t>(side) * plane_ + static_cast<std::size_t>(iy) * nx_ + static_cast<std::size_t>(ix);
    }
    // j-th interior node (1..segments-1) of rung m, counted from side 0
    std::size_t rung_node(int m, int j) const {
        if (std::abs(m) > n_max_ || j < 1 || j >= rung_segments_) fail(ErrorKind::invalid_input, "rung node out of range");
        return 2 * plane_ + static_cast<std::size_t>(m + n_max_) * static_cast<std::size_t>(rung_segments_ - 1) +
               static_cast<std::size_t>(j - 1);
    }
    std::size_t rung_midpoint(int m) const { return rung_node(m, rung_segments_ / 2); }

    // Cost of crossing from plane point p (side 0) to plane point q (side 1) via rung m.
    double crossing_cost(Coord p, Coord q, int m) const {
        const double sx = m;
        return std::hypot(p.x - sx, p.y) + rung_length(m) + std::hypot(q.x - sx, q.y);
    }

    double distance(std::size_t a, std::size_t b) const {
        if (a == b) return 0.0;
        const Loc la = locate(a), lb = locate(b);
        if (la.rung && lb.rung) {
            double best = kInf;
            if (la.m == lb.m) best = std::abs(la.offset - lb.offset);
            for (int ea = 0; ea < 2; ++ea)
                for (int eb = 0; eb < 2; ++eb)
                    best = std::min(best, end_cost(la, ea) + end_cost(lb, eb) +
                                              plane_distance(ea, {double(la.m), 0.0}, eb, {double(lb.m), 0.0}));
            return best;
        }
        if (la.rung || lb.rung) {
            const Loc& r = la.rung ? la : lb;
            const Loc& p = la.rung ? lb : la;
            return std::min(end_cost(r, 0) + plane_distance(0, {double(r.m), 0.0}, p.side, p.c),
                            end_cost(r, 1) + plane_distance(1, {double(r.m), 0.0}, p.side, p.c));
        }
        return plane_distance(la.side, la.c, lb.side, lb.c);
    }

    std::optional<Coord> coord(std::size_t i) const {
        const Loc l = locate(i);
        if (l.rung) return std::nullopt;
        return l.c;
    }
    std::string label(std::size_t i) const {
        const Loc l = locate(i);
        if (l.rung) return "rung(" + std::to_string(l.m) + "," + fmt_num(l.offset) + ")";
        return std::to_string(l.side + 1) + ":(" + fmt_num(l.c.x) + "," + fmt_num(l.c.y) + ")";
    }

private:
    struct Loc {
        bool rung = false;
        int side = 0;
        Coord c;
        int m = 0;
        double offset = 0.0; // from side 0 along the rung
    };

    Loc locate(std::size_t i) const {
        Loc l;
        if (i < 2 * plane_) {
            l.side = i < plane_ ? 0 : 1;
            const std::size_t r = i % plane_;
            l.c = {-n_max_ + static_cast<double>(r % nx_) * step_, static_cast<double>(r / nx_) * step_};
            return l;
        }
        const std::size_t r = i - 2 * plane_;
        l.rung = true;
        l.m = static_cast<int>(r / static_cast<std::size_t>(rung_segments_ - 1)) - n_max_;
        const auto j = static_cast<double>(r % static_cast<std::size_t>(rung_segments_ - 1) + 1);
        l.offset = rung_length(l.m) * j / rung_segments_;
        return l;
    }

    double end_cost(const Loc& r, int end) const { return end == 0 ? r.offset : rung_length(r.m) - r.offset; }

    double plane_distance(int sa, Coord a, int sb, Coord b) const {
        if (sa == sb) return std::hypot(a.x - b.x, a.y - b.y);
        double best = kInf;
        for (int m = -n_max_; m <= n_max_; ++m) best = std::min(best, crossing_cost(a, b, m));
        return best;
    }

    int n_max_;
    double depth_, step_;
    int rung_segments_;
    std::size_t per_unit_ = 1, nx_ = 0, ny_ = 0, plane_ = 0, stations_ = 0;
};

struct LadderSpace {
    std::shared_ptr<const WarpedLadder> ladder;
    std::shared_ptr<Space> space;
};

inline LadderSpace make_warped_ladder(int n_max, double depth, double step, int rung_segments = 4) {
    auto lad = std::make_shared<const WarpedLadder>(n_max, depth, step, rung_segments);
    auto sp = Space::from_oracle(
        lad->size(), [lad](std::size_t a, std::size_t b) { return lad->distance(a, b); },
        "ladder(n_max=" + std::to_string(n_max) + ",depth=" + fmt_num(depth) + ",step=" + fmt_num(step) + ")",
        [lad](std::size_t i) { return lad->label(i); }, [lad](std::size_t i) { return lad->coord(i); });
    sp->set_budget(std::max(step * std::sqrt(2.0), 1.0 / rung_segments), 0.0);
    return {lad, sp};
}

}  // namespace roughcat
