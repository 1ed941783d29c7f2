#pragma once

// h-short segments and triangles: explicit node paths with exact arclength
// bookkeeping. Paths are concatenations of geodesics through a waypoint.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "spaces.hpp"

namespace roughcat {

struct ShortSegment {
    std::vector<std::size_t> nodes;   // at least one node; a single node is the empty path
    std::vector<double> prefix;       // arclength at each node, prefix[0] = 0
    double length = 0.0;
    double endpoint_distance = 0.0;
    double slack = 0.0;               // length - endpoint_distance
    double h = 0.0;                   // slack bound requested at creation
    std::size_t waypoint = 0;

    std::size_t start() const { return nodes.front(); }
    std::size_t end() const { return nodes.back(); }
    std::size_t edge_count() const { return nodes.size() - 1; }
    bool empty() const { return nodes.size() <= 1; }
    double edge_length(std::size_t i) const { return prefix[i + 1] - prefix[i]; }
};

struct ShortTriangle {
    std::array<std::size_t, 3> vertices{}; // x, y, z
    // side 0 runs x -> y, side 1 runs x -> z, side 2 runs y -> z
    std::array<ShortSegment, 3> sides;
    std::array<double, 3> h{};

    double max_h() const { return std::max({h[0], h[1], h[2]}); }
};

// 1 / max(1, dxy, dxz, dyz)
inline double standard_short_h(double dxy, double dxz, double dyz) {
    return 1.0 / std::max({1.0, dxy, dxz, dyz});
}

namespace detail {

inline void finish_segment(const Space& X, ShortSegment& s) {
    s.length = s.prefix.back();
    s.endpoint_distance = X.distance(s.start(), s.end());
    s.slack = std::max(0.0, s.length - s.endpoint_distance);
}

// Geodesic in a stored finite metric: the chain of metrically-between points
// with the most hops, so that interior points are available on the side.
inline ShortSegment finite_geodesic(const Space& X, std::size_t x, std::size_t y) {
    const double dxy = X.distance(x, y);
    const double tol = 1e-9 * std::max(1.0, dxy);
    auto rx = X.row(x);
    auto ry = X.row(y);
    std::vector<std::size_t> cand;
    for (std::size_t z = 0; z < X.size(); ++z)
        if (z != x && z != y && rx[z] + ry[z] <= dxy + tol && rx[z] > 0.0 && ry[z] > 0.0) cand.push_back(z);
    std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
        return rx[a] < rx[b] || (rx[a] == rx[b] && a < b);
    });
    cand.push_back(y);
    const std::size_t m = cand.size();
    std::vector<int> hops(m, 1);
    std::vector<std::size_t> pred(m, static_cast<std::size_t>(-1)); // -1: straight from x
    for (std::size_t b = 0; b < m; ++b) {
        const std::size_t zb = cand[b];
        for (std::size_t a = 0; a < b; ++a) {
            const std::size_t za = cand[a];
            if (!(rx[za] < rx[zb])) continue;
            if (rx[za] + X.distance(za, zb) <= rx[zb] + tol && hops[a] + 1 > hops[b]) {
                hops[b] = hops[a] + 1;
                pred[b] = a;
            }
        }
    }
    std::vector<std::size_t> rev;
    for (std::size_t b = m - 1; b != static_cast<std::size_t>(-1); b = pred[b]) rev.push_back(cand[b]);
    rev.push_back(x);
    ShortSegment s;
    s.nodes.assign(rev.rbegin(), rev.rend());
    s.prefix.assign(1, 0.0);
    for (std::size_t i = 1; i < s.nodes.size(); ++i)
        s.prefix.push_back(s.prefix.back() + X.distance(s.nodes[i - 1], s.nodes[i]));
    return s;
}

inline ShortSegment graph_geodesic(const Space& X, std::size_t x, std::size_t y) {
    const auto& g = X.graph();
    std::vector<double> dist;
    std::vector<std::uint32_t> pred;
    dijkstra(g, x, dist, &pred, y);
    if (!std::isfinite(dist[y]))
        fail(ErrorKind::no_path, "no path between nodes " + std::to_string(x) + " and " + std::to_string(y));
    ShortSegment s;
    for (std::size_t v = y; v != x; v = pred[v]) s.nodes.push_back(v);
    s.nodes.push_back(x);
    std::reverse(s.nodes.begin(), s.nodes.end());
    for (std::size_t v : s.nodes) s.prefix.push_back(dist[v]);
    return s;
}

}  // namespace detail

inline ShortSegment geodesic(const Space& X, std::size_t x, std::size_t y) {
    if (x >= X.size() || y >= X.size()) fail(ErrorKind::invalid_input, "point index out of range");
    ShortSegment s;
    if (x == y) {
        s.nodes = {x};
        s.prefix = {0.0};
    } else if (X.has_graph()) {
        s = detail::graph_geodesic(X, x, y);
    } else if (X.is_finite()) {
        s = detail::finite_geodesic(X, x, y);
    } else {
        fail(ErrorKind::invalid_input, "space '" + X.provenance() + "' has no path structure");
    }
    s.waypoint = x;
    detail::finish_segment(X, s);
    return s;
}

inline ShortSegment reversed(const Space& X, const ShortSegment& s) {
    ShortSegment r = s;
    std::reverse(r.nodes.begin(), r.nodes.end());
    r.prefix.clear();
    for (auto it = s.prefix.rbegin(); it != s.prefix.rend(); ++it) r.prefix.push_back(s.length - *it);
    r.prefix.front() = 0.0;
    detail::finish_segment(X, r);
    r.slack = s.slack;
    r.endpoint_distance = s.endpoint_distance;
    r.length = s.length;
    return r;
}

// Concatenation of geodesics x -> w and w -> y.
inline ShortSegment short_segment_via(const Space& X, std::size_t x, std::size_t w, std::size_t y) {
    ShortSegment a = geodesic(X, x, w);
    const ShortSegment b = geodesic(X, w, y);
    for (std::size_t i = 1; i < b.nodes.size(); ++i) {
        a.nodes.push_back(b.nodes[i]);
        a.prefix.push_back(a.length + b.prefix[i]);
    }
    a.waypoint = w;
    detail::finish_segment(X, a);
    a.h = a.slack;
    return a;
}

// Waypoint drawn uniformly from {w : d(x,w) + d(w,y) <= d(x,y) + h}.
inline ShortSegment sample_short_segment(const Space& X, std::size_t x, std::size_t y, double h, std::uint64_t seed) {
    if (!(h > 0.0)) fail(ErrorKind::invalid_input, "h must be > 0");
    if (x >= X.size() || y >= X.size()) fail(ErrorKind::invalid_input, "point index out of range");
    const double dxy = X.distance(x, y);
    auto rx = X.row(x);
    auto ry = X.row(y);
    std::vector<std::size_t> admissible;
    bool strict = false;
    for (std::size_t w = 0; w < X.size(); ++w) {
        const double detour = rx[w] + ry[w] - dxy;
        if (detour <= h) {
            admissible.push_back(w);
            if (detour > 0.0) strict = true;
        }
    }
    ShortSegment s;
    if (!strict || admissible.empty()) {
        s = geodesic(X, x, y);
    } else {
        Rng rng(seed);
        const std::size_t w = admissible[rng.index(admissible.size())];
        s = (w == x || w == y) ? geodesic(X, x, y) : short_segment_via(X, x, w, y);
    }
    s.h = h;
    if (s.slack > h) {
        // only rounding can get here; the waypoint rule bounds the slack by h
        if (s.slack > h + 1e-9) fail(ErrorKind::inconsistency, "sampled segment exceeds its slack bound");
        s.slack = h;
    }
    return s;
}

inline ShortTriangle build_short_triangle(const Space& X, std::size_t x, std::size_t y, std::size_t z,
                                          std::array<double, 3> h, std::uint64_t seed) {
    ShortTriangle t;
    t.vertices = {x, y, z};
    t.h = h;
    const std::array<std::pair<std::size_t, std::size_t>, 3> ends{{{x, y}, {x, z}, {y, z}}};
    for (int s = 0; s < 3; ++s) {
        const auto [a, b] = ends[s];
        if (a == b) {
            t.sides[s] = geodesic(X, a, b);
            t.sides[s].h = h[s];
        } else {
            t.sides[s] = sample_short_segment(X, a, b, h[s], sub_seed(seed, static_cast<std::uint64_t>(s)));
        }
    }
    return t;
}

inline ShortTriangle build_short_triangle(const Space& X, std::size_t x, std::size_t y, std::size_t z, double h,
                                          std::uint64_t seed) {
    return build_short_triangle(X, x, y, z, {h, h, h}, seed);
}

// Triangle from explicit sides (side 0: x->y, side 1: x->z, side 2: y->z).
inline ShortTriangle triangle_from_sides(ShortSegment xy, ShortSegment xz, ShortSegment yz) {
    if (xy.start() != xz.start() || xy.end() != yz.start() || xz.end() != yz.end())
        fail(ErrorKind::invalid_input, "sides do not share the triangle's vertices");
    ShortTriangle t;
    t.vertices = {xy.start(), xy.end(), xz.end()};
    t.h = {std::max(xy.h, xy.slack), std::max(xz.h, xz.slack), std::max(yz.h, yz.slack)};
    t.sides = {std::move(xy), std::move(xz), std::move(yz)};
    return t;
}

struct ArcPoint {
    std::size_t node = 0;
    std::size_t index = 0; // position in the node path
    double prefix = 0.0;
    double suffix = 0.0;
    double snap = 0.0;     // |prefix - requested arclength|
};

inline ArcPoint arc_point_at_index(const ShortSegment& seg, std::size_t k) {
    ArcPoint p;
    p.index = k;
    p.node = seg.nodes[k];
    p.prefix = seg.prefix[k];
    p.suffix = k + 1 == seg.nodes.size() ? 0.0 : seg.length - seg.prefix[k];
    return p;
}

// Node nearest to arclength t (ties go to the earlier node).
inline ArcPoint point_at_arclength(const ShortSegment& seg, double t) {
    if (!(t >= 0.0) || !(t <= seg.length + 1e-12))
        fail(ErrorKind::invalid_input, "arclength " + fmt_num(t) + " outside [0, " + fmt_num(seg.length) + "]");
    auto it = std::lower_bound(seg.prefix.begin(), seg.prefix.end(), t);
    std::size_t k = static_cast<std::size_t>(it - seg.prefix.begin());
    if (k >= seg.prefix.size()) k = seg.prefix.size() - 1;
    if (k > 0 && t - seg.prefix[k - 1] <= seg.prefix[k] - t) --k;
    ArcPoint p = arc_point_at_index(seg, k);
    p.snap = std::abs(p.prefix - t);
    return p;
}

// Subpath between path positions i <= j, with arclength restarted at 0.
inline ShortSegment subsegment(const Space& X, const ShortSegment& seg, std::size_t i, std::size_t j) {
    if (i > j || j >= seg.nodes.size()) fail(ErrorKind::invalid_input, "subsegment range out of bounds");
    ShortSegment s;
    s.nodes.assign(seg.nodes.begin() + static_cast<std::ptrdiff_t>(i), seg.nodes.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    for (std::size_t k = i; k <= j; ++k) s.prefix.push_back(seg.prefix[k] - seg.prefix[i]);
    s.h = seg.h;
    s.waypoint = seg.waypoint;
    detail::finish_segment(X, s);
    return s;
}

}  // namespace roughcat
