#pragma once

// Curvature-condition checkers and minimal-constant estimators. Every scan
// constant is a maximum over sampled configurations, hence a lower bound on
// the true minimal constant of the space.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "model_plane.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "shortseg.hpp"
#include "spaces.hpp"

namespace roughcat {

inline constexpr const char* kEstimateLabel = "estimated (sampled lower bound)";

using Quad = std::array<std::size_t, 4>;
using Triple = std::array<std::size_t, 3>;

// ---------------------------------------------------------------- sampling

inline Triple sample_triple(std::size_t n, Rng& rng) {
    Triple t{};
    for (int k = 0; k < 3; ++k) {
        for (;;) {
            t[k] = rng.index(n);
            bool dup = false;
            for (int j = 0; j < k; ++j) dup = dup || (t[j] == t[k]);
            if (!dup || n < 3) break;
        }
    }
    return t;
}

inline std::vector<Quad> seeded_tuples(std::size_t n, std::size_t count, std::uint64_t seed) {
    if (n < 4) fail(ErrorKind::invalid_input, "four-point sampling needs at least 4 points");
    Rng rng(seed);
    std::vector<Quad> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        Quad q{};
        for (int k = 0; k < 4; ++k) {
            for (;;) {
                q[k] = rng.index(n);
                bool dup = false;
                for (int j = 0; j < k; ++j) dup = dup || (q[j] == q[k]);
                if (!dup) break;
            }
        }
        out.push_back(q);
    }
    return out;
}

// Tuples of distinct nodes inside seeded window x window blocks of a square
// grid (node (ix, iy) at index iy*side + ix).
inline std::vector<Quad> grid_window_tuples(const Space& grid, std::size_t count, std::size_t window,
                                            std::uint64_t seed) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(grid.size()))));
    if (side * side != grid.size() || window < 2 || window > side)
        fail(ErrorKind::invalid_input, "window sampling needs a square grid at least window nodes wide");
    Rng rng(seed);
    std::vector<Quad> out;
    out.reserve(count);
    const std::size_t cells = window * window;
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t ox = rng.index(side - window + 1), oy = rng.index(side - window + 1);
        std::array<std::size_t, 4> pick{};
        for (int k = 0; k < 4; ++k) {
            for (;;) {
                pick[k] = rng.index(cells);
                bool dup = false;
                for (int j = 0; j < k; ++j) dup = dup || (pick[j] == pick[k]);
                if (!dup || cells < 4) break;
            }
        }
        Quad q{};
        for (int k = 0; k < 4; ++k) q[k] = (oy + pick[k] / window) * side + ox + pick[k] % window;
        out.push_back(q);
    }
    return out;
}

inline std::vector<Quad> exhaustive_tuples(std::size_t n, std::size_t cap = 5'000'000) {
    const double count = n < 4 ? 0.0 : double(n) * double(n - 1) * double(n - 2) * double(n - 3) / 24.0;
    if (count > double(cap))
        fail(ErrorKind::resource_limit, "exhaustive scan over " + std::to_string(n) + " points exceeds " +
                                            std::to_string(cap) + " tuples; use a seeded sampler");
    std::vector<Quad> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                for (std::size_t l = k + 1; l < n; ++l) out.push_back({i, j, k, l});
    return out;
}

// ---------------------------------------------------------------- delta

struct DeltaResult {
    double delta = 0.0;
    Quad witness{};
    std::array<double, 3> sums{}; // pairing sums at the witness, descending
    std::size_t tuples = 0;
};

// Half the gap between the two largest pairing sums of (x, y, z, w).
inline double four_point_defect(double dxy, double dzw, double dxz, double dyw, double dxw, double dyz,
                                std::array<double, 3>* sums = nullptr) {
    std::array<double, 3> s{dxy + dzw, dxz + dyw, dxw + dyz};
    std::sort(s.begin(), s.end(), std::greater<>());
    if (sums) *sums = s;
    return 0.5 * (s[0] - s[1]);
}

inline double delta_of_tuple(const Space& X, const Quad& q, std::array<double, 3>* sums = nullptr) {
    const auto [x, y, z, w] = q;
    return four_point_defect(X.distance(x, y), X.distance(z, w), X.distance(x, z), X.distance(y, w),
                             X.distance(x, w), X.distance(y, z), sums);
}

// Exact scan over all 4-subsets.
inline DeltaResult delta_hyperbolicity(const Space& X, std::size_t tuple_cap = 2'000'000'000) {
    const std::size_t n = X.size();
    DeltaResult res;
    if (n < 4) return res;
    const double count = double(n) * double(n - 1) * double(n - 2) * double(n - 3) / 24.0;
    if (count > double(tuple_cap))
        fail(ErrorKind::resource_limit, "exhaustive delta over " + std::to_string(n) + " points is too large");
    const FiniteMetric m = X.materialize(std::max<std::size_t>(n, 4000));
    std::vector<DeltaResult> per(n);
    parallel_for(n, [&](std::size_t i) {
        DeltaResult& r = per[i];
        r.delta = -1.0;
        const double* di = m.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* dj = m.row(j);
            for (std::size_t k = j + 1; k < n; ++k) {
                const double* dk = m.row(k);
                for (std::size_t l = k + 1; l < n; ++l) {
                    std::array<double, 3> s;
                    const double v = four_point_defect(di[j], dk[l], di[k], dj[l], di[l], dj[k], &s);
                    ++r.tuples;
                    if (v > r.delta) {
                        r.delta = v;
                        r.witness = {i, j, k, l};
                        r.sums = s;
                    }
                }
            }
        }
    });
    res.delta = -1.0;
    for (const auto& r : per) {
        res.tuples += r.tuples;
        if (r.tuples && r.delta > res.delta) {
            res.delta = r.delta;
            res.witness = r.witness;
            res.sums = r.sums;
        }
    }
    res.delta = std::max(0.0, res.delta);
    return res;
}

inline DeltaResult delta_hyperbolicity_sampled(const Space& X, std::size_t count, std::uint64_t seed) {
    DeltaResult res;
    if (X.size() < 4) return res;
    const auto tuples = seeded_tuples(X.size(), count, seed);
    std::vector<std::pair<double, std::array<double, 3>>> vals(tuples.size());
    parallel_for(tuples.size(), [&](std::size_t t) { vals[t].first = delta_of_tuple(X, tuples[t], &vals[t].second); });
    res.delta = -1.0;
    for (std::size_t t = 0; t < tuples.size(); ++t)
        if (vals[t].first > res.delta) {
            res.delta = vals[t].first;
            res.witness = tuples[t];
            res.sums = vals[t].second;
        }
    res.tuples = tuples.size();
    res.delta = std::max(0.0, res.delta);
    return res;
}

// ---------------------------------------------------------------- rough subembedding

struct FourDistances {
    double d12 = 0, d23 = 0, d34 = 0, d41 = 0, d13 = 0, d24 = 0;
};

struct LocalMatrix {
    std::array<std::array<double, 4>, 4> d{};
    FourDistances ordered(const std::array<int, 4>& o) const {
        return {d[o[0]][o[1]], d[o[1]][o[2]], d[o[2]][o[3]], d[o[3]][o[0]], d[o[0]][o[2]], d[o[1]][o[3]]};
    }
};

inline LocalMatrix local_matrix(const Space& X, const Quad& q) {
    LocalMatrix m;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) m.d[i][j] = m.d[j][i] = q[i] == q[j] ? 0.0 : X.distance(q[i], q[j]);
    return m;
}

inline FourDistances four_distances(const Space& X, const Quad& q) { return local_matrix(X, q).ordered({0, 1, 2, 3}); }

inline void validate_four(const FourDistances& f) {
    const std::array<std::array<double, 4>, 4> d{{{0, f.d12, f.d13, f.d41},
                                                  {f.d12, 0, f.d23, f.d24},
                                                  {f.d13, f.d23, 0, f.d34},
                                                  {f.d41, f.d24, f.d34, 0}}};
    const auto chk = check_metric(4, [&](std::size_t i, std::size_t j) { return d[i][j]; });
    if (!chk.ok) fail(ErrorKind::invalid_input, "four-point distances: " + chk.problem);
}

struct SubembedResult {
    double minimal_C = kInf;
    double optimal_diagonal = 0.0; // |x1 - x3| in the model
    double diagonal_lo = 0.0, diagonal_hi = 0.0;
    double far_distance = 0.0;     // |x2 - x4| in the model at the optimum
    std::array<ModelPoint, 4> embedded{};
    bool feasible = false;
    bool embedded_exact = true;    // tripod: false when the two branch points differ
    double tree_offset = 0.0;
    int scan_cells = 0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
};

namespace detail {

// |x2 - x4| with triangles (x1,x3,x2) and (x1,x3,x4) on opposite sides of a
// diagonal of length t.
inline double far_distance(const Curvature& k, const FourDistances& f, double t) {
    if (t <= 0.0) return f.d12 + f.d41;
    const double th2 = model_angle(k, t, f.d12, f.d23);
    const double th4 = model_angle(k, t, f.d41, f.d34);
    return model_distance(k, ModelPoint::polar(k, f.d12, th2), ModelPoint::polar(k, f.d41, -th4));
}

template <class F>
std::pair<double, double> golden_max(F f, double lo, double hi, double tol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

template <class F>
double golden_min_value(F f, double lo, double hi, double tol) {
    if (!(hi > lo)) return f(lo);
    auto r = golden_max([&](double s) { return -f(s); }, lo, hi, tol);
    return std::min({-r.second, f(lo), f(hi)});
}

}  // namespace detail

inline SubembedResult rough_subembedding_C(const Curvature& k, const FourDistances& f) {
    validate_four(f);
    SubembedResult r;
    r.diagonal_lo = std::max({f.d13, std::abs(f.d12 - f.d23), std::abs(f.d34 - f.d41)});
    r.diagonal_hi = std::min(f.d12 + f.d23, f.d34 + f.d41);
    if (r.diagonal_lo > r.diagonal_hi + kGeomTol) {
        // impossible for a valid metric; kept as a guard
        r.feasible = false;
        return r;
    }
    r.diagonal_hi = std::max(r.diagonal_hi, r.diagonal_lo);
    r.feasible = true;

    if (k.kind == Curvature::Kind::tripod) {
        // Two comparison tripods glued along the diagonal; |x2 - x4| falls as
        // the diagonal grows, so the shortest admissible diagonal is optimal.
        const double t = r.diagonal_lo;
        const double p2 = std::max(0.0, 0.5 * (t + f.d12 - f.d23)), l2 = std::max(0.0, 0.5 * (f.d12 + f.d23 - t));
        const double p4 = std::max(0.0, 0.5 * (t + f.d41 - f.d34)), l4 = std::max(0.0, 0.5 * (f.d41 + f.d34 - t));
        r.optimal_diagonal = t;
        r.far_distance = l2 + l4 + std::abs(p2 - p4);
        r.tree_offset = std::abs(p2 - p4);
        r.embedded_exact = r.tree_offset <= 1e-12;
        r.embedded = {ModelPoint::tripod(2, p2), ModelPoint::tripod(1, l2), ModelPoint::tripod(0, std::max(0.0, t - p2)),
                      ModelPoint::tripod(3, l4)};
        r.bracket_lo = r.bracket_hi = t;
        r.minimal_C = std::max(0.0, f.d24 - r.far_distance);
        return r;
    }

    auto far = [&](double t) { return detail::far_distance(k, f, t); };
    const double lo = r.diagonal_lo, hi = r.diagonal_hi;
    double best_t = lo, best = far(lo);
    if (hi - lo > 1e-12) {
        constexpr int cells = 256;
        r.scan_cells = cells;
        int best_i = 0;
        for (int i = 1; i <= cells; ++i) {
            const double t = i == cells ? hi : lo + (hi - lo) * i / cells;
            const double v = far(t);
            if (v > best) {
                best = v;
                best_t = t;
                best_i = i;
            }
        }
        const double step = (hi - lo) / cells;
        r.bracket_lo = std::max(lo, lo + (best_i - 1) * step);
        r.bracket_hi = std::min(hi, lo + (best_i + 1) * step);
        auto [gt, gv] = detail::golden_max(far, r.bracket_lo, r.bracket_hi, 1e-10);
        if (gv > best) {
            best = gv;
            best_t = gt;
        }
    } else {
        r.bracket_lo = r.bracket_hi = lo;
    }
    r.optimal_diagonal = best_t;
    r.far_distance = best;
    r.minimal_C = std::max(0.0, f.d24 - best);
    const double th2 = best_t > 0.0 ? model_angle(k, best_t, f.d12, f.d23) : 0.0;
    const double th4 = best_t > 0.0 ? model_angle(k, best_t, f.d41, f.d34) : std::numbers::pi;
    r.embedded = {ModelPoint::polar(k, 0.0, 0.0), ModelPoint::polar(k, f.d12, th2), ModelPoint::polar(k, best_t, 0.0),
                  ModelPoint::polar(k, f.d41, -th4)};
    return r;
}

// ---------------------------------------------------------------- four-point scan

enum class OrderingPolicy { given, all };

inline const char* ordering_name(OrderingPolicy p) { return p == OrderingPolicy::given ? "given" : "all"; }

// Orderings evaluated per tuple. "all" covers the three cyclic arrangements,
// each with both choices of which diagonal must not shrink.
inline std::vector<std::array<int, 4>> ordering_set(OrderingPolicy p) {
    if (p == OrderingPolicy::given) return {{0, 1, 2, 3}};
    return {{0, 1, 2, 3}, {1, 2, 3, 0}, {0, 1, 3, 2}, {1, 3, 2, 0}, {0, 2, 1, 3}, {2, 1, 3, 0}};
}

struct FourPointScan {
    double C4 = 0.0;
    Quad witness{};          // ordered tuple realizing C4
    SubembedResult best;
    std::size_t tuples = 0;
    std::size_t evaluations = 0;
};

inline FourPointScan four_point_scan(const Space& X, const Curvature& k, OrderingPolicy policy,
                                     const std::vector<Quad>& tuples) {
    const auto orders = ordering_set(policy);
    struct Slot {
        double c = -1.0;
        Quad w{};
        SubembedResult r;
    };
    std::vector<Slot> slots(tuples.size());
    parallel_for(tuples.size(), [&](std::size_t t) {
        const LocalMatrix m = local_matrix(X, tuples[t]);
        for (const auto& o : orders) {
            const SubembedResult r = rough_subembedding_C(k, m.ordered(o));
            if (r.minimal_C > slots[t].c) {
                slots[t].c = r.minimal_C;
                slots[t].w = {tuples[t][o[0]], tuples[t][o[1]], tuples[t][o[2]], tuples[t][o[3]]};
                slots[t].r = r;
            }
        }
    });
    FourPointScan res;
    res.tuples = tuples.size();
    res.evaluations = tuples.size() * orders.size();
    double best = -1.0;
    for (const auto& s : slots)
        if (s.c > best) {
            best = s.c;
            res.witness = s.w;
            res.best = s.r;
        }
    res.C4 = std::max(0.0, best);
    return res;
}

// ---------------------------------------------------------------- rCAT excess

inline ComparisonTriangle comparison_for(const ShortTriangle& t, const Curvature& k) {
    return build_comparison_triangle(k, t.sides[0].endpoint_distance, t.sides[1].endpoint_distance,
                                     t.sides[2].endpoint_distance);
}

namespace detail {

inline double point_to_side(const ComparisonTriangle& ct, const ModelPoint& p, int side, ArcInterval iv) {
    const Curvature& k = ct.curvature;
    if (k.kind == Curvature::Kind::euclidean) {
        const ModelPoint a = point_on_side(ct, side, iv.lo), b = point_on_side(ct, side, iv.hi);
        const double ex = b.c[0] - a.c[0], ey = b.c[1] - a.c[1];
        const double len2 = ex * ex + ey * ey;
        double f = 0.0;
        if (len2 > 0.0) f = std::clamp(((p.c[0] - a.c[0]) * ex + (p.c[1] - a.c[1]) * ey) / len2, 0.0, 1.0);
        return std::hypot(p.c[0] - (a.c[0] + f * ex), p.c[1] - (a.c[1] + f * ey));
    }
    // distance to a point moving along a geodesic is convex in both models
    return golden_min_value([&](double s) { return model_distance(k, p, point_on_side(ct, side, s)); }, iv.lo, iv.hi,
                            1e-13 * std::max(1.0, iv.hi));
}

}  // namespace detail

// Minimum of |u - v| over u on side su restricted to iu and v on side sv
// restricted to iv. The distance is jointly convex, and the shared vertex of
// two sides is a corner of the full parameter square, so the minimum over the
// rectangle lies on its boundary.
inline double min_comparison_distance(const ComparisonTriangle& ct, int su, ArcInterval iu, int sv, ArcInterval iv) {
    const ModelPoint u0 = point_on_side(ct, su, iu.lo), u1 = point_on_side(ct, su, iu.hi);
    const ModelPoint v0 = point_on_side(ct, sv, iv.lo), v1 = point_on_side(ct, sv, iv.hi);
    return std::min({detail::point_to_side(ct, u0, sv, iv), detail::point_to_side(ct, u1, sv, iv),
                     detail::point_to_side(ct, v0, su, iu), detail::point_to_side(ct, v1, su, iu)});
}

struct RcatEval {
    double excess = 0.0;
    double d_uv = 0.0;
    double comparison_min = 0.0;
    int side_u = 0, side_v = 0;
    ArcPoint u, v;
    ArcInterval iu, iv;
};

inline RcatEval rcat_excess_at(const ComparisonTriangle& ct, int su, const ArcPoint& u, int sv, const ArcPoint& v,
                               double d_uv) {
    if (su == sv) fail(ErrorKind::invalid_input, "u and v must lie on different sides");
    RcatEval r;
    r.side_u = su;
    r.side_v = sv;
    r.u = u;
    r.v = v;
    r.iu = comparison_point_interval(ct, su, u.prefix, u.suffix);
    r.iv = comparison_point_interval(ct, sv, v.prefix, v.suffix);
    r.comparison_min = min_comparison_distance(ct, su, r.iu, sv, r.iv);
    r.d_uv = d_uv;
    r.excess = d_uv - r.comparison_min;
    return r;
}

inline RcatEval rcat_triangle_excess(const Space& X, const ShortTriangle& tri, int su, double tu, int sv, double tv,
                                     const Curvature& k) {
    if (su < 0 || su > 2 || sv < 0 || sv > 2) fail(ErrorKind::invalid_input, "side index must be 0, 1 or 2");
    if (su == sv) fail(ErrorKind::invalid_input, "u and v must lie on different sides");
    const ComparisonTriangle ct = comparison_for(tri, k);
    const ArcPoint pu = point_at_arclength(tri.sides[su], tu);
    const ArcPoint pv = point_at_arclength(tri.sides[sv], tv);
    const double d = pu.node == pv.node ? 0.0 : X.distance(pu.node, pv.node);
    RcatEval r = rcat_excess_at(ct, su, pu, sv, pv, d);
    return r;
}

// ---------------------------------------------------------------- triangle draws

struct TriangleDraw {
    Triple vertices{};
    ShortTriangle tri;
};

inline ShortTriangle standard_triangle(const Space& X, const Triple& v, std::uint64_t seed) {
    const double h = standard_short_h(X.distance(v[0], v[1]), X.distance(v[0], v[2]), X.distance(v[1], v[2]));
    return build_short_triangle(X, v[0], v[1], v[2], h, seed);
}

// Triangle number t of a scan; identical across the scans that share a seed.
inline TriangleDraw draw_triangle(const Space& X, std::uint64_t seed, std::size_t t) {
    const std::uint64_t ts = sub_seed(seed, t);
    Rng rng(ts);
    TriangleDraw d;
    d.vertices = sample_triple(X.size(), rng);
    d.tri = standard_triangle(X, d.vertices, sub_seed(ts, 1));
    return d;
}

// Vertex i of a triangle as a point on a side other than its opposite side.
// Vertex 0 is opposite side 2, vertex 1 opposite side 1, vertex 2 opposite side 0.
inline int opposite_side(int vertex) { return 2 - vertex; }

inline std::pair<int, ArcPoint> vertex_point(const ShortTriangle& t, int vertex) {
    switch (vertex) {
    case 0: return {0, arc_point_at_index(t.sides[0], 0)};
    case 1: return {2, arc_point_at_index(t.sides[2], 0)};
    default: return {1, arc_point_at_index(t.sides[1], t.sides[1].nodes.size() - 1)};
    }
}

struct RcatWitness {
    Triple vertices{};
    int vertex = -1;          // vertex playing v, or -1 for a random pair
    int side_u = 0, side_v = 0;
    std::size_t u_node = 0, v_node = 0;
    double d_uv = 0.0, comparison = 0.0;
    std::size_t triangle = 0; // draw index within the scan
    std::size_t u_index = 0, v_index = 0; // positions on the sides
};

inline RcatWitness witness_of(const TriangleDraw& d, std::size_t t, const RcatEval& e, int vertex = -1) {
    return {d.vertices, vertex, e.side_u, e.side_v, e.u.node, e.v.node, e.d_uv, e.comparison_min,
            t, e.u.index, e.v.index};
}

// ---------------------------------------------------------------- rCAT scan

struct RcatScan {
    double C = 0.0;
    double raw = -kInf;       // largest excess, may be negative
    RcatWitness witness;
    std::size_t triangles = 0;
    std::size_t pairs = 0;
    double budget = 0.0;
};

// Every pair (vertex, node on the opposite side) is evaluated in addition to
// the random cross-side pairs, so weak estimates on the same seed never
// exceed this one.
inline RcatScan rcat_scan(const Space& X, const Curvature& k, std::size_t triangles, std::size_t pairs,
                          std::uint64_t seed) {
    if (triangles < 1 || pairs < 1) fail(ErrorKind::invalid_input, "triangle and pair counts must be >= 1");
    if (X.size() < 3) fail(ErrorKind::invalid_input, "rcat scan needs at least 3 points");
    struct Slot {
        double best = -kInf;
        RcatWitness w;
        std::size_t pairs = 0;
    };
    std::vector<Slot> slots(triangles);
    parallel_for(triangles, [&](std::size_t t) {
        const TriangleDraw d = draw_triangle(X, seed, t);
        const ComparisonTriangle ct = comparison_for(d.tri, k);
        Slot& s = slots[t];
        auto take = [&](const RcatEval& e, int vertex) {
            ++s.pairs;
            if (e.excess > s.best) {
                s.best = e.excess;
                s.w = witness_of(d, t, e, vertex);
            }
        };
        for (int vx = 0; vx < 3; ++vx) {
            const auto [vs, vp] = vertex_point(d.tri, vx);
            const int os = opposite_side(vx);
            const ShortSegment& side = d.tri.sides[os];
            for (std::size_t i = 0; i < side.nodes.size(); ++i) {
                const ArcPoint up = arc_point_at_index(side, i);
                const double duv = up.node == vp.node ? 0.0 : X.distance(vp.node, up.node);
                take(rcat_excess_at(ct, os, up, vs, vp, duv), vx);
            }
        }
        Rng rng(sub_seed(sub_seed(seed, t), 2));
        for (std::size_t p = 0; p < pairs; ++p) {
            const int su = static_cast<int>(rng.index(3));
            const int sv = (su + 1 + static_cast<int>(rng.index(2))) % 3;
            const ShortSegment& a = d.tri.sides[su];
            const ShortSegment& b = d.tri.sides[sv];
            const ArcPoint up = arc_point_at_index(a, rng.index(a.nodes.size()));
            const ArcPoint vp = arc_point_at_index(b, rng.index(b.nodes.size()));
            const double duv = up.node == vp.node ? 0.0 : X.distance(up.node, vp.node);
            take(rcat_excess_at(ct, su, up, sv, vp, duv), -1);
        }
    });
    RcatScan res;
    res.triangles = triangles;
    res.budget = X.budget();
    for (const auto& s : slots) {
        res.pairs += s.pairs;
        if (s.best > res.raw) {
            res.raw = s.best;
            res.witness = s.w;
        }
    }
    res.C = std::max(0.0, res.raw);
    return res;
}

// Excess of a reported rcat_scan witness, recomputed from its triangle draw.
inline double rcat_witness_excess(const Space& X, const Curvature& k, std::uint64_t seed, const RcatWitness& w) {
    const TriangleDraw d = draw_triangle(X, seed, w.triangle);
    const ComparisonTriangle ct = comparison_for(d.tri, k);
    const ArcPoint u = arc_point_at_index(d.tri.sides[w.side_u], w.u_index);
    const ArcPoint v = arc_point_at_index(d.tri.sides[w.side_v], w.v_index);
    double duv = 0.0;
    if (u.node != v.node) duv = w.vertex >= 0 ? X.distance(v.node, u.node) : X.distance(u.node, v.node);
    return rcat_excess_at(ct, w.side_u, u, w.side_v, v, duv).excess;
}

// ---------------------------------------------------------------- weak variants

// Minimal C for one (vertex x, point u on the opposite side) sample in the
// explicit planar form: d(x,u) minus the smallest admissible value of
// sqrt((1-t)a^2 + t b^2 - t(1-t)c^2), a = d(x, side start), b = d(x, side end).
inline double weak_excess_planar(double a, double b, double c, double d_xu, double prefix, double suffix) {
    double rhs;
    if (c <= 0.0) {
        rhs = a * a;
    } else {
        double lo = std::max(0.0, 1.0 - suffix / c), hi = std::min(1.0, prefix / c);
        if (lo > hi) lo = hi = 0.5 * (lo + hi);
        const double t = std::clamp((a * a - b * b + c * c) / (2.0 * c * c), lo, hi);
        rhs = (1.0 - t) * a * a + t * b * b - t * (1.0 - t) * c * c;
    }
    return d_xu - std::sqrt(std::max(0.0, rhs));
}

struct WeakScan {
    double C = 0.0;
    double raw = -kInf;
    RcatWitness witness;
    std::size_t triangles = 0;
    std::size_t samples = 0;
    std::size_t excluded = 0; // very weak: samples without an admissible midpoint
    double snap = 0.0;        // very weak / bolicity: largest midpoint snap tolerance
};

inline WeakScan weak_rcat_min_C(const Space& X, const Curvature& k, std::size_t triangles, std::uint64_t seed) {
    if (triangles < 1) fail(ErrorKind::invalid_input, "triangle count must be >= 1");
    if (X.size() < 3) fail(ErrorKind::invalid_input, "weak rcat scan needs at least 3 points");
    std::vector<WeakScan> slots(triangles);
    parallel_for(triangles, [&](std::size_t t) {
        const TriangleDraw d = draw_triangle(X, seed, t);
        const ComparisonTriangle ct = comparison_for(d.tri, k);
        WeakScan& s = slots[t];
        for (int vx = 0; vx < 3; ++vx) {
            const auto [vs, vp] = vertex_point(d.tri, vx);
            const int os = opposite_side(vx);
            const ShortSegment& side = d.tri.sides[os];
            const double a = X.distance(vp.node, side.start()), b = X.distance(vp.node, side.end());
            for (std::size_t i = 0; i < side.nodes.size(); ++i) {
                const ArcPoint up = arc_point_at_index(side, i);
                const double dxu = up.node == vp.node ? 0.0 : X.distance(vp.node, up.node);
                RcatEval e;
                if (k.kind == Curvature::Kind::euclidean) {
                    e.excess = weak_excess_planar(a, b, side.endpoint_distance, dxu, up.prefix, up.suffix);
                    e.d_uv = dxu;
                    e.comparison_min = dxu - e.excess;
                    e.side_u = os;
                    e.side_v = vs;
                    e.u = up;
                    e.v = vp;
                } else {
                    e = rcat_excess_at(ct, os, up, vs, vp, dxu);
                }
                ++s.samples;
                if (e.excess > s.raw) {
                    s.raw = e.excess;
                    s.witness = witness_of(d, t, e, vx);
                }
            }
        }
    });
    WeakScan res;
    res.triangles = triangles;
    for (const auto& s : slots) {
        res.samples += s.samples;
        if (s.raw > res.raw) {
            res.raw = s.raw;
            res.witness = s.witness;
        }
    }
    res.C = std::max(0.0, res.raw);
    return res;
}

// Nodes of a side admitting the model midpoint as a comparison point, with
// the snap tolerance of half the longest edge on the side.
inline std::vector<std::size_t> h_midpoint_indices(const ShortSegment& s, double* tol_out = nullptr) {
    double longest = 0.0;
    for (std::size_t i = 0; i + 1 < s.nodes.size(); ++i) longest = std::max(longest, s.edge_length(i));
    const double tol = 0.5 * longest + 1e-12;
    if (tol_out) *tol_out = tol;
    const double half = 0.5 * s.endpoint_distance;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const ArcPoint p = arc_point_at_index(s, i);
        if (p.prefix >= half - tol && p.suffix >= half - tol) out.push_back(i);
    }
    return out;
}

// Distance from the comparison vertex to the midpoint of the opposite side.
inline double model_median(const ComparisonTriangle& ct, int vertex) {
    const int os = opposite_side(vertex);
    return model_distance(ct.curvature, ct.vertices[vertex], point_on_side(ct, os, 0.5 * ct.realized_sides[os]));
}

inline double planar_median(double a, double b, double c) {
    return 0.5 * std::sqrt(std::max(0.0, 2.0 * a * a + 2.0 * b * b - c * c));
}

enum class MidpointPolicy { all, best };

inline const char* midpoint_policy_name(MidpointPolicy p) { return p == MidpointPolicy::all ? "all" : "best"; }

namespace detail {

// Shared loop of the very weak and bolicity scans: calls f(draw, vertex,
// side index, midpoint ArcPoint, d(x,m), model median) for every admissible
// midpoint; returns the number of (triangle, vertex) samples without one.
template <class F>
std::size_t for_each_midpoint_sample(const Space& X, const Curvature& k, const TriangleDraw& d, double& snap, F&& f) {
    const ComparisonTriangle ct = comparison_for(d.tri, k);
    std::size_t excluded = 0;
    for (int vx = 0; vx < 3; ++vx) {
        const auto [vs, vp] = vertex_point(d.tri, vx);
        (void)vs;
        const int os = opposite_side(vx);
        const ShortSegment& side = d.tri.sides[os];
        double tol = 0.0;
        const auto mids = h_midpoint_indices(side, &tol);
        snap = std::max(snap, tol);
        if (mids.empty()) {
            ++excluded;
            continue;
        }
        double median;
        if (k.kind == Curvature::Kind::euclidean)
            median = planar_median(X.distance(vp.node, side.start()), X.distance(vp.node, side.end()),
                                   side.endpoint_distance);
        else
            median = model_median(ct, vx);
        for (std::size_t i : mids) {
            const ArcPoint m = arc_point_at_index(side, i);
            const double dxm = m.node == vp.node ? 0.0 : X.distance(vp.node, m.node);
            f(vx, os, vp, m, dxm, median);
        }
    }
    return excluded;
}

}  // namespace detail

inline WeakScan very_weak_rcat_min_C(const Space& X, const Curvature& k, std::size_t triangles, std::uint64_t seed) {
    if (triangles < 1) fail(ErrorKind::invalid_input, "triangle count must be >= 1");
    if (X.size() < 3) fail(ErrorKind::invalid_input, "very weak scan needs at least 3 points");
    std::vector<WeakScan> slots(triangles);
    parallel_for(triangles, [&](std::size_t t) {
        const TriangleDraw d = draw_triangle(X, seed, t);
        WeakScan& s = slots[t];
        s.excluded = detail::for_each_midpoint_sample(
            X, k, d, s.snap, [&](int vx, int os, const ArcPoint& vp, const ArcPoint& m, double dxm, double median) {
                ++s.samples;
                const double c = dxm - median;
                if (c > s.raw) {
                    s.raw = c;
                    s.witness = {d.vertices, vx, os, vertex_point(d.tri, vx).first, m.node, vp.node, dxm, median, t, m.index, vp.index};
                }
            });
    });
    WeakScan res;
    res.triangles = triangles;
    for (const auto& s : slots) {
        res.samples += s.samples;
        res.excluded += s.excluded;
        res.snap = std::max(res.snap, s.snap);
        if (s.raw > res.raw) {
            res.raw = s.raw;
            res.witness = s.witness;
        }
    }
    res.C = std::max(0.0, res.raw);
    return res;
}

// delta for vertex x and midpoint m of the side [y,z]:
// (2 d(x,m) - sqrt(2 d(x,y)^2 + 2 d(x,z)^2 - d(y,z)^2)) / 4.
inline double bolic_defect(double dxm, double dxy, double dxz, double dyz) {
    return (2.0 * dxm - std::sqrt(std::max(0.0, 2.0 * dxy * dxy + 2.0 * dxz * dxz - dyz * dyz))) / 4.0;
}

struct BolicityScan {
    double delta = 0.0;
    double raw = -kInf;
    RcatWitness witness;
    std::size_t triangles = 0;
    std::size_t samples = 0;
    std::size_t excluded = 0;
    double snap = 0.0;
};

inline BolicityScan bolicity_min_delta(const Space& X, MidpointPolicy policy, std::size_t triangles,
                                       std::uint64_t seed) {
    if (triangles < 1) fail(ErrorKind::invalid_input, "triangle count must be >= 1");
    if (X.size() < 3) fail(ErrorKind::invalid_input, "bolicity scan needs at least 3 points");
    const Curvature k = Curvature::euclidean();
    std::vector<BolicityScan> slots(triangles);
    parallel_for(triangles, [&](std::size_t t) {
        const TriangleDraw d = draw_triangle(X, seed, t);
        BolicityScan& s = slots[t];
        // per vertex: the worst (all) or the best (best) midpoint
        std::array<double, 3> pick;
        std::array<RcatWitness, 3> pw;
        std::array<bool, 3> seen{false, false, false};
        s.excluded = detail::for_each_midpoint_sample(
            X, k, d, s.snap, [&](int vx, int os, const ArcPoint& vp, const ArcPoint& m, double dxm, double median) {
                ++s.samples;
                const double v = (dxm - median) / 2.0;
                const bool better = !seen[vx] || (policy == MidpointPolicy::all ? v > pick[vx] : v < pick[vx]);
                if (better) {
                    seen[vx] = true;
                    pick[vx] = v;
                    pw[vx] = {d.vertices, vx, os, vertex_point(d.tri, vx).first, m.node, vp.node, dxm, median, t, m.index, vp.index};
                }
            });
        for (int vx = 0; vx < 3; ++vx)
            if (seen[vx] && pick[vx] > s.raw) {
                s.raw = pick[vx];
                s.witness = pw[vx];
            }
    });
    BolicityScan res;
    res.triangles = triangles;
    for (const auto& s : slots) {
        res.samples += s.samples;
        res.excluded += s.excluded;
        res.snap = std::max(res.snap, s.snap);
        if (s.raw > res.raw) {
            res.raw = s.raw;
            res.witness = s.witness;
        }
    }
    res.delta = std::max(0.0, res.raw);
    return res;
}

// ---------------------------------------------------------------- CN inequality

struct CnScan {
    double deficit = 0.0;     // in squared length units
    double raw = -kInf;
    Triple witness{};         // (x, y, z)
    std::size_t midpoint = 0;
    std::size_t samples = 0;
    std::size_t excluded = 0;
    double snap = 0.0;
};

// Deficit of d(x,y)^2 + d(x,z)^2 >= 2 d(x,m)^2 + d(y,z)^2 / 2 for sampled
// triples, m the node of a geodesic [y,z] nearest its midpoint (accepted
// within half the longest edge of that geodesic).
inline CnScan cn_min_deficit(const Space& X, std::size_t samples, std::uint64_t seed) {
    if (samples < 1) fail(ErrorKind::invalid_input, "sample count must be >= 1");
    if (X.size() < 3) fail(ErrorKind::invalid_input, "CN scan needs at least 3 points");
    std::vector<CnScan> slots(samples);
    parallel_for(samples, [&](std::size_t t) {
        Rng rng(sub_seed(seed, t));
        const Triple v = sample_triple(X.size(), rng);
        CnScan& s = slots[t];
        s.witness = v;
        const ShortSegment g = geodesic(X, v[1], v[2]);
        double longest = 0.0;
        for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i) longest = std::max(longest, g.edge_length(i));
        const double tol = 0.5 * longest + 1e-12;
        s.snap = tol;
        const ArcPoint m = point_at_arclength(g, 0.5 * g.length);
        if (std::abs(m.prefix - 0.5 * g.length) > tol) {
            s.excluded = 1;
            return;
        }
        s.samples = 1;
        const double dxy = X.distance(v[0], v[1]), dxz = X.distance(v[0], v[2]);
        const double dxm = m.node == v[0] ? 0.0 : X.distance(v[0], m.node);
        const double dyz = g.endpoint_distance;
        s.raw = 2.0 * dxm * dxm + 0.5 * dyz * dyz - dxy * dxy - dxz * dxz;
        s.midpoint = m.node;
    });
    CnScan res;
    for (const auto& s : slots) {
        res.samples += s.samples;
        res.excluded += s.excluded;
        res.snap = std::max(res.snap, s.snap);
        if (s.samples && s.raw > res.raw) {
            res.raw = s.raw;
            res.witness = s.witness;
            res.midpoint = s.midpoint;
        }
    }
    res.deficit = res.samples ? std::max(0.0, res.raw) : kInf;
    return res;
}

// ---------------------------------------------------------------- implication chains

namespace detail {

struct WeakSample {
    Triple vertices{};   // triangle vertices (x, y, z)
    int vertex = 0;
    std::size_t u = 0;
    double excess = -kInf;
    bool operator<(const WeakSample& o) const {
        return std::tie(vertices, vertex, u) < std::tie(o.vertices, o.vertex, o.u);
    }
};

struct PairedFour {
    WeakSample s2, s4;
    double snap = 0.0;
};

// The weak samples used to certify a subembedding of (x1,x2,x3,x4): both
// triangles share one short side [x1,x3], and the sample point on it sits
// where [x2,x4] crosses the model diagonal (placement with |x1 - x3| = d(x1,x3)).
inline PairedFour pair_four_point(const Space& X, const Quad& q, std::uint64_t seed) {
    const auto [x1, x2, x3, x4] = q;
    const double h = std::min(standard_short_h(X.distance(x1, x3), X.distance(x1, x2), X.distance(x3, x2)),
                              standard_short_h(X.distance(x1, x3), X.distance(x1, x4), X.distance(x3, x4)));
    auto seg = [&](std::size_t a, std::size_t b, std::uint64_t s) {
        return a == b ? geodesic(X, a, b) : sample_short_segment(X, a, b, h, sub_seed(seed, s));
    };
    const ShortSegment shared = seg(x1, x3, 0);
    const ShortTriangle t2 = triangle_from_sides(shared, seg(x1, x2, 1), seg(x3, x2, 2));
    const ShortTriangle t4 = triangle_from_sides(shared, seg(x1, x4, 3), seg(x3, x4, 4));
    const Curvature k = Curvature::euclidean();
    const ComparisonTriangle c2 = comparison_for(t2, k), c4 = comparison_for(t4, k);
    const double c = c2.realized_sides[0];
    const double p2x = c2.vertices[2].c[0], p2y = c2.vertices[2].c[1];
    const double p4x = c4.vertices[2].c[0], p4y = c4.vertices[2].c[1]; // reflected below the axis
    double zx;
    if (p2y + p4y > 0.0)
        zx = p2x + p2y / (p2y + p4y) * (p4x - p2x);
    else
        zx = 0.5 * (p2x + p4x);
    const double sigma = std::clamp(zx, 0.0, c);
    const ArcPoint z = point_at_arclength(shared, std::min(sigma, shared.length));
    PairedFour out;
    const ArcInterval iz = comparison_point_interval(c2, 0, z.prefix, z.suffix);
    out.snap = std::max({0.0, iz.lo - sigma, sigma - iz.hi});
    auto eval = [&](const ShortTriangle& t, const ComparisonTriangle& ct, std::size_t apex) {
        const auto [vs, vp] = vertex_point(t, 2);
        const double d = z.node == apex ? 0.0 : X.distance(apex, z.node);
        WeakSample w;
        w.vertices = t.vertices;
        w.vertex = 2;
        w.u = z.node;
        w.excess = rcat_excess_at(ct, 0, z, vs, vp, d).excess;
        return w;
    };
    out.s2 = eval(t2, c2, x2);
    out.s4 = eval(t4, c4, x4);
    return out;
}

}  // namespace detail

struct ChainReport {
    double C = 0.0, C_weak = 0.0, C4 = 0.0, C_vw = 0.0, delta_b = 0.0;
    double budget = 0.0;
    double snap4 = 0.0;       // comparison-point snap in the four-point pairing
    std::array<std::string, 5> names{"C_weak <= C", "C4 <= 2 C_weak", "C_weak <= C4 + 1 + sqrt3/2",
                                     "delta_b <= C_vw / 2", "C_vw <= 4 delta_b + sqrt2"};
    std::array<double, 5> lhs{}, rhs{};
    std::array<bool, 5> holds{};
    Quad four_witness{};
    RcatWitness weak_witness;
    std::size_t iterations = 0;
    bool converged = false;

    bool all_hold() const { return holds[0] && holds[1] && holds[2] && holds[3] && holds[4]; }
};

// Measures C, C_weak, C4, C_vw and delta_b (kappa = 0) on shared samples and
// checks the one-sided implication chains. Witnesses of each maximum are
// paired with the configurations the implication argument uses, until both
// maxima are certified.
inline ChainReport conversion_chains(const Space& X, std::size_t triangles, std::size_t pairs, std::size_t tuples,
                                     std::uint64_t seed) {
    const Curvature k = Curvature::euclidean();
    ChainReport r;
    r.budget = X.budget();
    const RcatScan rc = rcat_scan(X, k, triangles, pairs, seed);
    const WeakScan wk = weak_rcat_min_C(X, k, triangles, seed);
    const FourPointScan fp = four_point_scan(X, k, OrderingPolicy::given, seeded_tuples(X.size(), tuples, sub_seed(seed, 91)));

    double cw = wk.raw;
    detail::WeakSample ww{wk.witness.vertices, wk.witness.vertex, wk.witness.u_node, wk.raw};
    double c4 = fp.C4;
    Quad w4 = fp.witness;
    std::set<Quad> paired4;
    std::set<detail::WeakSample> pairedw;
    std::size_t it = 0;
    for (; it < 64; ++it) {
        bool changed = false;
        if (!paired4.count(w4)) {
            paired4.insert(w4);
            const auto pf = detail::pair_four_point(X, w4, sub_seed(seed, 92 + it));
            r.snap4 = std::max(r.snap4, pf.snap);
            for (const auto& s : {pf.s2, pf.s4})
                if (s.excess > cw) {
                    cw = s.excess;
                    ww = s;
                    changed = true;
                }
        }
        if (!pairedw.count(ww)) {
            pairedw.insert(ww);
            const Triple& v = ww.vertices;
            const int os = opposite_side(ww.vertex);
            const auto [a, b] = side_endpoints(os);
            const Quad q{v[a], ww.u, v[b], v[ww.vertex]};
            const double c = rough_subembedding_C(k, four_distances(X, q)).minimal_C;
            if (c > c4) {
                c4 = c;
                w4 = q;
                changed = true;
            }
        }
        if (!changed) {
            r.converged = true;
            break;
        }
    }
    r.iterations = it + 1;
    r.four_witness = w4;
    r.weak_witness.vertices = ww.vertices;
    r.weak_witness.vertex = ww.vertex;
    r.weak_witness.side_u = opposite_side(ww.vertex);
    r.weak_witness.u_node = ww.u;
    r.weak_witness.v_node = ww.vertices[static_cast<std::size_t>(ww.vertex)];

    r.C_weak = std::max(0.0, cw);
    // weak samples are rCAT samples with v a vertex
    r.C = std::max({0.0, rc.raw, cw});
    r.C4 = std::max(0.0, c4);
    const WeakScan vw = very_weak_rcat_min_C(X, k, triangles, seed);
    const BolicityScan bo = bolicity_min_delta(X, MidpointPolicy::all, triangles, seed);
    r.C_vw = vw.C;
    r.delta_b = bo.delta;

    r.lhs = {r.C_weak, r.C4, r.C_weak, r.delta_b, r.C_vw};
    r.rhs = {r.C, 2.0 * r.C_weak + 1e-6 + 2.0 * r.snap4, r.C4 + 1.0 + std::sqrt(3.0) / 2.0 + r.budget,
             r.C_vw / 2.0 + r.budget, 4.0 * r.delta_b + std::sqrt(2.0) + r.budget};
    for (int i = 0; i < 5; ++i) r.holds[i] = r.lhs[i] <= r.rhs[i];
    return r;
}

}  // namespace roughcat
