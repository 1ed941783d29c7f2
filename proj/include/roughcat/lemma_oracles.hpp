#pragma once

// Closed-form evaluators and brute-force verifiers for the explicit planar
// formulas, bounds and constant conversions, plus the counterexample
// families (l1 boxes, warped ladder, detour apex).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "conditions.hpp"
#include "errors.hpp"
#include "model_plane.hpp"
#include "rng.hpp"
#include "shortseg.hpp"
#include "spaces.hpp"

namespace roughcat {

struct BoundCheck {
    std::string statement;
    std::vector<std::pair<std::string, double>> inputs;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline BoundCheck make_check(std::string statement, std::vector<std::pair<std::string, double>> inputs, double lhs,
                             double rhs, double tol) {
    BoundCheck b{std::move(statement), std::move(inputs), lhs, rhs, rhs - lhs, tol, false};
    b.pass = b.slack >= -tol;
    return b;
}

// Keeps the sample with the smallest slack.
struct WorstCase {
    bool any = false;
    double lhs = 0.0, rhs = 0.0;
    std::vector<std::pair<std::string, double>> inputs;

    void offer(double l, double r, std::vector<std::pair<std::string, double>> in) {
        if (!any || r - l < rhs - lhs) {
            any = true;
            lhs = l;
            rhs = r;
            inputs = std::move(in);
        }
    }
    BoundCheck check(std::string statement, double tol, std::size_t samples) const {
        auto in = inputs;
        in.emplace_back("samples", static_cast<double>(samples));
        return make_check(std::move(statement), std::move(in), any ? lhs : 0.0, any ? rhs : 0.0, tol);
    }
};

// ---------------------------------------------------------------- planar formulas

inline double plane_interp_bound(double dxy, double dxz, double dyz, double t) {
    check_triangle_sides(dxy, dxz, dyz);
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::invalid_input, "t must lie in [0, 1]");
    return (1.0 - t) * dxy * dxy + t * dxz * dxz - t * (1.0 - t) * dyz * dyz;
}

struct EllipseResult {
    double M = 0.0;          // closed form
    double brute = 0.0;      // brute-force maximum
    double argmax_phi = 0.0;
    std::size_t grid = 0;
};

// Points with |w-x| + |w-y| = l + h, |x-y| = l: the farthest one from [x,y]
// sits on the minor axis.
inline EllipseResult ellipse_bound(double l, double h, std::size_t grid = 100000) {
    if (!(l > 0.0) || !(h >= 0.0)) fail(ErrorKind::invalid_input, "ellipse bound needs l > 0 and h >= 0");
    EllipseResult r;
    r.M = 0.5 * std::sqrt(2.0 * l * h + h * h);
    r.grid = grid;
    const double a = 0.5 * (l + h), c = 0.5 * l;
    const double b = std::sqrt(std::max(0.0, a * a - c * c));
    for (std::size_t i = 0; i < grid; ++i) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid);
        const double px = a * std::cos(phi), py = b * std::sin(phi);
        const double d = std::abs(px) <= c ? std::abs(py) : std::hypot(std::abs(px) - c, py);
        if (d > r.brute) {
            r.brute = d;
            r.argmax_phi = phi;
        }
    }
    return r;
}

enum class ZipperBranch { near, far };

inline double zipper_r(double a, double e, double theta, ZipperBranch branch) {
    if (!(a > 0.0)) fail(ErrorKind::domain, "zipper_r needs a > 0");
    if (!(e > 1.0)) fail(ErrorKind::domain, "zipper_r needs eccentricity e > 1");
    const double den = (branch == ZipperBranch::near ? 1.0 : -1.0) + e * std::cos(theta);
    if (!(den > 0.0)) fail(ErrorKind::domain, "zipper_r denominator is not positive at theta = " + fmt_num(theta));
    return a * (e * e - 1.0) / den;
}

// Largest |r_geometric - r_formula| over points of both hyperbola branches
// with foci x = (ae, 0), y = (-ae, 0); the right branch uses the near formula.
inline double zipper_identity_error(double a, double e, std::size_t samples) {
    const double c = a * e, b = std::sqrt(c * c - a * a);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double s = -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(1, samples - 1));
        for (int side = 0; side < 2; ++side) {
            const double wx = (side == 0 ? 1.0 : -1.0) * a * std::cosh(s), wy = b * std::sinh(s);
            const double r = std::hypot(wx - c, wy);
            // angle at x between y - x = (-2c, 0) and w - x
            const double theta = std::atan2(std::abs(wy), -(wx - c));
            const double f = zipper_r(a, e, theta, side == 0 ? ZipperBranch::near : ZipperBranch::far);
            worst = std::max(worst, std::abs(r - f) / std::max(1.0, r));
        }
    }
    return worst;
}

// Smallest forward difference of r(theta) over the admissible theta range;
// positive means r increases with theta.
inline double zipper_min_derivative(double a, double e, ZipperBranch branch, std::size_t grid = 2000) {
    const double lim = (branch == ZipperBranch::near ? std::acos(-1.0 / e) : std::acos(1.0 / e)) - 1e-3;
    const double lo = 1e-3;
    double worst = kInf;
    double prev = zipper_r(a, e, lo, branch);
    for (std::size_t i = 1; i <= grid; ++i) {
        const double th = lo + (lim - lo) * static_cast<double>(i) / static_cast<double>(grid);
        const double r = zipper_r(a, e, th, branch);
        worst = std::min(worst, (r - prev) / ((lim - lo) / static_cast<double>(grid)));
        prev = r;
    }
    return worst;
}

// ---------------------------------------------------------------- zipper / perturbation sweeps

namespace detail {

struct V2 {
    double x = 0.0, y = 0.0;
};
inline V2 lerp(V2 a, V2 b, double f) { return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)}; }
inline double dist(V2 a, V2 b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline V2 toward(V2 a, V2 b, double len) {
    const double d = dist(a, b);
    return d > 0.0 ? lerp(a, b, len / d) : a;
}

// Apex above the x-axis with |apex - (0,0)| = r1 and |apex - (c,0)| = r2.
inline bool apex(double c, double r1, double r2, V2& out) {
    if (r1 < 0.0 || r2 < 0.0) return false;
    if (c + 1e-15 < std::abs(r1 - r2) || c > r1 + r2 + 1e-15 || !(c > 0.0)) return false;
    const double x = (r1 * r1 - r2 * r2 + c * c) / (2.0 * c);
    out = {x, std::sqrt(std::max(0.0, r1 * r1 - x * x))};
    return true;
}

inline V2 random_apex(Rng& rng) {
    const double r = rng.uniform(0.05, 1.0) * rng.uniform(0.5, 20.0);
    const double phi = rng.uniform(1e-3, std::numbers::pi - 1e-3);
    return {r * std::cos(phi), r * std::sin(phi)};
}

inline double short_h(double a, double b, double c) {
    const double m = std::max({a, b, c});
    return 1.0 / (1.0 + m * m);
}

}  // namespace detail

// Checks, each over `samples` constructed configurations:
//   perturbation (+2), zipper (a), zipper (b), perturbed zipper (a) (+2),
//   perturbed zipper (b) (+4).
inline std::vector<BoundCheck> zipper_pert_checks(std::size_t samples, std::uint64_t seed, double tol = 1e-9) {
    using detail::V2;
    std::vector<BoundCheck> out;

    {   // one side length perturbed by at most h
        Rng rng(sub_seed(seed, 1));
        WorstCase w;
        for (std::size_t s = 0; s < samples; ++s) {
            const double c = rng.uniform(0.1, 20.0);
            const detail::V2 x{0, 0}, y{c, 0};
            const V2 z = detail::random_apex(rng);
            const double a = detail::dist(x, z), b = detail::dist(y, z);
            const double h = detail::short_h(a, b, c);
            const int which = static_cast<int>(rng.index(3));
            double eps = rng.uniform(-h, h);
            V2 zp{};
            double a2 = a, b2 = b, c2 = c;
            for (int tries = 0; tries < 80; ++tries) {
                a2 = a + (which == 0 ? eps : 0.0);
                b2 = b + (which == 1 ? eps : 0.0);
                c2 = c + (which == 2 ? eps : 0.0);
                if (detail::apex(c2, a2, b2, zp)) break;
                eps *= 0.5;
            }
            const V2 yp{c2, 0};
            const double l = rng.uniform() * std::min(a, a2);
            const double m = rng.uniform() * std::min(c, c2);
            const V2 u = detail::toward(x, z, l), up = detail::toward(x, zp, l);
            const V2 v = detail::toward(x, y, m), vp = detail::toward(x, yp, m);
            w.offer(detail::dist(up, vp), detail::dist(u, v) + 2.0,
                    {{"a", a}, {"b", b}, {"c", c}, {"side", double(which)}, {"eps", eps}, {"l", l}, {"m", m}});
        }
        out.push_back(w.check("perturbation: |u'-v'| <= |u-v| + 2", tol, samples));
    }

    // z' with |x-z'| = |x-z| - dx and |y-z'| = |y-z| - dy; the shifts are
    // halved until the two circles meet.
    auto place = [](double c, double a, double b, double& dx, double& dy, V2& zp) {
        for (int tries = 0; tries < 200; ++tries) {
            if (detail::apex(c, a - dx, b - dy, zp)) return true;
            dx *= 0.5;
            dy *= 0.5;
        }
        dx = dy = 0.0;
        return detail::apex(c, a, b, zp);
    };

    for (int variant = 0; variant < 4; ++variant) {
        // 0: zipper (a), 1: zipper (b), 2: perturbed (a), 3: perturbed (b)
        Rng rng(sub_seed(seed, 10 + static_cast<std::uint64_t>(variant)));
        WorstCase w;
        std::size_t done = 0;
        for (std::size_t s = 0; s < samples; ++s) {
            const double c = rng.uniform(0.1, 20.0);
            const detail::V2 x{0, 0}, y{c, 0};
            const V2 z = detail::random_apex(rng);
            const double a = detail::dist(x, z), b = detail::dist(y, z);
            const double h = detail::short_h(a, b, c);
            double dx = 0.0, dy = 0.0;
            switch (variant) {
            case 0:
                dy = rng.uniform(0.0, b);
                dx = rng.uniform(-dy, dy);
                break;
            case 1:
                dx = dy = rng.uniform(0.0, std::min(a, b));
                break;
            case 2:
                dy = rng.uniform(0.0, b);
                dx = rng.uniform(-(dy + h), dy + h);
                break;
            default: {
                const double h1 = rng.uniform(0.0, h), h2 = rng.uniform(0.0, h);
                const double common = rng.uniform(0.0, std::min(a, b));
                dx = common - h1;
                dy = common - h2;
                break;
            }
            }
            V2 zp{};
            if (variant == 3) {
                // keep dx + h1 = dy + h2 while shrinking: shrink the common part only
                double s_dx = dx, s_dy = dy;
                int tries = 0;
                while (!detail::apex(c, a - s_dx, b - s_dy, zp) && tries < 200) {
                    const double mean = 0.5 * (s_dx + s_dy);
                    s_dx -= 0.5 * std::max(0.0, mean);
                    s_dy -= 0.5 * std::max(0.0, mean);
                    ++tries;
                }
                if (tries >= 200) continue;
                dx = s_dx;
                dy = s_dy;
            } else if (!place(c, a, b, dx, dy, zp)) {
                continue;
            }
            ++done;
            const double a2 = detail::dist(x, zp), b2 = detail::dist(y, zp);
            const double l = rng.uniform() * std::min(a, a2);
            const V2 u = detail::toward(x, z, l), up = detail::toward(x, zp, l);
            double lhs, rhs;
            if (variant == 0 || variant == 2) {
                const V2 v = detail::toward(x, y, rng.uniform() * c);
                lhs = detail::dist(up, v);
                rhs = detail::dist(u, v) + (variant == 2 ? 2.0 : 0.0);
            } else {
                const double q = rng.uniform() * std::min(b, b2);
                const V2 v = detail::toward(y, z, q), vp = detail::toward(y, zp, q);
                lhs = detail::dist(up, vp);
                rhs = detail::dist(u, v) + (variant == 3 ? 4.0 : 0.0);
            }
            w.offer(lhs, rhs, {{"a", a}, {"b", b}, {"c", c}, {"dx", dx}, {"dy", dy}, {"l", l}});
        }
        static const char* names[] = {"zipper (a): |dx| <= dy => |u'-v| <= |u-v|",
                                      "zipper (b): dx = dy >= 0 => |u'-v'| <= |u-v|",
                                      "perturbed zipper (a): |dx| <= dy + h => |u'-v| <= |u-v| + 2",
                                      "perturbed zipper (b): dx + h1 = dy + h2 >= 0 => |u'-v'| <= |u-v| + 4"};
        out.push_back(w.check(names[variant], tol, done));
    }
    return out;
}

// ---------------------------------------------------------------- Alexandrov sweep

inline BoundCheck alexandrov_sweep(const Curvature& k, std::size_t samples, std::uint64_t seed, double tol = 1e-9) {
    Rng rng(seed);
    WorstCase w;
    std::size_t used = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const double ra = rng.uniform(0.1, 5.0), rb = rng.uniform(0.1, 5.0), rbp = rng.uniform(0.1, 5.0);
        const double phi = rng.uniform(1e-3, std::numbers::pi - 1e-3);
        const double phip = rng.uniform(std::numbers::pi - phi, std::numbers::pi - 1e-6);
        const ModelPoint C = ModelPoint::polar(k, 0.0, 0.0);
        const ModelPoint A = ModelPoint::polar(k, ra, 0.0);
        const ModelPoint B = ModelPoint::polar(k, rb, phi);
        const ModelPoint Bp = ModelPoint::polar(k, rbp, -phip);
        const AlexandrovReport r = alexandrov_check(k, A, B, Bp, C);
        if (!r.hypothesis) continue;
        ++used;
        w.offer(-r.min_slack(), 0.0, {{"ra", ra}, {"rb", rb}, {"rb'", rbp}, {"phi", phi}, {"phi'", phip}});
    }
    return w.check("Alexandrov lemma conclusions (" + k.str() + ")", tol, used);
}

// ---------------------------------------------------------------- segment gap bounds

enum class GapForm { theorem, remark, cat0 };

inline const char* gap_form_name(GapForm f) {
    switch (f) {
    case GapForm::theorem: return "theorem";
    case GapForm::remark: return "remark";
    default: return "cat0";
    }
}

inline double gap_bound(GapForm f, double C, double L, double h1, double h2) {
    const double s1 = 0.5 * std::sqrt(2.0 * L * h1 + h1 * h1), s2 = 0.5 * std::sqrt(2.0 * L * h2 + h2 * h2);
    switch (f) {
    case GapForm::theorem: return 2.0 * C + h2 + s1 + s2;
    case GapForm::remark: return C + h2 + s2;
    default: return h2 + s1 + s2;
    }
}

// Largest distance between arclength-aligned points of two segments with
// the same endpoints. Positions of the first segment's nodes are matched
// with the nearest node of the second; the larger snap is returned.
inline double aligned_gap(const Space& X, const ShortSegment& g1, const ShortSegment& g2, double* snap = nullptr) {
    double gap = 0.0, sn = 0.0;
    const double lim = std::min(g1.length, g2.length);
    for (std::size_t i = 0; i < g1.nodes.size(); ++i) {
        if (g1.prefix[i] > lim + 1e-12) break;
        const ArcPoint p = point_at_arclength(g2, std::min(g1.prefix[i], g2.length));
        sn = std::max(sn, p.snap);
        gap = std::max(gap, p.node == g1.nodes[i] ? 0.0 : X.distance(g1.nodes[i], p.node));
    }
    if (snap) *snap = sn;
    return gap;
}

// h1 <= 0 means the first segment is a geodesic.
inline BoundCheck short_vs_geodesic_gap(const Space& X, std::size_t x, std::size_t y, double h1, double h2,
                                        std::size_t samples, std::uint64_t seed, double C, GapForm form,
                                        double tol = 1e-9) {
    if (x == y) fail(ErrorKind::invalid_input, "short_vs_geodesic_gap needs x != y");
    if (h1 > h2) std::swap(h1, h2);
    const double L = X.distance(x, y);
    WorstCase w;
    for (std::size_t s = 0; s < samples; ++s) {
        const ShortSegment g1 =
            h1 > 0.0 ? sample_short_segment(X, x, y, h1, sub_seed(seed, 2 * s)) : geodesic(X, x, y);
        const ShortSegment g2 = sample_short_segment(X, x, y, h2, sub_seed(seed, 2 * s + 1));
        double snap = 0.0;
        const double gap = aligned_gap(X, g1, g2, &snap);
        w.offer(gap, gap_bound(form, C, L, std::max(0.0, h1), h2) + snap + X.budget(),
                {{"L", L}, {"h1", h1}, {"h2", h2}, {"C", C}, {"snap", snap}, {"waypoint1", double(g1.waypoint)},
                 {"waypoint2", double(g2.waypoint)}});
    }
    return w.check(std::string("segment gap bound (") + gap_form_name(form) + ")", tol, samples);
}

// ---------------------------------------------------------------- tripod lemma

// Gap d(y1, y2) between equal-arclength points of h-short paths from a common
// origin, while d(o, y1) <= (x1|x2)_o, against 4 delta + 2h.
inline BoundCheck tripod_gap_check(const Space& X, double delta, double h, std::size_t samples, std::uint64_t seed,
                                   double tol = 1e-9) {
    if (h > 1.0) fail(ErrorKind::invalid_input, "tripod check needs h <= 1");
    if (X.size() < 3) fail(ErrorKind::invalid_input, "tripod check needs at least 3 points");
    WorstCase w;
    for (std::size_t s = 0; s < samples; ++s) {
        Rng rng(sub_seed(seed, s));
        const Triple t = sample_triple(X.size(), rng);
        const std::size_t o = t[0], x1 = t[1], x2 = t[2];
        auto seg = [&](std::size_t b, std::uint64_t k) {
            return h > 0.0 ? sample_short_segment(X, o, b, h, sub_seed(sub_seed(seed, s), k)) : geodesic(X, o, b);
        };
        const ShortSegment g1 = seg(x1, 1), g2 = seg(x2, 2);
        const double gp = 0.5 * (X.distance(o, x1) + X.distance(o, x2) - X.distance(x1, x2));
        for (std::size_t i = 0; i < g1.nodes.size(); ++i) {
            const double tpos = g1.prefix[i];
            if (tpos > g2.length + 1e-12) break;
            const std::size_t y1 = g1.nodes[i];
            if (X.distance(o, y1) > gp + 1e-12) continue;
            const ArcPoint p2 = point_at_arclength(g2, std::min(tpos, g2.length));
            const double gap = y1 == p2.node ? 0.0 : X.distance(y1, p2.node);
            w.offer(gap, 4.0 * delta + 2.0 * h + p2.snap + X.budget(),
                    {{"o", double(o)}, {"x1", double(x1)}, {"x2", double(x2)}, {"t", tpos}, {"snap", p2.snap}});
        }
    }
    return w.check("tripod lemma: d(y1,y2) <= 4 delta + 2h", tol, samples);
}

// ---------------------------------------------------------------- rough convexity

inline BoundCheck rough_convexity_check(const Space& X, double C, std::size_t samples, std::uint64_t seed,
                                        bool common_start = false, std::size_t steps = 20, double tol = 1e-9) {
    if (X.size() < 4) fail(ErrorKind::invalid_input, "rough convexity check needs at least 4 points");
    WorstCase w;
    for (std::size_t s = 0; s < samples; ++s) {
        Rng rng(sub_seed(seed, s));
        Quad q{};
        for (int k = 0; k < 4; ++k) q[k] = rng.index(X.size());
        const std::size_t a1 = q[0], b1 = q[1], b2 = q[3];
        const std::size_t a2 = common_start ? a1 : q[2];
        auto seg = [&](std::size_t a, std::size_t b, std::uint64_t k) {
            if (a == b) return geodesic(X, a, b);
            return sample_short_segment(X, a, b, 1.0 / std::max(1.0, X.distance(a, b)), sub_seed(sub_seed(seed, s), k));
        };
        const ShortSegment g1 = seg(a1, b1, 1), g2 = seg(a2, b2, 2);
        const double da = a1 == a2 ? 0.0 : X.distance(a1, a2), db = b1 == b2 ? 0.0 : X.distance(b1, b2);
        const double extra = common_start ? C : 2.0 * C;
        for (std::size_t i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(steps);
            const ArcPoint p1 = point_at_arclength(g1, t * g1.length), p2 = point_at_arclength(g2, t * g2.length);
            const double d = p1.node == p2.node ? 0.0 : X.distance(p1.node, p2.node);
            w.offer(d, (1.0 - t) * da + t * db + extra + p1.snap + p2.snap + X.budget(),
                    {{"a1", double(a1)}, {"b1", double(b1)}, {"a2", double(a2)}, {"b2", double(b2)}, {"t", t}});
        }
    }
    return w.check(common_start ? "rough convexity, common endpoint (C)" : "rough convexity (2C)", tol, samples);
}

// ---------------------------------------------------------------- constant conversions

struct Conversion {
    std::string target;
    std::string formula;
    double value = 0.0;
};

inline std::vector<std::string> conversion_names() {
    return {"cat0", "hrcat0", "weak-hrcat0", "very-weak-hrcat0", "very-weak-rcat0", "bolic",
            "weak-rcat", "four-point", "hyperbolic", "product-hrcat0"};
}

// kappa only matters for "four-point" (finite kappa < 0 or -inf).
inline std::vector<Conversion> constant_conversions(const std::string& name, double C = 0.0, double kappa = 0.0) {
    if (!(C >= 0.0)) fail(ErrorKind::invalid_input, "constant must be >= 0");
    const double r3 = std::sqrt(3.0), r2 = std::sqrt(2.0);
    if (name == "cat0") return {{"rCAT(0)", "2 + sqrt3", 2.0 + r3}};
    if (name == "hrcat0") return {{"rCAT(0)", "3C + 2 + sqrt3", 3.0 * C + 2.0 + r3}};
    if (name == "weak-hrcat0") return {{"weak rCAT(0)", "2C + 1 + sqrt3/2", 2.0 * C + 1.0 + r3 / 2.0}};
    if (name == "very-weak-hrcat0") return {{"very weak rCAT(0)", "2C + 1 + sqrt3/2", 2.0 * C + 1.0 + r3 / 2.0}};
    if (name == "very-weak-rcat0") return {{"bolic delta", "C/2", C / 2.0}};
    if (name == "bolic") return {{"very weak rCAT(0)", "4 delta + sqrt2", 4.0 * C + r2}};
    if (name == "weak-rcat") return {{"rough 4-point", "2C", 2.0 * C}};
    if (name == "hyperbolic") return {{"rCAT(-inf)", "4 delta + 2", 4.0 * C + 2.0}};
    if (name == "product-hrcat0")
        return {{"product hrCAT(0)", "sqrt2 C", r2 * C}, {"product rCAT(0)", "3 sqrt2 C + 2 + sqrt3", 3.0 * r2 * C + 2.0 + r3}};
    if (name == "four-point") {
        if (!(kappa <= 0.0)) fail(ErrorKind::invalid_input, "kappa must be <= 0");
        std::vector<Conversion> out{{"weak rCAT(0)", "C' + 1 + sqrt3/2", C + 1.0 + r3 / 2.0}};
        if (kappa < 0.0) {
            const double l3 = std::isinf(kappa) ? 0.0 : std::log(3.0) / std::sqrt(-kappa);
            out.push_back({"hyperbolic delta", "C' + log3/sqrt(-kappa)", C + l3});
            out.push_back({"rCAT(kappa)", "4C' + 2 + 4 log3/sqrt(-kappa)", 4.0 * C + 2.0 + 4.0 * l3});
        }
        return out;
    }
    std::string known;
    for (const auto& n : conversion_names()) known += (known.empty() ? "" : ", ") + n;
    fail(ErrorKind::unknown_name, "unknown constant name '" + name + "' (known: " + known + ")");
}

// ---------------------------------------------------------------- l1 witness family

struct L1Witness {
    int n = 0;
    double very_weak_C = 0.0; // d(x,m) - planar median
    double bolic_delta = 0.0;
    double weak_C = 0.0;
    double cn_deficit = 0.0;
    double midpoint_separation = 0.0; // two geodesics (-n,-n) -> (n,n)
    std::array<std::size_t, 4> nodes{}; // x, y, z, m
};

// x = (-n,-n), y = (n,-n), z = (-n,n) on the l1 box of halfwidth n; the side
// [y,z] is the geodesic through m = (0,0).
inline L1Witness l1_witness(int n) {
    if (n < 1) fail(ErrorKind::invalid_input, "l1 witness needs n >= 1");
    const auto box = make_grid_plane(n, 1.0, GridNorm::l1);
    const Space& X = *box;
    const double fn = n;
    const std::size_t x = grid_index(X, -fn, -fn), y = grid_index(X, fn, -fn), z = grid_index(X, -fn, fn);
    const std::size_t m = grid_index(X, 0, 0);
    const ShortTriangle tri = triangle_from_sides(geodesic(X, x, y), geodesic(X, x, z), short_segment_via(X, y, m, z));
    const ShortSegment& side = tri.sides[2];
    std::size_t mi = 0;
    while (side.nodes[mi] != m) ++mi;
    const ArcPoint mp = arc_point_at_index(side, mi);
    const double a = X.distance(x, y), b = X.distance(x, z), c = side.endpoint_distance, dxm = X.distance(x, m);
    L1Witness w;
    w.n = n;
    w.nodes = {x, y, z, m};
    w.very_weak_C = dxm - planar_median(a, b, c);
    w.bolic_delta = bolic_defect(dxm, a, b, c);
    w.weak_C = weak_excess_planar(a, b, c, dxm, mp.prefix, mp.suffix);
    w.cn_deficit = 2.0 * dxm * dxm + 0.5 * c * c - a * a - b * b;
    const std::size_t p = grid_index(X, fn, -fn), q = grid_index(X, -fn, fn), e = grid_index(X, fn, fn);
    const ShortSegment g1 = short_segment_via(X, x, p, e), g2 = short_segment_via(X, x, q, e);
    w.midpoint_separation = X.distance(point_at_arclength(g1, 0.5 * g1.length).node,
                                       point_at_arclength(g2, 0.5 * g2.length).node);
    return w;
}

// ---------------------------------------------------------------- warped ladder

struct LadderCertificate {
    int n = 0;
    double y = 0.0;              // height used
    int N = 0;                   // rung of the cheapest crossing
    int second = 0;              // rung of the second cheapest crossing
    double min_cost = 0.0;
    double ladder_distance = 0.0; // space distance between the two (0,y) points
    double midpoint_separation = 0.0;
    double budget = 0.0;
    int n_max = 0;
    double literal_y = 0.0;      // smallest grid y meeting d_n - d_0 < e^{-n+1} - e^{-n}
    int literal_N = 0;
};

// Smallest y on the step grid with 2 (sqrt(y^2 + n^2) - y) < e^{-n}(e - 1).
inline double ladder_height(int n, double step, double factor = 2.0) {
    const double D = std::exp(-n) * (std::numbers::e - 1.0) / factor;
    const double nn = static_cast<double>(n) * n;
    double y = std::max(step, std::ceil(((nn - D * D) / (2.0 * D)) / step) * step);
    while (!(factor * (std::sqrt(y * y + nn) - y) < factor * D)) y += step;
    while (y - step >= step && factor * (std::sqrt((y - step) * (y - step) + nn) - (y - step)) < factor * D) y -= step;
    return y;
}

inline std::pair<int, int> cheapest_rungs(const WarpedLadder& lad, double y, double* cost = nullptr) {
    std::vector<std::pair<double, int>> c;
    for (int m = -lad.n_max(); m <= lad.n_max(); ++m) c.emplace_back(lad.crossing_cost({0, y}, {0, y}, m), m);
    std::sort(c.begin(), c.end());
    if (cost) *cost = c[0].first;
    return {c[0].second, c[1].second};
}

inline LadderCertificate ladder_certificate(int n, double step = 0.25, int extra_rungs = 5) {
    if (n < 1) fail(ErrorKind::invalid_input, "ladder certificate needs n >= 1");
    LadderCertificate r;
    r.n = n;
    r.n_max = n + extra_rungs;
    r.y = ladder_height(n, step, 2.0);
    const LadderSpace L = make_warped_ladder(r.n_max, r.y, step);
    const WarpedLadder& lad = *L.ladder;
    const auto [a, b] = cheapest_rungs(lad, r.y, &r.min_cost);
    r.N = std::max(a, b);
    r.second = std::min(a, b);
    r.ladder_distance = L.space->distance(lad.plane_node(0, 0, r.y), lad.plane_node(1, 0, r.y));
    r.midpoint_separation = L.space->distance(lad.rung_midpoint(r.N), lad.rung_midpoint(-r.N));
    r.budget = L.space->budget();
    r.literal_y = ladder_height(n, step, 1.0);
    r.literal_N = std::abs(cheapest_rungs(lad, r.literal_y).first);
    return r;
}

// ---------------------------------------------------------------- detour apex example

struct DetourExample {
    double R = 0.0, h = 0.0, t = 0.0;
    double excess = 0.0;
    double target = 0.0;       // t - 1
    double relative_deviation = 0.0;
    double d_uv = 0.0, comparison_min = 0.0;
    double slack = 0.0;        // slack of the detour side
};

// Exact Euclidean sample: the segment [x,y], x = (-R,0), y = (R,0), and the
// two legs through the apex (0,t), each sampled every R/16. The triangle has
// z = y, side x->y straight and side x->z the detour.
inline DetourExample detour_example(double R, double h) {
    if (!(R > 0.0) || !(h > 0.0)) fail(ErrorKind::invalid_input, "detour example needs R > 0 and h > 0");
    DetourExample ex;
    ex.R = R;
    ex.h = h;
    ex.t = std::sqrt(h * R + h * h / 4.0);
    std::vector<Coord> pts{{-R, 0}, {R, 0}, {0, 0}, {0, ex.t}};
    const int k = 16;
    for (int i = 1; i < k; ++i) {
        if (2 * i == k) continue;
        const double f = static_cast<double>(i) / k;
        pts.push_back({-R + 2 * R * f, 0});
    }
    for (int i = 1; i < k; ++i) {
        const double f = static_cast<double>(i) / k;
        pts.push_back({-R * (1 - f), ex.t * f});
        pts.push_back({R * (1 - f), ex.t * f});
    }
    FiniteMetric fm;
    fm.n = pts.size();
    fm.d.assign(fm.n * fm.n, 0.0);
    for (std::size_t i = 0; i < fm.n; ++i)
        for (std::size_t j = 0; j < fm.n; ++j) fm.d[i * fm.n + j] = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
    const auto X = Space::from_finite(std::move(fm), "detour(R=" + fmt_num(R) + ",h=" + fmt_num(h) + ")");
    const ShortTriangle tri =
        triangle_from_sides(geodesic(*X, 0, 1), short_segment_via(*X, 0, 3, 1), geodesic(*X, 1, 1));
    ex.slack = tri.sides[1].slack;
    const ShortSegment& det = tri.sides[1];
    std::size_t ai = 0;
    while (det.nodes[ai] != 3) ++ai;
    const ShortSegment& base = tri.sides[0];
    std::size_t oi = 0;
    while (base.nodes[oi] != 2) ++oi;
    const RcatEval e = rcat_triangle_excess(*X, tri, 1, det.prefix[ai], 0, base.prefix[oi], Curvature::euclidean());
    ex.excess = e.excess;
    ex.d_uv = e.d_uv;
    ex.comparison_min = e.comparison_min;
    ex.target = ex.t - 1.0;
    ex.relative_deviation = std::abs(ex.excess - ex.target) / ex.target;
    return ex;
}

// ---------------------------------------------------------------- model-level suite

// Checks that need no space: planar interpolation, ellipse, zipper formula,
// zipper/perturbation and Alexandrov sweeps.
inline std::vector<BoundCheck> model_lemma_suite(std::size_t samples, std::uint64_t seed, double tol = 1e-6) {
    std::vector<BoundCheck> out;
    {
        Rng rng(sub_seed(seed, 1));
        double worst = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            const detail::V2 x{rng.uniform(-5, 5), rng.uniform(-5, 5)}, y{rng.uniform(-5, 5), rng.uniform(-5, 5)},
                z{rng.uniform(-5, 5), rng.uniform(-5, 5)};
            const double t = rng.uniform();
            const detail::V2 u{(1 - t) * y.x + t * z.x, (1 - t) * y.y + t * z.y};
            const double dxu = detail::dist(x, u);
            const double rhs = plane_interp_bound(detail::dist(x, y), detail::dist(x, z), detail::dist(y, z), t);
            worst = std::max(worst, std::abs(dxu * dxu - rhs) / std::max(1.0, rhs));
        }
        out.push_back(make_check("plane interpolation equality on straight lines (relative error)",
                                 {{"samples", double(samples)}}, worst, 0.0, tol));
    }
    for (auto [l, h] : std::vector<std::pair<double, double>>{{2, 1}, {1, 0}, {5, 0.5}, {10, 3}}) {
        const EllipseResult e = ellipse_bound(l, h);
        out.push_back(make_check("ellipse: brute-force max <= M", {{"l", l}, {"h", h}, {"M", e.M}}, e.brute, e.M, tol));
        out.push_back(make_check("ellipse: M <= brute-force max (attained)", {{"l", l}, {"h", h}}, e.M, e.brute, tol));
    }
    for (double l : {0.5, 1.0, 10.0, 100.0}) {
        const EllipseResult e = ellipse_bound(l, 1.0 / std::max(1.0, l));
        out.push_back(make_check("ellipse with h = 1/(1 v l): M <= sqrt3/2", {{"l", l}}, e.M, std::sqrt(3.0) / 2.0, tol));
    }
    out.push_back(make_check("zipper hyperbola identity (relative error)", {{"a", 1}, {"e", 2}},
                             zipper_identity_error(1.0, 2.0, 2001), 0.0, tol));
    for (double a : {1.0, 2.0})
        for (double e : {1.5, 3.0})
            for (auto br : {ZipperBranch::near, ZipperBranch::far})
                out.push_back(make_check(std::string("zipper r increasing in theta (") +
                                             (br == ZipperBranch::near ? "near" : "far") + ")",
                                         {{"a", a}, {"e", e}}, 0.0, zipper_min_derivative(a, e, br), tol));
    for (auto& c : zipper_pert_checks(samples, sub_seed(seed, 2), tol)) out.push_back(std::move(c));
    std::uint64_t k = 3;
    for (const Curvature& c : {Curvature::euclidean(), Curvature::hyperbolic(-1.0), Curvature::hyperbolic(-0.25)})
        out.push_back(alexandrov_sweep(c, samples, sub_seed(seed, k++), tol));
    return out;
}

}  // namespace roughcat
