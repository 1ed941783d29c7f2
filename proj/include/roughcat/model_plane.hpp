#pragma once

// Comparison spaces M^2_kappa for -inf <= kappa <= 0: the Euclidean plane,
// the rescaled hyperbolic plane (hyperboloid model) and the four-ray tripod.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include "errors.hpp"

namespace roughcat {

inline constexpr double kGeomTol = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Curvature {
    enum class Kind { euclidean, hyperbolic, tripod };

    Kind kind = Kind::euclidean;
    double kappa = 0.0;

    static Curvature euclidean() { return {Kind::euclidean, 0.0}; }
    static Curvature tripod() { return {Kind::tripod, -kInf}; }
    static Curvature hyperbolic(double k) {
        if (!(k < 0.0) || !std::isfinite(k))
            fail(ErrorKind::invalid_input, "hyperbolic curvature needs finite kappa < 0");
        return {Kind::hyperbolic, k};
    }
    static Curvature from_kappa(double k) {
        if (k == 0.0) return euclidean();
        if (k == -kInf) return tripod();
        if (k > 0.0 || std::isnan(k)) fail(ErrorKind::invalid_input, "kappa must be <= 0");
        return hyperbolic(k);
    }

    // D_kappa; infinite for every admitted kappa.
    double diameter() const { return kInf; }
    double scale() const { return kind == Kind::hyperbolic ? std::sqrt(-kappa) : 1.0; }

    std::string str() const {
        if (kind == Kind::euclidean) return "0";
        if (kind == Kind::tripod) return "-inf";
        std::ostringstream os;
        os.precision(12);
        os << kappa;
        return os.str();
    }
};

struct ModelPoint {
    Curvature::Kind kind = Curvature::Kind::euclidean;
    // euclidean: (x, y) in c[0], c[1]; hyperbolic: (x0, x1, x2) on the unit hyperboloid
    std::array<double, 3> c{0.0, 0.0, 0.0};
    int ray = 0;         // tripod only, 0..3
    double radius = 0.0; // tripod only

    static ModelPoint plane(double x, double y) {
        ModelPoint p;
        p.kind = Curvature::Kind::euclidean;
        p.c = {x, y, 0.0};
        return p;
    }
    static ModelPoint hyperboloid(double x0, double x1, double x2) {
        ModelPoint p;
        p.kind = Curvature::Kind::hyperbolic;
        p.c = {x0, x1, x2};
        return p;
    }
    static ModelPoint tripod(int ray, double r) {
        ModelPoint p;
        p.kind = Curvature::Kind::tripod;
        p.ray = r == 0.0 ? 0 : ray;
        p.radius = r;
        return p;
    }
    // Point at model distance r from the base point in direction theta.
    static ModelPoint polar(const Curvature& k, double r, double theta) {
        switch (k.kind) {
        case Curvature::Kind::euclidean: return plane(r * std::cos(theta), r * std::sin(theta));
        case Curvature::Kind::hyperbolic: {
            const double rho = r * k.scale();
            const double sh = std::sinh(rho);
            return hyperboloid(std::cosh(rho), sh * std::cos(theta), sh * std::sin(theta));
        }
        case Curvature::Kind::tripod: break;
        }
        fail(ErrorKind::invalid_input, "polar placement is not defined on the tripod");
    }

    bool operator==(const ModelPoint& o) const {
        if (kind != o.kind) return false;
        if (kind == Curvature::Kind::tripod)
            return radius == o.radius && (radius == 0.0 || ray == o.ray);
        return c == o.c;
    }
};

inline void check_point(const Curvature& k, const ModelPoint& p) {
    if (p.kind != k.kind) fail(ErrorKind::invalid_input, "point kind does not match curvature");
    switch (p.kind) {
    case Curvature::Kind::euclidean:
        if (!std::isfinite(p.c[0]) || !std::isfinite(p.c[1]))
            fail(ErrorKind::invalid_input, "non-finite plane point");
        break;
    case Curvature::Kind::hyperbolic: {
        const double q = p.c[0] * p.c[0] - p.c[1] * p.c[1] - p.c[2] * p.c[2];
        if (!(p.c[0] > 0.0) || std::abs(q - 1.0) > kGeomTol * std::max(1.0, p.c[0] * p.c[0]))
            fail(ErrorKind::invalid_input, "point is not on the upper hyperboloid sheet");
        break;
    }
    case Curvature::Kind::tripod:
        if (p.ray < 0 || p.ray > 3 || !(p.radius >= 0.0) || !std::isfinite(p.radius))
            fail(ErrorKind::invalid_input, "tripod point needs ray in 0..3 and radius >= 0");
        break;
    }
}

namespace detail {

// Distance on the unit hyperboloid via polar coordinates about the base
// point; avoids the cancellation in acosh(<p,q>) for nearby points.
inline double unit_hyperbolic_distance(const std::array<double, 3>& p, const std::array<double, 3>& q) {
    const double rp = std::asinh(std::hypot(p[1], p[2]));
    const double rq = std::asinh(std::hypot(q[1], q[2]));
    const double dtheta = std::atan2(q[2], q[1]) - std::atan2(p[2], p[1]);
    const double s1 = std::sinh(0.5 * (rp - rq));
    const double s2 = std::sin(0.5 * dtheta);
    const double v = s1 * s1 + std::sinh(rp) * std::sinh(rq) * s2 * s2;
    return 2.0 * std::asinh(std::sqrt(std::max(0.0, v)));
}

}  // namespace detail

inline double model_distance(const Curvature& k, const ModelPoint& p, const ModelPoint& q) {
    if (p.kind != k.kind || q.kind != k.kind)
        fail(ErrorKind::invalid_input, "point kind does not match curvature");
    switch (k.kind) {
    case Curvature::Kind::euclidean: return std::hypot(p.c[0] - q.c[0], p.c[1] - q.c[1]);
    case Curvature::Kind::hyperbolic: return detail::unit_hyperbolic_distance(p.c, q.c) / k.scale();
    case Curvature::Kind::tripod:
        if (p.radius == 0.0 || q.radius == 0.0 || p.ray != q.ray) return p.radius + q.radius;
        return std::abs(p.radius - q.radius);
    }
    return 0.0;
}

// Angle between the sides of lengths p and q, opposite the side of length r.
// Half-angle forms keep thin triangles accurate. Returns 0 when p or q is 0.
inline double model_angle(const Curvature& k, double p, double q, double r) {
    if (p <= 0.0 || q <= 0.0) return 0.0;
    double s2 = 0.0;
    if (k.kind == Curvature::Kind::euclidean) {
        s2 = (r - p + q) * (r + p - q) / (4.0 * p * q);
    } else if (k.kind == Curvature::Kind::hyperbolic) {
        const double a = k.scale();
        s2 = std::sinh(0.5 * a * (r - p + q)) * std::sinh(0.5 * a * (r + p - q)) /
             (std::sinh(a * p) * std::sinh(a * q));
    } else {
        fail(ErrorKind::invalid_input, "angles are not defined on the tripod");
    }
    s2 = std::clamp(s2, 0.0, 1.0);
    return 2.0 * std::asin(std::sqrt(s2));
}

// Vertex pairs of the three sides: side 0 = (0,1), side 1 = (0,2), side 2 = (1,2).
inline std::pair<int, int> side_endpoints(int side) {
    switch (side) {
    case 0: return {0, 1};
    case 1: return {0, 2};
    case 2: return {1, 2};
    default: fail(ErrorKind::invalid_input, "side index must be 0, 1 or 2");
    }
}

inline int side_between(int i, int j) {
    if (i > j) std::swap(i, j);
    if (i == 0 && j == 1) return 0;
    if (i == 0 && j == 2) return 1;
    if (i == 1 && j == 2) return 2;
    fail(ErrorKind::invalid_input, "no side joins these vertices");
}

struct ComparisonTriangle {
    Curvature curvature;
    std::array<ModelPoint, 3> vertices;
    std::array<double, 3> requested_sides{}; // d01, d02, d12
    std::array<double, 3> realized_sides{};
    std::array<double, 3> legs{};            // tripod leg lengths (Gromov products)
};

inline void check_triangle_sides(double a, double b, double c) {
    for (double s : {a, b, c})
        if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorKind::invalid_input, "side lengths must be finite and >= 0");
    const double worst = std::max({a - b - c, b - a - c, c - a - b});
    if (worst > kGeomTol) {
        std::ostringstream os;
        os.precision(12);
        os << "sides (" << a << ", " << b << ", " << c << ") violate the triangle inequality by " << worst;
        fail(ErrorKind::infeasible, os.str());
    }
}

// Sides are a = |v0 v1|, b = |v0 v2|, c = |v1 v2|. Placement: v0 at the
// origin / base point, v1 on the positive first axis, v2 in the upper half.
// The tripod puts vertex i on ray i at radius equal to its leg length.
inline ComparisonTriangle build_comparison_triangle(const Curvature& k, double a, double b, double c) {
    check_triangle_sides(a, b, c);
    ComparisonTriangle t;
    t.curvature = k;
    t.requested_sides = {a, b, c};
    switch (k.kind) {
    case Curvature::Kind::euclidean: {
        t.vertices[0] = ModelPoint::plane(0.0, 0.0);
        t.vertices[1] = ModelPoint::plane(a, 0.0);
        if (a == 0.0) {
            t.vertices[2] = ModelPoint::plane(0.0, b);
        } else {
            // Kahan's area formula on sorted sides
            std::array<double, 3> s{a, b, c};
            std::sort(s.begin(), s.end(), std::greater<>());
            const double x = s[0], y = s[1], z = s[2];
            const double prod = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
            const double area4 = std::sqrt(std::max(0.0, prod));
            const double px = (a * a + b * b - c * c) / (2.0 * a);
            const double py = area4 / (2.0 * a);
            t.vertices[2] = ModelPoint::plane(px, py);
        }
        break;
    }
    case Curvature::Kind::hyperbolic: {
        t.vertices[0] = ModelPoint::hyperboloid(1.0, 0.0, 0.0);
        t.vertices[1] = ModelPoint::polar(k, a, 0.0);
        const double alpha = a == 0.0 ? std::numbers::pi / 2 : model_angle(k, a, b, c);
        t.vertices[2] = ModelPoint::polar(k, b, alpha);
        break;
    }
    case Curvature::Kind::tripod: {
        const double l0 = std::max(0.0, 0.5 * (a + b - c));
        const double l1 = std::max(0.0, 0.5 * (a + c - b));
        const double l2 = std::max(0.0, 0.5 * (b + c - a));
        t.legs = {l0, l1, l2};
        for (int i = 0; i < 3; ++i) t.vertices[i] = ModelPoint::tripod(i, t.legs[i]);
        break;
    }
    }
    for (int s = 0; s < 3; ++s) {
        auto [i, j] = side_endpoints(s);
        t.realized_sides[s] = model_distance(k, t.vertices[i], t.vertices[j]);
    }
    return t;
}

// Point at arclength s from the first endpoint of the given side.
inline ModelPoint point_on_side(const ComparisonTriangle& t, int side, double s) {
    auto [i, j] = side_endpoints(side);
    const double len = t.realized_sides[side];
    if (!(s >= -kGeomTol) || !(s <= len + kGeomTol)) {
        std::ostringstream os;
        os << "arclength " << s << " outside [0, " << len << "]";
        fail(ErrorKind::invalid_input, os.str());
    }
    const ModelPoint& p = t.vertices[i];
    const ModelPoint& q = t.vertices[j];
    if (s <= 0.0) return p;
    if (s >= len) return q;
    switch (t.curvature.kind) {
    case Curvature::Kind::euclidean: {
        const double f = s / len;
        return ModelPoint::plane(p.c[0] + f * (q.c[0] - p.c[0]), p.c[1] + f * (q.c[1] - p.c[1]));
    }
    case Curvature::Kind::hyperbolic: {
        const double a = t.curvature.scale();
        const double w = std::sinh(a * len);
        const double fp = std::sinh(a * (len - s)) / w;
        const double fq = std::sinh(a * s) / w;
        return ModelPoint::hyperboloid(fp * p.c[0] + fq * q.c[0], fp * p.c[1] + fq * q.c[1],
                                       fp * p.c[2] + fq * q.c[2]);
    }
    case Curvature::Kind::tripod: {
        const double li = t.legs[i];
        const double lj = t.legs[j];
        if (s <= li) return ModelPoint::tripod(p.ray, li - s);
        return ModelPoint::tripod(q.ray, std::min(lj, s - li));
    }
    }
    return p;
}

struct ArcInterval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

// Admissible arclengths for a comparison point on `side`, given the lengths
// of the two subpaths of the short side on either side of the point.
inline ArcInterval comparison_point_interval(const ComparisonTriangle& t, int side, double len_prefix,
                                             double len_suffix) {
    side_endpoints(side);
    const double len = t.realized_sides[side];
    ArcInterval iv{std::max(0.0, len - len_suffix), std::min(len, len_prefix)};
    if (iv.lo > iv.hi) {
        if (iv.lo - iv.hi > kGeomTol) {
            std::ostringstream os;
            os.precision(12);
            os << "empty comparison interval: side length " << len << ", prefix " << len_prefix << ", suffix "
               << len_suffix;
            fail(ErrorKind::inconsistency, os.str());
        }
        const double mid = 0.5 * (iv.lo + iv.hi);
        iv = {mid, mid};
    }
    return iv;
}

struct AlexandrovReport {
    bool opposite_sides = false;
    bool hypothesis = false; // gamma + gamma' >= pi
    bool equality = false;   // gamma + gamma' == pi within tolerance
    double gamma_sum = 0.0;
    // conclusion value minus bound; NaN when the hypothesis is not met
    double perimeter_slack = std::numeric_limits<double>::quiet_NaN();
    double alpha_slack = std::numeric_limits<double>::quiet_NaN();
    double beta_slack = std::numeric_limits<double>::quiet_NaN();
    double beta_prime_slack = std::numeric_limits<double>::quiet_NaN();
    double ac_slack = std::numeric_limits<double>::quiet_NaN();

    double min_slack() const {
        return std::min({perimeter_slack, alpha_slack, beta_slack, beta_prime_slack, ac_slack});
    }
    bool holds(double tol = kGeomTol) const { return hypothesis && min_slack() >= -tol; }
};

namespace detail {

inline double side_of_line(const Curvature& k, const ModelPoint& a, const ModelPoint& c, const ModelPoint& p) {
    if (k.kind == Curvature::Kind::euclidean)
        return (c.c[0] - a.c[0]) * (p.c[1] - a.c[1]) - (c.c[1] - a.c[1]) * (p.c[0] - a.c[0]);
    // the geodesic through a and c is the hyperboloid's intersection with span(a, c)
    const auto& u = a.c;
    const auto& v = c.c;
    const auto& w = p.c;
    return u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
           u[2] * (v[0] * w[1] - v[1] * w[0]);
}

}  // namespace detail

inline AlexandrovReport alexandrov_check(const Curvature& k, const ModelPoint& A, const ModelPoint& B,
                                         const ModelPoint& Bp, const ModelPoint& C) {
    if (k.kind == Curvature::Kind::tripod)
        fail(ErrorKind::invalid_input, "Alexandrov check needs euclidean or hyperbolic curvature");
    for (const auto* p : {&A, &B, &Bp, &C}) check_point(k, *p);

    AlexandrovReport r;
    const double sb = detail::side_of_line(k, A, C, B);
    const double sbp = detail::side_of_line(k, A, C, Bp);
    r.opposite_sides = (sb > 0.0 && sbp < 0.0) || (sb < 0.0 && sbp > 0.0);
    if (!r.opposite_sides) return r;

    const double ab = model_distance(k, A, B), abp = model_distance(k, A, Bp);
    const double bc = model_distance(k, B, C), bpc = model_distance(k, Bp, C);
    const double ac = model_distance(k, A, C);
    if (ab == 0 || abp == 0 || bc == 0 || bpc == 0 || ac == 0)
        fail(ErrorKind::invalid_input, "Alexandrov check needs distinct points");

    const double alpha = model_angle(k, ab, ac, bc);
    const double alpha_p = model_angle(k, abp, ac, bpc);
    const double beta = model_angle(k, ab, bc, ac);
    const double beta_p = model_angle(k, abp, bpc, ac);
    const double gamma = model_angle(k, bc, ac, ab);
    const double gamma_p = model_angle(k, bpc, ac, abp);
    r.gamma_sum = gamma + gamma_p;
    r.hypothesis = r.gamma_sum >= std::numbers::pi - 1e-12;
    r.equality = std::abs(r.gamma_sum - std::numbers::pi) <= kGeomTol;
    if (!r.hypothesis) return r;

    const double bb = bc + bpc;
    r.perimeter_slack = (ab + abp) - bb;
    // Triangle (A-bar, B-bar, B'-bar) with C-bar on [B-bar, B'-bar].
    const double worst = bb - ab - abp;
    const auto tri = build_comparison_triangle(k, ab, abp, worst > 0 ? ab + abp : bb);
    const ModelPoint cbar = point_on_side(tri, 2, std::min(bc, tri.realized_sides[2]));
    r.alpha_slack = model_angle(k, ab, abp, bb) - (alpha + alpha_p);
    r.beta_slack = model_angle(k, ab, bb, abp) - beta;
    r.beta_prime_slack = model_angle(k, abp, bb, ab) - beta_p;
    r.ac_slack = model_distance(k, tri.vertices[0], cbar) - ac;
    return r;
}

}  // namespace roughcat
