#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "roughcat/model_plane.hpp"
#include "roughcat/rng.hpp"

using namespace roughcat;

namespace {

constexpr double kTol = 1e-9;

// Independent oracle: acosh of the Minkowski product, rescaled.
double hyperboloid_oracle(double kappa, const ModelPoint& p, const ModelPoint& q) {
    const double b = p.c[0] * q.c[0] - p.c[1] * q.c[1] - p.c[2] * q.c[2];
    return std::acosh(std::max(1.0, b)) / std::sqrt(-kappa);
}

ModelPoint random_point(const Curvature& k, Rng& rng) {
    if (k.kind == Curvature::Kind::tripod) return ModelPoint::tripod(static_cast<int>(rng.index(4)), rng.uniform(0, 5));
    return ModelPoint::polar(k, rng.uniform(0, 4), rng.uniform(0, 2 * std::numbers::pi));
}

const Curvature kAll[] = {Curvature::euclidean(), Curvature::hyperbolic(-1.0), Curvature::hyperbolic(-0.3),
                          Curvature::tripod()};

}  // namespace

TEST(Curvature, FromKappa) {
    EXPECT_EQ(Curvature::from_kappa(0).kind, Curvature::Kind::euclidean);
    EXPECT_EQ(Curvature::from_kappa(-kInf).kind, Curvature::Kind::tripod);
    EXPECT_EQ(Curvature::from_kappa(-2).kind, Curvature::Kind::hyperbolic);
    EXPECT_THROW(Curvature::from_kappa(1), Error);
    EXPECT_THROW(Curvature::hyperbolic(0), Error);
    for (const auto& k : kAll) EXPECT_TRUE(std::isinf(k.diameter()));
    EXPECT_EQ(Curvature::from_kappa(-0.25).str(), "-0.25");
}

TEST(ModelDistance, Examples) {
    EXPECT_DOUBLE_EQ(model_distance(Curvature::euclidean(), ModelPoint::plane(0, 0), ModelPoint::plane(3, 4)), 5.0);
    EXPECT_DOUBLE_EQ(model_distance(Curvature::tripod(), ModelPoint::tripod(0, 2), ModelPoint::tripod(1, 3)), 5.0);
    EXPECT_DOUBLE_EQ(model_distance(Curvature::tripod(), ModelPoint::tripod(2, 2), ModelPoint::tripod(2, 3.5)), 1.5);
    // radius 0 identifies all rays
    EXPECT_EQ(ModelPoint::tripod(0, 0), ModelPoint::tripod(3, 0));
    for (double kappa : {-1.0, -4.0}) {
        const Curvature k = Curvature::hyperbolic(kappa);
        const ModelPoint base = ModelPoint::polar(k, 0, 0);
        for (double r : {0.1, 1.0, 2.5, 7.0}) {
            EXPECT_NEAR(model_distance(k, base, ModelPoint::polar(k, r, 0.7)), r, kTol);
            EXPECT_NEAR(hyperboloid_oracle(kappa, base, ModelPoint::polar(k, r, 0.7)), r, 1e-7);
        }
    }
}

TEST(ModelDistance, KindMismatchRejected) {
    try {
        model_distance(Curvature::euclidean(), ModelPoint::plane(0, 0), ModelPoint::tripod(0, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
    }
}

TEST(ModelDistance, HyperbolicMatchesMinkowskiOracle) {
    Rng rng(11);
    for (double kappa : {-1.0, -0.3, -5.0}) {
        const Curvature k = Curvature::hyperbolic(kappa);
        for (int i = 0; i < 2000; ++i) {
            const ModelPoint p = random_point(k, rng), q = random_point(k, rng);
            const double x = p.c[0] * p.c[0] - p.c[1] * p.c[1] - p.c[2] * p.c[2];
            ASSERT_NEAR(x, 1.0, 1e-9 * std::max(1.0, p.c[0] * p.c[0]));
            const double d = model_distance(k, p, q), o = hyperboloid_oracle(kappa, p, q);
            // acosh loses digits for close points; compare at 1e-6 absolute
            ASSERT_NEAR(d, o, 1e-6 * std::max(1.0, o));
        }
    }
}

TEST(ModelDistance, MetricAxiomsAllCurvatures) {
    Rng rng(3);
    for (const auto& k : kAll) {
        for (int i = 0; i < 10000; ++i) {
            const ModelPoint p = random_point(k, rng), q = random_point(k, rng), r = random_point(k, rng);
            const double pq = model_distance(k, p, q), qr = model_distance(k, q, r), pr = model_distance(k, p, r);
            ASSERT_GE(pq, 0.0);
            ASSERT_DOUBLE_EQ(pq, model_distance(k, q, p));
            ASSERT_LE(pr, pq + qr + kTol) << k.str();
        }
        const ModelPoint p = random_point(k, rng);
        EXPECT_EQ(model_distance(k, p, p), 0.0);
    }
}

TEST(ComparisonTriangle, Examples) {
    const auto t = build_comparison_triangle(Curvature::euclidean(), 3, 4, 5);
    EXPECT_NEAR(t.vertices[0].c[0], 0, kTol);
    EXPECT_NEAR(t.vertices[0].c[1], 0, kTol);
    EXPECT_NEAR(t.vertices[1].c[0], 3, kTol);
    EXPECT_NEAR(t.vertices[1].c[1], 0, kTol);
    EXPECT_NEAR(t.vertices[2].c[0], 0, kTol);
    EXPECT_NEAR(t.vertices[2].c[1], 4, kTol);
    EXPECT_NEAR(model_angle(Curvature::euclidean(), 3, 4, 5), std::numbers::pi / 2, kTol);

    const auto d = build_comparison_triangle(Curvature::euclidean(), 2, 2, 4);
    const auto& v = d.vertices;
    const double area = (v[1].c[0] - v[0].c[0]) * (v[2].c[1] - v[0].c[1]) - (v[1].c[1] - v[0].c[1]) * (v[2].c[0] - v[0].c[0]);
    EXPECT_NEAR(area, 0.0, kTol);

    const auto tr = build_comparison_triangle(Curvature::tripod(), 3, 4, 5);
    EXPECT_NEAR(tr.legs[0], 1, kTol);
    EXPECT_NEAR(tr.legs[1], 2, kTol);
    EXPECT_NEAR(tr.legs[2], 3, kTol);
    EXPECT_NE(tr.vertices[0].ray, tr.vertices[1].ray);
    EXPECT_NE(tr.vertices[1].ray, tr.vertices[2].ray);
    EXPECT_NE(tr.vertices[0].ray, tr.vertices[2].ray);
}

TEST(ComparisonTriangle, ViolationRejected) {
    try {
        build_comparison_triangle(Curvature::euclidean(), 1, 1, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::infeasible);
    }
    // within tolerance is accepted as degenerate
    EXPECT_NO_THROW(build_comparison_triangle(Curvature::euclidean(), 1, 1, 2 + 5e-10));
}

TEST(ComparisonTriangle, ReproducesSides) {
    Rng rng(5);
    for (const auto& k : kAll) {
        for (int i = 0; i < 10000; ++i) {
            // sides from a random planar triple are admissible for every kappa
            const double ax = rng.uniform(-3, 3), ay = rng.uniform(-3, 3), bx = rng.uniform(-3, 3), by = rng.uniform(-3, 3);
            const double a = std::hypot(ax, ay), b = std::hypot(bx, by), c = std::hypot(ax - bx, ay - by);
            const auto t = build_comparison_triangle(k, a, b, c);
            ASSERT_NEAR(model_distance(k, t.vertices[0], t.vertices[1]), a, kTol * std::max(1.0, a)) << k.str();
            ASSERT_NEAR(model_distance(k, t.vertices[0], t.vertices[2]), b, kTol * std::max(1.0, b)) << k.str();
            ASSERT_NEAR(model_distance(k, t.vertices[1], t.vertices[2]), c, kTol * std::max(1.0, c)) << k.str();
            for (int s = 0; s < 3; ++s) ASSERT_NEAR(t.realized_sides[s], t.requested_sides[s], kTol);
            if (k.kind == Curvature::Kind::tripod) {
                ASSERT_DOUBLE_EQ(t.legs[0] + t.legs[1], t.realized_sides[0]);
            }
        }
    }
}

TEST(PointOnSide, Examples) {
    const auto t = build_comparison_triangle(Curvature::euclidean(), 3, 4, 5);
    const ModelPoint m = point_on_side(t, 2, 2.5);
    EXPECT_NEAR(m.c[0], 1.5, kTol);
    EXPECT_NEAR(m.c[1], 2.0, kTol);
    EXPECT_EQ(point_on_side(t, 2, 0.0), t.vertices[1]);
    EXPECT_EQ(point_on_side(t, 2, 5.0), t.vertices[2]);
    EXPECT_THROW(point_on_side(t, 2, 5.1), Error);

    const auto tr = build_comparison_triangle(Curvature::tripod(), 3, 4, 5);
    EXPECT_EQ(point_on_side(tr, 0, 1.0).radius, 0.0);
}

TEST(PointOnSide, GeodesicParametrization) {
    Rng rng(9);
    for (const auto& k : kAll) {
        for (int i = 0; i < 3000; ++i) {
            const double a = rng.uniform(0.5, 4), b = rng.uniform(0.5, 4);
            const double c = rng.uniform(std::abs(a - b), a + b);
            const auto t = build_comparison_triangle(k, a, b, c);
            const int side = static_cast<int>(rng.index(3));
            const auto [i0, i1] = side_endpoints(side);
            const double L = t.realized_sides[side], s = rng.uniform(0, L);
            const ModelPoint p = point_on_side(t, side, s);
            ASSERT_NEAR(model_distance(k, t.vertices[i0], p), s, 1e-9 * std::max(1.0, L)) << k.str();
            ASSERT_NEAR(model_distance(k, p, t.vertices[i1]), L - s, 1e-9 * std::max(1.0, L)) << k.str();
        }
    }
}

TEST(ComparisonInterval, Examples) {
    const auto t = build_comparison_triangle(Curvature::euclidean(), 10, 10, 10);
    auto iv = comparison_point_interval(t, 0, 6, 5);
    EXPECT_DOUBLE_EQ(iv.lo, 5);
    EXPECT_DOUBLE_EQ(iv.hi, 6);
    iv = comparison_point_interval(t, 0, 4, 6);
    EXPECT_DOUBLE_EQ(iv.lo, 4);
    EXPECT_DOUBLE_EQ(iv.hi, 4);
    iv = comparison_point_interval(t, 0, 11, 11);
    EXPECT_DOUBLE_EQ(iv.lo, 0);
    EXPECT_DOUBLE_EQ(iv.hi, 10);
    try {
        comparison_point_interval(t, 0, 3, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::inconsistency);
    }
}

TEST(Alexandrov, EqualityCase) {
    const Curvature k = Curvature::euclidean();
    const auto r = alexandrov_check(k, ModelPoint::plane(0, 1), ModelPoint::plane(-1, 0), ModelPoint::plane(1, 0),
                                    ModelPoint::plane(0, 0));
    EXPECT_TRUE(r.hypothesis);
    EXPECT_TRUE(r.equality);
    // B, C, B' collinear: the comparison conclusions are equalities, the
    // perimeter inequality (triangle inequality via A) stays strict
    EXPECT_NEAR(r.alpha_slack, 0.0, kTol);
    EXPECT_NEAR(r.beta_slack, 0.0, kTol);
    EXPECT_NEAR(r.beta_prime_slack, 0.0, kTol);
    EXPECT_NEAR(r.ac_slack, 0.0, kTol);
    EXPECT_NEAR(r.perimeter_slack, 2 * std::sqrt(2.0) - 2, kTol);
}

TEST(Alexandrov, StrictCase) {
    const Curvature k = Curvature::euclidean();
    const auto r = alexandrov_check(k, ModelPoint::plane(0, 1), ModelPoint::plane(-1, -0.5), ModelPoint::plane(1, -0.5),
                                    ModelPoint::plane(0, 0));
    EXPECT_TRUE(r.hypothesis);
    EXPECT_FALSE(r.equality);
    EXPECT_GT(r.perimeter_slack, 0.0);
    EXPECT_GT(r.ac_slack, 0.0);
    EXPECT_GE(r.min_slack(), -kTol);
}

TEST(Alexandrov, SameSideIsNotAnError) {
    const Curvature k = Curvature::euclidean();
    const auto r = alexandrov_check(k, ModelPoint::plane(0, 1), ModelPoint::plane(-1, 0.2), ModelPoint::plane(-2, 0.5),
                                    ModelPoint::plane(0, 0));
    EXPECT_FALSE(r.opposite_sides);
    EXPECT_FALSE(r.hypothesis);
}

TEST(Alexandrov, RandomSweepHyperbolic) {
    const Curvature k = Curvature::hyperbolic(-1.0);
    Rng rng(21);
    int used = 0;
    for (int i = 0; i < 10000; ++i) {
        const double phi = rng.uniform(1e-3, std::numbers::pi - 1e-3);
        const ModelPoint C = ModelPoint::polar(k, 0, 0), A = ModelPoint::polar(k, rng.uniform(0.1, 4), 0);
        const ModelPoint B = ModelPoint::polar(k, rng.uniform(0.1, 4), phi);
        const ModelPoint Bp = ModelPoint::polar(k, rng.uniform(0.1, 4), -rng.uniform(1e-3, std::numbers::pi - 1e-3));
        const auto r = alexandrov_check(k, A, B, Bp, C);
        if (!r.hypothesis) continue;
        ++used;
        ASSERT_GE(r.min_slack(), -1e-9);
    }
    EXPECT_GT(used, 1000);
}
