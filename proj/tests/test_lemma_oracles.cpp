#include <cmath>

#include <gtest/gtest.h>

#include "roughcat/lemma_oracles.hpp"

using namespace roughcat;

namespace {

const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0);

double value_of(const std::vector<Conversion>& cs, const std::string& target) {
    for (const auto& c : cs)
        if (c.target == target) return c.value;
    ADD_FAILURE() << "no target " << target;
    return std::nan("");
}

}  // namespace

TEST(BoundCheck, SlackAndTolerance) {
    const auto ok = make_check("s", {}, 1.0, 2.0, 0.0);
    EXPECT_TRUE(ok.pass);
    EXPECT_EQ(ok.slack, 1.0);
    EXPECT_TRUE(make_check("s", {}, 2.0 + 1e-10, 2.0, 1e-9).pass);
    EXPECT_FALSE(make_check("s", {}, 2.1, 2.0, 1e-9).pass);
}

TEST(PlaneInterpolation, EqualityInThePlane) {
    Rng rng(4);
    for (int t = 0; t < 10000; ++t) {
        const double xx = rng.uniform(-3, 3), xy = rng.uniform(-3, 3), yx = rng.uniform(-3, 3), yy = rng.uniform(-3, 3),
                     zx = rng.uniform(-3, 3), zy = rng.uniform(-3, 3), s = rng.uniform();
        const double px = yx + s * (zx - yx), py = yy + s * (zy - yy);
        const double lhs = std::pow(std::hypot(xx - px, xy - py), 2);
        const double rhs = plane_interp_bound(std::hypot(xx - yx, xy - yy), std::hypot(xx - zx, xy - zy),
                                              std::hypot(yx - zx, yy - zy), s);
        ASSERT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, lhs));
    }
    EXPECT_THROW(plane_interp_bound(1, 1, 1, 1.5), Error);
    EXPECT_THROW(plane_interp_bound(1, 1, 3, 0.5), Error);
}

TEST(Ellipse, Examples) {
    EXPECT_DOUBLE_EQ(ellipse_bound(2, 1).M, 0.5 * std::sqrt(5.0));
    EXPECT_DOUBLE_EQ(ellipse_bound(1, 0).M, 0.0);
    EXPECT_THROW(ellipse_bound(0, 1), Error);
    EXPECT_THROW(ellipse_bound(1, -1), Error);
}

TEST(Ellipse, ClosedFormMatchesBruteForce) {
    Rng rng(8);
    for (int i = 0; i < 20; ++i) {
        const double l = rng.uniform(0.1, 50), h = rng.uniform(0, 5);
        const auto r = ellipse_bound(l, h);
        ASSERT_NEAR(r.M, r.brute, 1e-6 * std::max(1.0, r.M)) << "l=" << l << " h=" << h;
        ASSERT_LE(r.brute, r.M + 1e-12);
    }
    // the standard short h keeps the bound under sqrt3/2
    for (double l : {0.5, 1.0, 10.0, 100.0, 1e4}) EXPECT_LE(ellipse_bound(l, 1.0 / std::max(1.0, l)).M, r3 / 2);
}

TEST(Zipper, Examples) {
    EXPECT_DOUBLE_EQ(zipper_r(1, 2, 0, ZipperBranch::near), 1.0);
    EXPECT_DOUBLE_EQ(zipper_r(1, 2, 0, ZipperBranch::far), 3.0);
    EXPECT_NEAR(zipper_r(1, 2, std::numbers::pi / 2, ZipperBranch::near), 3.0, 1e-12);
    try {
        zipper_r(1, 1, 0, ZipperBranch::near);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
    EXPECT_THROW(zipper_r(1, 2, std::numbers::pi, ZipperBranch::far), Error);
    EXPECT_THROW(zipper_r(0, 2, 0, ZipperBranch::near), Error);
}

TEST(Zipper, IdentityAndMonotonicity) {
    for (double a : {0.5, 1.0, 2.0})
        for (double e : {1.1, 2.0, 5.0}) {
            EXPECT_LE(zipper_identity_error(a, e, 2000), 1e-9);
            EXPECT_GT(zipper_min_derivative(a, e, ZipperBranch::near), 0.0);
            EXPECT_GT(zipper_min_derivative(a, e, ZipperBranch::far), 0.0);
        }
}

TEST(Conversions, ExactValues) {
    EXPECT_DOUBLE_EQ(constant_conversions("cat0")[0].value, 2 + r3);
    EXPECT_DOUBLE_EQ(constant_conversions("hrcat0", 1)[0].value, 5 + r3);
    EXPECT_DOUBLE_EQ(constant_conversions("weak-hrcat0", 2)[0].value, 5 + r3 / 2);
    EXPECT_DOUBLE_EQ(constant_conversions("very-weak-hrcat0", 0)[0].value, 1 + r3 / 2);
    EXPECT_DOUBLE_EQ(constant_conversions("very-weak-rcat0", 3)[0].value, 1.5);
    EXPECT_DOUBLE_EQ(constant_conversions("bolic", 1)[0].value, 4 + r2);
    EXPECT_DOUBLE_EQ(constant_conversions("weak-rcat", 1.5)[0].value, 3.0);
    EXPECT_DOUBLE_EQ(constant_conversions("hyperbolic", 0.25)[0].value, 3.0);
    const auto p = constant_conversions("product-hrcat0", 1);
    EXPECT_DOUBLE_EQ(value_of(p, "product hrCAT(0)"), r2);
    EXPECT_DOUBLE_EQ(value_of(p, "product rCAT(0)"), 3 * r2 + 2 + r3);

    const auto f0 = constant_conversions("four-point", 1, 0);
    EXPECT_EQ(f0.size(), 1u);
    EXPECT_DOUBLE_EQ(f0[0].value, 2 + r3 / 2);
    const auto f1 = constant_conversions("four-point", 0, -4);
    EXPECT_DOUBLE_EQ(value_of(f1, "hyperbolic delta"), std::log(3.0) / 2);
    EXPECT_DOUBLE_EQ(value_of(f1, "rCAT(kappa)"), 2 + 2 * std::log(3.0));
    const auto ft = constant_conversions("four-point", 1, -kInf);
    EXPECT_DOUBLE_EQ(value_of(ft, "hyperbolic delta"), 1.0);
    EXPECT_DOUBLE_EQ(value_of(ft, "rCAT(kappa)"), 6.0);
}

TEST(Conversions, Errors) {
    try {
        constant_conversions("nope");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unknown_name);
        EXPECT_NE(std::string(e.what()).find("cat0"), std::string::npos);
    }
    EXPECT_THROW(constant_conversions("cat0", -1), Error);
    EXPECT_THROW(constant_conversions("four-point", 1, 1), Error);
    for (const auto& n : conversion_names()) EXPECT_FALSE(constant_conversions(n, 1, -1).empty()) << n;
}

TEST(L1Witness, ClosedForms) {
    // x=(-n,-n), y=(n,-n), z=(-n,n), m=(0,0): a=b=2n, c=4n, d(x,m)=2n, planar median 0
    for (int n : {1, 2, 4, 8}) {
        const auto w = l1_witness(n);
        EXPECT_DOUBLE_EQ(w.very_weak_C, 2.0 * n);
        EXPECT_DOUBLE_EQ(w.bolic_delta, 1.0 * n);
        EXPECT_DOUBLE_EQ(w.weak_C, 2.0 * n);
        EXPECT_DOUBLE_EQ(w.cn_deficit, 8.0 * n * n);
        EXPECT_DOUBLE_EQ(w.midpoint_separation, 4.0 * n);
    }
    EXPECT_THROW(l1_witness(0), Error);
}

TEST(Ladder, HeightIsSmallestOnGrid) {
    for (int n : {1, 3, 5}) {
        for (double factor : {1.0, 2.0}) {
            const double step = 0.25, y = ladder_height(n, step, factor);
            const double D = std::exp(-n) * (std::numbers::e - 1.0) / factor;
            EXPECT_LT(std::sqrt(y * y + n * n) - y, D);
            if (y - step >= step) {
                EXPECT_GE(std::sqrt((y - step) * (y - step) + n * n) - (y - step), D);
            }
        }
    }
}

TEST(Ladder, CertificatePicksOuterRung) {
    const auto c = ladder_certificate(3);
    EXPECT_EQ(c.N, 3);
    EXPECT_EQ(c.second, -3);
    EXPECT_GE(c.midpoint_separation, 6.0);
    EXPECT_NEAR(c.ladder_distance, c.min_cost, 1e-9);
    EXPECT_LE(c.literal_y, c.y);
}

TEST(Detour, ExcessMatchesApexHeight) {
    // with z = y the comparison interval reaches 0, so the excess equals t
    for (double R : {25.0, 100.0, 400.0}) {
        const auto ex = detour_example(R, 1.0);
        EXPECT_NEAR(ex.t, std::sqrt(R + 0.25), 1e-12);
        EXPECT_NEAR(ex.excess, ex.t, 1e-9);
        EXPECT_NEAR(ex.slack, 2 * std::hypot(R, ex.t) - 2 * R, 1e-9);
        EXPECT_LE(ex.slack, 1.0 + 1e-9);
    }
    EXPECT_LE(detour_example(400, 1).relative_deviation, 0.10);
}

TEST(GapBounds, Examples) {
    EXPECT_DOUBLE_EQ(gap_bound(GapForm::theorem, 0, 2, 1, 1), 1 + std::sqrt(5.0));
    EXPECT_DOUBLE_EQ(gap_bound(GapForm::remark, 1, 2, 1, 1), 2 + 0.5 * std::sqrt(5.0));
    EXPECT_DOUBLE_EQ(gap_bound(GapForm::cat0, 0, 2, 0, 1), 1 + 0.5 * std::sqrt(5.0));
}

TEST(GapBounds, HoldOnTreesAndPlanes) {
    const auto T = make_random_tree(40, 2);
    EXPECT_TRUE(tripod_gap_check(*T, 0.0, 0.0, 200, 1).pass);
    EXPECT_TRUE(tripod_gap_check(*T, 0.0, 0.5, 200, 1).pass);
    EXPECT_TRUE(rough_convexity_check(*T, 0.0, 200, 3, true).pass);
    const auto G = make_grid_plane(2, 0.25, GridNorm::l2);
    const auto far = G->size() - 1;
    EXPECT_TRUE(short_vs_geodesic_gap(*G, 0, far, 0.0, 0.5, 100, 2, 0.0, GapForm::cat0).pass);
    EXPECT_THROW(short_vs_geodesic_gap(*G, 0, 0, 0.0, 0.5, 10, 2, 0.0, GapForm::cat0), Error);
    EXPECT_THROW(tripod_gap_check(*T, 0.0, 2.0, 10, 1), Error);
}

TEST(ModelSuite, AllChecksPass) {
    const auto checks = model_lemma_suite(2000, 1);
    EXPECT_GE(checks.size(), 30u);
    for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.statement << " slack " << c.slack;
}
