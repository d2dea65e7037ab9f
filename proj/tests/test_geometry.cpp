#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "ddeu/geometry.hpp"

using namespace ddeu;
using testing_support::registry;

namespace {

PlanarCurve circle(double r, int m = 400) {
    PlanarCurve c;
    for (int k = 0; k <= m; ++k) {
        const double a = 2.0 * M_PI * (k % m) / m;
        c.points.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return c;
}

}  // namespace

TEST(Geometry, WindingAroundCircle) {
    const PlanarCurve c = circle(1.0);
    EXPECT_NEAR(std::abs(winding_number({0.1, -0.2}, c)), 1.0, 1e-9);
    EXPECT_NEAR(winding_number({2.0, 0.0}, c), 0.0, 1e-9);
    EXPECT_EQ(winding_region({0.0, 0.0}, c), Region::Interior);
    EXPECT_EQ(winding_region({0.0, 3.0}, c), Region::Exterior);
    EXPECT_EQ(winding_region({1.0, 0.0}, c), Region::On);
}

TEST(Geometry, NestedCirclesClassify) {
    const NestedCurves nc(circle(1.0), circle(2.0), circle(3.0));
    EXPECT_EQ(nc.classify({0.5, 0.0}), AnnulusRegion::INSIDE_OK);
    EXPECT_EQ(nc.classify({0.0, 1.5}), AnnulusRegion::A_K_P);
    EXPECT_EQ(nc.classify({-2.5, 0.0}), AnnulusRegion::A_Q_P);
    EXPECT_EQ(nc.classify({4.0, 0.0}), AnnulusRegion::OUTSIDE_OQ);
    EXPECT_EQ(nc.classify({0.0, 2.0}), AnnulusRegion::ON_CURVE);
    EXPECT_THROW(NestedCurves(circle(2.0), circle(1.0), circle(3.0)), Error);
}

TEST(Geometry, DegenerateCurveRejected) {
    PlanarCurve open;
    open.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    EXPECT_THROW(require_curve(open), Error);
}

TEST(Geometry, ProjectionsReadEndpoints) {
    const Segment s = Segment::from_function(4, [](double t) { return 2.0 * t + 1.0; });
    const Point2 p = pi2(s);
    EXPECT_DOUBLE_EQ(p.x0, 1.0);
    EXPECT_DOUBLE_EQ(p.xm1, -1.0);
    EXPECT_NEAR(pi3(s).integral, 0.0, 1e-15);
}

TEST(Geometry, InjectivityProbeFlagsCollisions) {
    std::vector<std::pair<Segment, Point2>> pts;
    for (int k = 0; k < 20; ++k) {
        const double a = 0.1 * k;
        const Segment s = Segment::from_function(16, [a](double t) { return a * t + a; });
        pts.emplace_back(s, pi2(s));
    }
    auto rep = injectivity_probe(pts, 1e-12, 1e-6);
    EXPECT_EQ(rep.violations, 0u);
    EXPECT_NEAR(rep.fitted_lipschitz, 1.0, 1e-9);
    // same endpoints, different interior
    const Segment bump = Segment::from_function(16, [](double t) { return t * (t + 1.0); });
    pts.emplace_back(bump, pi2(bump));
    rep = injectivity_probe(pts, 1e-12, 1e-6);
    EXPECT_EQ(rep.violations, 1u);
}

TEST(Geometry, GraphTableDetectsMultipleValues) {
    std::vector<Segment> pts;
    for (int k = 0; k < 10; ++k) {
        const double a = 0.1 * k;
        pts.push_back(Segment::from_function(16, [a](double t) { return a * (t + 1.0); }));
    }
    const GraphTable g = build_graph_table(pts);
    EXPECT_EQ(g.size(), 10u);
    const Segment& near = g.nearest({0.31, 0.0});
    EXPECT_NEAR(near.back(), 0.3, 1e-12);
    pts.push_back(Segment::from_function(16, [](double t) { return 0.3 * (t + 1.0) + 5.0 * t * (t + 1.0); }));
    EXPECT_THROW(build_graph_table(pts), Error);
}

TEST(Geometry, OrbitCurvesAreNested) {
    for (int k : {1, -1}) {
        const NestedCurves nc = nested_curves(registry(), k, 1e-6);
        EXPECT_LT(nc.op().resolution, 1e-4);
        EXPECT_EQ(nc.classify({0.0, 0.0}), AnnulusRegion::A_K_P);
        EXPECT_EQ(nc.classify({5.0, 5.0}), AnnulusRegion::OUTSIDE_OQ);
        const double xk = registry().eq.at(k);
        EXPECT_EQ(nc.classify({xk, xk}), AnnulusRegion::INSIDE_OK);
    }
}
