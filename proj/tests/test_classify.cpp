#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "ddeu/classify.hpp"
#include "ddeu/verify.hpp"
#include <set>

using namespace ddeu;
using testing_support::registry;

TEST(Classify, EquilibriumLimits) {
    const Registry& reg = registry();
    const Nonlinearity nl = reg.orbit(OrbitLabel::P).nl;
    const int n = 512;
    EXPECT_EQ(omega_classify(integrate(nl, Segment::constant(n, 7.0), 1.0), reg).omega_limit, OmegaLimit::XI_2);
    EXPECT_EQ(omega_classify(integrate(nl, Segment::constant(n, -4.0), 1.0), reg).omega_limit, OmegaLimit::XI_MINUS2);
    const auto oc = omega_classify(integrate(nl, Segment::constant(n, 0.3), 1.0), reg);
    EXPECT_EQ(oc.omega_limit, OmegaLimit::XI_0);
    EXPECT_EQ(oc.separatrix_position, SeparatrixPosition::BETWEEN);
}

TEST(Classify, PeriodicLimits) {
    const Registry& reg = registry();
    for (auto [label, want] : {std::pair{OrbitLabel::P, OmegaLimit::O_P}, std::pair{OrbitLabel::Q, OmegaLimit::O_Q},
                               std::pair{OrbitLabel::X1, OmegaLimit::O_1},
                               std::pair{OrbitLabel::X_MINUS1, OmegaLimit::O_MINUS1}}) {
        const PeriodicOrbit& o = reg.orbit(label);
        const auto oc = omega_classify(o.trajectory(1.0), reg);
        EXPECT_EQ(oc.omega_limit, want) << to_string(label);
        EXPECT_NEAR(oc.period, o.omega, 1e-3);
    }
}

TEST(Classify, QuickFate) {
    const Registry& reg = registry();
    const Nonlinearity nl = reg.orbit(OrbitLabel::P).nl;
    EXPECT_EQ(quick_fate(nl, reg.eq, Segment::constant(256, 3.0)), OmegaLimit::XI_2);
    EXPECT_EQ(quick_fate(nl, reg.eq, Segment::constant(256, -0.5)), OmegaLimit::XI_0);
}

TEST(Classify, UnstableDirectionsSplitFates) {
    const Registry& reg = registry();
    const PeriodicOrbit& p = reg.orbit(OrbitLabel::P);
    std::set<OmegaLimit> seen;
    for (int i = 0; i < 24; ++i) seen.insert(quick_fate(p.nl, reg.eq, fan_point(p, 1e-3, 2.0 * M_PI * i / 24)));
    EXPECT_TRUE(seen.count(OmegaLimit::XI_0));
    EXPECT_TRUE(seen.count(OmegaLimit::XI_2));
    EXPECT_TRUE(seen.count(OmegaLimit::XI_MINUS2));
}

TEST(Classify, Connections) {
    EXPECT_EQ(connection_between(OmegaLimit::XI_2, OmegaLimit::XI_0), Connection::C_1P);
    EXPECT_EQ(connection_between(OmegaLimit::XI_MINUS2, OmegaLimit::XI_0), Connection::C_MINUS1P);
    EXPECT_EQ(connection_between(OmegaLimit::XI_MINUS2, OmegaLimit::XI_2), Connection::C_QP);
    EXPECT_EQ(connection_between(OmegaLimit::XI_2, OmegaLimit::XI_2), Connection::NONE);
    EXPECT_EQ(target_orbit(Connection::C_QP), OrbitLabel::Q);
}

TEST(Classify, StrictOrder) {
    const Segment a = Segment::constant(16, 0.0), b = Segment::constant(16, 1.0);
    EXPECT_TRUE(strictly_below(a, b));
    EXPECT_FALSE(strictly_below(b, a));
    EXPECT_FALSE(strictly_below(a, a));
}

TEST(Classify, PositionFollowsLimit) {
    EXPECT_EQ(position_for(OmegaLimit::XI_2), SeparatrixPosition::ABOVE_S1);
    EXPECT_EQ(position_for(OmegaLimit::XI_MINUS2), SeparatrixPosition::BELOW_S_MINUS1);
    EXPECT_EQ(position_for(OmegaLimit::O_1), SeparatrixPosition::ON_S1);
    EXPECT_EQ(position_for(OmegaLimit::O_Q), SeparatrixPosition::ON_BOTH);
}

class Separatrices : public ::testing::Test {
protected:
    static const SeparatrixSet& seps() {
        static const SeparatrixSet s = track_separatrices(registry(), testing_support::shipped(), 1);
        return s;
    }
};

TEST_F(Separatrices, TrackedEndsNearTargets) {
    ASSERT_FALSE(seps().tracked.empty());
    for (const auto& ts : seps().tracked) {
        const Segment end = ts.segment_at(ts.t_end());
        const double d = distance_to_orbit(end, registry().orbit(target_orbit(ts.connection)));
        EXPECT_LT(d, 1e-4) << to_string(ts.connection) << " r=" << ts.radius;
    }
    EXPECT_EQ(seps().scans_without_change, 0);
}

TEST_F(Separatrices, HCurveOrdering) {
    const auto& reg = registry();
    const auto& want = testing_support::expected()["regression_n512"]["h_curve"];
    for (int k : {1, -1}) {
        const HCurveReport h = trace_h_curve(k, reg, seps().tracked);
        EXPECT_LT(reg.eq.at(k), h.s_k);
        EXPECT_LT(h.s_k, h.s_p);
        EXPECT_LT(h.s_p, h.s_q);
        const auto& w = want[std::to_string(k)];
        EXPECT_NEAR(h.s_k, w["s_k"].get<double>(), 1e-6);
        EXPECT_NEAR(h.s_p, w["s_p"].get<double>(), 1e-6);
        EXPECT_NEAR(h.s_q, w["s_q"].get<double>(), 1e-6);
    }
}

TEST_F(Separatrices, HCurveTangentsOscillateOnce) {
    const RunConfig& cfg = testing_support::shipped();
    for (int k : {1, -1}) {
        const HCurveReport h = trace_h_curve(k, registry(), seps().tracked);
        const TangentCheck c = h_curve_tangents(h, 0.3, 100.0 * cfg.fan_delta * cfg.fan_delta);
        EXPECT_GE(c.pairs, 20);
        EXPECT_EQ(c.v_two, c.pairs) << k;
        EXPECT_LT(c.max_node0, 1e-2);
    }
}

TEST_F(Separatrices, ClosureHasNoStrictPairs) {
    const auto cl = seps().closure(1, registry(), 16);
    std::size_t strict = 0;
    for (std::size_t i = 0; i < cl.size(); i += 7) {
        for (std::size_t j = i + 1; j < cl.size(); j += 3) {
            strict += strictly_below(cl[i], cl[j]) || strictly_below(cl[j], cl[i]);
        }
    }
    EXPECT_EQ(strict, 0u);
}
