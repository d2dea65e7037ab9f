#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "ddeu/poincare.hpp"
#include "ddeu/verify.hpp"

using namespace ddeu;
using testing_support::expected;
using testing_support::registry;

TEST(Poincare, PeriodsMatchIndependentSolver) {
    const auto& e = expected()["orbits_n512"];
    for (const auto& orb : registry().orbits) {
        const auto& o = e[to_string(orb.label)];
        EXPECT_NEAR(orb.omega, o["omega"].get<double>(), 1e-9) << to_string(orb.label);
        EXPECT_NEAR(orb.min_value(), o["min"].get<double>(), 1e-6);
        EXPECT_NEAR(orb.max_value(), o["max"].get<double>(), 1e-6);
        EXPECT_LT(orb.residual, 1e-9);
        EXPECT_GT(orb.omega, 1.0);
        EXPECT_LT(orb.omega, 2.0);
    }
}

TEST(Poincare, LeadingMultipliersMatchIndependentSolver) {
    const auto& e = expected()["orbits_n512"];
    for (const auto& orb : registry().orbits) {
        const auto& want = e[to_string(orb.label)]["top_multipliers"];
        const auto& got = orb.spectrum->multipliers;
        for (std::size_t i = 0; i < 2; ++i) {
            const std::complex<double> w(want[i][0].get<double>(), want[i][1].get<double>());
            EXPECT_LT(std::abs(got[i] - w), 1e-6 * std::abs(w)) << to_string(orb.label) << " " << i;
        }
    }
}

TEST(Poincare, UnstableCounts) {
    EXPECT_EQ(registry().orbit(OrbitLabel::P).spectrum->n_unstable, 2);
    EXPECT_EQ(registry().orbit(OrbitLabel::Q).spectrum->n_unstable, 1);
    EXPECT_EQ(registry().orbit(OrbitLabel::X1).spectrum->n_unstable, 1);
    EXPECT_EQ(registry().orbit(OrbitLabel::X_MINUS1).spectrum->n_unstable, 1);
}

TEST(Poincare, OrbitsAreSymmetricImages) {
    const auto& a = registry().orbit(OrbitLabel::X1);
    const auto& b = registry().orbit(OrbitLabel::X_MINUS1);
    EXPECT_NEAR(a.omega, b.omega, 1e-7);
    EXPECT_NEAR(a.min_value(), -b.max_value(), 1e-6);
    const auto& p = registry().orbit(OrbitLabel::P);
    EXPECT_NEAR(p.min_value(), -p.max_value(), 1e-5);
}

TEST(Poincare, ReturnMapFixesOrbit) {
    const PeriodicOrbit& p = registry().orbit(OrbitLabel::P);
    const SectionSpec sec = build_section(p, monodromy_matrix(p));
    const Segment base(p.r0.values);
    const ReturnResult rr = return_to_section(sec, base);
    EXPECT_NEAR(rr.gamma, p.omega, 1e-8);
    EXPECT_LT(sup_distance(Segment(rr.image.values), base), 1e-7);
    EXPECT_NEAR(sec.pair(p.r_dot0()), 1.0, 1e-9);
}

TEST(Poincare, DerivativeAgreesWithDifferences) {
    const PeriodicOrbit& p = registry().orbit(OrbitLabel::P);
    const SectionSpec sec = build_section(p, monodromy_matrix(p));
    const Segment base(p.r0.values);
    const Segment rd = p.r_dot0();
    Rng rng(3);
    const Segment eta = sec.project_to_Y(random_smooth_segment(rng, p.n(), 1.0), rd);
    const Segment d = dP(sec, base, eta);
    const double h = 1e-6;
    const Segment fd = (1.0 / (2 * h)) * (return_map(sec, lincomb(1.0, base, h, eta)) -
                                         return_map(sec, lincomb(1.0, base, -h, eta)));
    EXPECT_LT(sup_distance(Segment(d.values), Segment(fd.values)), 1e-4 * sup_norm(eta));
    EXPECT_NEAR(sec.pair(d), 0.0, 1e-8);
}

TEST(Poincare, DerivativeRejectsDirectionOffSection) {
    const PeriodicOrbit& p = registry().orbit(OrbitLabel::P);
    const SectionSpec sec = build_section(p, monodromy_matrix(p));
    EXPECT_THROW(dP(sec, Segment(p.r0.values), p.r_dot0()), Error);
}

TEST(Poincare, FanSeedsLieInUnstablePlane) {
    const PeriodicOrbit& p = registry().orbit(OrbitLabel::P);
    const auto seeds = local_unstable_fan(p, 1e-3, 10);
    ASSERT_FALSE(seeds.empty());
    for (const auto& s : seeds) {
        EXPECT_LE(std::hypot(s.c1, s.c2), 1e-3 * (1 + 1e-12));
        EXPECT_LE(sup_distance(Segment(s.seed.values), Segment(p.r0.values)), 3e-3);
    }
}

TEST(Poincare, FindOrbitIsDeterministic) {
    const RunConfig& cfg = testing_support::shipped();
    const auto eq = registry().eq;
    const PeriodicOrbit a = solve_orbit(cfg, cfg.orbits[0], eq, 128, 1);
    const PeriodicOrbit b = solve_orbit(cfg, cfg.orbits[0], eq, 128, 1);
    EXPECT_EQ(a.omega, b.omega);
    EXPECT_EQ(a.r0.values, b.r0.values);
}
