#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "ddeu/variational.hpp"

using namespace ddeu;

TEST(Variational, MatchesFiniteDifferences) {
    const auto nl = Nonlinearity::near_step(10.0, 0.1);
    const int n = 256;
    const Segment phi = Segment::from_function(n, [](double s) { return 0.8 * std::sin(2.0 * M_PI * (s + 1.0) / 1.2); });
    const Segment eta = Segment::from_function(n, [](double s) { return std::cos(M_PI * s); });
    const double T = 4.0, d = 1e-6;
    const Trajectory base = integrate(nl, phi, T);
    const VariationalSolution v = solve_variational(base, eta, T);
    const Trajectory pert = integrate(nl, lincomb(1.0, phi, d, eta), T);
    const Trajectory neg = integrate(nl, lincomb(1.0, phi, -d, eta), T);
    for (double t : {1.0, 2.5, 4.0}) {
        const Segment a = pert.segment_at(t), b = neg.segment_at(t), z = v.segment_at(t);
        double err = 0.0;
        for (int i = 0; i <= n; ++i) err = std::max(err, std::abs((a.values[i] - b.values[i]) / (2 * d) - z.values[i]));
        EXPECT_LT(err, 1e-5 * std::max(1.0, sup_norm(z))) << t;
    }
}

TEST(Variational, LinearInDirection) {
    const auto nl = Nonlinearity::near_step(10.0, 0.1);
    const int n = 128;
    const Segment phi = Segment::from_function(n, [](double s) { return s + 0.3; });
    const Segment e1 = Segment::from_function(n, [](double s) { return s * s; });
    const Segment e2 = Segment::from_function(n, [](double s) { return std::sin(5.0 * s); });
    const Trajectory base = integrate(nl, phi, 3.0);
    const auto a = solve_variational(base, e1, 3.0).segment_at(3.0);
    const auto b = solve_variational(base, e2, 3.0).segment_at(3.0);
    const auto c = solve_variational(base, lincomb(2.0, e1, -3.0, e2), 3.0).segment_at(3.0);
    for (int i = 0; i <= n; ++i) EXPECT_NEAR(c.values[i], 2.0 * a.values[i] - 3.0 * b.values[i], 1e-11);
}

TEST(Variational, NeedsCoverage) {
    const auto nl = Nonlinearity::near_step(10.0, 0.1);
    const Segment phi = Segment::constant(64, 0.1);
    const Trajectory base = integrate(nl, phi, 1.0);
    EXPECT_THROW(solve_variational(base, phi, 2.0), Error);
    EXPECT_THROW(solve_variational(base, Segment::constant(32, 1.0), 0.5), Error);
}

TEST(Variational, MonodromyTrivialMultiplierAndEigenvector) {
    const Registry& reg = testing_support::registry();
    for (const auto& orb : reg.orbits) {
        const FloquetSpectrum& fs = *orb.spectrum;
        ASSERT_GE(fs.trivial_index, 0);
        EXPECT_LT(std::abs(fs.trivial() - 1.0), 5e-3) << to_string(orb.label);
        const Segment rd = orb.r_dot0();
        const Segment& v = fs.eigvec_re[static_cast<std::size_t>(fs.trivial_index)];
        const double cs = std::abs(l2_dot(v, rd)) / std::sqrt(l2_dot(v, v) * l2_dot(rd, rd));
        EXPECT_GT(cs, 0.999) << to_string(orb.label);
    }
}
