#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "ddeu/integrate.hpp"

using namespace ddeu;
using testing_support::expected;

namespace {

double affine_x(int n, double t) {
    const Segment phi = Segment::from_function(n, [](double s) { return s + 1.0; });
    const Trajectory tr = integrate(Nonlinearity::affine(1.0, 0.0), phi, t);
    return tr.x(static_cast<std::size_t>(std::lround((t + 1.0) * n)));
}

}  // namespace

TEST(Integrate, AffineValueAtOne) {
    EXPECT_NEAR(affine_x(512, 1.0), expected()["affine"]["x1"].get<double>(), 1e-12);
}

TEST(Integrate, AffineErrorsAtTwoMatchOracle) {
    const double x2 = expected()["affine"]["x2"].get<double>();
    for (int n : {128, 256, 512}) {
        const double want = expected()["affine"]["x2_error"][std::to_string(n)].get<double>();
        EXPECT_NEAR(std::abs(affine_x(n, 2.0) - x2), want, 1e-3 * want) << n;
    }
}

TEST(Integrate, SecondOrderConvergence) {
    const double x2 = expected()["affine"]["x2"].get<double>();
    const double e1 = std::abs(affine_x(128, 2.0) - x2), e2 = std::abs(affine_x(256, 2.0) - x2),
                 e3 = std::abs(affine_x(512, 2.0) - x2);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.01);
    EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.01);
}

TEST(Integrate, HermiteOffGridMatchesClosedForm) {
    // on [0,1]: x' = -x + t, x(0) = 1
    const Segment phi = Segment::from_function(512, [](double s) { return s + 1.0; });
    const Trajectory tr = integrate(Nonlinearity::affine(1.0, 0.0), phi, 1.0);
    for (double t : {0.1234567, 0.5000001, 0.9}) {
        EXPECT_NEAR(tr.value_at(t), t - 1.0 + 2.0 * std::exp(-t), 1e-10) << t;
        EXPECT_NEAR(tr.deriv_at(t), 1.0 - 2.0 * std::exp(-t), 1e-7) << t;
    }
}

TEST(Integrate, ExtendEqualsLongerRun) {
    const auto nl = Nonlinearity::near_step(10.0, 0.1);
    const Segment phi = Segment::from_function(256, [](double s) { return std::sin(3.0 * s) + 0.2; });
    Trajectory a = integrate(nl, phi, 3.0);
    extend(a, 4.0);
    const Trajectory b = integrate(nl, phi, 7.0);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.x(i), b.x(i));
}

TEST(Integrate, SegmentAtLatticeTime) {
    const Segment phi = Segment::from_function(64, [](double s) { return s * s; });
    const Trajectory tr = integrate(Nonlinearity::near_step(10.0, 0.1), phi, 2.0);
    const Segment s0 = tr.segment_at(0.0);
    for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_EQ(s0.values[i], phi.values[i]);
    const Segment s1 = tr.segment_at(1.5);
    EXPECT_EQ(s1.back(), tr.x(tr.index_of(1.5)));
}

TEST(Integrate, EquilibriumIsFixed) {
    const auto nl = Nonlinearity::near_step(10.0, 0.1);
    const auto eq = equilibria(nl);
    const Trajectory tr = integrate(nl, Segment::constant(128, eq.at(1)), 5.0);
    for (std::size_t i = 0; i < tr.size(); ++i) ASSERT_NEAR(tr.x(i), eq.at(1), 1e-13);
}

TEST(Integrate, RequiresEquationDerivativesForHermite) {
    const Segment phi = Segment::from_function(64, [](double s) { return s; });
    const Trajectory tr = integrate(Nonlinearity::affine(1.0, 0.0), phi, 1.0);
    EXPECT_THROW(tr.value_at(5.0), Error);
}
