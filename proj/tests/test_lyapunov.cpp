#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "ddeu/lyapunov.hpp"
#include "ddeu/verify.hpp"

using namespace ddeu;

TEST(Lyapunov, CountsOfSimpleShapes) {
    EXPECT_EQ(lyapunov_v(Segment::constant(64, 1.0)).value, 0);
    EXPECT_EQ(lyapunov_v(Segment::constant(64, -2.0)).value, 0);
    const Segment c1 = Segment::from_function(128, [](double s) { return std::cos(M_PI * (s + 1.0)); });
    EXPECT_EQ(sign_changes(c1), 1);
    EXPECT_EQ(lyapunov_v(c1).value, 2);
    const Segment c2 = Segment::from_function(128, [](double s) { return std::cos(2.0 * M_PI * (s + 1.0)); });
    EXPECT_EQ(sign_changes(c2), 2);
    EXPECT_EQ(lyapunov_v(c2).value, 2);
    const Segment c3 = Segment::from_function(128, [](double s) { return std::cos(3.0 * M_PI * (s + 1.0)); });
    EXPECT_EQ(lyapunov_v(c3).value, 4);
}

TEST(Lyapunov, ZerosAreSkippedNotCounted) {
    Segment z = Segment::from_function(8, [](double s) { return s + 0.5; });
    EXPECT_EQ(sign_changes(z, 1e-12), 1);
    Segment w(std::vector<double>{1.0, 0.0, 0.0, 1.0, 1.0});
    EXPECT_EQ(sign_changes(w, 1e-12), 0);
}

TEST(Lyapunov, GridNoiseOverflows) {
    std::vector<double> v(65);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i % 2 ? 1.0 : -1.0;
    const VValue x = lyapunov_v(Segment(v));
    EXPECT_TRUE(x.overflow);
    EXPECT_TRUE(VValue::of(100) < x);
    EXPECT_EQ(to_string(x), "OVERFLOW");
}

TEST(Lyapunov, RegularSetNeedsDerivatives) {
    const Segment s = Segment::from_function(64, [](double t) { return t + 0.5; });
    EXPECT_THROW(in_regular_set(s), Error);
    const Segment r = Segment::from_function(64, [](double t) { return t + 0.5; }, [](double) { return 1.0; });
    EXPECT_TRUE(in_regular_set(r));
    const Segment dz = Segment::from_function(
        64, [](double t) { return (t + 0.5) * (t + 0.5); }, [](double t) { return 2.0 * (t + 0.5); });
    EXPECT_FALSE(in_regular_set(dz));
}

TEST(Lyapunov, NonIncreasingAlongRandomPairs) {
    const RunConfig& cfg = testing_support::shipped();
    const Nonlinearity nl = cfg.nonlinearity();
    Rng rng(7);
    for (int k = 0; k < 20; ++k) {
        const Segment a = random_smooth_segment(rng, 256, 2.0), b = random_smooth_segment(rng, 256, 2.0);
        const Trajectory ta = integrate(nl, a, 6.0), tb = integrate(nl, b, 6.0);
        std::optional<VValue> prev;
        for (int j = 0; j <= 48; ++j) {
            const auto v = v_of_difference(ta.segment_at(j / 8.0), tb.segment_at(j / 8.0));
            if (!v) continue;
            if (prev) {
                ASSERT_LE(*v, *prev) << "pair " << k << " t=" << j / 8.0;
            }
            prev = v;
        }
    }
}

TEST(Lyapunov, OrbitOscillatesOnceAboutEachMiddleEquilibrium) {
    const Registry& reg = testing_support::registry();
    const PeriodicOrbit& p = reg.orbit(OrbitLabel::P);
    for (const Segment& s : orbit_phases(p, 25)) {
        for (int k : {-1, 0, 1}) {
            const auto v = v_of_difference(s, Segment::constant(p.n(), reg.eq.at(k)));
            ASSERT_TRUE(v.has_value());
            EXPECT_EQ(v->value, 2) << k;
        }
    }
}
