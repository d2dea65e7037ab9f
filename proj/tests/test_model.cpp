#include <gtest/gtest.h>

#include "common.hpp"
#include "ddeu/model.hpp"

using namespace ddeu;
using testing_support::expected;

TEST(Model, EquilibriaMatchHighPrecisionRoots) {
    const auto eq = equilibria(Nonlinearity::near_step(10.0, 0.1));
    const auto& e = expected()["equilibria"];
    for (int j = 0; j < 5; ++j) {
        EXPECT_NEAR(eq.xi[j], e["xi"][j].get<double>(), 1e-12) << j;
        EXPECT_NEAR(eq.slopes[j], e["slopes"][j].get<double>(), 1e-9 * (1.0 + e["slopes"][j].get<double>())) << j;
        EXPECT_EQ(to_string(eq.stability[j]), e["stability"][j].get<std::string>()) << j;
    }
    EXPECT_EQ(eq.at(0), 0.0);
    EXPECT_DOUBLE_EQ(eq.at(1), -eq.at(-1));
}

TEST(Model, SlopeAtZeroIsTiny) {
    const auto nl = Nonlinearity::near_step(10.0, 0.1);
    EXPECT_NEAR(eval_f_prime(nl, 0.0), 8.2446144557674e-7, 1e-15);
    EXPECT_DOUBLE_EQ(eval_f(nl, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(eval_f(nl, 0.7), -eval_f(nl, -0.7));
}

TEST(Model, ShippedParametersSatisfyHypotheses) {
    const auto rep = validate_h1(Nonlinearity::near_step(10.0, 0.1));
    EXPECT_TRUE(rep.ok);
    EXPECT_TRUE(rep.violations.empty());
}

TEST(Model, WeakFeedbackHasOneEquilibrium) {
    const auto nl = Nonlinearity::near_step(0.5, 0.1);
    EXPECT_THROW(equilibria(nl), Error);
    const auto rep = validate_h1(nl);
    EXPECT_FALSE(rep.ok);
}

TEST(Model, RejectsBadParameters) {
    EXPECT_THROW(Nonlinearity::near_step(-1.0, 0.1), Error);
    EXPECT_THROW(Nonlinearity::near_step(10.0, 0.0), Error);
    EXPECT_THROW(Nonlinearity::affine(1.0, 0.0, 0.0), Error);
    EXPECT_THROW(validate_h1(Nonlinearity::affine(1.0, 0.0)), Error);
}

TEST(Model, AffineEvaluation) {
    const auto nl = Nonlinearity::affine(2.0, 0.5);
    EXPECT_DOUBLE_EQ(eval_f(nl, 3.0), 6.5);
    EXPECT_DOUBLE_EQ(eval_f_prime(nl, -4.0), 2.0);
}
