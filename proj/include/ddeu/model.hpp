#pragma once

// Feedback nonlinearities for x'(t) = -mu x(t) + f(x(t-1)) and the
// equilibrium structure they induce.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ddeu/errors.hpp"

namespace ddeu {

enum class NonlinearityKind { NearStep, Affine };

/// Feedback function together with the decay coefficient mu.
///
/// NearStep:  f(x) = (K/2) [tanh((x-1)/eps) + tanh((x+1)/eps)], a smooth
///            odd increasing approximation of the step K*sign(x)*[|x|>1].
/// Affine:    f(x) = a x + b. Only used to give the integrator closed-form
///            references; it never satisfies the five-equilibria hypothesis.
struct Nonlinearity {
    NonlinearityKind kind = NonlinearityKind::NearStep;
    double K = 10.0;
    double eps = 0.1;
    double a = 0.0;
    double b = 0.0;
    double mu = 1.0;

    static Nonlinearity near_step(double K, double eps, double mu = 1.0) {
        if (!(K > 0.0) || !(eps > 0.0) || !(mu > 0.0)) {
            throw Error(ErrorCode::InvalidParameter, "near_step requires K > 0, eps > 0, mu > 0");
        }
        Nonlinearity nl;
        nl.kind = NonlinearityKind::NearStep;
        nl.K = K;
        nl.eps = eps;
        nl.mu = mu;
        return nl;
    }

    static Nonlinearity affine(double a, double b, double mu = 1.0) {
        if (!(mu > 0.0)) throw Error(ErrorCode::InvalidParameter, "affine requires mu > 0");
        Nonlinearity nl;
        nl.kind = NonlinearityKind::Affine;
        nl.K = 0.0;
        nl.eps = 0.0;
        nl.a = a;
        nl.b = b;
        nl.mu = mu;
        return nl;
    }
};

namespace detail {

// sech^2(y) without overflowing cosh for large |y|.
inline double sech2(double y) {
    const double e = std::exp(-2.0 * std::abs(y));
    const double d = 1.0 + e;
    return 4.0 * e / (d * d);
}

}  // namespace detail

inline double eval_f(const Nonlinearity& nl, double x) {
    if (nl.kind == NonlinearityKind::Affine) return nl.a * x + nl.b;
    // fl(-x-1) == -fl(x+1) and tanh is odd, so the sum is exactly odd in x.
    return 0.5 * nl.K * (std::tanh((x - 1.0) / nl.eps) + std::tanh((x + 1.0) / nl.eps));
}

inline double eval_f_prime(const Nonlinearity& nl, double x) {
    if (nl.kind == NonlinearityKind::Affine) return nl.a;
    return 0.5 * nl.K / nl.eps * (detail::sech2((x - 1.0) / nl.eps) + detail::sech2((x + 1.0) / nl.eps));
}

enum class Stability { Stable, Unstable };

inline std::string to_string(Stability s) { return s == Stability::Stable ? "STABLE" : "UNSTABLE"; }

/// The five zeros xi_{-2} < ... < xi_2 of g(x) = -mu x + f(x), index j+2 holds xi_j.
struct EquilibriaReport {
    std::array<double, 5> xi{};
    std::array<double, 5> slopes{};
    std::array<Stability, 5> stability{};

    double at(int j) const { return xi.at(static_cast<std::size_t>(j + 2)); }
};

struct H1Report {
    bool ok = false;
    std::vector<std::string> violations;
};

namespace detail {

inline double root_bracket_bound(const Nonlinearity& nl) {
    // every zero satisfies |xi| <= K/mu
    return 2.0 * nl.K / std::min(nl.mu, 1.0);
}

inline void require_near_step(const Nonlinearity& nl, const char* what) {
    if (nl.kind != NonlinearityKind::NearStep) {
        throw Error(ErrorCode::InvalidKind, std::string(what) + " requires a NEAR_STEP nonlinearity");
    }
}

inline double bisect_root(const Nonlinearity& nl, double lo, double hi) {
    auto g = [&](double x) { return -nl.mu * x + eval_f(nl, x); };
    double glo = g(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
}

}  // namespace detail

/// Locates all sign changes of -mu x + f(x) on a fine grid over the root
/// bracket and refines each by bisection.
inline EquilibriaReport equilibria(const Nonlinearity& nl) {
    detail::require_near_step(nl, "equilibria");
    auto g = [&](double x) { return -nl.mu * x + eval_f(nl, x); };
    const double bound = detail::root_bracket_bound(nl);
    const double step = std::min(1e-3, nl.eps / 50.0);
    const auto cells = static_cast<long>(std::ceil(2.0 * bound / step));

    std::vector<double> roots;
    double x_prev = -bound;
    double g_prev = g(x_prev);
    if (g_prev == 0.0) roots.push_back(x_prev);
    for (long i = 1; i <= cells; ++i) {
        const double x = -bound + static_cast<double>(i) * (2.0 * bound / static_cast<double>(cells));
        const double gx = g(x);
        if (gx == 0.0) {
            roots.push_back(x);
        } else if (g_prev != 0.0 && (gx < 0.0) != (g_prev < 0.0)) {
            roots.push_back(detail::bisect_root(nl, x_prev, x));
        }
        x_prev = x;
        g_prev = gx;
    }
    if (roots.size() != 5) {
        throw Error(ErrorCode::NotFiveRoots, "found " + std::to_string(roots.size()) + " zeros of -mu*x+f(x)");
    }
    EquilibriaReport rep;
    for (std::size_t j = 0; j < 5; ++j) {
        rep.xi[j] = roots[j];
        rep.slopes[j] = eval_f_prime(nl, roots[j]);
        rep.stability[j] = rep.slopes[j] < nl.mu ? Stability::Stable : Stability::Unstable;
    }
    return rep;
}

inline H1Report validate_h1(const Nonlinearity& nl) {
    detail::require_near_step(nl, "validate_h1");
    H1Report rep;
    try {
        const auto eq = equilibria(nl);
        if (std::abs(eq.xi[2]) > 1e-12) rep.violations.push_back("middle equilibrium is not 0");
        for (int j : {-2, 0, 2}) {
            if (!(eq.slopes[static_cast<std::size_t>(j + 2)] < nl.mu)) {
                rep.violations.push_back("f'(xi_" + std::to_string(j) + ") >= mu");
            }
        }
        for (int k : {-1, 1}) {
            if (!(eq.slopes[static_cast<std::size_t>(k + 2)] > nl.mu)) {
                rep.violations.push_back("f'(xi_" + std::to_string(k) + ") <= mu");
            }
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NotFiveRoots) throw;
        rep.violations.push_back(e.what());
    }
    const double bound = 2.0 * nl.K;
    const double step = nl.eps / 10.0;
    for (double x = -bound; x <= bound; x += step) {
        if (!(eval_f_prime(nl, x) > 0.0)) {
            rep.violations.push_back("f' not positive at x=" + std::to_string(x));
            break;
        }
    }
    rep.ok = rep.violations.empty();
    return rep;
}

}  // namespace ddeu
