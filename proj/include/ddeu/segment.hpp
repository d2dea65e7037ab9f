#pragma once

// Phase-space points: functions on [-1, 0] sampled at s_i = -1 + i/n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddeu/errors.hpp"

namespace ddeu {

struct Segment {
    std::vector<double> values;
    /// Node derivatives when known (from the equation, or estimated).
    std::optional<std::vector<double>> deriv;
    /// Set when `deriv` came from finite differences rather than the equation.
    bool deriv_estimated = false;

    Segment() = default;
    explicit Segment(std::vector<double> v) : values(std::move(v)) {}
    Segment(std::vector<double> v, std::vector<double> d) : values(std::move(v)), deriv(std::move(d)) {}

    int n() const { return static_cast<int>(values.size()) - 1; }
    std::size_t size() const { return values.size(); }
    double h() const { return 1.0 / n(); }
    double node(int i) const { return -1.0 + static_cast<double>(i) / n(); }

    double front() const { return values.front(); }  // phi(-1)
    double back() const { return values.back(); }    // phi(0)

    /// Piecewise-linear evaluation for s in [-1, 0].
    double operator()(double s) const {
        const double u = (std::clamp(s, -1.0, 0.0) + 1.0) * n();
        auto j = static_cast<int>(std::floor(u));
        j = std::clamp(j, 0, n() - 1);
        const double th = u - j;
        return (1.0 - th) * values[static_cast<std::size_t>(j)] + th * values[static_cast<std::size_t>(j) + 1];
    }

    static Segment from_function(int n, const std::function<double(double)>& fn) {
        std::vector<double> v(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = fn(-1.0 + static_cast<double>(i) / n);
        return Segment(std::move(v));
    }

    static Segment from_function(int n, const std::function<double(double)>& fn,
                                 const std::function<double(double)>& dfn) {
        Segment seg = from_function(n, fn);
        seg.deriv = from_function(n, dfn).values;
        return seg;
    }

    static Segment constant(int n, double c) {
        return Segment(std::vector<double>(static_cast<std::size_t>(n) + 1, c),
                       std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
    }

    /// Central-difference node derivatives; marks the segment as estimated.
    Segment with_estimated_derivative() const {
        Segment out = *this;
        const int m = n();
        std::vector<double> d(values.size());
        for (int i = 0; i <= m; ++i) {
            const int lo = std::max(0, i - 1), hi = std::min(m, i + 1);
            d[static_cast<std::size_t>(i)] =
                (values[static_cast<std::size_t>(hi)] - values[static_cast<std::size_t>(lo)]) / ((hi - lo) * h());
        }
        out.deriv = std::move(d);
        out.deriv_estimated = true;
        return out;
    }
};

inline void require_same_grid(const Segment& a, const Segment& b, const char* what) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::GridMismatch, std::string(what) + ": n=" + std::to_string(a.n()) +
                                                 " vs n=" + std::to_string(b.n()));
    }
}

inline double sup_norm(const Segment& s) {
    double m = 0.0;
    for (double v : s.values) m = std::max(m, std::abs(v));
    return m;
}

inline double sup_distance(const Segment& a, const Segment& b) {
    require_same_grid(a, b, "sup_distance");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

/// a*x + b*y; the derivative is carried along only when both operands have one.
inline Segment lincomb(double a, const Segment& x, double b, const Segment& y) {
    require_same_grid(x, y, "lincomb");
    Segment out;
    out.values.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.values[i] = a * x.values[i] + b * y.values[i];
    if (x.deriv && y.deriv) {
        std::vector<double> d(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) d[i] = a * (*x.deriv)[i] + b * (*y.deriv)[i];
        out.deriv = std::move(d);
        out.deriv_estimated = x.deriv_estimated || y.deriv_estimated;
    }
    return out;
}

inline Segment operator+(const Segment& x, const Segment& y) { return lincomb(1.0, x, 1.0, y); }
inline Segment operator-(const Segment& x, const Segment& y) { return lincomb(1.0, x, -1.0, y); }
inline Segment operator*(double a, const Segment& x) { return lincomb(a, x, 0.0, x); }

/// Resamples onto a grid of resolution m by piecewise-linear interpolation.
inline Segment resample_linear(const Segment& s, int m) {
    return Segment::from_function(m, [&](double t) { return s(t); });
}

/// Trapezoid-rule integral over [-1, 0].
inline double trapezoid_integral(const Segment& s) {
    const auto& v = s.values;
    double acc = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) acc += v[i];
    return acc * s.h();
}

/// Trapezoid inner product over [-1, 0].
inline double l2_dot(const Segment& a, const Segment& b) {
    require_same_grid(a, b, "l2_dot");
    const std::size_t m = a.size();
    double acc = 0.5 * (a.values[0] * b.values[0] + a.values[m - 1] * b.values[m - 1]);
    for (std::size_t i = 1; i + 1 < m; ++i) acc += a.values[i] * b.values[i];
    return acc * a.h();
}

/// Pointwise order of two segments at node resolution.
enum class Order { Eq, Leq, Geq, LL, GG, Incomparable };

inline std::string to_string(Order o) {
    switch (o) {
        case Order::Eq: return "EQ";
        case Order::Leq: return "LEQ";
        case Order::Geq: return "GEQ";
        case Order::LL: return "LL";
        case Order::GG: return "GG";
        case Order::Incomparable: return "INCOMPARABLE";
    }
    return "?";
}

/// Compares phi against psi node by node. LL is the strict order phi << psi
/// (phi < psi - tol at every node); equality within tol is EQ, never LL.
inline Order order_relation(const Segment& phi, const Segment& psi, double tol = 1e-9) {
    require_same_grid(phi, psi, "order_relation");
    bool all_below = true;       // d > tol everywhere
    bool all_above = true;       // d < -tol everywhere
    bool none_above = true;      // d >= -tol everywhere
    bool none_below = true;      // d <= tol everywhere
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double d = psi.values[i] - phi.values[i];
        if (!(d > tol)) all_below = false;
        if (!(d < -tol)) all_above = false;
        if (d < -tol) none_above = false;
        if (d > tol) none_below = false;
    }
    if (none_above && none_below) return Order::Eq;
    if (all_below) return Order::LL;
    if (all_above) return Order::GG;
    if (none_above) return Order::Leq;
    if (none_below) return Order::Geq;
    return Order::Incomparable;
}

}  // namespace ddeu
