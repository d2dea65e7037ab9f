#pragma once

// Sign-change counting: the discrete Lyapunov functional V and the
// regularity set R at grid resolution.

#include <cmath>
#include <cstddef>
#include <string>

#include "ddeu/errors.hpp"
#include "ddeu/segment.hpp"

namespace ddeu {

/// Even count in 2N, or OVERFLOW when the count is grid noise.
struct VValue {
    bool overflow = false;
    int value = 0;

    static VValue of(int v) { return VValue{false, v}; }
    static VValue infinite() { return VValue{true, 0}; }

    bool operator==(const VValue&) const = default;
    /// OVERFLOW compares above every finite value.
    bool operator<(const VValue& o) const {
        if (overflow) return false;
        if (o.overflow) return true;
        return value < o.value;
    }
    bool operator>(const VValue& o) const { return o < *this; }
    bool operator<=(const VValue& o) const { return !(o < *this); }
    bool operator>=(const VValue& o) const { return !(*this < o); }
};

inline std::string to_string(const VValue& v) { return v.overflow ? "OVERFLOW" : std::to_string(v.value); }

/// Relative zero threshold used when none is given.
inline double default_tol_zero(const Segment& phi) { return 1e-9 * sup_norm(phi); }

/// Sign changes between consecutive nodes that survive |value| > tol_zero.
/// A run of near-zero nodes is skipped as a whole.
inline int sign_changes(const Segment& phi, double tol_zero) {
    int count = 0;
    int last_sign = 0;
    for (double v : phi.values) {
        if (!(std::abs(v) > tol_zero)) continue;
        const int sg = v > 0.0 ? 1 : -1;
        if (last_sign != 0 && sg != last_sign) ++count;
        last_sign = sg;
    }
    if (last_sign == 0) throw Error(ErrorCode::ZeroSegment, "segment is numerically zero");
    return count;
}

inline int sign_changes(const Segment& phi) { return sign_changes(phi, default_tol_zero(phi)); }

inline VValue lyapunov_v(const Segment& phi, double tol_zero) {
    const int sc = sign_changes(phi, tol_zero);
    if (4 * sc > phi.n()) return VValue::infinite();
    return VValue::of(sc % 2 == 0 ? sc : sc + 1);
}

inline VValue lyapunov_v(const Segment& phi) { return lyapunov_v(phi, default_tol_zero(phi)); }

/// Membership in R: nonvanishing endpoints (or the one-sided conditions
/// when they vanish) and only simple zeros in between.
inline bool in_regular_set(const Segment& phi, double tol_zero, double tol_simple) {
    if (!phi.deriv) throw Error(ErrorCode::NoDerivative, "in_R needs node derivatives");
    const auto& v = phi.values;
    const auto& d = *phi.deriv;
    const std::size_t m = v.size() - 1;
    auto zero = [&](double x) { return !(std::abs(x) > tol_zero); };

    if (zero(v[m]) && !(d[m] * v[0] > 0.0)) return false;
    if (zero(v[0]) && !(d[0] * v[m] < 0.0)) return false;

    for (std::size_t i = 1; i < m; ++i) {
        if (zero(v[i]) && !(std::abs(d[i]) > tol_simple)) return false;
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (zero(v[i]) || zero(v[i + 1]) || (v[i] > 0.0) == (v[i + 1] > 0.0)) continue;
        const double th = v[i] / (v[i] - v[i + 1]);
        const double dz = (1.0 - th) * d[i] + th * d[i + 1];
        if (!(std::abs(dz) > tol_simple)) return false;
    }
    return true;
}

inline bool in_regular_set(const Segment& phi) {
    return in_regular_set(phi, default_tol_zero(phi), 1e-9);
}

}  // namespace ddeu
