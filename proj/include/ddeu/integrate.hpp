#pragma once

// Method-of-steps integration of x'(t) = -mu x(t) + f(x(t-1)) on a grid
// with h = 1/n, so the delayed argument always sits on a stored node.

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ddeu/errors.hpp"
#include "ddeu/model.hpp"
#include "ddeu/segment.hpp"

namespace ddeu {

/// Exponential trapezoid weights for one step of length h:
///   x_{i+1} = E x_i + w0 F_{i-n} + w1 F_{i+1-n}.
/// w0, w1 integrate e^{-mu (t_{i+1}-s)} against the linear interpolant of F,
/// so w0 + w1 = (1 - E)/mu holds to rounding.
struct ExpTrapWeights {
    double E = 1.0;
    double w0 = 0.0;
    double w1 = 0.0;

    ExpTrapWeights() = default;
    ExpTrapWeights(double mu, double h) {
        const double z = mu * h;
        const double one_minus_E = -std::expm1(-z);
        E = 1.0 - one_minus_E;
        const double r = one_minus_E / z;
        w1 = (1.0 - r) / mu;
        w0 = (r - E) / mu;
    }
};

/// Cubic Hermite basis on one step, for the value and for d/dt.
struct HermiteWeights {
    double v00, v10, v01, v11;  // x0, h*d0, x1, h*d1
    double s00, s10, s01, s11;  // x0, d0, x1, d1 (time derivative)

    HermiteWeights(double th, double h) {
        const double th2 = th * th, th3 = th2 * th;
        v00 = 2 * th3 - 3 * th2 + 1;
        v10 = (th3 - 2 * th2 + th) * h;
        v01 = -2 * th3 + 3 * th2;
        v11 = (th3 - th2) * h;
        s00 = (6 * th2 - 6 * th) / h;
        s10 = 3 * th2 - 4 * th + 1;
        s01 = (-6 * th2 + 6 * th) / h;
        s11 = 3 * th2 - 2 * th;
    }
};

/// Node history x_i at t_i = t0 - 1 + i h. Indices 0..n are the initial
/// segment on [t0-1, t0]; later nodes come from the scheme.
class Trajectory {
public:
    Trajectory() = default;

    Trajectory(const Nonlinearity& nl, const Segment& phi, double t0 = 0.0)
        : nl_(nl), t0_(t0), n_(phi.n()), w_(nl.mu, 1.0 / phi.n()), x_(phi.values) {
        if (n_ < 1) throw Error(ErrorCode::InvalidParameter, "segment needs n >= 1");
        F_.reserve(x_.size());
        for (double v : x_) F_.push_back(eval_f(nl_, v));
        if (phi.deriv && !phi.deriv_estimated) init_deriv_ = *phi.deriv;
        check_finite(0);
    }

    const Nonlinearity& nl() const { return nl_; }
    int n() const { return n_; }
    double h() const { return 1.0 / n_; }
    double t0() const { return t0_; }
    std::size_t size() const { return x_.size(); }
    /// Number of integration steps taken past t0.
    std::size_t steps() const { return x_.size() - static_cast<std::size_t>(n_) - 1; }
    double time(std::size_t i) const { return t0_ - 1.0 + static_cast<double>(i) / n_; }
    double end_time() const { return time(x_.size() - 1); }

    const std::vector<double>& samples() const { return x_; }
    double x(std::size_t i) const { return x_[i]; }
    double F(std::size_t i) const { return F_[i]; }

    /// Whether the node derivative at index i is defined by the equation
    /// (or supplied exactly with the initial segment).
    bool has_deriv(std::size_t i) const {
        return i >= static_cast<std::size_t>(n_) || !init_deriv_.empty();
    }

    double deriv(std::size_t i) const {
        const auto nn = static_cast<std::size_t>(n_);
        if (i >= nn) return -nl_.mu * x_[i] + F_[i - nn];
        if (!init_deriv_.empty()) return init_deriv_[i];
        throw Error(ErrorCode::NoDerivative, "no derivative at initial node " + std::to_string(i));
    }

    /// Advances by `steps` more nodes.
    void advance(std::size_t steps) {
        const auto nn = static_cast<std::size_t>(n_);
        const std::size_t first = x_.size();
        x_.reserve(x_.size() + steps);
        F_.reserve(F_.size() + steps);
        for (std::size_t k = 0; k < steps; ++k) {
            const std::size_t i = x_.size() - 1;
            const double next = w_.E * x_[i] + w_.w0 * F_[i - nn] + w_.w1 * F_[i + 1 - nn];
            x_.push_back(next);
            F_.push_back(eval_f(nl_, next));
        }
        check_finite(first);
    }

    /// Integrates until end_time() >= t (rounded up to the node lattice).
    void extend_to(double t) {
        const double need = (t - end_time()) * n_;
        if (need > 0.0) advance(static_cast<std::size_t>(std::ceil(need - 1e-9)));
    }

    /// Node index of time t; throws OUT_OF_RANGE beyond the history or
    /// when t is more than h/2 off the lattice.
    std::size_t index_of(double t) const {
        const double u = (t - (t0_ - 1.0)) * n_;
        const double r = std::round(u);
        if (std::abs(u - r) > 0.5 + 1e-9 || r < 0.0 || r > static_cast<double>(x_.size() - 1)) {
            throw Error(ErrorCode::OutOfRange, "t=" + std::to_string(t) + " outside [" +
                                                   std::to_string(time(0)) + ", " +
                                                   std::to_string(end_time()) + "]");
        }
        return static_cast<std::size_t>(r);
    }

    /// Segment whose last node is index j (j >= n).
    Segment segment_ending_at(std::size_t j) const {
        const auto nn = static_cast<std::size_t>(n_);
        if (j < nn || j >= x_.size()) {
            throw Error(ErrorCode::OutOfRange, "segment end index " + std::to_string(j));
        }
        Segment seg(std::vector<double>(x_.begin() + static_cast<std::ptrdiff_t>(j - nn),
                                        x_.begin() + static_cast<std::ptrdiff_t>(j + 1)));
        bool exact = true;
        for (std::size_t i = j - nn; i <= j; ++i) exact = exact && has_deriv(i);
        if (exact) {
            std::vector<double> d(nn + 1);
            for (std::size_t i = 0; i <= nn; ++i) d[i] = deriv(j - nn + i);
            seg.deriv = std::move(d);
        } else {
            std::vector<double> d(nn + 1);
            for (std::size_t i = 0; i <= nn; ++i) {
                const std::size_t k = j - nn + i;
                d[i] = has_deriv(k) ? deriv(k) : fd_deriv(k);
            }
            seg.deriv = std::move(d);
            seg.deriv_estimated = true;
        }
        return seg;
    }

    /// x_t for a lattice time t (snapped to the nearest node).
    Segment segment_at(double t) const {
        const std::size_t j = index_of(t);
        if (j < static_cast<std::size_t>(n_)) {
            throw Error(ErrorCode::OutOfRange, "segment_at before t0");
        }
        return segment_ending_at(j);
    }

    /// x(t) at any t in the history. Cubic Hermite on intervals whose two
    /// node derivatives are known, linear otherwise.
    double value_at(double t) const {
        const auto [j, th] = locate(t);
        const double x0 = x_[j], x1 = x_[j + 1];
        if (!(has_deriv(j) && has_deriv(j + 1))) return (1.0 - th) * x0 + th * x1;
        const HermiteWeights w(th, h());
        return w.v00 * x0 + w.v10 * deriv(j) + w.v01 * x1 + w.v11 * deriv(j + 1);
    }

    /// Time derivative of the interpolant used by value_at.
    double deriv_at(double t) const {
        const auto [j, th] = locate(t);
        const double x0 = x_[j], x1 = x_[j + 1];
        if (!(has_deriv(j) && has_deriv(j + 1))) return (x1 - x0) * n_;
        const HermiteWeights w(th, h());
        return w.s00 * x0 + w.s10 * deriv(j) + w.s01 * x1 + w.s11 * deriv(j + 1);
    }

    /// x_t for an arbitrary t >= t0 by interpolation at t + s_i. The
    /// derivative carried is that of the interpolant.
    Segment segment_at_time(double t) const {
        std::vector<double> v(static_cast<std::size_t>(n_) + 1), d(v.size());
        for (int i = 0; i <= n_; ++i) {
            const double ti = t - 1.0 + static_cast<double>(i) / n_;
            v[static_cast<std::size_t>(i)] = value_at(ti);
            d[static_cast<std::size_t>(i)] = deriv_at(ti);
        }
        return Segment(std::move(v), std::move(d));
    }

    /// Interval index and local coordinate of t; exposed for the
    /// variational interpolation that must mirror value_at.
    std::pair<std::size_t, double> locate(double t) const {
        const double u = (t - (t0_ - 1.0)) * n_;
        const double last = static_cast<double>(x_.size() - 1);
        if (!(u >= -1e-9) || !(u <= last + 1e-9)) {
            throw Error(ErrorCode::OutOfRange, "t=" + std::to_string(t) + " outside [" +
                                                   std::to_string(time(0)) + ", " +
                                                   std::to_string(end_time()) + "]");
        }
        auto j = static_cast<std::size_t>(std::max(0.0, std::floor(u)));
        if (j + 1 >= x_.size()) j = x_.size() - 2;
        return {j, u - static_cast<double>(j)};
    }

    /// Drops the oldest `drop` nodes so memory stays bounded on long runs.
    /// Absolute times are preserved by shifting t0; derivatives of the new
    /// initial block are kept exactly.
    void discard_front(std::size_t drop) {
        const auto nn = static_cast<std::size_t>(n_);
        drop = std::min(drop, x_.size() - nn - 1);
        if (drop == 0) return;
        std::vector<double> head(nn + 1, std::numeric_limits<double>::quiet_NaN());
        bool exact = true;
        for (std::size_t i = 0; i <= nn; ++i) {
            if (has_deriv(drop + i)) head[i] = deriv(drop + i);
            else exact = false;
        }
        x_.erase(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(drop));
        F_.erase(F_.begin(), F_.begin() + static_cast<std::ptrdiff_t>(drop));
        t0_ += static_cast<double>(drop) / n_;
        init_deriv_ = exact ? std::move(head) : std::vector<double>{};
    }

private:
    double fd_deriv(std::size_t k) const {
        const std::size_t lo = k == 0 ? 0 : k - 1;
        const std::size_t hi = std::min(k + 1, x_.size() - 1);
        return (x_[hi] - x_[lo]) / (static_cast<double>(hi - lo) * h());
    }

    void check_finite(std::size_t from) const {
        for (std::size_t i = from; i < x_.size(); ++i) {
            if (!std::isfinite(x_[i])) {
                throw Error(ErrorCode::NonFinite, "sample " + std::to_string(i) + " is not finite");
            }
        }
    }

    Nonlinearity nl_{};
    double t0_ = 0.0;
    int n_ = 0;
    ExpTrapWeights w_{};
    std::vector<double> x_;
    std::vector<double> F_;
    std::vector<double> init_deriv_;
};

/// Integrates from phi over [0, T]; T is rounded up to the lattice.
inline Trajectory integrate(const Nonlinearity& nl, const Segment& phi, double T, double t0 = 0.0) {
    if (!(T >= 0.0)) throw Error(ErrorCode::InvalidParameter, "integration horizon must be >= 0");
    Trajectory traj(nl, phi, t0);
    traj.extend_to(t0 + T);
    return traj;
}

inline Trajectory& extend(Trajectory& traj, double T_more) {
    traj.extend_to(traj.end_time() + T_more);
    return traj;
}

inline Segment segment_at(const Trajectory& traj, double t) { return traj.segment_at(t); }

}  // namespace ddeu
