#pragma once

// Linear variational equation v'(t) = -mu v(t) + f'(x(t-1)) v(t-1) along a
// stored base trajectory, the discretized monodromy operator, and its
// Floquet spectrum.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddeu/errors.hpp"
#include "ddeu/integrate.hpp"
#include "ddeu/model.hpp"
#include "ddeu/parallel.hpp"
#include "ddeu/segment.hpp"

namespace ddeu {

/// Solution of the variational equation, on the same lattice as its base.
/// This is the exact derivative of the discrete scheme, not a separate
/// discretization of the continuous linear equation.
class VariationalSolution {
public:
    VariationalSolution() = default;

    int n() const { return n_; }
    double t0() const { return t0_; }
    std::size_t size() const { return v_.size(); }
    double time(std::size_t i) const { return t0_ - 1.0 + static_cast<double>(i) / n_; }
    double end_time() const { return time(v_.size() - 1); }
    const std::vector<double>& samples() const { return v_; }

    bool has_deriv(std::size_t i) const { return i >= static_cast<std::size_t>(n_) || !init_deriv_.empty(); }

    double deriv(std::size_t i) const {
        const auto nn = static_cast<std::size_t>(n_);
        if (i >= nn) return -mu_ * v_[i] + a_[i - nn] * v_[i - nn];
        if (!init_deriv_.empty()) return init_deriv_[i];
        throw Error(ErrorCode::NoDerivative, "no derivative at initial node " + std::to_string(i));
    }

    Segment segment_at(double t) const {
        const double u = (t - (t0_ - 1.0)) * n_;
        const double r = std::round(u);
        if (std::abs(u - r) > 0.5 + 1e-9 || r < n_ || r > static_cast<double>(v_.size() - 1)) {
            throw Error(ErrorCode::OutOfRange, "variational segment_at t=" + std::to_string(t));
        }
        const auto j = static_cast<std::size_t>(r), nn = static_cast<std::size_t>(n_);
        Segment seg(std::vector<double>(v_.begin() + static_cast<std::ptrdiff_t>(j - nn),
                                        v_.begin() + static_cast<std::ptrdiff_t>(j + 1)));
        if (j >= 2 * nn || !init_deriv_.empty()) {
            std::vector<double> d(nn + 1);
            for (std::size_t i = 0; i <= nn; ++i) d[i] = deriv(j - nn + i);
            seg.deriv = std::move(d);
        }
        return seg;
    }

    double value_at(double t) const {
        const auto [j, th] = locate(t);
        if (!(has_deriv(j) && has_deriv(j + 1))) return (1.0 - th) * v_[j] + th * v_[j + 1];
        const HermiteWeights w(th, 1.0 / n_);
        return w.v00 * v_[j] + w.v10 * deriv(j) + w.v01 * v_[j + 1] + w.v11 * deriv(j + 1);
    }

    double deriv_at(double t) const {
        const auto [j, th] = locate(t);
        if (!(has_deriv(j) && has_deriv(j + 1))) return (v_[j + 1] - v_[j]) * n_;
        const HermiteWeights w(th, 1.0 / n_);
        return w.s00 * v_[j] + w.s10 * deriv(j) + w.s01 * v_[j + 1] + w.s11 * deriv(j + 1);
    }

    Segment segment_at_time(double t) const {
        std::vector<double> v(static_cast<std::size_t>(n_) + 1), d(v.size());
        for (int i = 0; i <= n_; ++i) {
            const double ti = t - 1.0 + static_cast<double>(i) / n_;
            v[static_cast<std::size_t>(i)] = value_at(ti);
            d[static_cast<std::size_t>(i)] = deriv_at(ti);
        }
        return Segment(std::move(v), std::move(d));
    }

private:
    friend VariationalSolution solve_variational(const Trajectory&, const Segment&, double);

    std::pair<std::size_t, double> locate(double t) const {
        const double u = (t - (t0_ - 1.0)) * n_;
        const double last = static_cast<double>(v_.size() - 1);
        if (!(u >= -1e-9) || !(u <= last + 1e-9)) {
            throw Error(ErrorCode::OutOfRange, "variational t=" + std::to_string(t));
        }
        auto j = static_cast<std::size_t>(std::max(0.0, std::floor(u)));
        if (j + 1 >= v_.size()) j = v_.size() - 2;
        return {j, u - static_cast<double>(j)};
    }

    int n_ = 0;
    double t0_ = 0.0;
    double mu_ = 1.0;
    std::vector<double> a_;  // f'(x_i) along the base
    std::vector<double> v_;
    std::vector<double> init_deriv_;
};

namespace detail {

inline std::size_t steps_for(double T, int n) {
    return static_cast<std::size_t>(std::ceil(T * n - 1e-9));
}

inline void require_cover(const Trajectory& base, double T) {
    if (base.steps() < steps_for(T, base.n())) {
        throw Error(ErrorCode::Range, "base trajectory ends at " + std::to_string(base.end_time()) +
                                          ", need " + std::to_string(base.t0() + T));
    }
}

inline std::vector<double> slopes_along(const Trajectory& base, std::size_t count) {
    std::vector<double> a(count);
    for (std::size_t i = 0; i < count; ++i) a[i] = eval_f_prime(base.nl(), base.x(i));
    return a;
}

}  // namespace detail

inline VariationalSolution solve_variational(const Trajectory& base, const Segment& eta, double T) {
    if (eta.n() != base.n()) {
        throw Error(ErrorCode::GridMismatch, "eta n=" + std::to_string(eta.n()) + " vs base n=" +
                                                 std::to_string(base.n()));
    }
    detail::require_cover(base, T);
    const int n = base.n();
    const auto nn = static_cast<std::size_t>(n);
    const std::size_t steps = detail::steps_for(T, n);
    const std::size_t total = nn + 1 + steps;

    VariationalSolution sol;
    sol.n_ = n;
    sol.t0_ = base.t0();
    sol.mu_ = base.nl().mu;
    sol.a_ = detail::slopes_along(base, total);
    if (eta.deriv && !eta.deriv_estimated) sol.init_deriv_ = *eta.deriv;
    const ExpTrapWeights w(base.nl().mu, 1.0 / n);
    auto& v = sol.v_;
    v.reserve(total);
    v.assign(eta.values.begin(), eta.values.end());
    const auto& a = sol.a_;
    for (std::size_t i = nn; i + 1 < total; ++i) {
        v.push_back(w.E * v[i] + w.w0 * a[i - nn] * v[i - nn] + w.w1 * a[i + 1 - nn] * v[i + 1 - nn]);
    }
    return sol;
}

/// Variational solutions for many initial segments at once: row i of the
/// block holds node i of every column solution.
class VariationalBlock {
public:
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    /// init: (n+1) x m matrix whose columns are the initial segments.
    VariationalBlock(const Trajectory& base, const Eigen::MatrixXd& init, double T, int jobs = 1)
        : n_(base.n()), t0_(base.t0()), mu_(base.nl().mu) {
        const auto nn = static_cast<std::size_t>(n_);
        if (static_cast<std::size_t>(init.rows()) != nn + 1) {
            throw Error(ErrorCode::GridMismatch, "initial block rows do not match n+1");
        }
        detail::require_cover(base, T);
        const std::size_t total = nn + 1 + detail::steps_for(T, n_);
        a_ = detail::slopes_along(base, total);
        const auto m = static_cast<std::size_t>(init.cols());
        V_.resize(static_cast<Eigen::Index>(total), init.cols());
        V_.topRows(init.rows()) = init;
        const ExpTrapWeights w(mu_, 1.0 / n_);
        const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), m);
        parallel_for(chunks, jobs, [&](std::size_t c) {
            const auto lo = static_cast<Eigen::Index>(m * c / chunks);
            const auto width = static_cast<Eigen::Index>(m * (c + 1) / chunks) - lo;
            for (std::size_t i = nn; i + 1 < total; ++i) {
                const auto r = static_cast<Eigen::Index>(i);
                const auto d = static_cast<Eigen::Index>(nn);
                V_.row(r + 1).segment(lo, width) = w.E * V_.row(r).segment(lo, width) +
                                                   (w.w0 * a_[i - nn]) * V_.row(r - d).segment(lo, width) +
                                                   (w.w1 * a_[i + 1 - nn]) * V_.row(r + 1 - d).segment(lo, width);
            }
        });
    }

    Eigen::Index cols() const { return V_.cols(); }
    const RowMat& nodes() const { return V_; }

    /// Row of values at time t, interpolated exactly as Trajectory::value_at.
    Eigen::RowVectorXd row_at(double t) const {
        const auto [j, th] = locate(t);
        const HermiteWeights w(th, 1.0 / n_);
        return w.v00 * V_.row(j) + w.v10 * deriv_row(j) + w.v01 * V_.row(j + 1) + w.v11 * deriv_row(j + 1);
    }

    /// Row of time derivatives at time t.
    Eigen::RowVectorXd slope_row_at(double t) const {
        const auto [j, th] = locate(t);
        const HermiteWeights w(th, 1.0 / n_);
        return w.s00 * V_.row(j) + w.s10 * deriv_row(j) + w.s01 * V_.row(j + 1) + w.s11 * deriv_row(j + 1);
    }

    /// (n+1) x m matrix: every column's segment at time t.
    Eigen::MatrixXd segments_at_time(double t) const {
        Eigen::MatrixXd out(n_ + 1, V_.cols());
        for (int i = 0; i <= n_; ++i) out.row(i) = row_at(t - 1.0 + static_cast<double>(i) / n_);
        return out;
    }

private:
    Eigen::RowVectorXd deriv_row(Eigen::Index j) const {
        return -mu_ * V_.row(j) + a_[static_cast<std::size_t>(j - n_)] * V_.row(j - n_);
    }

    std::pair<Eigen::Index, double> locate(double t) const {
        const double u = (t - (t0_ - 1.0)) * n_;
        const auto last = static_cast<double>(V_.rows() - 1);
        // Hermite rows need equation-defined derivatives, i.e. t >= t0
        if (!(u >= n_ - 1e-9) || !(u <= last + 1e-9)) {
            throw Error(ErrorCode::OutOfRange, "variational block t=" + std::to_string(t));
        }
        auto j = static_cast<Eigen::Index>(std::floor(u));
        j = std::clamp<Eigen::Index>(j, n_, V_.rows() - 2);
        return {j, u - static_cast<double>(j)};
    }

    int n_;
    double t0_;
    double mu_;
    std::vector<double> a_;
    RowMat V_;
};

struct MonodromyMatrix {
    Eigen::MatrixXd M;
    std::string orbit_label;
    double omega = 0.0;

    int dim() const { return static_cast<int>(M.rows()); }
    int n() const { return dim() - 1; }

    Segment apply(const Segment& eta) const {
        if (static_cast<int>(eta.size()) != dim()) throw Error(ErrorCode::GridMismatch, "monodromy apply");
        const Eigen::Map<const Eigen::VectorXd> x(eta.values.data(), dim());
        const Eigen::VectorXd y = M * x;
        return Segment(std::vector<double>(y.data(), y.data() + y.size()));
    }
};

/// Columns are variational solutions at time omega started from the nodal
/// hat functions; base must start at the periodic segment r0 and cover omega.
inline MonodromyMatrix monodromy_matrix(const Trajectory& base, double omega, std::string label = "", int jobs = 1) {
    const int dim = base.n() + 1;
    const VariationalBlock blk(base, Eigen::MatrixXd::Identity(dim, dim), omega + 2.0 / base.n(), jobs);
    MonodromyMatrix mm;
    mm.M = blk.segments_at_time(base.t0() + omega);
    mm.orbit_label = std::move(label);
    mm.omega = omega;
    return mm;
}

struct FloquetSpectrum {
    std::vector<std::complex<double>> multipliers;  // decreasing modulus
    std::vector<Segment> eigvec_re;                 // real part, sup norm 1
    std::vector<Segment> eigvec_im;                 // imaginary part (zeros if real)
    std::vector<double> residuals;                  // |Mv - lambda v| / (|M| |v|), inf norms
    int n_unstable = 0;
    int trivial_index = -1;
    double trivial_residual = 0.0;                  // |lambda_trivial - 1|
    std::vector<int> nonhyperbolic;                 // other indices with ||lambda|-1| <= tol_band
    double tol_band = 1e-2;

    bool is_real(std::size_t i) const { return multipliers.at(i).imag() == 0.0; }
    std::complex<double> trivial() const { return multipliers.at(static_cast<std::size_t>(trivial_index)); }

    /// Indices of the unstable multipliers in decreasing modulus.
    std::vector<int> unstable_indices() const {
        std::vector<int> out;
        for (std::size_t i = 0; i < multipliers.size(); ++i) {
            if (std::abs(multipliers[i]) > 1.0 + tol_band && static_cast<int>(i) != trivial_index) {
                out.push_back(static_cast<int>(i));
            }
        }
        return out;
    }
};

inline FloquetSpectrum floquet_spectrum(const MonodromyMatrix& mm, double tol_band = 1e-2, double imag_tol = 1e-10) {
    const Eigen::MatrixXd& M = mm.M;
    if (!M.allFinite()) throw Error(ErrorCode::EigFail, "monodromy matrix has non-finite entries");
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigFail, "eigensolver did not converge");
    const Eigen::VectorXcd lam = es.eigenvalues();
    const Eigen::MatrixXcd vec = es.eigenvectors();
    const auto dim = lam.size();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        const double ai = std::abs(lam[i]), aj = std::abs(lam[j]);
        if (ai != aj) return ai > aj;
        if (lam[i].real() != lam[j].real()) return lam[i].real() > lam[j].real();
        return lam[i].imag() > lam[j].imag();
    });

    FloquetSpectrum fs;
    fs.tol_band = tol_band;
    const double mrow = std::max(M.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
    for (Eigen::Index k : order) {
        std::complex<double> l = lam[k];
        Eigen::VectorXcd v = vec.col(k);
        if (!v.allFinite() || !std::isfinite(l.real()) || !std::isfinite(l.imag())) {
            throw Error(ErrorCode::EigFail, "non-finite eigenpair");
        }
        const double resid = (M * v - l * v).lpNorm<Eigen::Infinity>() / (mrow * v.lpNorm<Eigen::Infinity>());
        if (std::abs(l.imag()) <= imag_tol) {
            l = {l.real(), 0.0};
            // rotate to a real vector: divide by the phase of the largest entry
            Eigen::Index im = 0;
            v.cwiseAbs().maxCoeff(&im);
            v /= v[im] / std::abs(v[im]);
            Eigen::VectorXd re = v.real();
            re /= re.lpNorm<Eigen::Infinity>();
            if (re.sum() < 0.0) re = -re;
            fs.eigvec_re.emplace_back(std::vector<double>(re.data(), re.data() + re.size()));
            fs.eigvec_im.emplace_back(std::vector<double>(static_cast<std::size_t>(re.size()), 0.0));
        } else {
            v /= v.lpNorm<Eigen::Infinity>();
            Eigen::VectorXd re = v.real(), imv = v.imag();
            fs.eigvec_re.emplace_back(std::vector<double>(re.data(), re.data() + re.size()));
            fs.eigvec_im.emplace_back(std::vector<double>(imv.data(), imv.data() + imv.size()));
        }
        fs.multipliers.push_back(l);
        fs.residuals.push_back(resid);
    }

    double best = 1e300;
    for (std::size_t i = 0; i < fs.multipliers.size(); ++i) {
        const double d = std::abs(fs.multipliers[i] - 1.0);
        if (d < best) {
            best = d;
            fs.trivial_index = static_cast<int>(i);
        }
    }
    fs.trivial_residual = best;
    for (std::size_t i = 0; i < fs.multipliers.size(); ++i) {
        const double m = std::abs(fs.multipliers[i]);
        if (static_cast<int>(i) == fs.trivial_index) continue;
        if (m > 1.0 + tol_band) ++fs.n_unstable;
        else if (m >= 1.0 - tol_band) fs.nonhyperbolic.push_back(static_cast<int>(i));
    }
    return fs;
}

/// Left eigenvector u (u^T M = lambda u^T) for a real simple multiplier,
/// by inverse iteration on M^T with a slightly offset shift.
inline Eigen::VectorXd left_eigenvector(const Eigen::MatrixXd& M, double lambda) {
    const auto dim = M.rows();
    const double shift = lambda + 1e-10 * (1.0 + std::abs(lambda));
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M.transpose() - shift * Eigen::MatrixXd::Identity(dim, dim));
    Eigen::VectorXd u = Eigen::VectorXd::Ones(dim);
    for (int it = 0; it < 3; ++it) {
        u = lu.solve(u);
        const double s = u.lpNorm<Eigen::Infinity>();
        if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::EigFail, "left eigenvector iteration broke down");
        u /= s;
    }
    const double resid = (M.transpose() * u - lambda * u).lpNorm<Eigen::Infinity>();
    if (!(resid <= 1e-6 * std::max(1.0, M.cwiseAbs().rowwise().sum().maxCoeff()))) {
        throw Error(ErrorCode::EigFail, "left eigenvector residual " + std::to_string(resid));
    }
    return u;
}

}  // namespace ddeu
