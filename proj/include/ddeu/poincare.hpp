#pragma once

// Periodic orbits by Newton shooting, Poincare sections transverse to them,
// return maps with their derivatives, and the linear unstable fan of an
// orbit with two unstable multipliers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddeu/errors.hpp"
#include "ddeu/integrate.hpp"
#include "ddeu/model.hpp"
#include "ddeu/parallel.hpp"
#include "ddeu/segment.hpp"
#include "ddeu/variational.hpp"

namespace ddeu {

enum class OrbitLabel { P, Q, X1, X_MINUS1, OTHER };

inline std::string to_string(OrbitLabel l) {
    switch (l) {
        case OrbitLabel::P: return "P";
        case OrbitLabel::Q: return "Q";
        case OrbitLabel::X1: return "X1";
        case OrbitLabel::X_MINUS1: return "X_MINUS1";
        case OrbitLabel::OTHER: return "OTHER";
    }
    return "OTHER";
}

inline OrbitLabel orbit_label_from_string(const std::string& s) {
    if (s == "P") return OrbitLabel::P;
    if (s == "Q") return OrbitLabel::Q;
    if (s == "X1") return OrbitLabel::X1;
    if (s == "X_MINUS1") return OrbitLabel::X_MINUS1;
    if (s == "OTHER") return OrbitLabel::OTHER;
    throw Error(ErrorCode::InvalidConfig, "unknown orbit label '" + s + "'");
}

struct PeriodicOrbit {
    OrbitLabel label = OrbitLabel::OTHER;
    Nonlinearity nl{};
    double omega = 0.0;
    double anchor = 0.0;
    Segment r0;                             // r on [-1, 0], r(-1) = anchor, rising
    double residual = 0.0;                  // sup |Phi(omega, r0) - r0|
    std::vector<double> newton_residuals;   // final-resolution history
    int newton_steps = 0;
    std::optional<FloquetSpectrum> spectrum;

    int n() const { return r0.n(); }

    /// Trajectory from r0 covering [-1, periods*omega + extra].
    Trajectory trajectory(double periods = 1.0, double extra = 0.0) const {
        return integrate(nl, r0, periods * omega + extra + 2.0 / n());
    }

    /// One period plus the preceding unit interval: nodes on [-1, omega].
    std::vector<double> samples() const {
        const Trajectory tr = trajectory();
        const std::size_t last = tr.index_of(std::floor(omega * n()) / n());
        return {tr.samples().begin(), tr.samples().begin() + static_cast<std::ptrdiff_t>(last + 1)};
    }

    /// Sampled derivative segment r'_0, taken at t = omega by periodicity so
    /// that every node derivative comes from the equation.
    Segment r_dot0() const {
        const Trajectory tr = trajectory();
        Segment seg = tr.segment_at_time(omega);
        return Segment(*seg.deriv);
    }

    /// r_t for any t (taken modulo omega).
    Segment phase(double t) const {
        const double tm = t - omega * std::floor(t / omega);
        return trajectory(2.0).segment_at_time(tm + omega);
    }

    double min_value() const {
        const auto s = samples();
        return *std::min_element(s.begin(), s.end());
    }
    double max_value() const {
        const auto s = samples();
        return *std::max_element(s.begin(), s.end());
    }
};

struct NewtonOptions {
    int n_newton = 128;       // coarse resolution for the first solve
    int max_iter = 30;
    double tol = 1e-9;        // convergence on sup-norm residual
    double tol_stop = 1e-12;  // keep iterating below tol down to this
    double minimal_tol = 1e-4;
    int jobs = 1;
};

namespace detail {

struct NewtonResult {
    Segment phi;
    double omega;
    std::vector<double> residuals;
    int steps;
};

inline NewtonResult newton_shoot(const Nonlinearity& nl, Segment phi, double omega, double anchor,
                                 const NewtonOptions& opt) {
    const int n = phi.n();
    const int dim = n + 2;
    NewtonResult out{std::move(phi), omega, {}, 0};
    for (int it = 0; it <= opt.max_iter; ++it) {
        if (!(out.omega > 2.0 / n) || !std::isfinite(out.omega) || out.omega > 50.0) {
            throw Error(ErrorCode::NoConvergence, "period left the admissible range: " + std::to_string(out.omega));
        }
        const double T = out.omega + 3.0 / n;
        const Trajectory tr = integrate(nl, out.phi, T);
        const VariationalBlock blk(tr, Eigen::MatrixXd::Identity(n + 1, n + 1), T, opt.jobs);
        Eigen::VectorXd R(dim);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
        for (int i = 0; i <= n; ++i) {
            const double t = out.omega - 1.0 + static_cast<double>(i) / n;
            R[i] = tr.value_at(t) - out.phi.values[static_cast<std::size_t>(i)];
            J.row(i).head(n + 1) = blk.row_at(t);
            J(i, i) -= 1.0;
            J(i, n + 1) = tr.deriv_at(t);
        }
        R[n + 1] = out.phi.values[0] - anchor;
        J(n + 1, 0) = 1.0;
        const double res = R.lpNorm<Eigen::Infinity>();
        out.residuals.push_back(res);
        if (!std::isfinite(res)) throw Error(ErrorCode::NoConvergence, "residual is not finite");
        const std::size_t k = out.residuals.size();
        if (res <= opt.tol_stop) return out;
        if (res <= opt.tol && k >= 2 && res > 0.25 * out.residuals[k - 2]) return out;
        if (it == opt.max_iter) break;
        const Eigen::VectorXd dz = J.partialPivLu().solve(-R);
        for (int i = 0; i <= n; ++i) out.phi.values[static_cast<std::size_t>(i)] += dz[i];
        out.omega += dz[n + 1];
        out.phi.deriv.reset();
        ++out.steps;
    }
    if (out.residuals.back() <= opt.tol) return out;
    throw Error(ErrorCode::NoConvergence, "residual " + std::to_string(out.residuals.back()) + " after " +
                                              std::to_string(opt.max_iter) + " Newton steps");
}

/// Resamples a periodic solution of resolution n_from at resolution n_to by
/// interpolating its trajectory over the last unit interval of a period.
inline Segment resample_periodic(const Nonlinearity& nl, const Segment& phi, double omega, int n_to) {
    const Trajectory tr = integrate(nl, phi, omega + 2.0 / phi.n());
    return Segment::from_function(n_to, [&](double s) { return tr.value_at(omega + s); });
}

/// First upward crossings of `level` along a trajectory, by linear
/// interpolation between nodes; times at which x(t) = level.
inline std::vector<double> upward_crossings(const Trajectory& tr, double level, std::size_t from = 0) {
    std::vector<double> out;
    for (std::size_t i = std::max<std::size_t>(from, 1); i < tr.size(); ++i) {
        const double a = tr.x(i - 1) - level, b = tr.x(i) - level;
        if (a < 0.0 && b >= 0.0) out.push_back(tr.time(i - 1) + (a / (a - b)) / tr.n());
    }
    return out;
}

}  // namespace detail

/// Estimates a period from successive upward crossings of `anchor` along a
/// long run started at the seed.
inline double estimate_period(const Nonlinearity& nl, const Segment& seed, double anchor, double T = 20.0) {
    const Trajectory tr = integrate(nl, seed, T);
    const auto cr = detail::upward_crossings(tr, anchor, static_cast<std::size_t>(seed.n()));
    if (cr.size() < 2) throw Error(ErrorCode::NoConvergence, "seed does not oscillate around the anchor");
    return cr[cr.size() - 1] - cr[cr.size() - 2];
}

/// Newton shooting for (phi, omega) with Phi(omega, phi) = phi and
/// phi(-1) = anchor, first at opt.n_newton and then at the seed's
/// resolution. A rising crossing at -1 and minimality of omega are checked.
inline PeriodicOrbit find_periodic_orbit(const Nonlinearity& nl, const Segment& seed, double anchor,
                                         std::optional<double> omega_guess = std::nullopt,
                                         OrbitLabel label = OrbitLabel::OTHER, const NewtonOptions& opt = {}) {
    const int n = seed.n();
    const double omega0 = omega_guess ? *omega_guess : estimate_period(nl, seed, anchor);

    detail::NewtonResult coarse{seed, omega0, {}, 0};
    if (opt.n_newton > 0 && opt.n_newton != n) {
        coarse = detail::newton_shoot(nl, resample_linear(seed, opt.n_newton), omega0, anchor, opt);
        coarse.phi = detail::resample_periodic(nl, coarse.phi, coarse.omega, n);
        coarse.phi.values[0] = anchor;
    }
    detail::NewtonResult fine = detail::newton_shoot(nl, coarse.phi, coarse.omega, anchor, opt);

    PeriodicOrbit orb;
    orb.label = label;
    orb.nl = nl;
    orb.omega = fine.omega;
    orb.anchor = anchor;
    orb.newton_residuals = fine.residuals;
    orb.newton_steps = fine.steps;

    const Trajectory tr = integrate(nl, fine.phi, 2.0 * fine.omega + 3.0 / n);
    // exact node derivatives of r0 from one period later
    orb.r0 = tr.segment_at_time(fine.omega);
    orb.r0.values = fine.phi.values;
    double res = 0.0;
    for (int i = 0; i <= n; ++i) {
        res = std::max(res, std::abs(tr.value_at(fine.omega - 1.0 + static_cast<double>(i) / n) -
                                     fine.phi.values[static_cast<std::size_t>(i)]));
    }
    orb.residual = res;
    if (!((*orb.r0.deriv)[0] > 0.0)) {
        throw Error(ErrorCode::NoConvergence, "orbit does not rise through the anchor at s=-1");
    }
    for (int m : {2, 3}) {
        double d = 0.0;
        for (int i = 0; i <= n; ++i) {
            d = std::max(d, std::abs(tr.value_at(fine.omega / m - 1.0 + static_cast<double>(i) / n) -
                                     fine.phi.values[static_cast<std::size_t>(i)]));
        }
        if (d <= opt.minimal_tol * std::max(1.0, sup_norm(fine.phi))) {
            throw Error(ErrorCode::NotMinimal, "omega/" + std::to_string(m) + " is also a period");
        }
    }
    return orb;
}

inline MonodromyMatrix monodromy_matrix(const PeriodicOrbit& orb, int jobs = 1) {
    const Trajectory tr = orb.trajectory(1.0, 3.0 / orb.n());
    return monodromy_matrix(tr, orb.omega, to_string(orb.label), jobs);
}

/// Linear functional e*(phi) = sum_i w_i phi(s_i) with Y = null(e*).
struct SectionSpec {
    Nonlinearity nl{};
    Segment base;                 // r0
    std::vector<double> weights;  // left eigenvector at the trivial multiplier
    double omega_ref = 0.0;
    double window = 0.3;

    double pair(const Segment& phi) const {
        require_same_grid(base, phi, "e*");
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * phi.values[i];
        return acc;
    }
    double pair(const std::vector<double>& v) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * v[i];
        return acc;
    }
    /// Scale for "e*(eta) = 0" checks.
    double pair_abs(const Segment& phi) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) acc += std::abs(weights[i] * phi.values[i]);
        return acc;
    }
    /// Projection of zeta onto Y along r'_0.
    Segment project_to_Y(const Segment& zeta, const Segment& r_dot0) const {
        return lincomb(1.0, zeta, -pair(zeta) / pair(r_dot0), r_dot0);
    }
};

/// The left eigenvector u of M at the trivial multiplier, scaled so that
/// u . r'_0 = 1. Against right eigenvectors of other multipliers it pairs to
/// zero, which is the quadrature-weighted orthogonality of the continuous
/// problem carried to node values.
inline SectionSpec build_section(const PeriodicOrbit& orb, const MonodromyMatrix& mm) {
    const FloquetSpectrum fs = orb.spectrum ? *orb.spectrum : floquet_spectrum(mm);
    const std::complex<double> lam = fs.trivial();
    if (lam.imag() != 0.0) throw Error(ErrorCode::EigFail, "trivial multiplier is not real");
    const Eigen::VectorXd u = left_eigenvector(mm.M, lam.real());
    const Segment rd = orb.r_dot0();
    double dot = 0.0;
    for (std::size_t i = 0; i < rd.size(); ++i) dot += u[static_cast<Eigen::Index>(i)] * rd.values[i];
    if (!(std::abs(dot) > 1e-14)) throw Error(ErrorCode::EigFail, "left eigenvector is orthogonal to r'_0");
    SectionSpec sec;
    sec.nl = orb.nl;
    sec.base = orb.r0;
    sec.omega_ref = orb.omega;
    sec.weights.resize(rd.size());
    for (std::size_t i = 0; i < rd.size(); ++i) sec.weights[i] = u[static_cast<Eigen::Index>(i)] / dot;
    return sec;
}

struct ReturnResult {
    double gamma = 0.0;
    Segment image;        // x_gamma
    Trajectory traj;      // from phi over [0, gamma + margin]
    double g_slope = 0.0; // d/dt e*(x_t - r0) at gamma
};

namespace detail {

inline double section_g(const SectionSpec& sec, const Trajectory& tr, double t) {
    const int n = tr.n();
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        acc += sec.weights[static_cast<std::size_t>(i)] *
               (tr.value_at(t - 1.0 + static_cast<double>(i) / n) - sec.base.values[static_cast<std::size_t>(i)]);
    }
    return acc;
}

inline double section_g_dot(const SectionSpec& sec, const Trajectory& tr, double t) {
    const int n = tr.n();
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        acc += sec.weights[static_cast<std::size_t>(i)] * tr.deriv_at(t - 1.0 + static_cast<double>(i) / n);
    }
    return acc;
}

}  // namespace detail

/// First return to r0 + Y: the rising zero of g(t) = e*(x_t - r0) closest
/// to omega within the window, refined by the Illinois method.
inline ReturnResult return_to_section(const SectionSpec& sec, const Segment& phi) {
    require_same_grid(sec.base, phi, "return_time");
    const int n = phi.n();
    const double lo_t = std::max(sec.omega_ref - sec.window, 0.0);
    const double hi_t = sec.omega_ref + sec.window;
    ReturnResult rr;
    rr.traj = integrate(sec.nl, phi, hi_t + 2.0 / n);
    const Trajectory& tr = rr.traj;

    auto g_node = [&](std::size_t j) {
        double acc = 0.0;
        const auto nn = static_cast<std::size_t>(n);
        for (std::size_t i = 0; i <= nn; ++i) acc += sec.weights[i] * (tr.x(j - nn + i) - sec.base.values[i]);
        return acc;
    };
    const auto j_lo = static_cast<std::size_t>(std::ceil((lo_t + 1.0) * n - 1e-9));
    const auto j_hi = static_cast<std::size_t>(std::floor((hi_t + 1.0) * n + 1e-9));
    double best_dist = 1e300;
    double ta = 0.0, tb = 0.0, ga = 0.0, gb = 0.0;
    bool found = false;
    double g_prev = g_node(j_lo);
    for (std::size_t j = j_lo + 1; j <= j_hi; ++j) {
        const double g = g_node(j);
        if (g_prev < 0.0 && g >= 0.0) {
            const double t_est = tr.time(j - 1) + (g_prev / (g_prev - g)) / n;
            if (std::abs(t_est - sec.omega_ref) < best_dist) {
                best_dist = std::abs(t_est - sec.omega_ref);
                ta = tr.time(j - 1);
                tb = tr.time(j);
                ga = g_prev;
                gb = g;
                found = true;
            }
        }
        g_prev = g;
    }
    if (!found) throw Error(ErrorCode::NoCrossing, "no rising section crossing in the return window");

    // Illinois regula falsi on the Hermite interpolant
    double t = tb;
    double side = 0;
    for (int it = 0; it < 200; ++it) {
        if (gb == 0.0) {
            t = tb;
            break;
        }
        t = (ta * gb - tb * ga) / (gb - ga);
        const double g = detail::section_g(sec, tr, t);
        if (std::abs(g) <= 1e-15 || tb - ta <= 1e-15) break;
        if ((g < 0.0) == (ga < 0.0)) {
            ta = t;
            ga = g;
            if (side == -1) gb *= 0.5;
            side = -1;
        } else {
            tb = t;
            gb = g;
            if (side == 1) ga *= 0.5;
            side = 1;
        }
    }
    rr.gamma = t;
    rr.g_slope = detail::section_g_dot(sec, tr, t);
    if (!(std::abs(rr.g_slope) > 1e-8)) throw Error(ErrorCode::TangentCrossing, "section crossing is tangential");
    rr.image = tr.segment_at_time(t);
    return rr;
}

inline double return_time(const SectionSpec& sec, const Segment& phi) { return return_to_section(sec, phi).gamma; }

inline Segment return_map(const SectionSpec& sec, const Segment& phi) { return return_to_section(sec, phi).image; }

/// DP_Y(phi) eta = D2 Phi eta - [e*(D2 Phi eta) / e*(D1 Phi 1)] D1 Phi 1,
/// both evaluated at (gamma(phi), phi).
inline Segment dP(const SectionSpec& sec, const Segment& phi, const Segment& eta) {
    require_same_grid(sec.base, eta, "dP");
    const double e = sec.pair(eta);
    if (std::abs(e) > 1e-10 * std::max(1.0, sec.pair_abs(eta))) {
        throw Error(ErrorCode::EtaNotInY, "e*(eta) = " + std::to_string(e));
    }
    const ReturnResult rr = return_to_section(sec, phi);
    const VariationalSolution var = solve_variational(rr.traj, eta, rr.traj.end_time() - rr.traj.t0());
    const Segment d2 = var.segment_at_time(rr.gamma);
    const Segment d1(*rr.image.deriv);
    const double coef = sec.pair(d2) / sec.pair(d1);
    Segment out = lincomb(1.0, Segment(d2.values), -coef, d1);
    return out;
}

struct FanSeed {
    double c1 = 0.0;
    double c2 = 0.0;
    Segment seed;
};

/// p0 + c1 v1 + c2 v2 over the m x m grid of [-delta, delta]^2 clipped to the
/// disk |c| <= delta, row-major in (c2, c1). v1, v2 are the real unstable
/// eigenvectors in decreasing multiplier order, sup-normalized.
inline std::vector<FanSeed> local_unstable_fan(const PeriodicOrbit& orb, double delta, int m) {
    if (!orb.spectrum) throw Error(ErrorCode::WrongUnstableCount, "orbit has no spectrum");
    const auto& fs = *orb.spectrum;
    const auto idx = fs.unstable_indices();
    if (idx.size() != 2 || !fs.is_real(static_cast<std::size_t>(idx[0])) ||
        !fs.is_real(static_cast<std::size_t>(idx[1]))) {
        throw Error(ErrorCode::WrongUnstableCount,
                    "expected two real unstable multipliers, found " + std::to_string(idx.size()));
    }
    const Segment& v1 = fs.eigvec_re[static_cast<std::size_t>(idx[0])];
    const Segment& v2 = fs.eigvec_re[static_cast<std::size_t>(idx[1])];
    std::vector<FanSeed> out;
    const double step = m > 1 ? 2.0 * delta / (m - 1) : 0.0;
    for (int b = 0; b < m; ++b) {
        for (int a = 0; a < m; ++a) {
            const double c1 = m > 1 ? -delta + a * step : 0.0;
            const double c2 = m > 1 ? -delta + b * step : 0.0;
            if (c1 * c1 + c2 * c2 > delta * delta * (1.0 + 1e-12)) continue;
            Segment s = lincomb(1.0, Segment(orb.r0.values), c1, v1);
            s = lincomb(1.0, s, c2, v2);
            out.push_back({c1, c2, std::move(s)});
        }
    }
    return out;
}

/// Seed on the unit circle of the fan plane, angle theta, radius delta.
inline Segment fan_point(const PeriodicOrbit& orb, double delta, double theta) {
    const auto& fs = *orb.spectrum;
    const auto idx = fs.unstable_indices();
    if (idx.size() != 2) throw Error(ErrorCode::WrongUnstableCount, "fan_point needs two unstable multipliers");
    Segment s = lincomb(1.0, Segment(orb.r0.values), delta * std::cos(theta),
                        fs.eigvec_re[static_cast<std::size_t>(idx[0])]);
    return lincomb(1.0, s, delta * std::sin(theta), fs.eigvec_re[static_cast<std::size_t>(idx[1])]);
}

struct GrownTrajectory {
    double c1 = 0.0;
    double c2 = 0.0;
    std::optional<Trajectory> traj;
    std::string error;  // NON_FINITE detail when the run failed
};

/// Forward extension of the fan: every seed integrated over [0, T]. The
/// stored history links each produced point back to its seed.
inline std::vector<GrownTrajectory> grow_unstable_set(const Nonlinearity& nl, const std::vector<FanSeed>& seeds,
                                                      double T, int jobs = 1) {
    std::vector<GrownTrajectory> out(seeds.size());
    parallel_for(seeds.size(), jobs, [&](std::size_t i) {
        out[i].c1 = seeds[i].c1;
        out[i].c2 = seeds[i].c2;
        try {
            out[i].traj = integrate(nl, seeds[i].seed, T);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonFinite) throw;
            out[i].error = e.what();
        }
    });
    return out;
}

}  // namespace ddeu
