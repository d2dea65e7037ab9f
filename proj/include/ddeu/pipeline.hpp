#pragma once

// End-to-end assembly shared by the CLI and the acceptance runner: orbits
// and spectra, tracked separatrices with their sample clouds, and the
// classified unstable fan of O_p.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ddeu/classify.hpp"
#include "ddeu/config.hpp"
#include "ddeu/geometry.hpp"
#include "ddeu/parallel.hpp"
#include "ddeu/poincare.hpp"

namespace ddeu {

inline int resolve_jobs(const RunConfig& cfg, int flag = 0) {
    if (flag > 0) return flag;
    if (cfg.jobs > 0) return cfg.jobs;
    return default_jobs();
}

inline NewtonOptions newton_options(const RunConfig& cfg, int jobs) {
    NewtonOptions o;
    o.n_newton = cfg.n_newton;
    o.max_iter = cfg.max_iter;
    o.tol = cfg.newton_tol;
    o.tol_stop = cfg.newton_tol_stop;
    o.minimal_tol = cfg.minimal_tol;
    o.jobs = jobs;
    return o;
}

inline ClassifyParams classify_params(const RunConfig& cfg) {
    ClassifyParams p;
    p.T_max = cfg.T_max;
    p.delta = cfg.class_delta;
    p.dwell = cfg.dwell;
    p.period_tol = cfg.period_tol;
    return p;
}

inline TrackParams track_params(const RunConfig& cfg) {
    TrackParams p;
    p.bracket_tol = cfg.bracket_tol;
    p.sep_restart = cfg.sep_restart;
    p.T_track = cfg.track_T;
    p.T_fate = cfg.track_T_fate;
    return p;
}

/// One configured orbit, solved at resolution n with its spectrum.
inline PeriodicOrbit solve_orbit(const RunConfig& cfg, const OrbitSpec& os, const EquilibriaReport& eq, int n,
                                 int jobs) {
    const Nonlinearity nl = cfg.nonlinearity();
    const double anchor = resolve_anchor(os.anchor, eq);
    const Segment seed = os.seed.build(n, anchor);
    const OrbitLabel label = orbit_label_from_string(os.label);
    PeriodicOrbit orb = os.period_guess > 0.0
                            ? find_periodic_orbit(nl, seed, anchor, os.period_guess, label, newton_options(cfg, jobs))
                            : find_periodic_orbit(nl, seed, anchor, std::nullopt, label, newton_options(cfg, jobs));
    orb.spectrum = floquet_spectrum(monodromy_matrix(orb, jobs), cfg.tol_band, cfg.imag_tol);
    return orb;
}

inline Registry build_registry(const RunConfig& cfg, int n = 0, int jobs = 1) {
    Registry reg;
    reg.eq = equilibria(cfg.nonlinearity());
    const int nn = n > 0 ? n : cfg.n;
    for (const auto& os : cfg.orbits) reg.orbits.push_back(solve_orbit(cfg, os, reg.eq, nn, jobs));
    return reg;
}

/// Samples r_t at `count` equally spaced phases.
inline std::vector<Segment> orbit_phases(const PeriodicOrbit& orb, int count) {
    const Trajectory tr = orb.trajectory(2.0, 1.0);
    std::vector<Segment> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        Segment s = tr.segment_at_time(orb.omega + orb.omega * k / count);
        s.deriv.reset();
        out.push_back(std::move(s));
    }
    return out;
}

/// Sup distance from phi to the orbit, minimized over phase: lattice scan
/// then golden-section refinement.
inline double distance_to_orbit(const Segment& phi, const PeriodicOrbit& orb) {
    const Trajectory tr = orb.trajectory(2.0, 1.0);
    const int n = orb.n();
    auto dist = [&](double t) {
        double d = 0.0;
        for (int i = 0; i <= n; ++i) {
            d = std::max(d, std::abs(tr.value_at(t - 1.0 + static_cast<double>(i) / n) -
                                     phi.values[static_cast<std::size_t>(i)]));
        }
        return d;
    };
    const int steps = static_cast<int>(std::ceil(orb.omega * n));
    double best_t = orb.omega, best = dist(orb.omega);
    for (int k = 1; k < steps; ++k) {
        const double t = orb.omega + orb.omega * k / steps;
        const double d = dist(t);
        if (d < best) best = d, best_t = t;
    }
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_t - orb.omega / steps, b = best_t + orb.omega / steps;
    a = std::max(a, orb.omega - 0.5);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = dist(c), fd = dist(d);
    for (int it = 0; it < 60 && b - a > 1e-14; ++it) {
        if (fc < fd) {
            b = d, d = c, fd = fc;
            c = b - g * (b - a), fc = dist(c);
        } else {
            a = c, c = d, fc = fd;
            d = a + g * (b - a), fd = dist(d);
        }
    }
    return std::min({best, fc, fd});
}

struct SeparatrixSet {
    std::vector<TrackedSeparatrix> tracked;
    std::vector<Segment> s1;      // C_1^p, O_p, C_q^p samples
    std::vector<Segment> sm1;     // C_-1^p, O_p, C_q^p samples
    std::vector<Segment> cq;      // C_q^p samples
    std::vector<Segment> c1;      // C_1^p samples
    std::vector<Segment> cm1;     // C_-1^p samples
    std::vector<Segment> op;      // O_p phases
    int scans_without_change = 0; // radii whose angle scan found no boundary

    /// Closure samples of S_k: the sheet plus O_k and O_q.
    std::vector<Segment> closure(int k, const Registry& reg, int phases = 64) const {
        std::vector<Segment> out = k == 1 ? s1 : sm1;
        for (auto& s : orbit_phases(reg.orbit(k == 1 ? OrbitLabel::X1 : OrbitLabel::X_MINUS1), phases)) {
            out.push_back(std::move(s));
        }
        for (auto& s : orbit_phases(reg.orbit(OrbitLabel::Q), phases)) out.push_back(std::move(s));
        return out;
    }
};

/// Radii delta * ratio^(-i/(R-1)), i = 0..R-1.
inline std::vector<double> track_radii(const RunConfig& cfg) {
    std::vector<double> r;
    const int R = std::max(cfg.track_radii, 1);
    for (int i = 0; i < R; ++i) {
        const double e = R > 1 ? static_cast<double>(i) / (R - 1) : 0.0;
        r.push_back(cfg.fan_delta * std::pow(cfg.track_radius_ratio, -e));
    }
    return r;
}

/// Edge-tracks every fate boundary found on the fan circles and samples the
/// resulting separatrix trajectories into S_1 and S_-1 clouds.
inline SeparatrixSet track_separatrices(const Registry& reg, const RunConfig& cfg, int jobs) {
    const PeriodicOrbit& P = reg.orbit(OrbitLabel::P);
    const auto radii = track_radii(cfg);
    const int NA = std::max(cfg.track_angles, 8);
    const TrackParams tp = track_params(cfg);
    std::vector<std::vector<TrackedSeparatrix>> per_radius(radii.size());
    parallel_for(radii.size(), jobs, [&](std::size_t ri) {
        std::vector<OmegaLimit> fate(static_cast<std::size_t>(NA));
        for (int i = 0; i < NA; ++i) {
            fate[static_cast<std::size_t>(i)] =
                quick_fate(P.nl, reg.eq, fan_point(P, radii[ri], 2.0 * M_PI * i / NA), 0.0, tp.T_fate);
        }
        for (int i = 0; i < NA; ++i) {
            const int j = (i + 1) % NA;
            const OmegaLimit fa = fate[static_cast<std::size_t>(i)], fb = fate[static_cast<std::size_t>(j)];
            if (fa == fb || connection_between(fa, fb) == Connection::NONE) continue;
            per_radius[ri].push_back(
                track_separatrix(P, reg.eq, radii[ri], 2.0 * M_PI * i / NA, 2.0 * M_PI * (i + 1) / NA, tp));
        }
    });
    SeparatrixSet out;
    out.op = orbit_phases(P, 64);
    for (auto& v : per_radius) {
        if (v.empty()) ++out.scans_without_change;
        for (auto& ts : v) out.tracked.push_back(std::move(ts));
    }
    for (const auto& ts : out.tracked) {
        std::vector<Segment>* dst = ts.connection == Connection::C_QP     ? &out.cq
                                    : ts.connection == Connection::C_1P   ? &out.c1
                                                                          : &out.cm1;
        for (auto& s : ts.samples(cfg.cloud_dt)) {
            s.deriv.reset();
            dst->push_back(std::move(s));
        }
    }
    auto join = [&](const std::vector<Segment>& ck) {
        std::vector<Segment> s = ck;
        s.insert(s.end(), out.op.begin(), out.op.end());
        s.insert(s.end(), out.cq.begin(), out.cq.end());
        return s;
    };
    out.s1 = join(out.c1);
    out.sm1 = join(out.cm1);
    return out;
}

struct FanRecord {
    double c1 = 0.0;
    double c2 = 0.0;
    OrbitClassification oc;
    WitnessResult witness;
    std::string error;
};

struct FanResult {
    std::vector<FanRecord> records;
    std::vector<Segment> unstable_samples;  // points of the grown set, for probes
    std::vector<std::size_t> sampled_seeds;
};

/// Grows and classifies every fan seed; seeds are handled one at a time so
/// only the sampled points outlive their trajectory.
inline FanResult classify_fan(const Registry& reg, const RunConfig& cfg, const SeparatrixSet& seps, int jobs) {
    const PeriodicOrbit& P = reg.orbit(OrbitLabel::P);
    auto seeds = local_unstable_fan(P, cfg.fan_delta, cfg.fan_m);
    FanResult out;
    out.records.resize(seeds.size());
    // sample points from an evenly strided subset of seeds
    const int per_seed = 40;
    const std::size_t want_seeds =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::max(cfg.probe_points, 1) / per_seed));
    const std::size_t stride = std::max<std::size_t>(1, seeds.size() / want_seeds);
    std::vector<std::vector<Segment>> samples(seeds.size());
    const ClassifyParams cp = classify_params(cfg);
    WitnessParams wp;
    wp.dt = cfg.witness_dt;
    wp.tol = cfg.order_tol;
    parallel_for(seeds.size(), jobs, [&](std::size_t i) {
        FanRecord& rec = out.records[i];
        rec.c1 = seeds[i].c1;
        rec.c2 = seeds[i].c2;
        try {
            Trajectory tr(P.nl, seeds[i].seed);
            tr.extend_to(cfg.fan_T);
            rec.oc = omega_classify(tr, reg, cp);
            rec.witness = separatrix_classify(tr, rec.oc, seps.s1, seps.sm1, wp);
            if (i % stride == 0) {
                const double span = std::min(cfg.fan_T, 20.0);
                for (int k = 1; k <= per_seed; ++k) {
                    Segment s = tr.segment_at(std::round(span * k / per_seed * tr.n()) / tr.n());
                    s.deriv.reset();
                    samples[i].push_back(std::move(s));
                }
            }
        } catch (const Error& e) {
            rec.error = e.what();
        }
        seeds[i].seed = Segment();
    });
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].empty()) continue;
        out.sampled_seeds.push_back(i);
        for (auto& s : samples[i]) out.unstable_samples.push_back(std::move(s));
    }
    return out;
}

/// pi2 curves of O_k, O_p, O_q.
/// Curves are sampled at 4n points per unit time unless told otherwise.
inline NestedCurves nested_curves(const Registry& reg, int k, double tol_on, int per_unit = 0) {
    const OrbitLabel lk = k == 1 ? OrbitLabel::X1 : OrbitLabel::X_MINUS1;
    if (per_unit <= 0) per_unit = 4 * reg.orbit(OrbitLabel::P).n();
    return NestedCurves(PlanarCurve::from_orbit(reg.orbit(lk), per_unit),
                        PlanarCurve::from_orbit(reg.orbit(OrbitLabel::P), per_unit),
                        PlanarCurve::from_orbit(reg.orbit(OrbitLabel::Q), per_unit), tol_on);
}

}  // namespace ddeu
