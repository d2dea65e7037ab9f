#pragma once

// Long-time fate of trajectories on the unstable set of O_p: omega-limit
// detection, edge tracking of the separatrices between fates, order
// witnesses against sampled separatrix clouds, and h-curve crossings.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ddeu/errors.hpp"
#include "ddeu/geometry.hpp"
#include "ddeu/integrate.hpp"
#include "ddeu/model.hpp"
#include "ddeu/poincare.hpp"
#include "ddeu/segment.hpp"

namespace ddeu {

enum class OmegaLimit { XI_MINUS2, XI_0, XI_2, O_MINUS1, O_1, O_Q, O_P, UNKNOWN };

enum class SeparatrixPosition { ABOVE_S1, BETWEEN, BELOW_S_MINUS1, ON_S1, ON_S_MINUS1, ON_BOTH, UNKNOWN };

inline std::string to_string(OmegaLimit o) {
    switch (o) {
        case OmegaLimit::XI_MINUS2: return "XI_MINUS2";
        case OmegaLimit::XI_0: return "XI_0";
        case OmegaLimit::XI_2: return "XI_2";
        case OmegaLimit::O_MINUS1: return "O_MINUS1";
        case OmegaLimit::O_1: return "O_1";
        case OmegaLimit::O_Q: return "O_Q";
        case OmegaLimit::O_P: return "O_P";
        case OmegaLimit::UNKNOWN: return "UNKNOWN";
    }
    return "UNKNOWN";
}

inline std::string to_string(SeparatrixPosition p) {
    switch (p) {
        case SeparatrixPosition::ABOVE_S1: return "ABOVE_S1";
        case SeparatrixPosition::BETWEEN: return "BETWEEN";
        case SeparatrixPosition::BELOW_S_MINUS1: return "BELOW_S_MINUS1";
        case SeparatrixPosition::ON_S1: return "ON_S1";
        case SeparatrixPosition::ON_S_MINUS1: return "ON_S_MINUS1";
        case SeparatrixPosition::ON_BOTH: return "ON_BOTH";
        case SeparatrixPosition::UNKNOWN: return "UNKNOWN";
    }
    return "UNKNOWN";
}

/// Position implied by the omega-limit. C_q^p and O_p lie in both sheets.
inline SeparatrixPosition position_for(OmegaLimit o) {
    switch (o) {
        case OmegaLimit::XI_2: return SeparatrixPosition::ABOVE_S1;
        case OmegaLimit::XI_0: return SeparatrixPosition::BETWEEN;
        case OmegaLimit::XI_MINUS2: return SeparatrixPosition::BELOW_S_MINUS1;
        case OmegaLimit::O_1: return SeparatrixPosition::ON_S1;
        case OmegaLimit::O_MINUS1: return SeparatrixPosition::ON_S_MINUS1;
        case OmegaLimit::O_Q:
        case OmegaLimit::O_P: return SeparatrixPosition::ON_BOTH;
        case OmegaLimit::UNKNOWN: return SeparatrixPosition::UNKNOWN;
    }
    return SeparatrixPosition::UNKNOWN;
}

inline OmegaLimit omega_for(OrbitLabel l) {
    switch (l) {
        case OrbitLabel::P: return OmegaLimit::O_P;
        case OrbitLabel::Q: return OmegaLimit::O_Q;
        case OrbitLabel::X1: return OmegaLimit::O_1;
        case OrbitLabel::X_MINUS1: return OmegaLimit::O_MINUS1;
        case OrbitLabel::OTHER: return OmegaLimit::UNKNOWN;
    }
    return OmegaLimit::UNKNOWN;
}

/// Equilibria and labelled periodic orbits that fates are measured against.
struct Registry {
    EquilibriaReport eq{};
    std::vector<PeriodicOrbit> orbits;

    const PeriodicOrbit& orbit(OrbitLabel l) const {
        for (const auto& o : orbits) {
            if (o.label == l) return o;
        }
        throw Error(ErrorCode::OutOfRange, "orbit " + to_string(l) + " is not registered");
    }
    bool has(OrbitLabel l) const {
        return std::any_of(orbits.begin(), orbits.end(), [&](const PeriodicOrbit& o) { return o.label == l; });
    }
};

struct ClassifyParams {
    double T_max = 200.0;
    double delta = 1e-6;       // sup distance to an equilibrium / orbit profile
    double dwell = 5.0;        // time units an equilibrium must be held
    double period_tol = 1e-3;  // spacing of anchored crossings vs omega
};

struct OrbitClassification {
    OmegaLimit omega_limit = OmegaLimit::UNKNOWN;
    SeparatrixPosition separatrix_position = SeparatrixPosition::UNKNOWN;
    double decided_at = 0.0;   // time at which the criterion was met
    double distance = 0.0;     // final distance to the limit set
    double period = 0.0;       // crossing spacing for orbit limits
};

namespace detail {

/// Root of x(t) = level between two nodes, Illinois on the Hermite interpolant.
inline double refine_level(const Trajectory& tr, double level, double ta, double tb) {
    double fa = tr.value_at(ta) - level, fb = tr.value_at(tb) - level;
    if (fa == 0.0) return ta;
    if (fb == 0.0 || (fa < 0.0) == (fb < 0.0)) return tb;
    int side = 0;
    double t = tb;
    for (int it = 0; it < 100; ++it) {
        t = (ta * fb - tb * fa) / (fb - fa);
        const double ft = tr.value_at(t) - level;
        if (std::abs(ft) <= 1e-15 || tb - ta <= 1e-15) break;
        if ((ft < 0.0) == (fa < 0.0)) {
            ta = t;
            fa = ft;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            tb = t;
            fb = ft;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
    }
    return t;
}

}  // namespace detail

/// Scans forward (extending `traj` up to T_max) for the first decisive event:
/// the segment held within delta of a stable equilibrium for `dwell` time
/// units, or two consecutive anchored crossings of a registered orbit whose
/// profiles match within delta and whose spacing matches omega.
/// Off-grid profile error of an orbit against itself: the largest sup
/// distance between r0 and the Hermite-interpolated segment one to three
/// periods later. Profile matches cannot be asked to beat this.
inline double profile_floor(const PeriodicOrbit& orb) {
    const int n = orb.n();
    const Trajectory tr = orb.trajectory(4.0);
    double worst = 0.0;
    for (int k = 2; k <= 4; ++k) {
        const double tau = k * orb.omega - 1.0;
        for (int m = 0; m <= n; ++m) {
            worst = std::max(worst, std::abs(tr.value_at(tau + static_cast<double>(m) / n) -
                                             orb.r0.values[static_cast<std::size_t>(m)]));
        }
    }
    return worst;
}

inline OrbitClassification omega_classify(Trajectory& traj, const Registry& reg, const ClassifyParams& prm = {}) {
    const int n = traj.n();
    const auto nn = static_cast<std::size_t>(n);
    const std::array<double, 3> xi{reg.eq.at(-2), reg.eq.at(0), reg.eq.at(2)};
    const std::array<OmegaLimit, 3> xi_lab{OmegaLimit::XI_MINUS2, OmegaLimit::XI_0, OmegaLimit::XI_2};
    const auto need = static_cast<std::size_t>(std::ceil((prm.dwell + 1.0) * n)) + 1;
    std::array<std::size_t, 3> run{0, 0, 0};

    struct Track {
        const PeriodicOrbit* orb;
        double tol;
        std::vector<double> pending;  // crossing times awaiting a full segment
        std::optional<double> last_match;
    };
    std::vector<Track> tracks;
    for (const auto& o : reg.orbits) {
        if (o.n() == n && omega_for(o.label) != OmegaLimit::UNKNOWN) {
            tracks.push_back({&o, std::max(prm.delta, 2.0 * profile_floor(o)), {}, std::nullopt});
        }
    }

    OrbitClassification oc;
    const double t_end = traj.t0() + prm.T_max;
    std::size_t i = 0;
    for (;;) {
        for (; i < traj.size(); ++i) {
            const double x = traj.x(i);
            for (std::size_t k = 0; k < 3; ++k) {
                run[k] = std::abs(x - xi[k]) <= prm.delta ? run[k] + 1 : 0;
                if (run[k] >= need) {
                    oc.omega_limit = xi_lab[k];
                    oc.decided_at = traj.time(i);
                    oc.distance = std::abs(x - xi[k]);
                    oc.separatrix_position = position_for(oc.omega_limit);
                    return oc;
                }
            }
            if (i == 0) continue;
            for (auto& tk : tracks) {
                const double a = tk.orb->anchor;
                if (traj.x(i - 1) < a && traj.x(i) >= a && i - 1 >= nn) {
                    tk.pending.push_back(detail::refine_level(traj, a, traj.time(i - 1), traj.time(i)));
                }
                while (!tk.pending.empty() && tk.pending.front() + 1.0 <= traj.time(i)) {
                    const double tau = tk.pending.front();
                    tk.pending.erase(tk.pending.begin());
                    double d = 0.0;
                    for (int m = 0; m <= n && d <= tk.tol; ++m) {
                        d = std::max(d, std::abs(traj.value_at(tau + static_cast<double>(m) / n) -
                                                 tk.orb->r0.values[static_cast<std::size_t>(m)]));
                    }
                    if (d <= tk.tol) {
                        if (tk.last_match && std::abs(tau - *tk.last_match - tk.orb->omega) <= prm.period_tol) {
                            oc.omega_limit = omega_for(tk.orb->label);
                            oc.decided_at = tau + 1.0;
                            oc.distance = d;
                            oc.period = tau - *tk.last_match;
                            oc.separatrix_position = position_for(oc.omega_limit);
                            return oc;
                        }
                        tk.last_match = tau;
                    } else {
                        tk.last_match.reset();
                    }
                }
            }
        }
        if (traj.end_time() >= t_end - 0.5 / n) break;
        traj.extend_to(std::min(traj.end_time() + 10.0, t_end));
    }
    oc.decided_at = traj.end_time();
    return oc;
}

inline OrbitClassification omega_classify(const Trajectory& traj, const Registry& reg, const ClassifyParams& prm = {}) {
    Trajectory copy = traj;
    return omega_classify(copy, reg, prm);
}

/// Coarse fate for bisection: the first time a whole segment sits within
/// `radius` of one of the stable equilibria, whose basins contain those balls.
inline OmegaLimit quick_fate(const Nonlinearity& nl, const EquilibriaReport& eq, const Segment& phi,
                             double t0 = 0.0, double T_cap = 120.0, double radius = 0.5) {
    Trajectory tr(nl, phi, t0);
    const std::array<double, 3> xi{eq.at(-2), eq.at(0), eq.at(2)};
    const std::array<OmegaLimit, 3> lab{OmegaLimit::XI_MINUS2, OmegaLimit::XI_0, OmegaLimit::XI_2};
    const auto need = static_cast<std::size_t>(tr.n()) + 1;
    std::array<std::size_t, 3> run{0, 0, 0};
    std::size_t i = 0;
    for (;;) {
        for (; i < tr.size(); ++i) {
            for (std::size_t k = 0; k < 3; ++k) {
                run[k] = std::abs(tr.x(i) - xi[k]) <= radius ? run[k] + 1 : 0;
                if (run[k] >= need) return lab[k];
            }
        }
        if (tr.end_time() >= t0 + T_cap) return OmegaLimit::UNKNOWN;
        // keep memory flat on long undecided runs
        if (tr.size() > 8 * need) tr.discard_front(tr.size() - 2 * need), i = tr.size();
        tr.advance(static_cast<std::size_t>(tr.n()));
    }
}

/// Which connecting set a separatrix between two fates belongs to.
enum class Connection { C_1P, C_MINUS1P, C_QP, NONE };

inline std::string to_string(Connection c) {
    switch (c) {
        case Connection::C_1P: return "C_1^p";
        case Connection::C_MINUS1P: return "C_-1^p";
        case Connection::C_QP: return "C_q^p";
        case Connection::NONE: return "NONE";
    }
    return "NONE";
}

inline Connection connection_between(OmegaLimit a, OmegaLimit b) {
    auto is = [&](OmegaLimit x, OmegaLimit y) { return (a == x && b == y) || (a == y && b == x); };
    if (is(OmegaLimit::XI_0, OmegaLimit::XI_2)) return Connection::C_1P;
    if (is(OmegaLimit::XI_0, OmegaLimit::XI_MINUS2)) return Connection::C_MINUS1P;
    if (is(OmegaLimit::XI_2, OmegaLimit::XI_MINUS2)) return Connection::C_QP;
    return Connection::NONE;
}

inline OrbitLabel target_orbit(Connection c) {
    switch (c) {
        case Connection::C_1P: return OrbitLabel::X1;
        case Connection::C_MINUS1P: return OrbitLabel::X_MINUS1;
        case Connection::C_QP: return OrbitLabel::Q;
        case Connection::NONE: return OrbitLabel::OTHER;
    }
    return OrbitLabel::OTHER;
}

struct TrackParams {
    double bracket_tol = 1e-13;  // sup distance at which a bracket is accepted
    double sep_restart = 1e-9;   // pieces end when the bracket has spread to this
    double T_track = 20.0;
    double T_fate = 120.0;
    int max_bisect = 200;
};

/// A separatrix trajectory, stored as consecutive pieces each integrated
/// from a refreshed bracket.
struct TrackedSeparatrix {
    struct Piece {
        Trajectory traj;
        double t_begin = 0.0;
        double t_end = 0.0;
    };

    Connection connection = Connection::NONE;
    OmegaLimit fate_a = OmegaLimit::UNKNOWN;
    OmegaLimit fate_b = OmegaLimit::UNKNOWN;
    double radius = 0.0;
    double theta = 0.0;
    std::vector<Piece> pieces;
    double max_bracket = 0.0;  // largest bracket width carried by any piece

    double t_end() const { return pieces.empty() ? 0.0 : pieces.back().t_end; }

    const Piece& piece_at(double t) const {
        for (const auto& p : pieces) {
            if (t <= p.t_end + 1e-12) return p;
        }
        return pieces.back();
    }

    Segment segment_at(double t) const { return piece_at(t).traj.segment_at_time(t); }

    /// Segments at t = 0, dt, 2 dt, ... up to t_end.
    std::vector<Segment> samples(double dt, double t_from = 0.0) const {
        std::vector<Segment> out;
        for (double t = t_from; t <= t_end() + 1e-12; t += dt) out.push_back(segment_at(t));
        return out;
    }
};

namespace detail {

/// Bisects the chord between a and b (fates fa != fb) until the endpoints
/// are within tol; returns the final bracket.
inline std::pair<Segment, Segment> bisect_chord(const Nonlinearity& nl, const EquilibriaReport& eq, Segment a,
                                                Segment b, OmegaLimit fa, double t0, const TrackParams& prm) {
    for (int it = 0; it < prm.max_bisect && sup_distance(a, b) > prm.bracket_tol; ++it) {
        Segment m = lincomb(0.5, a, 0.5, b);
        const OmegaLimit fm = quick_fate(nl, eq, m, t0, prm.T_fate);
        if (fm == OmegaLimit::UNKNOWN) break;
        if (fm == fa) a = std::move(m);
        else b = std::move(m);
    }
    return {std::move(a), std::move(b)};
}

}  // namespace detail

/// Edge tracking from the fan circle of the given radius. theta_a, theta_b
/// must bracket a change of fate; the bracket is first narrowed in angle,
/// then carried forward in time and re-bisected along chords whenever its two
/// sides spread beyond sep_restart.
inline TrackedSeparatrix track_separatrix(const PeriodicOrbit& orb_p, const EquilibriaReport& eq, double radius,
                                          double theta_a, double theta_b, const TrackParams& prm = {}) {
    const Nonlinearity& nl = orb_p.nl;
    TrackedSeparatrix ts;
    ts.radius = radius;
    ts.fate_a = quick_fate(nl, eq, fan_point(orb_p, radius, theta_a), 0.0, prm.T_fate);
    ts.fate_b = quick_fate(nl, eq, fan_point(orb_p, radius, theta_b), 0.0, prm.T_fate);
    ts.connection = connection_between(ts.fate_a, ts.fate_b);
    if (ts.connection == Connection::NONE) {
        throw Error(ErrorCode::NoCrossing, "angles do not bracket a separatrix: " + to_string(ts.fate_a) + " / " +
                                               to_string(ts.fate_b));
    }
    double ta = theta_a, tb = theta_b;
    Segment a = fan_point(orb_p, radius, ta), b = fan_point(orb_p, radius, tb);
    for (int it = 0; it < prm.max_bisect && sup_distance(a, b) > prm.bracket_tol; ++it) {
        const double tm = 0.5 * (ta + tb);
        if (tm == ta || tm == tb) break;
        const Segment m = fan_point(orb_p, radius, tm);
        const OmegaLimit fm = quick_fate(nl, eq, m, 0.0, prm.T_fate);
        if (fm == OmegaLimit::UNKNOWN) break;
        if (fm == ts.fate_a) {
            ta = tm;
            a = m;
        } else {
            tb = tm;
            b = m;
        }
    }
    ts.theta = 0.5 * (ta + tb);

    double t_cur = 0.0;
    const int n = orb_p.n();
    while (t_cur < prm.T_track - 1e-12) {
        ts.max_bracket = std::max(ts.max_bracket, sup_distance(a, b));
        Trajectory A(nl, a, t_cur), B(nl, b, t_cur);
        const double t_stop = prm.T_track;
        std::size_t j = static_cast<std::size_t>(n);
        std::size_t last_ok = j;
        double run_max = 0.0;
        bool spread = false;
        while (!spread && A.end_time() < t_stop - 1e-12) {
            A.advance(static_cast<std::size_t>(n) / 4);
            B.advance(static_cast<std::size_t>(n) / 4);
            for (; j < A.size(); ++j) {
                run_max = std::max(run_max, std::abs(A.x(j) - B.x(j)));
                if (run_max > prm.sep_restart) {
                    spread = true;
                    break;
                }
                last_ok = j;
            }
        }
        double t_r = A.time(std::min(last_ok, A.size() - 1));
        if (!spread) t_r = std::min(t_r, t_stop);
        if (t_r <= t_cur + 1e-12) {
            // bracket already spread at the start; keep the single node and stop
            break;
        }
        ts.pieces.push_back({A, t_cur, t_r});
        if (!spread) break;
        Segment a2 = A.segment_at(t_r), b2 = B.segment_at(t_r);
        auto br = detail::bisect_chord(nl, eq, std::move(a2), std::move(b2), ts.fate_a, t_r, prm);
        a = std::move(br.first);
        b = std::move(br.second);
        t_cur = t_r;
    }
    return ts;
}

/// Fast test for phi << psi: psi - phi > tol at every node.
inline bool strictly_below(const Segment& phi, const Segment& psi, double tol = 1e-9) {
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (!(psi.values[i] - phi.values[i] > tol)) return false;
    }
    return true;
}

struct WitnessResult {
    SeparatrixPosition position = SeparatrixPosition::UNKNOWN;
    bool needs_witness = false;
    bool witness_found = false;
    double witness_time = -1.0;
    bool contradiction = false;
    double contradiction_time = -1.0;
    double confidence = 0.0;
};

namespace detail {

/// Earliest t in [t_from, t_to] (step dt) with some cloud member psi such
/// that psi << x_t (below == true) or x_t << psi (below == false).
inline std::optional<double> search_witness(const Trajectory& tr, double t_from, double t_to, double dt,
                                            const std::vector<Segment>& cloud, bool cloud_below, double tol) {
    if (cloud.empty()) return std::nullopt;
    for (double t = t_from; t <= t_to + 1e-12; t += dt) {
        const Segment xt = tr.segment_at(t);
        for (const auto& psi : cloud) {
            if (cloud_below ? strictly_below(psi, xt, tol) : strictly_below(xt, psi, tol)) return t;
        }
    }
    return std::nullopt;
}

}  // namespace detail

struct WitnessParams {
    double dt = 0.25;
    double tol = 1e-9;
};

/// Position from the omega-limit, cross-checked by order against the S_1 and
/// S_{-1} clouds along the forward orbit. A witness raises confidence; a
/// relation pointing the other way is a contradiction and is reported.
inline WitnessResult separatrix_classify(const Trajectory& forward, const OrbitClassification& oc,
                                         const std::vector<Segment>& s1, const std::vector<Segment>& sm1,
                                         const WitnessParams& prm = {}) {
    WitnessResult w;
    w.position = position_for(oc.omega_limit);
    const double t_from = forward.t0();
    const double t_to = std::min(forward.end_time(), std::max(t_from, oc.decided_at));
    auto search = [&](const std::vector<Segment>& cloud, bool cloud_below) {
        return detail::search_witness(forward, t_from, t_to, prm.dt, cloud, cloud_below, prm.tol);
    };
    switch (w.position) {
        case SeparatrixPosition::ABOVE_S1: {
            w.needs_witness = true;
            if (auto t = search(s1, true)) w.witness_found = true, w.witness_time = *t;
            if (auto t = search(s1, false)) w.contradiction = true, w.contradiction_time = *t;
            break;
        }
        case SeparatrixPosition::BELOW_S_MINUS1: {
            w.needs_witness = true;
            if (auto t = search(sm1, false)) w.witness_found = true, w.witness_time = *t;
            if (auto t = search(sm1, true)) w.contradiction = true, w.contradiction_time = *t;
            break;
        }
        case SeparatrixPosition::BETWEEN: {
            const auto up = search(s1, false);
            const auto lo = search(sm1, true);
            w.witness_found = up.has_value() && lo.has_value();
            if (w.witness_found) w.witness_time = std::max(*up, *lo);
            if (auto t = search(s1, true)) w.contradiction = true, w.contradiction_time = *t;
            if (auto t = search(sm1, false)) {
                w.contradiction = true;
                w.contradiction_time = w.contradiction_time < 0 ? *t : std::min(w.contradiction_time, *t);
            }
            break;
        }
        default: break;
    }
    if (w.position == SeparatrixPosition::UNKNOWN) w.confidence = 0.0;
    else if (w.contradiction) w.confidence = 0.0;
    else if (w.witness_found || !w.needs_witness) w.confidence = w.witness_found ? 1.0 : 0.75;
    else w.confidence = 0.5;
    return w;
}

/// Crossings of the half line L_k = {x(t) = xi_k, x(t-1) > xi_k} by a
/// trajectory over [t_from, t_to]: pairs (t, s = x(t-1)).
inline std::vector<std::pair<double, double>> half_line_crossings(const Trajectory& tr, double xi_k, double t_from,
                                                                  double t_to) {
    std::vector<std::pair<double, double>> out;
    const auto nn = static_cast<std::size_t>(tr.n());
    const std::size_t i0 = std::max(tr.index_of(std::max(t_from, tr.t0())), nn + 1);
    const std::size_t i1 = tr.index_of(std::min(t_to, tr.end_time()));
    for (std::size_t i = i0; i <= i1; ++i) {
        const double a = tr.x(i - 1) - xi_k, b = tr.x(i) - xi_k;
        if ((a < 0.0) == (b < 0.0) || (a == 0.0 && b == 0.0)) continue;
        const double t = detail::refine_level(tr, xi_k, tr.time(i - 1), tr.time(i));
        if (t < t_from || t > t_to) continue;
        const double s = tr.value_at(t - 1.0);
        if (s > xi_k) out.emplace_back(t, s);
    }
    return out;
}

struct HSample {
    double s = 0.0;
    Segment seg;  // x_t at the crossing, pi2 = (xi_k, s)
    Connection connection = Connection::NONE;
};

struct HCurveReport {
    int k = 1;
    double s_k = 0.0;
    double s_p = 0.0;
    double s_q = 0.0;
    std::array<int, 3> crossings_per_period{0, 0, 0};  // O_k, O_p, O_q
    std::vector<HSample> samples;                      // sorted by s
};

/// The unique L_k crossing of one period of an orbit.
inline double orbit_half_line_s(const PeriodicOrbit& orb, double xi_k, int* count = nullptr) {
    const Trajectory tr = orb.trajectory(2.0, 1.0);
    const auto cr = half_line_crossings(tr, xi_k, orb.omega, 2.0 * orb.omega - 0.5 / orb.n());
    if (count) *count = static_cast<int>(cr.size());
    if (cr.empty()) throw Error(ErrorCode::NoCrossing, to_string(orb.label) + " does not meet L_k");
    return cr.front().second;
}

/// Crossings of L_k by the orbits O_k, O_p, O_q and by the tracked
/// separatrix trajectories of C_k^p and C_q^p.
inline HCurveReport trace_h_curve(int k, const Registry& reg, const std::vector<TrackedSeparatrix>& tracked) {
    if (k != 1 && k != -1) throw Error(ErrorCode::InvalidParameter, "k must be +1 or -1");
    const double xi_k = reg.eq.at(k);
    HCurveReport rep;
    rep.k = k;
    const OrbitLabel lk = k == 1 ? OrbitLabel::X1 : OrbitLabel::X_MINUS1;
    int cnt = 0;
    rep.s_k = orbit_half_line_s(reg.orbit(lk), xi_k, &cnt);
    rep.crossings_per_period[0] = cnt;
    rep.s_p = orbit_half_line_s(reg.orbit(OrbitLabel::P), xi_k, &cnt);
    rep.crossings_per_period[1] = cnt;
    rep.s_q = orbit_half_line_s(reg.orbit(OrbitLabel::Q), xi_k, &cnt);
    rep.crossings_per_period[2] = cnt;

    const Connection ck = k == 1 ? Connection::C_1P : Connection::C_MINUS1P;
    for (const auto& ts : tracked) {
        if (ts.connection != ck && ts.connection != Connection::C_QP) continue;
        for (const auto& pc : ts.pieces) {
            for (const auto& [t, s] : half_line_crossings(pc.traj, xi_k, pc.t_begin, pc.t_end)) {
                rep.samples.push_back({s, pc.traj.segment_at_time(t), ts.connection});
            }
        }
    }
    std::sort(rep.samples.begin(), rep.samples.end(), [](const HSample& a, const HSample& b) { return a.s < b.s; });
    return rep;
}

}  // namespace ddeu
