#pragma once

// The acceptance suite. Each criterion returns one result line; the CLI's
// `verify` subcommand and the acceptance test binary both run this.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ddeu/classify.hpp"
#include "ddeu/config.hpp"
#include "ddeu/geometry.hpp"
#include "ddeu/integrate.hpp"
#include "ddeu/lyapunov.hpp"
#include "ddeu/pipeline.hpp"
#include "ddeu/poincare.hpp"

namespace ddeu {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// The seeded generator used by every random suite.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}
    double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    std::mt19937_64 g_;
};

/// sum_{k<6} c_k cos(k pi (s+1)), c_k uniform in [-scale, scale].
inline Segment random_smooth_segment(Rng& rng, int n, double scale) {
    std::vector<double> c(6);
    for (double& v : c) v = rng.uniform(-scale, scale);
    c[0] *= 0.5;
    return Segment::from_function(n, [c](double s) {
        double acc = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * std::cos(static_cast<double>(k) * M_PI * (s + 1.0));
        return acc;
    });
}

/// eta >= 0, zero on [-1, s0] and A ((s - s0)/(-s0))^2 after, so eta(0) = A.
inline Segment random_bump(Rng& rng, int n) {
    const double s0 = rng.uniform(-0.9, -0.1);
    const double A = std::pow(10.0, rng.uniform(-3.0, 0.0));
    return Segment::from_function(n, [=](double s) {
        if (s <= s0) return 0.0;
        const double u = (s - s0) / (-s0);
        return A * u * u;
    });
}

/// V of a difference with the absolute floor used throughout: differences
/// below 1e-9 in sup norm are not resolvable and yield nullopt.
inline std::optional<VValue> v_of_difference(const Segment& a, const Segment& b) {
    const Segment z = a - b;
    const double s = sup_norm(z);
    if (s < 1e-9) return std::nullopt;
    return lyapunov_v(z, std::max(1e-9 * s, 1e-11));
}

struct TangentCheck {
    int pairs = 0;
    int v_two = 0;
    double max_node0 = 0.0;
};

/// Difference quotients of adjacent h-curve samples near s_p. Samples closer
/// in s than min_ds are skipped: their difference is dominated by the error
/// of the linearized fan the tracks start from.
inline TangentCheck h_curve_tangents(const HCurveReport& h, double window, double min_ds) {
    TangentCheck c;
    const auto& S = h.samples;
    for (std::size_t i = 0; i + 1 < S.size(); ++i) {
        const double ds = S[i + 1].s - S[i].s;
        if (std::abs(S[i].s - h.s_p) > window || std::abs(S[i + 1].s - h.s_p) > window) continue;
        if (std::abs(ds) < min_ds) continue;
        const Segment q = (1.0 / ds) * (Segment(S[i + 1].seg.values) - Segment(S[i].seg.values));
        const double sup = sup_norm(q);
        if (sup < 1e-9) continue;
        ++c.pairs;
        c.max_node0 = std::max(c.max_node0, std::abs(q.back()));
        const VValue v = lyapunov_v(q, std::max(1e-9 * sup, 1e-11));
        if (!v.overflow && v.value == 2) ++c.v_two;
    }
    return c;
}

class Verifier {
public:
    explicit Verifier(RunConfig cfg, int jobs = 1, std::function<void(const std::string&)> log = {})
        : cfg_(std::move(cfg)), jobs_(jobs), log_(std::move(log)) {}

    const Registry& registry() {
        if (!reg_) {
            note("solving orbits at n=" + std::to_string(cfg_.n));
            reg_ = build_registry(cfg_, cfg_.n, jobs_);
        }
        return *reg_;
    }

    const SeparatrixSet& separatrices() {
        if (!seps_) {
            const auto t0 = clock::now();
            note("tracking separatrices");
            seps_ = track_separatrices(registry(), cfg_, jobs_);
            track_seconds_ = since(t0);
        }
        return *seps_;
    }

    const FanResult& fan() {
        if (!fan_) {
            const SeparatrixSet& s = separatrices();
            const auto t0 = clock::now();
            note("growing and classifying the fan");
            fan_ = classify_fan(registry(), cfg_, s, jobs_);
            fan_seconds_ = since(t0);
        }
        return *fan_;
    }

    std::vector<CriterionResult> run_all() {
        std::vector<CriterionResult> out;
        for (int id = 1; id <= 12; ++id) out.push_back(run(id));
        return out;
    }

    CriterionResult run(int id) {
        const auto t0 = clock::now();
        CriterionResult r;
        r.id = id;
        try {
            switch (id) {
                case 1: r = integrator_oracle(); break;
                case 2: r = trivial_multiplier(); break;
                case 3: r = unstable_counts(); break;
                case 4: r = periods(); break;
                case 5: r = range_nesting(); break;
                case 6: r = v_monotonicity(); break;
                case 7: r = monotone_semiflow(); break;
                case 8: r = dp_finite_difference(); break;
                case 9: r = annulus_structure(); break;
                case 10: r = separatrix_decomposition(); break;
                case 11: r = injectivity(); break;
                case 12: r = nonordering(); break;
                default: throw Error(ErrorCode::InvalidParameter, "no criterion " + std::to_string(id));
            }
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("error: ") + e.what();
        }
        r.id = id;
        if (r.name.empty()) r.name = name_of(id);
        r.seconds = since(t0);
        return r;
    }

    static std::string name_of(int id) {
        static const char* names[] = {"",
                                      "integrator oracle",
                                      "trivial Floquet multiplier",
                                      "unstable multiplier counts",
                                      "periods in (1,2)",
                                      "range nesting",
                                      "V monotonicity",
                                      "monotone semiflow",
                                      "dP finite differences",
                                      "annulus structure",
                                      "separatrix decomposition",
                                      "injectivity probes",
                                      "nonordering of S_k closure"};
        return id >= 1 && id <= 12 ? names[id] : "?";
    }

    static std::string format(const CriterionResult& r) {
        std::ostringstream os;
        os << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail;
        char buf[32];
        std::snprintf(buf, sizeof buf, " (%.2fs)", r.seconds);
        os << buf;
        return os.str();
    }

    // 1
    CriterionResult integrator_oracle() {
        const auto t0 = clock::now();
        CriterionResult r;
        const Nonlinearity nl = Nonlinearity::affine(1.0, 0.0, 1.0);
        auto solve_at = [&](int n, double t) {
            const Segment phi = Segment::from_function(n, [](double s) { return s + 1.0; });
            return integrate(nl, phi, t).x(static_cast<std::size_t>(std::lround((t + 1.0) * n)));
        };
        const double e1 = std::abs(solve_at(512, 1.0) - 2.0 * std::exp(-1.0));
        const double x2 = -1.0 + 4.0 * std::exp(-1.0) + 2.0 * std::exp(-2.0);
        const double a = std::abs(solve_at(128, 2.0) - x2);
        const double b = std::abs(solve_at(256, 2.0) - x2);
        const double c = std::abs(solve_at(512, 2.0) - x2);
        const double o1 = std::log2(a / b), o2 = std::log2(b / c);
        const double secs = since(t0);
        r.pass = e1 <= 1e-5 && o1 >= 1.9 && o1 <= 2.1 && o2 >= 1.9 && o2 <= 2.1 && secs < 1.0;
        r.detail = "|x(1)-2/e|=" + sci(e1) + " order(128/256)=" + fix(o1, 4) + " order(256/512)=" + fix(o2, 4) +
                   " runtime=" + fix(secs, 3) + "s";
        return r;
    }

    // 2
    CriterionResult trivial_multiplier() {
        CriterionResult r;
        r.pass = true;
        std::ostringstream os;
        for (const auto& spec : cfg_.orbits) {
            const auto t0 = clock::now();
            const PeriodicOrbit orb = solve_orbit(cfg_, spec, registry().eq, 256, jobs_);
            const FloquetSpectrum& fs = *orb.spectrum;
            const Segment rd = orb.r_dot0();
            double best_cos = 0.0, best_gap = 1e300;
            for (std::size_t i = 0; i < fs.multipliers.size(); ++i) {
                const double gap = std::abs(fs.multipliers[i] - std::complex<double>(1.0, 0.0));
                if (gap > cfg_.tol_trivial) continue;
                const Segment& v = fs.eigvec_re[i];
                const double cs = std::abs(l2_dot(v, rd)) / std::sqrt(l2_dot(v, v) * l2_dot(rd, rd));
                if (cs > best_cos) best_cos = cs, best_gap = gap;
            }
            const double secs = since(t0);
            const bool ok = best_cos >= 0.999 && secs < 60.0;
            r.pass = r.pass && ok;
            os << spec.label << ":|l-1|=" << sci(best_gap) << ",cos=" << fix(best_cos, 6) << ",t=" << fix(secs, 2)
               << "s ";
        }
        r.detail = os.str();
        return r;
    }

    // 3
    CriterionResult unstable_counts() {
        CriterionResult r;
        const Registry& reg = registry();
        auto outside = [](const FloquetSpectrum& fs) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < fs.multipliers.size(); ++i) {
                if (std::abs(fs.multipliers[i]) > 1.01) idx.push_back(i);
            }
            return idx;
        };
        const FloquetSpectrum& sp = *reg.orbit(OrbitLabel::P).spectrum;
        const FloquetSpectrum& sq = *reg.orbit(OrbitLabel::Q).spectrum;
        const auto ip = outside(sp), iq = outside(sq);
        bool p_ok = ip.size() == 2;
        double sep = 0.0;
        if (p_ok) {
            p_ok = sp.is_real(ip[0]) && sp.is_real(ip[1]);
            sep = std::abs(sp.multipliers[ip[0]] - sp.multipliers[ip[1]]);
            p_ok = p_ok && sep >= 1e-3;
        }
        const bool q_ok = iq.size() == 1 && sq.is_real(iq[0]);
        r.pass = p_ok && q_ok;
        std::ostringstream os;
        os << "p:" << ip.size() << " outside [";
        for (auto i : ip) os << fix(sp.multipliers[i].real(), 6) << (sp.is_real(i) ? "" : "+i") << " ";
        os << "] gap=" << sci(sep) << " q:" << iq.size() << " outside [";
        for (auto i : iq) os << fix(sq.multipliers[i].real(), 6) << " ";
        os << "]";
        r.detail = os.str();
        return r;
    }

    // 4
    CriterionResult periods() {
        CriterionResult r;
        r.pass = !registry().orbits.empty();
        std::ostringstream os;
        for (const auto& o : registry().orbits) {
            r.pass = r.pass && o.omega > 1.0 && o.omega < 2.0;
            os << to_string(o.label) << ":" << fix(o.omega, 9) << " ";
        }
        r.detail = os.str();
        return r;
    }

    // 5
    CriterionResult range_nesting() {
        CriterionResult r;
        const Registry& reg = registry();
        const auto& p = reg.orbit(OrbitLabel::P);
        const auto& q = reg.orbit(OrbitLabel::Q);
        const double pmin = p.min_value(), pmax = p.max_value(), qmin = q.min_value(), qmax = q.max_value();
        const double m[] = {reg.eq.at(-1) - pmin, pmax - reg.eq.at(1), pmin - qmin,
                            qmax - pmax,          qmin - reg.eq.at(-2), reg.eq.at(2) - qmax};
        double worst = 1e300;
        for (double v : m) worst = std::min(worst, v);
        r.pass = worst >= 1e-3;
        r.detail = "p=[" + fix(pmin, 6) + "," + fix(pmax, 6) + "] q=[" + fix(qmin, 6) + "," + fix(qmax, 6) +
                   "] smallest margin=" + fix(worst, 6);
        return r;
    }

    // 6
    CriterionResult v_monotonicity() {
        const auto t0 = clock::now();
        CriterionResult r;
        const Nonlinearity nl = cfg_.nonlinearity();
        const int n = cfg_.n;
        Rng rng(cfg_.rng_seed);
        int increases = 0, checks = 0, skipped = 0;
        const int per_unit = 8;
        for (int k = 0; k < cfg_.v_pairs; ++k) {
            const Segment a = random_smooth_segment(rng, n, rng.uniform(0.5, 3.0));
            const Segment b = random_smooth_segment(rng, n, rng.uniform(0.5, 3.0));
            const Trajectory ta = integrate(nl, a, cfg_.suite_horizon);
            const Trajectory tb = integrate(nl, b, cfg_.suite_horizon);
            std::optional<VValue> prev;
            for (int j = 0; j <= static_cast<int>(cfg_.suite_horizon * per_unit); ++j) {
                const double t = static_cast<double>(j) / per_unit;
                const auto v = v_of_difference(ta.segment_at(t), tb.segment_at(t));
                if (!v) {
                    ++skipped;
                    continue;
                }
                ++checks;
                if (prev && *prev < *v) ++increases;
                prev = v;
            }
        }
        const PeriodicOrbit& p = registry().orbit(OrbitLabel::P);
        const Trajectory tp = p.trajectory(2.0, 1.0);
        int v2 = 0;
        const int phases = cfg_.v_phases;
        for (int j = 0; j < phases; ++j) {
            const Segment s = tp.segment_at_time(p.omega + p.omega * j / phases);
            bool ok = true;
            for (int kk : {-1, 0, 1}) {
                const auto v = v_of_difference(s, Segment::constant(n, registry().eq.at(kk)));
                ok = ok && v && !v->overflow && v->value == 2;
            }
            if (ok) ++v2;
        }
        const double secs = since(t0);
        r.pass = increases == 0 && checks > 0 && v2 == phases && secs < 120.0;
        r.detail = std::to_string(cfg_.v_pairs) + " pairs, " + std::to_string(checks) +
                   " V checks, increases=" + std::to_string(increases) + " (unresolved " + std::to_string(skipped) +
                   "); V(p_t - xi_k)=2 for k=-1,0,1 at " + std::to_string(v2) + "/" + std::to_string(phases) +
                   " phases; runtime=" + fix(secs, 2) + "s";
        return r;
    }

    // 7
    CriterionResult monotone_semiflow() {
        CriterionResult r;
        const Nonlinearity nl = cfg_.nonlinearity();
        const int n = cfg_.n;
        Rng rng(cfg_.rng_seed + 1);
        int broken = 0, not_ll = 0;
        const int per_unit = 16;
        for (int k = 0; k < cfg_.monotone_pairs; ++k) {
            const Segment a = random_smooth_segment(rng, n, rng.uniform(0.5, 3.0));
            const Segment b = a + random_bump(rng, n);
            const Trajectory ta = integrate(nl, a, cfg_.suite_horizon);
            const Trajectory tb = integrate(nl, b, cfg_.suite_horizon);
            bool pair_broken = false, pair_not_ll = false;
            for (int j = 0; j <= static_cast<int>(cfg_.suite_horizon * per_unit); ++j) {
                const double t = static_cast<double>(j) / per_unit;
                const Order o = order_relation(ta.segment_at(t), tb.segment_at(t), cfg_.order_tol);
                if (o != Order::Leq && o != Order::LL && o != Order::Eq) pair_broken = true;
                if (t >= 2.0 && o != Order::LL) pair_not_ll = true;
            }
            broken += pair_broken;
            not_ll += pair_not_ll;
        }
        r.pass = broken == 0 && not_ll == 0;
        r.detail = std::to_string(cfg_.monotone_pairs) + " ordered pairs: order lost in " + std::to_string(broken) +
                   ", not << by t=2 in " + std::to_string(not_ll);
        return r;
    }

    // 8
    CriterionResult dp_finite_difference() {
        CriterionResult r;
        const PeriodicOrbit& p = registry().orbit(OrbitLabel::P);
        const MonodromyMatrix mm = monodromy_matrix(p, jobs_);
        SectionSpec sec = build_section(p, mm);
        sec.window = cfg_.section_window;
        const Segment rd = p.r_dot0();
        const Segment base(p.r0.values);
        const Segment p0 = return_map(sec, base);
        Rng rng(cfg_.rng_seed + 2);
        double worst = 0.0;
        for (int k = 0; k < cfg_.dp_samples; ++k) {
            Segment eta = sec.project_to_Y(random_smooth_segment(rng, p.n(), 1.0), rd);
            eta = (1.0 / sup_norm(eta)) * eta;
            eta = sec.project_to_Y(eta, rd);
            const Segment d = dP(sec, base, eta);
            const Segment pd = return_map(sec, lincomb(1.0, base, cfg_.dp_delta, eta));
            const Segment fd = (1.0 / cfg_.dp_delta) * (pd - p0);
            worst = std::max(worst, sup_distance(Segment(d.values), Segment(fd.values)) / sup_norm(eta));
        }
        r.pass = worst <= 1e-3;
        r.detail = std::to_string(cfg_.dp_samples) + " directions, worst |dP eta - FD|/|eta|=" + sci(worst) +
                   " at delta=" + sci(cfg_.dp_delta);
        return r;
    }

    // 9
    CriterionResult annulus_structure() {
        CriterionResult r;
        const Registry& reg = registry();
        const SeparatrixSet& seps = separatrices();
        std::ostringstream os;
        bool ok = true;
        for (int k : {1, -1}) {
            const NestedCurves nc = nested_curves(reg, k, cfg_.tol_on);  // throws NOT_NESTED
            std::map<AnnulusRegion, int> count;
            for (const auto& s : seps.cq) ++count[nc.classify(pi2(s))];
            const int inside = count[AnnulusRegion::A_Q_P];
            const int on = count[AnnulusRegion::ON_CURVE];
            const int classified = static_cast<int>(seps.cq.size()) - on;
            const bool all_in = classified >= 100 && inside == classified;
            const HCurveReport h = trace_h_curve(k, reg, seps.tracked);
            const double xk = reg.eq.at(k);
            const bool order = xk < h.s_k && h.s_k < h.s_p && h.s_p < h.s_q;
            const bool single = h.crossings_per_period == std::array<int, 3>{1, 1, 1};
            ok = ok && all_in && order && single;
            os << "k=" << k << ": nested, C_q^p in A_Q_P " << inside << "/" << classified << " (on curve " << on
               << "), xi=" << fix(xk, 6) << " s_k=" << fix(h.s_k, 6) << " s_p=" << fix(h.s_p, 6)
               << " s_q=" << fix(h.s_q, 6) << (single ? "" : " [crossing count]") << "; ";
        }
        r.pass = ok;
        r.detail = os.str();
        return r;
    }

    // 10
    CriterionResult separatrix_decomposition() {
        CriterionResult r;
        const FanResult& f = fan();
        const double total_secs = track_seconds_ + fan_seconds_;
        std::map<OmegaLimit, int> count;
        int errors = 0, contradictions = 0, need = 0, found = 0;
        for (const auto& rec : f.records) {
            if (!rec.error.empty()) {
                ++errors;
                continue;
            }
            ++count[rec.oc.omega_limit];
            if (rec.oc.omega_limit == OmegaLimit::UNKNOWN) continue;
            if (rec.witness.contradiction) ++contradictions;
            if (rec.witness.position == SeparatrixPosition::ABOVE_S1 ||
                rec.witness.position == SeparatrixPosition::BELOW_S_MINUS1) {
                ++need;
                if (rec.witness.witness_found) ++found;
            }
        }
        const int N = static_cast<int>(f.records.size());
        const int in_six = count[OmegaLimit::XI_MINUS2] + count[OmegaLimit::XI_0] + count[OmegaLimit::XI_2] +
                           count[OmegaLimit::O_MINUS1] + count[OmegaLimit::O_1] + count[OmegaLimit::O_Q];
        const double frac = N ? static_cast<double>(in_six) / N : 0.0;
        const double wfrac = need ? static_cast<double>(found) / need : 0.0;
        r.pass = N > 0 && frac >= 0.95 && contradictions == 0 && need > 0 && wfrac >= 0.95 && total_secs < 600.0;
        std::ostringstream os;
        os << N << " fan points:";
        for (const auto& [k, v] : count) os << " " << to_string(k) << "=" << v;
        if (errors) os << " errors=" << errors;
        os << "; classified " << fix(100.0 * frac, 2) << "%, order contradictions=" << contradictions
           << ", witnesses " << found << "/" << need << "; runtime=" << fix(total_secs, 1) << "s";
        r.detail = os.str();
        return r;
    }

    // 11
    CriterionResult injectivity() {
        CriterionResult r;
        const Registry& reg = registry();
        const SeparatrixSet& seps = separatrices();
        std::ostringstream os;
        bool ok = true;
        double lip = 0.0;
        for (int k : {1, -1}) {
            const auto cl = seps.closure(k, reg);
            std::vector<std::pair<Segment, Point2>> pts;
            pts.reserve(cl.size());
            for (const auto& s : cl) pts.emplace_back(s, pi2(s));
            const auto rep = injectivity_probe(pts, cfg_.key_tol, cfg_.seg_tol);
            ok = ok && rep.violations == 0 && rep.pairs > 0 && std::isfinite(rep.fitted_lipschitz);
            lip = std::max(lip, rep.fitted_lipschitz);
            GraphTable::Params gp;
            gp.tol_key = cfg_.graph_tol_key;
            gp.k_lip = cfg_.graph_k_lip;
            gp.tol_val = cfg_.graph_tol_val;
            (void)build_graph_table(cl, gp);  // throws MULTI_VALUED
            os << "pi2 on closure(S_" << k << ") " << cl.size() << " pts: collisions=" << rep.violations
               << " lipschitz=" << fix(rep.fitted_lipschitz, 2) << "; ";
        }
        const FanResult& f = fan();
        std::vector<std::pair<Segment, Point3>> p3;
        p3.reserve(f.unstable_samples.size());
        for (const auto& s : f.unstable_samples) p3.emplace_back(s, pi3(s));
        const auto rep3 = injectivity_probe(p3, cfg_.key_tol, cfg_.seg_tol);
        ok = ok && rep3.violations == 0 && rep3.pairs > 0 && lip < 1e4;
        os << "pi3 on " << p3.size() << " unstable-set pts: collisions=" << rep3.violations;
        r.pass = ok;
        r.detail = os.str();
        return r;
    }

    // 12
    CriterionResult nonordering() {
        CriterionResult r;
        const Registry& reg = registry();
        const SeparatrixSet& seps = separatrices();
        std::ostringstream os;
        std::size_t strict_total = 0;
        for (int k : {1, -1}) {
            const auto cl = seps.closure(k, reg);
            std::size_t strict = 0, pairs = 0;
            for (std::size_t i = 0; i < cl.size(); ++i) {
                for (std::size_t j = i + 1; j < cl.size(); ++j) {
                    ++pairs;
                    if (strictly_below(cl[i], cl[j], cfg_.order_tol) || strictly_below(cl[j], cl[i], cfg_.order_tol)) {
                        ++strict;
                    }
                }
            }
            strict_total += strict;
            os << "closure(S_" << k << "): " << strict << " strict pairs of " << pairs << "; ";
        }
        r.pass = strict_total == 0;
        r.detail = os.str();
        return r;
    }

private:
    using clock = std::chrono::steady_clock;

    static double since(clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); }

    static std::string sci(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", v);
        return buf;
    }
    static std::string fix(double v, int digits) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.*f", digits, v);
        return buf;
    }

    void note(const std::string& s) const {
        if (log_) log_(s);
    }

    RunConfig cfg_;
    int jobs_ = 1;
    std::function<void(const std::string&)> log_;
    std::optional<Registry> reg_;
    std::optional<SeparatrixSet> seps_;
    std::optional<FanResult> fan_;
    double track_seconds_ = 0.0;
    double fan_seconds_ = 0.0;
};

}  // namespace ddeu
