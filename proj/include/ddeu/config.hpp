#pragma once

// Run configuration: JSON in, every default materialized on load.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddeu/errors.hpp"
#include "ddeu/model.hpp"
#include "ddeu/segment.hpp"

namespace ddeu {

using json = nlohmann::ordered_json;

/// Initial segment description. "poly": sum coeffs[k] s^k. "sine":
/// c + A sin(2 pi (s+1)/w + asin((anchor - c)/A)), which rises through
/// `anchor` at s = -1.
struct SegmentSpec {
    std::string type = "poly";
    std::vector<double> coeffs{0.0};
    double c = 0.0, A = 1.0, w = 1.0;
    std::optional<double> anchor;  // sine only; defaults to the orbit anchor

    Segment build(int n, double anchor_default = 0.0) const {
        if (type == "poly") {
            auto cs = coeffs;
            return Segment::from_function(n, [cs](double s) {
                double acc = 0.0;
                for (auto it = cs.rbegin(); it != cs.rend(); ++it) acc = acc * s + *it;
                return acc;
            });
        }
        if (type == "sine") {
            const double a = anchor.value_or(anchor_default);
            if (!(std::abs(a - c) < std::abs(A))) {
                throw Error(ErrorCode::InvalidConfig, "sine seed does not reach its anchor");
            }
            const double ph = std::asin((a - c) / A);
            const double cc = c, AA = A, ww = w;
            return Segment::from_function(n, [=](double s) {
                return cc + AA * std::sin(2.0 * 3.14159265358979323846 * (s + 1.0) / ww + ph);
            });
        }
        throw Error(ErrorCode::InvalidConfig, "unknown segment type '" + type + "'");
    }
};

struct OrbitSpec {
    std::string label;       // P, Q, X1, X_MINUS1
    std::string anchor;      // a number, or xi_-1 / xi_0 / xi_1
    SegmentSpec seed;
    double period_guess = 0.0;
};

struct RunConfig {
    // model
    std::string kind = "NEAR_STEP";
    double K = 10.0, eps = 0.1, a = 0.0, b = 0.0, mu = 1.0;
    // grid
    int n = 512;
    // orbit finder
    std::vector<OrbitSpec> orbits;
    int n_newton = 128;
    int max_iter = 30;
    double newton_tol = 1e-9;
    double newton_tol_stop = 1e-12;
    double minimal_tol = 1e-4;
    // spectrum and section
    double tol_band = 1e-2;
    double imag_tol = 1e-10;
    double tol_trivial = 5e-3;
    double section_window = 0.3;
    // fan
    double fan_delta = 1e-3;
    int fan_m = 40;
    double fan_T = 100.0;
    int fan_export_stride = 64;
    // classification
    double T_max = 200.0;
    double class_delta = 1e-6;
    double dwell = 5.0;
    double period_tol = 1e-3;
    // separatrix tracking
    int track_radii = 8;
    double track_radius_ratio = 127.0;  // delta / smallest radius
    int track_angles = 72;
    double track_T = 20.0;
    double track_T_fate = 120.0;
    double bracket_tol = 1e-13;
    double sep_restart = 1e-9;
    double cloud_dt = 1.0 / 16.0;
    // witnesses
    double witness_dt = 0.25;
    // tolerances
    double order_tol = 1e-9;
    double tol_on = 1e-6;
    double key_tol = 1e-12;
    double seg_tol = 1e-6;
    double zero_rel = 1e-9;
    double tol_simple = 1e-9;
    double graph_tol_key = 1e-2;
    double graph_k_lip = 1e4;
    double graph_tol_val = 1e-6;
    // simulate
    SegmentSpec initial;
    double simulate_T = 10.0;
    // property suites
    int v_pairs = 200;
    int monotone_pairs = 100;
    double suite_horizon = 10.0;
    int dp_samples = 20;
    double dp_delta = 1e-6;
    int v_phases = 50;
    int probe_points = 1500;
    // run
    std::string output_dir = "out";
    std::uint64_t rng_seed = 20240607;
    int jobs = 0;  // 0: all cores

    Nonlinearity nonlinearity() const {
        if (kind == "NEAR_STEP") return Nonlinearity::near_step(K, eps, mu);
        if (kind == "AFFINE") return Nonlinearity::affine(a, b, mu);
        throw Error(ErrorCode::InvalidConfig, "unknown model kind '" + kind + "'");
    }
};

/// Orbit seeds that converge at the shipped parameters.
inline std::vector<OrbitSpec> shipped_orbits() {
    auto sine = [](double c, double A, double w) {
        SegmentSpec s;
        s.type = "sine";
        s.c = c;
        s.A = A;
        s.w = w;
        return s;
    };
    return {{"P", "0", sine(0.0, 1.1, 1.24), 1.24},
            {"Q", "0", sine(0.0, 2.3, 1.28), 1.28},
            {"X1", "xi_1", sine(0.713, 0.27, 1.16), 1.16},
            {"X_MINUS1", "xi_-1", sine(-0.713, 0.27, 1.16), 1.16}};
}

inline json to_json(const SegmentSpec& s) {
    json j;
    j["type"] = s.type;
    if (s.type == "poly") {
        j["coeffs"] = s.coeffs;
    } else {
        j["c"] = s.c;
        j["A"] = s.A;
        j["w"] = s.w;
        if (s.anchor) j["anchor"] = *s.anchor;
    }
    return j;
}

inline json to_json(const RunConfig& c) {
    json j;
    j["model"] = {{"kind", c.kind}, {"K", c.K}, {"eps", c.eps}, {"a", c.a}, {"b", c.b}, {"mu", c.mu}};
    j["grid"] = {{"n", c.n}};
    json orbs = json::array();
    for (const auto& o : c.orbits) {
        orbs.push_back({{"label", o.label}, {"anchor", o.anchor}, {"seed", to_json(o.seed)},
                        {"period_guess", o.period_guess}});
    }
    j["orbits"] = orbs;
    j["newton"] = {{"n_newton", c.n_newton}, {"max_iter", c.max_iter}, {"tol", c.newton_tol},
                   {"tol_stop", c.newton_tol_stop}, {"minimal_tol", c.minimal_tol}};
    j["floquet"] = {{"tol_band", c.tol_band}, {"imag_tol", c.imag_tol}, {"tol_trivial", c.tol_trivial}};
    j["section"] = {{"window", c.section_window}};
    j["fan"] = {{"delta", c.fan_delta}, {"m", c.fan_m}, {"T", c.fan_T}, {"export_stride", c.fan_export_stride}};
    j["classify"] = {{"T_max", c.T_max}, {"delta", c.class_delta}, {"dwell", c.dwell}, {"period_tol", c.period_tol}};
    j["track"] = {{"radii", c.track_radii},     {"radius_ratio", c.track_radius_ratio},
                  {"angles", c.track_angles},   {"T", c.track_T},
                  {"T_fate", c.track_T_fate},   {"bracket_tol", c.bracket_tol},
                  {"sep_restart", c.sep_restart}, {"cloud_dt", c.cloud_dt},
                  {"witness_dt", c.witness_dt}};
    j["tolerances"] = {{"order", c.order_tol},         {"on_curve", c.tol_on},       {"key", c.key_tol},
                       {"segment", c.seg_tol},         {"zero_rel", c.zero_rel},     {"simple", c.tol_simple},
                       {"graph_key", c.graph_tol_key}, {"graph_lip", c.graph_k_lip}, {"graph_val", c.graph_tol_val}};
    j["simulate"] = {{"initial", to_json(c.initial)}, {"T", c.simulate_T}};
    j["suites"] = {{"v_pairs", c.v_pairs},       {"monotone_pairs", c.monotone_pairs},
                   {"horizon", c.suite_horizon}, {"dp_samples", c.dp_samples},
                   {"dp_delta", c.dp_delta},     {"v_phases", c.v_phases},
                   {"probe_points", c.probe_points}};
    j["output_dir"] = c.output_dir;
    j["rng_seed"] = c.rng_seed;
    j["jobs"] = c.jobs;
    return j;
}

namespace detail {

/// Reads `key` from object `j` into `out` if present; collects the keys seen
/// so unknown keys can be rejected.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw Error(ErrorCode::InvalidConfig, where_ + " must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidConfig, where_ + "." + key + ": " + e.what());
        }
    }

    const json* sub(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw Error(ErrorCode::InvalidConfig, "unknown key " + where_ + "." + it.key());
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

inline SegmentSpec segment_spec_from(const json& j, const std::string& where) {
    SegmentSpec s;
    Reader r(j, where);
    r.get("type", s.type);
    r.get("coeffs", s.coeffs);
    r.get("c", s.c);
    r.get("A", s.A);
    r.get("w", s.w);
    if (const json* a = r.sub("anchor")) {
        if (!a->is_number()) throw Error(ErrorCode::InvalidConfig, where + ".anchor must be a number");
        s.anchor = a->get<double>();
    }
    r.finish();
    if (s.type != "poly" && s.type != "sine") throw Error(ErrorCode::InvalidConfig, where + ".type unknown");
    return s;
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    detail::Reader top(j, "config");
    if (const json* m = top.sub("model")) {
        detail::Reader r(*m, "model");
        r.get("kind", c.kind);
        r.get("K", c.K);
        r.get("eps", c.eps);
        r.get("a", c.a);
        r.get("b", c.b);
        r.get("mu", c.mu);
        r.finish();
    }
    if (const json* g = top.sub("grid")) {
        detail::Reader r(*g, "grid");
        r.get("n", c.n);
        r.finish();
    }
    bool have_orbits = false;
    if (const json* o = top.sub("orbits")) {
        if (!o->is_array()) throw Error(ErrorCode::InvalidConfig, "orbits must be an array");
        have_orbits = true;
        for (std::size_t i = 0; i < o->size(); ++i) {
            const std::string where = "orbits[" + std::to_string(i) + "]";
            detail::Reader r((*o)[i], where);
            OrbitSpec os;
            r.get("label", os.label);
            if (const json* a = r.sub("anchor")) {
                os.anchor = a->is_string() ? a->get<std::string>() : json(*a).dump();
            }
            if (const json* s = r.sub("seed")) os.seed = detail::segment_spec_from(*s, where + ".seed");
            r.get("period_guess", os.period_guess);
            r.finish();
            c.orbits.push_back(std::move(os));
        }
    }
    if (!have_orbits && c.kind == "NEAR_STEP") c.orbits = shipped_orbits();
    if (const json* s = top.sub("newton")) {
        detail::Reader r(*s, "newton");
        r.get("n_newton", c.n_newton);
        r.get("max_iter", c.max_iter);
        r.get("tol", c.newton_tol);
        r.get("tol_stop", c.newton_tol_stop);
        r.get("minimal_tol", c.minimal_tol);
        r.finish();
    }
    if (const json* s = top.sub("floquet")) {
        detail::Reader r(*s, "floquet");
        r.get("tol_band", c.tol_band);
        r.get("imag_tol", c.imag_tol);
        r.get("tol_trivial", c.tol_trivial);
        r.finish();
    }
    if (const json* s = top.sub("section")) {
        detail::Reader r(*s, "section");
        r.get("window", c.section_window);
        r.finish();
    }
    if (const json* s = top.sub("fan")) {
        detail::Reader r(*s, "fan");
        r.get("delta", c.fan_delta);
        r.get("m", c.fan_m);
        r.get("T", c.fan_T);
        r.get("export_stride", c.fan_export_stride);
        r.finish();
    }
    if (const json* s = top.sub("classify")) {
        detail::Reader r(*s, "classify");
        r.get("T_max", c.T_max);
        r.get("delta", c.class_delta);
        r.get("dwell", c.dwell);
        r.get("period_tol", c.period_tol);
        r.finish();
    }
    if (const json* s = top.sub("track")) {
        detail::Reader r(*s, "track");
        r.get("radii", c.track_radii);
        r.get("radius_ratio", c.track_radius_ratio);
        r.get("angles", c.track_angles);
        r.get("T", c.track_T);
        r.get("T_fate", c.track_T_fate);
        r.get("bracket_tol", c.bracket_tol);
        r.get("sep_restart", c.sep_restart);
        r.get("cloud_dt", c.cloud_dt);
        r.get("witness_dt", c.witness_dt);
        r.finish();
    }
    if (const json* s = top.sub("tolerances")) {
        detail::Reader r(*s, "tolerances");
        r.get("order", c.order_tol);
        r.get("on_curve", c.tol_on);
        r.get("key", c.key_tol);
        r.get("segment", c.seg_tol);
        r.get("zero_rel", c.zero_rel);
        r.get("simple", c.tol_simple);
        r.get("graph_key", c.graph_tol_key);
        r.get("graph_lip", c.graph_k_lip);
        r.get("graph_val", c.graph_tol_val);
        r.finish();
    }
    if (const json* s = top.sub("simulate")) {
        detail::Reader r(*s, "simulate");
        if (const json* i = r.sub("initial")) c.initial = detail::segment_spec_from(*i, "simulate.initial");
        r.get("T", c.simulate_T);
        r.finish();
    }
    if (const json* s = top.sub("suites")) {
        detail::Reader r(*s, "suites");
        r.get("v_pairs", c.v_pairs);
        r.get("monotone_pairs", c.monotone_pairs);
        r.get("horizon", c.suite_horizon);
        r.get("dp_samples", c.dp_samples);
        r.get("dp_delta", c.dp_delta);
        r.get("v_phases", c.v_phases);
        r.get("probe_points", c.probe_points);
        r.finish();
    }
    top.get("output_dir", c.output_dir);
    top.get("rng_seed", c.rng_seed);
    top.get("jobs", c.jobs);
    top.finish();

    if (c.n < 4) throw Error(ErrorCode::InvalidConfig, "grid.n must be >= 4");
    if (c.n_newton < 4) throw Error(ErrorCode::InvalidConfig, "newton.n_newton must be >= 4");
    if (c.fan_m < 1) throw Error(ErrorCode::InvalidConfig, "fan.m must be >= 1");
    if (!(c.fan_delta > 0.0)) throw Error(ErrorCode::InvalidConfig, "fan.delta must be > 0");
    if (!(c.mu > 0.0)) throw Error(ErrorCode::InvalidConfig, "model.mu must be > 0");
    if (c.jobs < 0) throw Error(ErrorCode::InvalidConfig, "jobs must be >= 0");
    (void)c.nonlinearity();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
    return config_from_json(j);
}

/// FNV-1a 64 of the materialized config, excluding fields that do not
/// affect results (output location, parallelism).
inline std::string config_hash(const RunConfig& c) {
    json j = to_json(c);
    j.erase("output_dir");
    j.erase("jobs");
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

/// Anchor value for an orbit spec: a number or xi_j of the model.
inline double resolve_anchor(const std::string& a, const EquilibriaReport& eq) {
    if (a == "xi_-1") return eq.at(-1);
    if (a == "xi_0") return eq.at(0);
    if (a == "xi_1") return eq.at(1);
    try {
        std::size_t pos = 0;
        const double v = std::stod(a, &pos);
        if (pos != a.size()) throw std::invalid_argument(a);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, "bad anchor '" + a + "'");
    }
}

}  // namespace ddeu
