#pragma once

// JSON and CSV layouts of the exported artifacts.

#include <string>
#include <vector>

#include "ddeu/classify.hpp"
#include "ddeu/config.hpp"
#include "ddeu/geometry.hpp"
#include "ddeu/io.hpp"
#include "ddeu/model.hpp"
#include "ddeu/poincare.hpp"

namespace ddeu {

inline json equilibria_json(const EquilibriaReport& eq) {
    json j;
    j["xi"] = std::vector<double>(eq.xi.begin(), eq.xi.end());
    j["slopes"] = std::vector<double>(eq.slopes.begin(), eq.slopes.end());
    json st = json::array();
    for (auto s : eq.stability) st.push_back(to_string(s));
    j["stability"] = st;
    return j;
}

inline json spectrum_json(const FloquetSpectrum& fs, double period) {
    json j;
    j["period"] = period;
    json m = json::array();
    for (const auto& z : fs.multipliers) m.push_back({{"re", z.real()}, {"im", z.imag()}});
    j["multipliers"] = m;
    j["n_unstable"] = fs.n_unstable;
    j["trivial_residual"] = fs.trivial_residual;
    return j;
}

inline json orbit_json(const PeriodicOrbit& orb, const RunConfig& cfg) {
    json j;
    j["label"] = to_string(orb.label);
    j["mu"] = cfg.mu;
    j["K"] = cfg.K;
    j["eps"] = cfg.eps;
    j["omega"] = orb.omega;
    j["anchor"] = orb.anchor;
    j["n"] = orb.n();
    j["samples"] = orb.samples();
    j["residual"] = orb.residual;
    j["floquet"] = orb.spectrum ? spectrum_json(*orb.spectrum, orb.omega) : json(nullptr);
    return j;
}

inline json h_curve_json(const HCurveReport& h) {
    json j;
    j["k"] = h.k;
    j["s_k"] = h.s_k;
    j["s_p"] = h.s_p;
    j["s_q"] = h.s_q;
    j["crossings_per_period"] = std::vector<int>(h.crossings_per_period.begin(), h.crossings_per_period.end());
    json s = json::array();
    for (const auto& x : h.samples) s.push_back({{"s", x.s}, {"connection", to_string(x.connection)}});
    j["samples"] = s;
    return j;
}

/// One row per node, initial segment included: `t,x`.
inline CsvWriter trajectory_csv(const Trajectory& tr, const std::string& hash) {
    CsvWriter w(hash, "t,x");
    for (std::size_t i = 0; i < tr.size(); ++i) w.row(std::vector<double>{tr.time(i), tr.x(i)});
    return w;
}

inline CsvWriter curve_csv(const PlanarCurve& c, const std::string& hash) {
    CsvWriter w(hash, "x0,xm1");
    for (const auto& p : c.points) w.row(std::vector<double>{p.x0, p.xm1});
    return w;
}

}  // namespace ddeu
