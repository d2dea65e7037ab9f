// dde-unstable: scenario runner over a JSON run configuration.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "ddeu/export.hpp"
#include "ddeu/pipeline.hpp"
#include "ddeu/verify.hpp"

using namespace ddeu;

namespace {

struct Common {
    std::string config;
    std::string out;
    int jobs = 0;
    bool verbose = false;
};

struct Context {
    RunConfig cfg;
    std::string hash;
    std::filesystem::path out;
    int jobs = 1;
    bool verbose = false;

    void log(const std::string& s) const {
        if (verbose) std::cerr << "[dde-unstable] " << s << "\n";
    }
    std::filesystem::path file(const std::string& name) const { return out / name; }
};

Context make_context(const Common& c) {
    Context ctx;
    ctx.cfg = c.config.empty() ? config_from_json(json::object()) : load_config(c.config);
    ctx.hash = config_hash(ctx.cfg);
    ctx.out = prepare_output(resolve_output_dir(ctx.cfg, c.out.empty() ? std::nullopt : std::optional(c.out)));
    ctx.jobs = resolve_jobs(ctx.cfg, c.jobs);
    ctx.verbose = c.verbose;
    write_json(ctx.file("config.json"), to_json(ctx.cfg), ctx.hash);
    ctx.log("config hash " + ctx.hash + ", output " + ctx.out.string() + ", jobs " + std::to_string(ctx.jobs));
    return ctx;
}

void print_error(const std::string& code, const std::string& detail) {
    json j;
    j["error"] = code;
    j["detail"] = detail;
    std::cerr << j.dump() << "\n";
}

const OrbitSpec& spec_for(const RunConfig& cfg, const std::string& label) {
    for (const auto& o : cfg.orbits) {
        if (o.label == label) return o;
    }
    throw Error(ErrorCode::InvalidParameter, "no orbit '" + label + "' in config");
}

std::vector<const OrbitSpec*> selected(const RunConfig& cfg, const std::string& label) {
    std::vector<const OrbitSpec*> out;
    if (label.empty()) {
        for (const auto& o : cfg.orbits) out.push_back(&o);
    } else {
        out.push_back(&spec_for(cfg, label));
    }
    if (out.empty()) throw Error(ErrorCode::InvalidConfig, "config lists no orbits");
    return out;
}

int cmd_equilibria(const Context& ctx) {
    const EquilibriaReport eq = equilibria(ctx.cfg.nonlinearity());
    json j = equilibria_json(eq);
    write_json(ctx.file("equilibria.json"), j, ctx.hash);
    std::cout << dump17(j) << "\n";
    return 0;
}

int cmd_simulate(const Context& ctx, std::optional<double> T) {
    const Nonlinearity nl = ctx.cfg.nonlinearity();
    const Segment phi = ctx.cfg.initial.build(ctx.cfg.n);
    const Trajectory tr = integrate(nl, phi, T.value_or(ctx.cfg.simulate_T));
    trajectory_csv(tr, ctx.hash).save(ctx.file("trajectory.csv"));
    ctx.log("wrote " + std::to_string(tr.size()) + " nodes");
    return 0;
}

int cmd_find_orbit(const Context& ctx, const std::string& label, bool spectrum_only) {
    const EquilibriaReport eq = equilibria(ctx.cfg.nonlinearity());
    for (const OrbitSpec* os : selected(ctx.cfg, label)) {
        ctx.log("solving " + os->label);
        const PeriodicOrbit orb = solve_orbit(ctx.cfg, *os, eq, ctx.cfg.n, ctx.jobs);
        if (spectrum_only) {
            write_json(ctx.file("spectrum_" + os->label + ".json"), spectrum_json(*orb.spectrum, orb.omega), ctx.hash);
        } else {
            write_json(ctx.file("orbit_" + os->label + ".json"), orbit_json(orb, ctx.cfg), ctx.hash);
        }
        std::printf("%s omega=%s residual=%s n_unstable=%d\n", os->label.c_str(), fmt17(orb.omega).c_str(),
                    fmt17(orb.residual).c_str(), orb.spectrum->n_unstable);
    }
    return 0;
}

int cmd_unstable_set(const Context& ctx) {
    const Registry reg = build_registry(ctx.cfg, ctx.cfg.n, ctx.jobs);
    ctx.log("tracking separatrices");
    const SeparatrixSet seps = track_separatrices(reg, ctx.cfg, ctx.jobs);
    ctx.log("classifying fan");
    const FanResult fan = classify_fan(reg, ctx.cfg, seps, ctx.jobs);

    CsvWriter csv(ctx.hash, "c1,c2,omega_limit,separatrix_position,confidence");
    std::map<std::string, int> counts;
    for (const auto& r : fan.records) {
        const std::string om = r.error.empty() ? to_string(r.oc.omega_limit) : "UNKNOWN";
        const std::string pos = r.error.empty() ? to_string(r.witness.position) : "UNKNOWN";
        csv.row({fmt17(r.c1), fmt17(r.c2), om, pos, fmt17(r.error.empty() ? r.witness.confidence : 0.0)});
        ++counts[om];
    }
    csv.save(ctx.file("classification.csv"));

    // trajectories of every export_stride-th seed
    const PeriodicOrbit& P = reg.orbit(OrbitLabel::P);
    const auto seeds = local_unstable_fan(P, ctx.cfg.fan_delta, ctx.cfg.fan_m);
    prepare_output(ctx.file("fan").string());
    json entries = json::array();
    const std::size_t stride = static_cast<std::size_t>(std::max(ctx.cfg.fan_export_stride, 1));
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        json e = {{"c1", seeds[i].c1}, {"c2", seeds[i].c2}, {"file", nullptr}};
        if (i % stride == 0) {
            const std::string name = "fan/traj_" + std::to_string(i) + ".csv";
            const Trajectory tr = integrate(P.nl, seeds[i].seed, ctx.cfg.fan_T);
            trajectory_csv(tr, ctx.hash).save(ctx.file(name));
            e["file"] = name;
        }
        entries.push_back(e);
    }
    json manifest;
    manifest["orbit"] = "P";
    manifest["delta"] = ctx.cfg.fan_delta;
    manifest["m"] = ctx.cfg.fan_m;
    manifest["T"] = ctx.cfg.fan_T;
    manifest["classification"] = "classification.csv";
    manifest["separatrices_tracked"] = seps.tracked.size();
    manifest["seeds"] = entries;
    write_json(ctx.file("fan_manifest.json"), manifest, ctx.hash);
    for (const auto& [k, v] : counts) std::printf("%s %d\n", k.c_str(), v);
    return 0;
}

int cmd_annulus(const Context& ctx) {
    const Registry reg = build_registry(ctx.cfg, ctx.cfg.n, ctx.jobs);
    const SeparatrixSet seps = track_separatrices(reg, ctx.cfg, ctx.jobs);
    const int per_unit = 4 * ctx.cfg.n;
    for (const auto label : {OrbitLabel::P, OrbitLabel::Q, OrbitLabel::X1, OrbitLabel::X_MINUS1}) {
        curve_csv(PlanarCurve::from_orbit(reg.orbit(label), per_unit), ctx.hash)
            .save(ctx.file("curve_" + to_string(label) + ".csv"));
    }
    for (int k : {1, -1}) {
        const NestedCurves nc = nested_curves(reg, k, ctx.cfg.tol_on, per_unit);
        json rep;
        rep["k"] = k;
        rep["nested"] = true;
        auto tally = [&](const std::vector<Segment>& pts) {
            std::map<AnnulusRegion, int> c;
            for (const auto& s : pts) ++c[nc.classify(pi2(s))];
            json j = json::object();
            for (auto r : {AnnulusRegion::INSIDE_OK, AnnulusRegion::A_K_P, AnnulusRegion::A_Q_P,
                           AnnulusRegion::OUTSIDE_OQ, AnnulusRegion::ON_CURVE}) {
                j[to_string(r)] = c[r];
            }
            return j;
        };
        rep["C_q^p"] = tally(seps.cq);
        rep[k == 1 ? "C_1^p" : "C_-1^p"] = tally(k == 1 ? seps.c1 : seps.cm1);
        rep["curves"] = {{"O_k", "curve_" + to_string(k == 1 ? OrbitLabel::X1 : OrbitLabel::X_MINUS1) + ".csv"},
                         {"O_p", "curve_P.csv"},
                         {"O_q", "curve_Q.csv"}};
        write_json(ctx.file(k == 1 ? "annulus_k1.json" : "annulus_k-1.json"), rep, ctx.hash);
        std::cout << dump17(rep, 0) << "\n";
    }
    return 0;
}

int cmd_h_curve(const Context& ctx) {
    const Registry reg = build_registry(ctx.cfg, ctx.cfg.n, ctx.jobs);
    const SeparatrixSet seps = track_separatrices(reg, ctx.cfg, ctx.jobs);
    for (int k : {1, -1}) {
        const HCurveReport h = trace_h_curve(k, reg, seps.tracked);
        write_json(ctx.file(k == 1 ? "h_curve_k1.json" : "h_curve_k-1.json"), h_curve_json(h), ctx.hash);
        std::printf("k=%d s_k=%s s_p=%s s_q=%s samples=%zu\n", k, fmt17(h.s_k).c_str(), fmt17(h.s_p).c_str(),
                    fmt17(h.s_q).c_str(), h.samples.size());
    }
    return 0;
}

int cmd_verify(const Context& ctx, const std::vector<int>& only) {
    Verifier v(ctx.cfg, ctx.jobs, [&](const std::string& s) { ctx.log(s); });
    std::vector<CriterionResult> results;
    if (only.empty()) {
        results = v.run_all();
    } else {
        for (int id : only) results.push_back(v.run(id));
    }
    json arr = json::array();
    bool ok = true;
    for (const auto& r : results) {
        std::cout << Verifier::format(r) << std::endl;
        ok = ok && r.pass;
        arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
    }
    json rep;
    rep["rng"] = "mt19937_64";
    rep["rng_seed"] = ctx.cfg.rng_seed;
    rep["criteria"] = arr;
    rep["pass"] = ok;
    write_json(ctx.file("verify.json"), rep, ctx.hash);
    return ok ? 0 : 1;
}

SegmentSpec parse_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("segment spec: ") + e.what());
    }
    json wrapper = {{"simulate", {{"initial", j}}}};
    return config_from_json(wrapper).initial;
}

int cmd_v_of_difference(const Context& ctx, const std::string& a, const std::string& b, std::optional<double> T) {
    const Nonlinearity nl = ctx.cfg.nonlinearity();
    const int n = ctx.cfg.n;
    const Segment pa = a.empty() ? ctx.cfg.initial.build(n) : parse_spec(a).build(n);
    const Segment pb = b.empty() ? Segment::constant(n, 0.0) : parse_spec(b).build(n);
    const double horizon = T.value_or(ctx.cfg.simulate_T);
    const Trajectory ta = integrate(nl, pa, horizon), tb = integrate(nl, pb, horizon);
    CsvWriter csv(ctx.hash, "t,V,sup");
    const int per_unit = 16;
    for (int j = 0; j <= static_cast<int>(horizon * per_unit); ++j) {
        const double t = static_cast<double>(j) / per_unit;
        const Segment z = ta.segment_at(t) - tb.segment_at(t);
        const auto v = v_of_difference(ta.segment_at(t), tb.segment_at(t));
        csv.row({fmt17(t), v ? to_string(*v) : "UNRESOLVED", fmt17(sup_norm(z))});
    }
    csv.save(ctx.file("v_of_difference.csv"));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unstable sets of periodic orbits of a delayed feedback equation"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config, "run configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("--out", common.out, "output directory");
    app.add_option("--jobs", common.jobs, "worker threads (0: config value)");
    app.add_flag("--verbose", common.verbose, "progress on stderr");

    std::optional<double> T;
    std::string label, spec_a, spec_b;
    std::vector<int> only;

    auto* eq = app.add_subcommand("equilibria", "equilibria and stability");
    auto* sim = app.add_subcommand("simulate", "integrate the configured initial segment");
    sim->add_option("--T", T, "horizon");
    auto* fo = app.add_subcommand("find-orbit", "solve periodic orbits");
    fo->add_option("--label", label, "P, Q, X1 or X_MINUS1 (default: all)");
    auto* fl = app.add_subcommand("floquet", "Floquet spectra");
    fl->add_option("--label", label, "P, Q, X1 or X_MINUS1 (default: all)");
    auto* us = app.add_subcommand("unstable-set", "grow and classify the unstable fan of O_p");
    auto* an = app.add_subcommand("annulus", "nested pi2 curves and region report");
    auto* hc = app.add_subcommand("h-curve", "crossings with the half lines at xi_k");
    auto* ve = app.add_subcommand("verify", "run the acceptance suite");
    ve->add_option("--only", only, "criterion ids");
    auto* vd = app.add_subcommand("v-of-difference", "V of the difference of two solutions over time");
    vd->add_option("--a", spec_a, "segment spec JSON (default: simulate.initial)");
    vd->add_option("--b", spec_b, "segment spec JSON (default: zero)");
    vd->add_option("--T", T, "horizon");

    for (auto* sc : {eq, sim, fo, fl, us, an, hc, ve, vd}) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("USAGE", e.what());
        return 2;
    }

    try {
        const Context ctx = make_context(common);
        if (*eq) return cmd_equilibria(ctx);
        if (*sim) return cmd_simulate(ctx, T);
        if (*fo) return cmd_find_orbit(ctx, label, false);
        if (*fl) return cmd_find_orbit(ctx, label, true);
        if (*us) return cmd_unstable_set(ctx);
        if (*an) return cmd_annulus(ctx);
        if (*hc) return cmd_h_curve(ctx);
        if (*ve) return cmd_verify(ctx, only);
        if (*vd) return cmd_v_of_difference(ctx, spec_a, spec_b, T);
    } catch (const Error& e) {
        print_error(std::string(to_string(e.code())), e.detail());
        return 3;
    } catch (const std::exception& e) {
        print_error("INTERNAL", e.what());
        return 4;
    }
    return 0;
}
