#include "tristable_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

#include "tristable/averaging.hpp"
#include "tristable/estimation.hpp"
#include "tristable/orbit.hpp"
#include "tristable/parallel.hpp"
#include "tristable/potential.hpp"
#include "tristable/sde.hpp"
#include "tristable_cli/output.hpp"

#ifndef TRISTABLE_VERSION
#define TRISTABLE_VERSION "0.0.0"
#endif

namespace tristable::cli {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(const Error& e) noexcept {
    switch (e.code()) {
        case ErrorCode::ConfigError: return kUsage;
        case ErrorCode::IoError: return kUnexpected;
        default: return kNumeric;
    }
}

namespace {

void note(const Invocation& inv, const std::string& line) {
    if (inv.log) *inv.log << line << '\n';
}

// Sidecars omit the output directory so reruns into different directories
// produce identical files.
json base_sidecar(const RunConfig& cfg, const char* command) {
    json c = to_json(cfg);
    c["output"].erase("dir");
    json j{{"tool", "tristable"}, {"version", TRISTABLE_VERSION}, {"command", command}, {"config", c}};
    const NoisePairSpec& n = cfg.model.noise;
    if (cfg.model.noise_case == NoiseCase::CaseII && n.lambda != 0.0 &&
        cfg.spd.options.cross_spectrum == CrossSpectrum::Verbatim && !(n.n1.tau == 1.0 && n.n2.tau == 1.0)) {
        j["note"] =
            "the verbatim cross-spectral factor differs from the spectrum of the simulated driver pair "
            "unless tau1 = tau2 = 1; spd.cross_spectrum = \"generator\" uses the simulated pair";
    }
    return j;
}

json grid_json(const std::vector<double>& g) {
    return {{"lo", g.front()}, {"hi", g.back()}, {"points", g.size()}};
}

json bins_json(const BinSpec& b) { return {{"lo", b.lo}, {"hi", b.hi}, {"bins", b.bins}}; }

std::string value_tag(const std::string& parameter, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%g", parameter.c_str(), value);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Simulation

struct SinkOptions {
    bool x = false, v = false, joint = false, energy = false, amplitude = false, series = false, psd = false;
};

struct RealizationSink {
    RealizationSink(const RunConfig& cfg, const BinSpec& energy_bins, const BinSpec& amplitude_bins,
                    const SinkOptions& want)
        : params(cfg.model.stiffness), amplitude_tracker(cfg.sim.dt * cfg.sim.decimation), record_noise(cfg.sim.record_noise) {
        if (want.x) hx.emplace(cfg.bins_x);
        if (want.v) hv.emplace(cfg.bins_v);
        if (want.joint) hj.emplace(cfg.bins_x, cfg.bins_v);
        if (want.energy) he.emplace(energy_bins);
        if (want.amplitude) ha.emplace(amplitude_bins);
        if (want.psd) welch.emplace(cfg.sim.dt * cfg.sim.decimation, cfg.psd.welch);
        series = want.series;
    }

    void operator()(double t, double x, double v, double a, double b) {
        if (hx) hx->add(x);
        if (hv) hv->add(v);
        if (hj) hj->add(x, v);
        if (he) he->add(evaluate_total_energy(x, v, params));
        if (ha) amplitude_tracker.add(x, v, [&](double amp, double duration) { ha->add(amp, duration); });
        if (welch) welch->add(x);
        if (series) {
            st.push_back(t);
            sx.push_back(x);
            sv.push_back(v);
            if (record_noise) {
                sa.push_back(a);
                sb.push_back(b);
            }
        }
    }

    StiffnessParams params;
    AmplitudeTracker amplitude_tracker;
    bool record_noise;
    bool series = false;
    std::optional<Histogram1D> hx, hv, he, ha;
    std::optional<Histogram2D> hj;
    std::optional<WelchAccumulator> welch;
    std::vector<double> st, sx, sv, sa, sb;
};

BinSpec energy_bins(const RunConfig& cfg) {
    if (cfg.bins_energy) return *cfg.bins_energy;
    const Landscape land = classify_landscape(cfg.model.stiffness);
    const NoisePairSpec& n = cfg.model.noise;
    const double scale = (n.n1.d + n.n2.d) / std::max(cfg.model.damping.beta, 1e-12);
    return {land.global_minimum(), land.u1 + std::max(0.1, 8.0 * scale), 128};
}

BinSpec amplitude_bins(const RunConfig& cfg) {
    if (cfg.bins_amplitude) return *cfg.bins_amplitude;
    return {0.0, std::max(std::abs(cfg.bins_x.lo), std::abs(cfg.bins_x.hi)), 128};
}

std::vector<RealizationSink> run_simulation(const Invocation& inv, const RunConfig& cfg, const SinkOptions& want) {
    const BinSpec eb = want.energy ? energy_bins(cfg) : BinSpec{};
    const BinSpec ab = want.amplitude ? amplitude_bins(cfg) : BinSpec{};
    std::vector<RealizationSink> sinks;
    sinks.reserve(static_cast<std::size_t>(cfg.sim.ensemble));
    for (int r = 0; r < cfg.sim.ensemble; ++r) sinks.emplace_back(cfg, eb, ab, want);
    const auto start = std::chrono::steady_clock::now();
    run_ensemble(cfg.model, cfg.sim, resolve_threads(cfg.threads), sinks);
    char buf[160];
    std::snprintf(buf, sizeof buf, "simulated %d x %lld steps in %.2f s", cfg.sim.ensemble,
                  static_cast<long long>(cfg.sim.n_steps), seconds_since(start));
    note(inv, buf);
    return sinks;
}

json seeds_json(const RunConfig& cfg) {
    json seeds = json::array();
    for (int r = 0; r < cfg.sim.ensemble; ++r) seeds.push_back(realization_seed(cfg.sim.seed, r));
    return {{"seed", cfg.sim.seed},
            {"realization_seeds", seeds},
            {"samples_per_realization", cfg.sim.kept_samples()},
            {"dt_effective", cfg.sim.dt * cfg.sim.decimation}};
}

template <class H>
HistogramDensity pooled(std::vector<RealizationSink>& sinks, std::optional<H> RealizationSink::*member) {
    H total = *(sinks.front().*member);
    for (std::size_t r = 1; r < sinks.size(); ++r) total.merge(*(sinks[r].*member));
    return total.density();
}

Table histogram_table(const HistogramDensity& h) {
    Table t;
    if (h.dimension == 1) {
        t.columns = {"bin_lo", "bin_hi", "density"};
        for (std::size_t i = 0; i < h.density.size(); ++i) t.add({h.edges_x[i], h.edges_x[i + 1], h.density[i]});
    } else {
        t.columns = {"x_lo", "x_hi", "v_lo", "v_hi", "density"};
        const std::size_t ny = h.edges_y.size() - 1;
        for (std::size_t i = 0; i + 1 < h.edges_x.size(); ++i) {
            for (std::size_t j = 0; j < ny; ++j) {
                t.add({h.edges_x[i], h.edges_x[i + 1], h.edges_y[j], h.edges_y[j + 1], h.density[i * ny + j]});
            }
        }
    }
    return t;
}

json histogram_meta(const HistogramDensity& h) {
    return {{"count", h.count}, {"weight", h.weight}, {"underflow", h.underflow}, {"overflow", h.overflow},
            {"mass", h.mass()}};
}

SpectrumEstimate pooled_spectrum(std::vector<RealizationSink>& sinks) {
    WelchAccumulator& total = *sinks.front().welch;
    for (std::size_t r = 1; r < sinks.size(); ++r) total.merge(*sinks[r].welch);
    return total.estimate();
}

Table spectrum_table(const SpectrumEstimate& s) {
    Table t;
    t.columns = {"omega", "psd"};
    for (std::size_t i = 0; i < s.omega.size(); ++i) t.add({s.omega[i], s.psd[i]});
    return t;
}

json spectrum_meta(const SpectrumEstimate& s) {
    return {{"segment_length", s.segment_length}, {"overlap", s.overlap},
            {"window", std::string(to_string(s.window))}, {"segments", s.segments},
            {"dt_effective", s.dt_effective}, {"variance", s.integral()}};
}

json quality_json(const SpectrumEstimate& s, const QualityOptions& opts) {
    try {
        const QualityFactor q = quality_factor(s, opts);
        return {{"status", "ok"},       {"h", q.h},           {"omega_m", q.omega_m}, {"delta_omega", q.delta_omega},
                {"eta", q.eta},         {"omega_lo", q.omega_lo}, {"omega_hi", q.omega_hi}};
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoPeak && e.code() != ErrorCode::NoWidth) throw;
        return {{"status", std::string(to_string(e.code()))}, {"message", e.what()}};
    }
}

// ---------------------------------------------------------------------------
// SPD tables

struct SpdGrids {
    std::vector<double> xs, vs, energies, amplitudes, joint_x, joint_v;
};

SpdGrids spd_grids(const RunConfig& cfg, const std::vector<StationaryDensity>& densities) {
    double xm = 0.0, vm = 0.0, hm = 0.0;
    for (const auto& d : densities) {
        xm = std::max(xm, d.x_max());
        vm = std::max(vm, d.v_max());
        hm = std::max(hm, d.h_max());
    }
    const double hmin = densities.front().landscape().global_minimum();
    SpdGrids g;
    g.xs = cfg.grid_x ? cfg.grid_x->values() : linspace(-xm, xm, 401);
    g.vs = cfg.grid_v ? cfg.grid_v->values() : linspace(-vm, vm, 401);
    g.energies = cfg.grid_energy ? cfg.grid_energy->values() : linspace(hmin, hm, 401);
    g.amplitudes = cfg.grid_amplitude ? cfg.grid_amplitude->values() : linspace(0.0, xm, 401);
    g.joint_x = cfg.grid_x ? g.xs : linspace(-xm, xm, 161);
    g.joint_v = cfg.grid_v ? g.vs : linspace(-vm, vm, 161);
    return g;
}

json density_meta(const RunConfig& cfg, const StationaryDensity& d, const DensityTable& t) {
    json j = base_sidecar(cfg, "spd");
    j["kind"] = std::string(to_string(t.kind));
    j["form"] = std::string(to_string(t.form));
    j["fixed_frequency"] = t.fixed_frequency;
    j["c0"] = t.c0;
    j["grid_mass"] = t.grid_mass;
    j["h_max"] = d.h_max();
    j["grid"] = grid_json(t.grid);
    if (!t.grid2.empty()) j["grid2"] = grid_json(t.grid2);
    json intervals = json::object();
    for (MotionPattern b : StationaryDensity::kBranches) {
        if (!d.table().has_branch(b)) continue;
        const auto [lo, hi] = d.branch_interval(b);
        intervals[std::string(to_string(b))] = {lo, hi};
    }
    j["branch_intervals"] = intervals;
    return j;
}

Table curve_table(const char* name, const DensityTable& t) {
    Table out;
    out.columns = {name, "density"};
    for (std::size_t i = 0; i < t.grid.size(); ++i) out.add({t.grid[i], t.values[i]});
    return out;
}

Table binned_table(std::span<const double> edges, const std::vector<double>& values) {
    Table out;
    out.columns = {"bin_lo", "bin_hi", "density"};
    for (std::size_t i = 0; i < values.size(); ++i) out.add({edges[i], edges[i + 1], values[i]});
    return out;
}

bool wants(const RunConfig& cfg, const char* table) {
    return std::find(cfg.spd.tables.begin(), cfg.spd.tables.end(), table) != cfg.spd.tables.end();
}

json discrepancy(const DensityTable& a, const DensityTable& b) {
    const Comparison c = compare_densities(DensityCurve::from(a), DensityCurve::from(b));
    return {{"l1", c.l1}, {"sup", c.sup}, {"ks", c.ks}};
}

void spd_run(const Invocation& inv, const RunConfig& cfg, const fs::path& dir) {
    std::vector<SpdForm> forms;
    if (cfg.spd.form != SpdSection::Form::Integral) forms.push_back(SpdForm::ClosedForm);
    if (cfg.spd.form != SpdSection::Form::Closed) forms.push_back(SpdForm::IntegralForm);
    const bool both = forms.size() == 2;
    const bool case1 = cfg.model.noise_case == NoiseCase::CaseI;

    SpdOptions options = cfg.spd.options;
    options.threads = resolve_threads(cfg.threads);
    std::vector<StationaryDensity> densities;
    for (SpdForm f : forms) densities.emplace_back(cfg.model, f, options);
    const SpdGrids g = spd_grids(cfg, densities);
    const std::vector<double> edges_x = cfg.bins_x.edges(), edges_v = cfg.bins_v.edges();

    std::vector<DensityTable> energy_tables, mx_tables, mv_tables;
    for (const StationaryDensity& d : densities) {
        const std::string suffix = both ? "_" + std::string(to_string(d.form())) : "";
        if (wants(cfg, "energy")) {
            DensityTable t = spd_energy(d, g.energies);
            Table out;
            out.columns = {"h", "density", "cross", "middle", "side_right", "side_left"};
            for (std::size_t i = 0; i < t.grid.size(); ++i) {
                out.add({t.grid[i], t.values[i], t.branch_values[0][i], t.branch_values[1][i], t.branch_values[2][i],
                         t.branch_values[3][i]});
            }
            write_table(dir, "spd_energy" + suffix, out, cfg.output.format, density_meta(cfg, d, t));
            energy_tables.push_back(std::move(t));
        }
        if (wants(cfg, "joint")) {
            DensityTable t = spd_joint(d, g.joint_x, g.joint_v);
            Table out;
            out.columns = {"x", "v", "density"};
            const std::size_t nv = t.grid2.size();
            for (std::size_t i = 0; i < t.grid.size(); ++i) {
                for (std::size_t j = 0; j < nv; ++j) out.add({t.grid[i], t.grid2[j], t.values[i * nv + j]});
            }
            write_table(dir, "spd_joint" + suffix, out, cfg.output.format, density_meta(cfg, d, t));
        }
        if (wants(cfg, "marginals")) {
            auto [mx, mv] = spd_marginals(d, g.xs, g.vs);
            write_table(dir, "spd_marginal_x" + suffix, curve_table("x", mx), cfg.output.format,
                        density_meta(cfg, d, mx));
            write_table(dir, "spd_marginal_v" + suffix, curve_table("v", mv), cfg.output.format,
                        density_meta(cfg, d, mv));
            json bx = base_sidecar(cfg, "spd");
            bx["form"] = std::string(to_string(d.form()));
            bx["c0"] = d.c0();
            bx["note"] = "bin averages of the marginal density";
            bx["bins"] = bins_json(cfg.bins_x);
            write_table(dir, "spd_marginal_x_bins" + suffix, binned_table(edges_x, d.marginal_x_bins(edges_x)),
                        cfg.output.format, bx);
            bx["bins"] = bins_json(cfg.bins_v);
            write_table(dir, "spd_marginal_v_bins" + suffix, binned_table(edges_v, d.marginal_v_bins(edges_v)),
                        cfg.output.format, bx);
            mx_tables.push_back(std::move(mx));
            mv_tables.push_back(std::move(mv));
        }
        if (wants(cfg, "amplitude")) {
            if (!case1) {
                note(inv, "skipping amplitude table: it requires case I");
            } else {
                DensityTable t = spd_amplitude(d, g.amplitudes);
                Table out;
                out.columns = {"a", "density", "branch"};
                for (std::size_t i = 0; i < t.grid.size(); ++i) {
                    out.add({t.grid[i], t.values[i], std::string(to_string(t.labels[i]))});
                }
                write_table(dir, "spd_amplitude" + suffix, out, cfg.output.format, density_meta(cfg, d, t));
            }
        }
    }
    if (wants(cfg, "baseline")) {
        if (!case1) {
            note(inv, "skipping baseline tables: they require case I");
        } else {
            auto [bx, bv] = spd_fixed_frequency_baseline(cfg.model, g.xs, g.vs, options);
            const StationaryDensity& ref = densities.front();
            write_table(dir, "spd_baseline_x", curve_table("x", bx), cfg.output.format, density_meta(cfg, ref, bx));
            write_table(dir, "spd_baseline_v", curve_table("v", bv), cfg.output.format, density_meta(cfg, ref, bv));
        }
    }
    if (both) {
        json d = base_sidecar(cfg, "spd");
        json metrics = json::object();
        if (energy_tables.size() == 2) metrics["energy"] = discrepancy(energy_tables[0], energy_tables[1]);
        if (mx_tables.size() == 2) {
            metrics["marginal_x"] = discrepancy(mx_tables[0], mx_tables[1]);
            metrics["marginal_v"] = discrepancy(mv_tables[0], mv_tables[1]);
        }
        d["closed_vs_integral"] = metrics;
        write_json(dir / "spd_discrepancy.json", d);
    }
}

// ---------------------------------------------------------------------------
// Compare

DensityCurve read_curve(const fs::path& path) {
    const CsvData data = read_csv(path);
    const int lo = data.column("bin_lo"), hi = data.column("bin_hi"), dens = data.column("density");
    if (dens < 0) throw Error(ErrorCode::SupportMismatch, path.string() + " has no density column");
    if (data.rows.empty()) throw Error(ErrorCode::SupportMismatch, path.string() + " has no rows");
    if (data.column("v") >= 0 && data.column("x") >= 0) {
        throw Error(ErrorCode::InvalidParameter, path.string() + " is a two-dimensional table; compare expects 1-D");
    }
    const std::vector<double> y = data.values(dens);
    if (lo >= 0 && hi >= 0) {
        std::vector<double> edges = data.values(lo);
        edges.push_back(data.rows.back()[static_cast<std::size_t>(hi)]);
        return DensityCurve::binned(std::move(edges), y);
    }
    return DensityCurve::pointwise(data.values(0), y);
}

std::string support(const DensityCurve& c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", c.lo(), c.hi());
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_landscape(const Invocation& inv, std::ostream& report) {
    const StiffnessParams& p = inv.cfg.model.stiffness;
    json j{{"k1", p.k1()}, {"k2", p.k2()}, {"k3", p.k3()}, {"discriminant", p.discriminant()}};
    int code = kOk;
    try {
        const Landscape land = classify_landscape(p);
        j["status"] = "ok";
        j["tri_stable"] = true;
        j["x_s"] = land.stable_side;
        j["x_u"] = land.unstable;
        j["equilibria"] = {-land.stable_side, -land.unstable, 0.0, land.unstable, land.stable_side};
        j["u_side"] = land.u_side;
        j["u_middle"] = land.u_middle;
        j["u1"] = land.u1;
        j["u2"] = land.u2;
        j["deepest"] = std::string(to_string(land.deepest));
        j["separatrix_outer"] = land.separatrix_outer();
        j["guard_band"] = land.guard_band();
        j["omega_middle"] = std::sqrt(potential_curvature(0.0, p));
        j["omega_side"] = std::sqrt(potential_curvature(land.stable_side, p));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NotTriStable) throw;
        j["status"] = "NotTriStable";
        j["tri_stable"] = false;
        j["message"] = e.what();
        code = kNumeric;
    }
    report << j.dump(2) << '\n';
    json file = base_sidecar(inv.cfg, "landscape");
    file["landscape"] = j;
    write_json(inv.out / "landscape.json", file);
    return code;
}

int cmd_frequency(const Invocation& inv) {
    const RunConfig& cfg = inv.cfg;
    const Landscape land = classify_landscape(cfg.model.stiffness);
    const double h_max = cfg.frequency_h_max > land.u1 ? cfg.frequency_h_max : land.u1 + 1.0;
    Table t;
    t.columns = {"branch", "H", "T", "omega", "m_v2", "m_x", "m_x2", "m_v2x", "m_v2x2"};
    json grids = json::object();
    for (MotionPattern b : StationaryDensity::kBranches) {
        const std::vector<double> hs =
            grid_energies(land, default_branch_grid(land, b, cfg.frequency_points, h_max));
        grids[std::string(to_string(b))] = grid_json(hs);
        for (double h : hs) {
            const Orbit o = solve_orbit(h, b, land);
            const OrbitMoments& m = o.moments;
            t.add({std::string(to_string(b)), h, o.period, o.frequency(), m.m_v2, m.m_x, m.m_x2, m.m_v2x, m.m_v2x2});
        }
    }
    json meta = base_sidecar(cfg, "frequency");
    meta["grids"] = grids;
    meta["harmonic_limits"] = {{"middle", std::sqrt(potential_curvature(0.0, cfg.model.stiffness))},
                               {"side", std::sqrt(potential_curvature(land.stable_side, cfg.model.stiffness))}};
    write_table(inv.out, "frequency", t, cfg.output.format, meta);
    return kOk;
}

int cmd_spd(const Invocation& inv) {
    const RunConfig& cfg = inv.cfg;
    if (!cfg.sweep) {
        spd_run(inv, cfg, inv.out);
        return kOk;
    }
    if (cfg.sweep->values.empty()) throw Error(ErrorCode::ConfigError, "key 'sweep.values': empty value list");
    for (double value : cfg.sweep->values) {
        RunConfig c = cfg;
        apply_parameter(c, cfg.sweep->parameter, value);
        const std::string tag = value_tag(cfg.sweep->parameter, value);
        note(inv, "spd " + tag);
        spd_run(inv, c, inv.out / tag);
    }
    return kOk;
}

int cmd_simulate(const Invocation& inv) {
    const RunConfig& cfg = inv.cfg;
    const auto& names = cfg.output.histograms;
    const auto has = [&](const char* n) { return std::find(names.begin(), names.end(), n) != names.end(); };
    SinkOptions want;
    want.x = has("x");
    want.v = has("v");
    want.joint = has("joint");
    want.energy = has("energy");
    want.amplitude = has("amplitude");
    want.series = cfg.output.write_series;
    std::vector<RealizationSink> sinks = run_simulation(inv, cfg, want);

    json meta = base_sidecar(cfg, "simulate");
    meta["provenance"] = seeds_json(cfg);
    const auto emit = [&](const char* stem, const HistogramDensity& h, json bins) {
        json m = meta;
        m["bins"] = std::move(bins);
        m["histogram"] = histogram_meta(h);
        write_table(inv.out, stem, histogram_table(h), cfg.output.format, m);
    };
    if (want.x) emit("hist_x", pooled(sinks, &RealizationSink::hx), bins_json(cfg.bins_x));
    if (want.v) emit("hist_v", pooled(sinks, &RealizationSink::hv), bins_json(cfg.bins_v));
    if (want.joint) {
        emit("hist_joint", pooled(sinks, &RealizationSink::hj),
             {{"x", bins_json(cfg.bins_x)}, {"v", bins_json(cfg.bins_v)}});
    }
    if (want.energy) emit("hist_energy", pooled(sinks, &RealizationSink::he), bins_json(energy_bins(cfg)));
    if (want.amplitude) {
        json b = bins_json(amplitude_bins(cfg));
        b["weighting"] = "half-oscillation duration";
        emit("hist_amplitude", pooled(sinks, &RealizationSink::ha), b);
    }
    if (want.series) {
        for (std::size_t r = 0; r < sinks.size(); ++r) {
            const RealizationSink& s = sinks[r];
            Table t;
            t.columns = {"t", "x", "v"};
            if (cfg.sim.record_noise) {
                t.columns.push_back("xi1");
                t.columns.push_back("xi2");
            }
            t.rows.reserve(s.sx.size());
            for (std::size_t i = 0; i < s.sx.size(); ++i) {
                if (cfg.sim.record_noise) {
                    t.add({s.st[i], s.sx[i], s.sv[i], s.sa[i], s.sb[i]});
                } else {
                    t.add({s.st[i], s.sx[i], s.sv[i]});
                }
            }
            json m = meta;
            m["realization"] = r;
            m["realization_seed"] = realization_seed(cfg.sim.seed, static_cast<int>(r));
            write_table(inv.out, "series_" + std::to_string(r), t, cfg.output.format, m);
        }
    }
    return kOk;
}

int cmd_psd(const Invocation& inv) {
    const RunConfig& cfg = inv.cfg;
    SinkOptions want;
    want.psd = true;
    std::vector<RealizationSink> sinks = run_simulation(inv, cfg, want);
    const SpectrumEstimate s = pooled_spectrum(sinks);
    json meta = base_sidecar(cfg, "psd");
    meta["provenance"] = seeds_json(cfg);
    meta["spectrum"] = spectrum_meta(s);
    meta["variable"] = "x";
    write_table(inv.out, "psd", spectrum_table(s), cfg.output.format, meta);
    json q = meta;
    q["quality"] = quality_json(s, cfg.psd.quality);
    write_json(inv.out / "quality.json", q);
    return kOk;
}

int cmd_cr_sweep(const Invocation& inv) {
    const RunConfig& cfg = inv.cfg;
    if (!cfg.sweep) throw Error(ErrorCode::ConfigError, "key 'sweep': cr-sweep needs a sweep section or --parameter");
    const std::string& parameter = cfg.sweep->parameter;
    if (parameter != "D1" && parameter != "tau1" && parameter != "D2" && parameter != "lambda") {
        throw Error(ErrorCode::ConfigError, "key 'sweep.parameter': cr-sweep supports D1, tau1, D2 and lambda");
    }
    if (cfg.sweep->values.empty()) throw Error(ErrorCode::ConfigError, "key 'sweep.values': empty value list");

    Table t;
    t.columns = {"value", "h", "omega_m", "delta_omega", "eta", "status"};
    json points = json::array();
    const double nan = std::nan("");
    for (double value : cfg.sweep->values) {
        const std::string tag = value_tag(parameter, value);
        json point{{"value", value}};
        try {
            RunConfig c = cfg;
            apply_parameter(c, parameter, value);
            SinkOptions want;
            want.psd = true;
            std::vector<RealizationSink> sinks = run_simulation(inv, c, want);
            const SpectrumEstimate s = pooled_spectrum(sinks);
            json meta = base_sidecar(c, "cr-sweep");
            meta["provenance"] = seeds_json(c);
            meta["spectrum"] = spectrum_meta(s);
            const json q = quality_json(s, c.psd.quality);
            meta["quality"] = q;
            write_table(inv.out, "psd_" + tag, spectrum_table(s), cfg.output.format, meta);
            point["spectrum"] = spectrum_meta(s);
            if (q["status"] == "ok") {
                t.add({value, q["h"].get<double>(), q["omega_m"].get<double>(), q["delta_omega"].get<double>(),
                       q["eta"].get<double>(), std::string("ok")});
            } else {
                t.add({value, nan, nan, nan, nan, q["status"].get<std::string>()});
                point["message"] = q["message"];
            }
        } catch (const Error& e) {
            t.add({value, nan, nan, nan, nan, std::string(to_string(e.code()))});
            point["message"] = e.what();
        }
        note(inv, tag + ": " + std::get<std::string>(t.rows.back().back()));
        points.push_back(point);
    }
    json meta = base_sidecar(cfg, "cr-sweep");
    meta["provenance"] = seeds_json(cfg);
    meta["points"] = points;
    write_table(inv.out, "cr_sweep", t, cfg.output.format, meta);
    return kOk;
}

int cmd_compare(const Invocation& inv, std::ostream& report) {
    const CompareSection& c = inv.cfg.compare;
    if (c.analytic.empty() || c.empirical.empty()) {
        throw Error(ErrorCode::ConfigError, "key 'compare': both analytic and empirical tables are required");
    }
    const DensityCurve a = read_curve(c.analytic), b = read_curve(c.empirical);
    Comparison m;
    try {
        m = compare_densities(a, b, CompareOptions{c.require_overlap});
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SupportMismatch) throw;
        throw Error(ErrorCode::SupportMismatch, "analytic support " + support(a) + ", empirical support " +
                                                    support(b) + ": " + e.what());
    }
    const double value = c.metric == "l1" ? m.l1 : (c.metric == "sup" ? m.sup : m.ks);
    const bool pass = value <= c.threshold;
    json j = base_sidecar(inv.cfg, "compare");
    j["analytic"] = c.analytic;
    j["empirical"] = c.empirical;
    j["analytic_support"] = {a.lo(), a.hi()};
    j["empirical_support"] = {b.lo(), b.hi()};
    j["l1"] = m.l1;
    j["sup"] = m.sup;
    j["ks"] = m.ks;
    j["metric"] = c.metric;
    j["threshold"] = c.threshold;
    j["pass"] = pass;
    write_json(inv.out / "compare.json", j);
    Table metrics{{"metric", "value"}, {}};
    for (const auto& [name, v] : {std::pair<const char*, double>{"l1", m.l1}, {"sup", m.sup}, {"ks", m.ks}}) {
        metrics.rows.push_back({std::string(name), v});
    }
    json meta = base_sidecar(inv.cfg, "compare");
    meta["analytic"] = c.analytic;
    meta["empirical"] = c.empirical;
    write_table(inv.out, "compare_metrics", metrics, inv.cfg.output.format, meta);
    report << c.metric << " = " << format_double(value) << " (threshold " << c.threshold << "): "
           << (pass ? "pass" : "FAIL") << '\n';
    return pass ? kOk : kThreshold;
}

}  // namespace tristable::cli
