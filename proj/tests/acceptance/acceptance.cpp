// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: tristable_acceptance [--scale f] [--only n]
// --scale multiplies every Monte Carlo run length (1 = full length).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tristable/averaging.hpp"
#include "tristable/error.hpp"
#include "tristable/estimation.hpp"
#include "tristable/orbit.hpp"
#include "tristable/potential.hpp"
#include "tristable/sde.hpp"

using namespace tristable;

namespace {

double g_scale = 1.0;
const StiffnessParams kA{1.0, 4.5, 3.5};
const StiffnessParams kB{1.0, 4.5, 4.0};

std::int64_t steps(double n) { return std::max<std::int64_t>(20'000, static_cast<std::int64_t>(n * g_scale)); }

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

SpdModel case1(const StiffnessParams& p, double d1, double tau1) {
    SpdModel m;
    m.stiffness = p;
    m.damping = {0.1, 0.0};
    m.noise.n1 = {d1, tau1};
    return m;
}

SpdModel case2(double d2, double lambda) {
    SpdModel m;
    m.noise_case = NoiseCase::CaseII;
    m.stiffness = kB;
    m.damping = {0.1, 0.05};
    m.noise.n1 = {0.005, 0.5};
    m.noise.n2 = {d2, 0.5};
    m.noise.lambda = lambda;
    return m;
}

// Pooled displacement and velocity histograms; also the two half-ensembles.
struct Pooled {
    HistogramDensity x, v, x_first, x_second;
    std::int64_t samples = 0;
};

Pooled run_histograms(const SpdModel& m, SimConfig cfg, const BinSpec& bx, const BinSpec& bv) {
    struct Sink {
        Histogram1D hx, hv;
        void operator()(double, double x, double v, double, double) {
            hx.add(x);
            hv.add(v);
        }
    };
    std::vector<Sink> sinks(cfg.ensemble, Sink{Histogram1D(bx), Histogram1D(bv)});
    run_ensemble(m, cfg, 0, sinks);
    Histogram1D hx(bx), hv(bv), a(bx), b(bx);
    for (int r = 0; r < cfg.ensemble; ++r) {
        hx.merge(sinks[r].hx);
        hv.merge(sinks[r].hv);
        (r < cfg.ensemble / 2 ? a : b).merge(sinks[r].hx);
    }
    return {hx.density(), hv.density(), a.density(), b.density(), hx.count()};
}

SpectrumEstimate run_spectrum(const SpdModel& m, const SimConfig& cfg, const WelchOptions& w) {
    std::vector<WelchAccumulator> acc;
    for (int r = 0; r < cfg.ensemble; ++r) acc.emplace_back(cfg.dt * cfg.decimation, w);
    struct Sink {
        WelchAccumulator* a;
        void operator()(double, double x, double, double, double) { a->add(x); }
    };
    std::vector<Sink> sinks;
    for (auto& a : acc) sinks.push_back({&a});
    run_ensemble(m, cfg, 0, sinks);
    for (int r = 1; r < cfg.ensemble; ++r) acc[0].merge(acc[r]);
    return acc[0].estimate();
}

double l1(const HistogramDensity& a, const HistogramDensity& b) {
    return compare_densities(DensityCurve::from(a), DensityCurve::from(b)).l1;
}

HistogramDensity mirrored(const HistogramDensity& h) {
    HistogramDensity m = h;
    const std::size_t n = h.edges_x.size();
    for (std::size_t i = 0; i < n; ++i) m.edges_x[i] = -h.edges_x[n - 1 - i];
    for (std::size_t i = 0; i < h.density.size(); ++i) m.density[i] = h.density[h.density.size() - 1 - i];
    return m;
}

// Analytic bin-averaged marginal as a curve on the histogram's bins.
DensityCurve analytic_bins(const StationaryDensity& d, const HistogramDensity& h, bool velocity) {
    return DensityCurve::binned(h.edges_x, velocity ? d.marginal_v_bins(h.edges_x) : d.marginal_x_bins(h.edges_x));
}

Outcome criterion1() {
    const Landscape l = classify_landscape(kA);
    const double xs = std::abs(l.stable_side - 1.0);
    const double xu = std::abs(l.unstable - std::sqrt(2.0 / 7.0)) / std::sqrt(2.0 / 7.0);
    const double us = std::abs(l.u_side / (-1.0 / 24.0) - 1.0);
    const double u1 = std::abs(l.u1 / (19.0 / 294.0) - 1.0);
    const bool pass = xs < 1e-12 && xu < 1e-10 && us < 1e-10 && u1 < 1e-10 && std::abs(l.unstable - 0.53452) < 5e-6;
    return {pass, fmt("x_s=%.15f x_u=%.15f u_side=%.15g u1=%.15g; rel errors %.1e %.1e %.1e %.1e", l.stable_side,
                      l.unstable, l.u_side, l.u1, xs, xu, us, u1)};
}

Outcome criterion2() {
    bool pass = true;
    std::ostringstream os;
    for (const StiffnessParams& p : {kA, kB}) {
        const Landscape l = classify_landscape(p);
        const struct {
            MotionPattern b;
            double bottom, x0;
        } wells[] = {{MotionPattern::MiddleWell, l.u_middle, 0.0},
                     {MotionPattern::SideWellRight, l.u_side, l.stable_side},
                     {MotionPattern::SideWellLeft, l.u_side, -l.stable_side}};
        for (const auto& w : wells) {
            const double got = frequency(w.bottom + 1e-6, w.b, p);
            const double want = std::sqrt(potential_curvature(w.x0, p));
            const double rel = std::abs(got / want - 1.0);
            pass = pass && rel < 5e-3;
            os << fmt("k3=%g %s w=%.6f limit=%.6f (%.1e); ", p.k3(), std::string(to_string(w.b)).c_str(), got, want, rel);
        }
    }
    pass = pass && std::abs(std::sqrt(potential_curvature(1.0, kA)) - std::sqrt(5.0)) < 1e-12 &&
           std::abs(std::sqrt(potential_curvature(classify_landscape(kB).stable_side, kB)) - 1.8390) < 5e-5;
    return {pass, os.str()};
}

Outcome criterion3() {
    double worst = 0.0;
    for (const StiffnessParams& p : {kA, kB}) {
        const Landscape l = classify_landscape(p);
        for (MotionPattern b : {MotionPattern::CrossWell, MotionPattern::MiddleWell, MotionPattern::SideWellRight,
                                MotionPattern::SideWellLeft}) {
            const double lo = b == MotionPattern::CrossWell ? l.u1 : (is_side_well(b) ? l.u_side : l.u_middle);
            const double hi = b == MotionPattern::CrossWell ? l.u1 + 0.6 : l.u1;
            const double eps = 1e-6 * (hi - lo);
            for (int i = 1; i <= 32; ++i) {
                const double h = lo + (hi - lo) * i / 33.0;
                const auto log_action = [&](double e) { return std::log(solve_orbit(e, b, l).action()); };
                const double fd = (log_action(h + eps) - log_action(h - eps)) / (2 * eps);
                const double want = 1.0 / time_average(h, b, p).m_v2;
                worst = std::max(worst, std::abs(fd / want - 1.0));
            }
        }
    }
    return {worst < 1e-3, fmt("32 energies x 4 branches x 2 parameter sets; worst relative error %.2e", worst)};
}

Outcome criterion4() {
    bool pass = true;
    std::ostringstream os;
    for (const StiffnessParams& p : {kA, kB}) {
        const Landscape l = classify_landscape(p);
        for (MotionPattern b : {MotionPattern::MiddleWell, MotionPattern::SideWellRight, MotionPattern::SideWellLeft,
                                MotionPattern::CrossWell}) {
            const double s = b == MotionPattern::CrossWell ? 1.0 : -1.0;
            const double near = period(l.u1 + s * 1e-6, b, p), far = period(l.u1 + s * 1e-2, b, p);
            pass = pass && near > 5.0 * far;
            os << fmt("k3=%g %s ratio %.3f; ", p.k3(), std::string(to_string(b)).c_str(), near / far);
        }
    }
    return {pass, os.str() + "required > 5"};
}

Outcome criterion5() {
    const double beta = 0.1, d1 = 0.01;
    const StationaryDensity d(case1(kA, d1, 1e-4), SpdForm::ClosedForm);
    // Independent normalization of exp(-beta H / D1).
    const auto boltz = [&](double x) { return std::exp(-beta * evaluate_potential(x, kA) / d1); };
    double zx = 0.0;
    const int n = 40000;
    const double a = -2.0, b = 2.0, hstep = (b - a) / n;
    for (int i = 0; i <= n; ++i) zx += (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * boltz(a + i * hstep);
    zx *= hstep / 3.0;
    const double z = zx * std::sqrt(2.0 * std::numbers::pi * d1 / beta);
    const auto xs = linspace(-1.6, 1.6, 321), vs = linspace(-1.5, 1.5, 301);
    double peak = 0.0;
    for (double x : xs) {
        for (double v : vs) peak = std::max(peak, std::exp(-beta * evaluate_total_energy(x, v, kA) / d1) / z);
    }
    double worst = 0.0;
    int points = 0;
    for (double x : xs) {
        for (double v : vs) {
            const double want = std::exp(-beta * evaluate_total_energy(x, v, kA) / d1) / z;
            if (want <= 1e-6 * peak) continue;
            worst = std::max(worst, std::abs(d.joint(x, v) / want - 1.0));
            ++points;
        }
    }
    return {worst < 0.01, fmt("tau1=1e-4, %d grid points above 1e-6 of peak; worst relative error %.2e", points, worst)};
}

Outcome criterion6() {
    bool pass = true;
    std::ostringstream os;
    const BinSpec bx{-1.6, 1.6, 128}, bv{-1.5, 1.5, 128};
    for (double k3 : {3.5, 4.0}) {
        const SpdModel m = case1(StiffnessParams(1.0, 4.5, k3), 0.01, 0.5);
        SimConfig cfg;
        cfg.dt = 5e-3;
        cfg.n_steps = steps(3e7);
        cfg.ensemble = 4;
        cfg.decimation = 5;
        cfg.seed = 42;
        const Pooled mc = run_histograms(m, cfg, bx, bv);
        const StationaryDensity d(m, SpdForm::ClosedForm);
        const double lx = compare_densities(analytic_bins(d, mc.x, false), DensityCurve::from(mc.x)).l1;
        const double lv = compare_densities(analytic_bins(d, mc.v, true), DensityCurve::from(mc.v)).l1;
        pass = pass && lx <= 0.08 && lv <= 0.08 && mc.samples >= 20'000'000;
        os << fmt("k3=%g: %lld samples, L1 p(x)=%.4f, L1 p(v)=%.4f; ", k3, static_cast<long long>(mc.samples), lx, lv);
    }
    return {pass, os.str() + "threshold 0.08"};
}

Outcome criterion7() {
    const double xu = classify_landscape(kA).unstable;
    std::vector<double> by_d, by_tau;
    for (double d1 : {0.001, 0.01, 0.02}) by_d.push_back(StationaryDensity(case1(kA, d1, 0.5), SpdForm::ClosedForm).marginal_x(xu));
    for (double tau : {0.1, 0.5, 1.0}) by_tau.push_back(StationaryDensity(case1(kA, 0.01, tau), SpdForm::ClosedForm).marginal_x(xu));
    const bool pass = by_d[0] < by_d[1] && by_d[1] < by_d[2] && by_tau[0] > by_tau[1] && by_tau[1] > by_tau[2];
    return {pass, fmt("p(x_u) over D1 {0.001,0.01,0.02}: %.4g %.4g %.4g; over tau1 {0.1,0.5,1}: %.4g %.4g %.4g", by_d[0],
                      by_d[1], by_d[2], by_tau[0], by_tau[1], by_tau[2])};
}

Outcome criterion8() {
    const auto xs = linspace(-1.6, 1.6, 321);
    std::vector<std::pair<double, int>> scan;
    int skipped = 0;
    for (int i = 0; i <= 46; ++i) {
        const double k3 = 3.2 + 0.05 * i;
        const StiffnessParams p(1.0, 4.5, k3);
        if (!p.tri_stable()) {
            ++skipped;
            continue;
        }
        const StationaryDensity d(case1(p, 0.01, 0.5), SpdForm::ClosedForm);
        std::vector<double> px;
        for (double x : xs) px.push_back(d.marginal_x(x));
        scan.emplace_back(k3, count_modes(px));
    }
    // Witnesses 2, 3, 1 in increasing k3 order.
    double w2 = NAN, w3 = NAN, w1 = NAN;
    for (const auto& [k3, modes] : scan) {
        if (std::isnan(w2) && modes == 2) w2 = k3;
        if (!std::isnan(w2) && std::isnan(w3) && modes == 3) w3 = k3;
        if (!std::isnan(w3) && std::isnan(w1) && modes == 1) w1 = k3;
    }
    std::ostringstream os;
    for (const auto& [k3, modes] : scan) os << fmt("%.2f:%d ", k3, modes);
    const bool pass = !std::isnan(w1);
    return {pass, fmt("witnesses k3 = %.2f (2 modes), %.2f (3), %.2f (1); %d values above k2^2/4k1 are not tri-stable; scan ",
                      w2, w3, w1, skipped) +
                      os.str()};
}

Outcome criterion9() {
    const auto xs = linspace(-1.6, 1.6, 321), vs = linspace(-1.5, 1.5, 301);
    const StiffnessParams p5(1.0, 4.5, 5.0);
    const auto [fx, fv] = spd_marginals(StationaryDensity(case1(p5, 0.01, 0.5), SpdForm::ClosedForm), xs, vs);
    const auto [bx5, bv5] = spd_fixed_frequency_baseline(case1(p5, 0.01, 0.5), xs, vs);
    const double l1_5 = compare_densities(DensityCurve::from(fx), DensityCurve::from(bx5)).l1;

    const SpdModel m = case1(kA, 0.01, 0.5);
    SimConfig cfg;
    cfg.dt = 5e-3;
    cfg.n_steps = steps(3e7);
    cfg.ensemble = 4;
    cfg.decimation = 5;
    cfg.seed = 9;
    const Pooled mc = run_histograms(m, cfg, BinSpec{-1.6, 1.6, 128}, BinSpec{-1.5, 1.5, 128});
    // MCS value at x = 0: the two bins meeting there.
    const double mcs0 = 0.5 * (mc.x.density[63] + mc.x.density[64]);
    const double freq0 = StationaryDensity(m, SpdForm::ClosedForm).marginal_x(0.0);
    const auto [bx, bv] = spd_fixed_frequency_baseline(m, xs, vs);
    const double base0 = bx.values[160];
    const bool pass = l1_5 < 0.02 && std::abs(freq0 - mcs0) < std::abs(base0 - mcs0);
    return {pass, fmt("k3=5 L1(baseline, energy-dependent)=%.4f (< 0.02); k3=3.5 p(0): MCS %.4f, energy-dependent "
                      "%.4f, baseline %.4f",
                      l1_5, mcs0, freq0, base0)};
}

Outcome criterion10() {
    const BinSpec bx{-1.6, 1.6, 64}, bv{-1.5, 1.5, 16};
    SimConfig cfg;
    cfg.dt = 5e-3;
    cfg.n_steps = steps(2e7);
    cfg.ensemble = 4;
    cfg.decimation = 5;
    const auto run = [&](double lambda, std::uint64_t seed) {
        cfg.seed = seed;
        return run_histograms(case2(0.005, lambda), cfg, bx, bv);
    };
    const Pooled plus = run(0.9, 101), minus = run(-0.9, 202), zero = run(0.0, 303);
    // Sampling error of a full-ensemble histogram from the spread of its two halves.
    const auto err = [](const Pooled& p) { return l1(p.x_first, p.x_second) / std::sqrt(2.0); };
    const double e_pm = std::sqrt(0.5 * (err(plus) * err(plus) + err(minus) * err(minus)));
    const double anti = l1(plus.x, mirrored(minus.x));
    const double even = l1(zero.x, mirrored(zero.x));
    const bool pass = anti < 2.0 * e_pm && even <= 2.0 * err(zero);
    return {pass, fmt("L1(p_0.9(x), p_-0.9(-x))=%.4f vs 2 x sampling error %.4f; L1(p_0(x), p_0(-x))=%.4f vs 2 x "
                      "sampling error %.4f",
                      anti, 2.0 * e_pm, even, 2.0 * err(zero))};
}

Outcome criterion11() {
    const std::vector<double> ds{0.001, 0.003, 0.005, 0.01, 0.02, 0.05};
    std::vector<double> eta;
    std::ostringstream os;
    for (double d : ds) {
        SimConfig cfg;
        cfg.dt = 1e-3;
        cfg.n_steps = steps(2.5e7);
        cfg.ensemble = 4;
        cfg.decimation = 50;
        cfg.seed = 7;
        const SpectrumEstimate s = run_spectrum(case1(kB, d, 0.5), cfg, {4096, 0.5, Window::Hann});
        try {
            const QualityFactor q = quality_factor(s);
            eta.push_back(q.eta);
            os << fmt("D1=%g eta=%.4g (h=%.4g w_m=%.3f dw=%.3f); ", d, q.eta, q.h, q.omega_m, q.delta_omega);
        } catch (const Error& e) {
            eta.push_back(NAN);
            os << fmt("D1=%g %s; ", d, std::string(to_string(e.code())).c_str());
        }
    }
    // Failed points are excluded; the remaining curve must be non-monotone with an interior maximum.
    std::size_t best = ds.size();
    int defined = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (std::isnan(eta[i])) continue;
        ++defined;
        if (best == ds.size() || eta[i] > eta[best]) best = i;
    }
    bool interior = false;
    if (best < ds.size()) {
        bool lower_left = false, lower_right = false;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (std::isnan(eta[i])) continue;
            if (i < best && eta[i] < eta[best]) lower_left = true;
            if (i > best && eta[i] < eta[best]) lower_right = true;
        }
        interior = lower_left && lower_right;
    }
    const bool pass = defined >= 3 && interior && ds[best] >= 0.005 && ds[best] <= 0.02;
    return {pass, os.str() + fmt("%d of 6 points defined", defined)};
}

Outcome criterion12() {
    const auto peak = [](const SpdModel& m) {
        SimConfig cfg;
        cfg.dt = 1e-3;
        cfg.n_steps = steps(2.5e7);
        cfg.ensemble = 2;
        cfg.decimation = 50;
        cfg.seed = 11;
        const SpectrumEstimate s = run_spectrum(m, cfg, {4096, 0.5, Window::Hann});
        // Maximal height of the 5-bin smoothed spectrum, DC excluded.
        double h = 0.0;
        for (std::size_t k = 1; k < s.psd.size(); ++k) {
            const std::size_t lo = std::max<std::size_t>(1, k - 2), hi = std::min(s.psd.size() - 1, k + 2);
            double a = 0.0;
            for (std::size_t j = lo; j <= hi; ++j) a += s.psd[j];
            h = std::max(h, a / (hi - lo + 1));
        }
        return h;
    };
    std::vector<double> by_d2, by_lambda;
    for (double d2 : {0.001, 0.005, 0.01, 0.02}) by_d2.push_back(peak(case2(d2, 0.0)));
    for (double lam : {0.0, 0.45, 0.9}) by_lambda.push_back(peak(case2(0.005, lam)));
    bool d2_ok = true, lambda_ok = true;
    for (std::size_t i = 1; i < by_d2.size(); ++i) d2_ok = d2_ok && by_d2[i] <= by_d2[i - 1];
    for (std::size_t i = 1; i < by_lambda.size(); ++i) lambda_ok = lambda_ok && by_lambda[i] >= by_lambda[i - 1];
    return {d2_ok && lambda_ok,
            fmt("peak h over D2 {0.001,0.005,0.01,0.02}: %.4g %.4g %.4g %.4g (%s); over |lambda| {0,0.45,0.9}: %.4g "
                "%.4g %.4g (%s)",
                by_d2[0], by_d2[1], by_d2[2], by_d2[3], d2_ok ? "non-increasing" : "NOT non-increasing", by_lambda[0],
                by_lambda[1], by_lambda[2], lambda_ok ? "non-decreasing" : "NOT non-decreasing")};
}

Outcome criterion13() {
    std::ostringstream os;
    // OU statistics.
    const NoiseSpec n{0.01, 0.5};
    const double dt = 0.05;
    const auto s = ou_generate(n, dt, 1'000'000, 2024);
    double mean = 0.0;
    for (double x : s) mean += x;
    mean /= s.size();
    const auto cov = [&](std::size_t lag) {
        double c = 0.0;
        for (std::size_t i = 0; i + lag < s.size(); ++i) c += (s[i] - mean) * (s[i + lag] - mean);
        return c / (s.size() - lag);
    };
    const double var = cov(0), lagged = cov(10);
    const double var_err = std::abs(var / 0.02 - 1.0), ac_err = std::abs(lagged / (0.02 * std::exp(-1.0)) - 1.0);
    os << fmt("OU variance err %.2e, lag-tau autocorrelation err %.2e; ", var_err, ac_err);

    // Lorentzian width, gamma = 4 bins, smoothing off.
    SpectrumEstimate e;
    const double dw = 0.01, gamma = 0.04, wm = 2.0;
    for (int i = 0; i < 1000; ++i) {
        e.omega.push_back(i * dw);
        e.psd.push_back(1.0 / (1.0 + (i * dw - wm) * (i * dw - wm) / (gamma * gamma)));
    }
    e.dt_effective = std::numbers::pi / (999 * dw);
    const double want = 2.0 * gamma * std::sqrt(std::sqrt(std::exp(1.0)) - 1.0);
    const double width_err = std::abs(quality_factor(e, {0}).delta_omega / want - 1.0);
    os << fmt("Lorentzian width err %.2e; ", width_err);

    // Conservative energy drift over 100 periods.
    const double h0 = evaluate_potential(1.2, kA);
    const double t = period(h0, MotionPattern::CrossWell, kA);
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.n_steps = static_cast<std::int64_t>(std::ceil(100 * t / cfg.dt));
    cfg.burn_in_fraction = 0.0;
    cfg.x0 = 1.2;
    SpdModel conservative = case1(kA, 0.0, 0.5);
    conservative.damping = {0.0, 0.0};
    double drift = 0.0;
    integrate(conservative, cfg, 0, [&](double, double x, double v, double, double) {
        drift = std::max(drift, std::abs(evaluate_total_energy(x, v, kA) - h0) / std::abs(h0));
    });
    os << fmt("energy drift %.2e; ", drift);

    // Histogram of exact normal samples against the normal bin averages.
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g;
    std::vector<double> z(1'000'000);
    for (double& x : z) x = g(rng);
    const BinSpec bins{-4.0, 4.0, 64};
    const HistogramDensity h = histogram_density(z, bins);
    const auto edges = bins.edges();
    std::vector<double> exact;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
        exact.push_back((cdf(edges[i + 1]) - cdf(edges[i])) / (edges[i + 1] - edges[i]));
    }
    const double hist_l1 = compare_densities(DensityCurve::from(h), DensityCurve::binned(edges, exact)).l1;
    os << fmt("histogram L1 %.2e", hist_l1);

    const bool pass = var_err < 0.02 && ac_err < 0.03 && width_err < 0.01 && drift < 1e-4 && hist_l1 < 0.01;
    return {pass, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--scale") && i + 1 < argc) {
            g_scale = std::atof(argv[++i]);
        } else if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--scale f] [--only n]\n", argv[0]);
            return 2;
        }
    }
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3,  criterion4, criterion5,
                                                         criterion6, criterion7, criterion8,  criterion9, criterion10,
                                                         criterion11, criterion12, criterion13};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i + 1) != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2zu: %s (%.1f s) %s\n", i + 1, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
