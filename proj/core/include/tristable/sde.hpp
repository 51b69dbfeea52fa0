#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "tristable/averaging.hpp"
#include "tristable/error.hpp"
#include "tristable/parallel.hpp"
#include "tristable/potential.hpp"

namespace tristable {

struct SimConfig {
    double dt = 1e-3;
    std::int64_t n_steps = 5'000'000;
    double burn_in_fraction = 0.1;
    int ensemble = 1;
    std::uint64_t seed = 1;
    double x0 = 0.0;
    double v0 = 0.0;
    int decimation = 1;
    bool record_noise = false;

    void validate() const;
    /// floor((1 - burn_in) n_steps / decimation)
    std::int64_t kept_samples() const;
    std::int64_t burn_in_steps() const { return n_steps - kept_samples() * decimation; }
};

/// Stream of realization r: splitmix64(seed + 0x9E3779B97F4A7C15 (r + 1)).
std::uint64_t realization_seed(std::uint64_t seed, int realization);

struct TimeSeries {
    double dt_effective = 0.0;
    double t0 = 0.0;  // time of the first retained sample
    std::vector<double> x, v, xi1, xi2;
    std::uint64_t seed = 0;  // stream seed actually used
    int realization = 0;
    SimConfig config;
    SpdModel model;

    std::size_t size() const { return x.size(); }
};

/// Exact OU discretization; tau = 0 gives independent N(0, 2D/dt) values.
std::vector<double> ou_generate(const NoiseSpec& n, double dt, std::size_t count, std::uint64_t seed);
/// Two OU sequences whose per-step Gaussian drivers have correlation lambda.
std::pair<std::vector<double>, std::vector<double>> ou_generate_pair(const NoisePairSpec& pair, double dt,
                                                                     std::size_t count, std::uint64_t seed);

namespace detail {

/// One realization of
///   x' = v,  v' = -(beta + beta1 x^2) v - U'(x) + xi1 + x xi2.
/// Coloured channels are exact OU processes held constant over a Heun step;
/// white channels enter as Gaussian velocity impulses after the step.
class Stepper {
public:
    Stepper(const SpdModel& model, const SimConfig& cfg, std::uint64_t stream);

    void step();
    double x() const { return x_; }
    double v() const { return v_; }
    double xi1() const { return xi1_; }
    double xi2() const { return xi2_; }
    bool diverged() const { return !(std::abs(x_) <= 1e3) || !std::isfinite(v_); }

private:
    double accel(double x, double v) const {
        const double x2 = x * x;
        return -(beta_ + beta1_ * x2) * v - x * (k1_ - x2 * (k2_ - k3_ * x2)) + xi1_ + x * xi2_;
    }
    void draw(double& z1, double& z2);

    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
    double k1_, k2_, k3_, beta_, beta1_, dt_;
    bool chan1_, chan2_, white1_, white2_;
    double decay1_ = 0, decay2_ = 0, kick1_ = 0, kick2_ = 0;  // OU: e^{-dt/tau}, innovation sd; white: sqrt(2 D dt)
    double lambda_, lambda_c_;
    double x_, v_, xi1_ = 0.0, xi2_ = 0.0;
};

[[noreturn]] void throw_divergence(const SimConfig& cfg, int realization, std::uint64_t stream, std::int64_t step,
                                   double x);

}  // namespace detail

/// Streams the retained samples of one realization to sink(t, x, v, xi1, xi2).
template <class Sink>
void integrate(const SpdModel& model, const SimConfig& cfg, int realization, Sink&& sink) {
    cfg.validate();
    const std::uint64_t stream = realization_seed(cfg.seed, realization);
    detail::Stepper stepper(model, cfg, stream);
    const std::int64_t burn = cfg.burn_in_steps();
    const std::int64_t dec = cfg.decimation;
    std::int64_t countdown = burn + dec;
    for (std::int64_t s = 1; s <= cfg.n_steps; ++s) {
        stepper.step();
        if (stepper.diverged()) detail::throw_divergence(cfg, realization, stream, s, stepper.x());
        if (--countdown == 0) {
            sink(s * cfg.dt, stepper.x(), stepper.v(), stepper.xi1(), stepper.xi2());
            countdown = dec;
        }
    }
}

/// Runs cfg.ensemble realizations, each feeding its own sink (sinks[r]).
template <class Sink>
void run_ensemble(const SpdModel& model, const SimConfig& cfg, unsigned threads, std::vector<Sink>& sinks) {
    cfg.validate();
    if (sinks.size() != static_cast<std::size_t>(cfg.ensemble)) {
        throw Error(ErrorCode::InvalidParameter, "one sink per realization is required");
    }
    parallel_for(sinks.size(), threads, [&](std::size_t r) {
        auto& sink = sinks[r];
        integrate(model, cfg, static_cast<int>(r),
                  [&](double t, double x, double v, double a, double b) { sink(t, x, v, a, b); });
    });
}

/// Realization `realization` recorded in memory.
TimeSeries simulate(const SpdModel& model, const SimConfig& cfg, int realization = 0);

TimeSeries simulate_case1(const StiffnessParams& p, const DampingParams& damp, const NoiseSpec& n1,
                          const SimConfig& cfg);
TimeSeries simulate_case2(const StiffnessParams& p, const DampingParams& damp, const NoisePairSpec& pair,
                          const SimConfig& cfg);

}  // namespace tristable
