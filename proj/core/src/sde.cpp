#include "tristable/sde.hpp"

#include <algorithm>

namespace tristable {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidParameter, what);
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct OuCoefficients {
    double decay;       // e^{-dt/tau}
    double innovation;  // sd of the per-step innovation
    double variance;    // stationary variance D/tau
};

OuCoefficients ou_coefficients(const NoiseSpec& n, double dt) {
    const double decay = std::exp(-dt / n.tau);
    return {decay, std::sqrt(n.d / n.tau * -std::expm1(-2.0 * dt / n.tau)), n.d / n.tau};
}

// Stationary covariance of two OU updates whose innovations have correlation lambda.
double stationary_cross(const OuCoefficients& a, const OuCoefficients& b, double lambda) {
    return lambda * a.innovation * b.innovation / (1.0 - a.decay * b.decay);
}

void check_pair(const NoisePairSpec& pair, bool both_channels) {
    pair.validate();
    if (both_channels && pair.lambda != 0.0 && ((pair.n1.tau == 0.0) != (pair.n2.tau == 0.0))) {
        throw Error(ErrorCode::InvalidParameter,
                    "cross-correlation between a white and a coloured channel is not supported");
    }
}

}  // namespace

void SimConfig::validate() const {
    require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    require(n_steps >= 1, "n_steps must be at least 1");
    require(burn_in_fraction >= 0.0 && burn_in_fraction < 1.0, "burn_in_fraction must lie in [0, 1)");
    require(ensemble >= 1, "ensemble must be at least 1");
    require(decimation >= 1, "decimation must be at least 1");
    require(std::isfinite(x0) && std::isfinite(v0), "initial state must be finite");
}

std::int64_t SimConfig::kept_samples() const {
    return static_cast<std::int64_t>(std::floor((1.0 - burn_in_fraction) * static_cast<double>(n_steps) /
                                                static_cast<double>(decimation)));
}

std::uint64_t realization_seed(std::uint64_t seed, int realization) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(realization + 1));
}

std::vector<double> ou_generate(const NoiseSpec& n, double dt, std::size_t count, std::uint64_t seed) {
    n.validate();
    require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    std::vector<double> out(count, 0.0);
    if (n.d == 0.0 || count == 0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    if (n.tau == 0.0) {
        const double sd = std::sqrt(2.0 * n.d / dt);
        for (double& y : out) y = sd * normal(rng);
        return out;
    }
    const OuCoefficients c = ou_coefficients(n, dt);
    double xi = std::sqrt(c.variance) * normal(rng);
    out[0] = xi;
    for (std::size_t k = 1; k < count; ++k) {
        xi = xi * c.decay + c.innovation * normal(rng);
        out[k] = xi;
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> ou_generate_pair(const NoisePairSpec& pair, double dt,
                                                                     std::size_t count, std::uint64_t seed) {
    pair.validate();
    require(pair.n1.tau > 0.0 && pair.n2.tau > 0.0, "both correlation times must be positive");
    require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
    std::vector<double> a(count), b(count);
    if (count == 0) return {a, b};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const OuCoefficients c1 = ou_coefficients(pair.n1, dt), c2 = ou_coefficients(pair.n2, dt);
    const double lc = std::sqrt(std::max(0.0, 1.0 - pair.lambda * pair.lambda));

    double z1 = normal(rng), z2 = normal(rng);
    double xi1 = std::sqrt(c1.variance) * z1;
    const double cross = stationary_cross(c1, c2, pair.lambda);
    double xi2 = c1.variance > 0.0 ? cross / c1.variance * xi1 +
                                         std::sqrt(std::max(0.0, c2.variance - cross * cross / c1.variance)) * z2
                                   : std::sqrt(c2.variance) * z2;
    // A common driver with equal channels reproduces the same sequence exactly.
    if (lc == 0.0 && pair.n1.d == pair.n2.d && pair.n1.tau == pair.n2.tau) xi2 = pair.lambda * xi1;
    a[0] = xi1;
    b[0] = xi2;
    for (std::size_t k = 1; k < count; ++k) {
        z1 = normal(rng);
        z2 = pair.lambda * z1 + lc * normal(rng);
        xi1 = xi1 * c1.decay + c1.innovation * z1;
        xi2 = xi2 * c2.decay + c2.innovation * z2;
        a[k] = xi1;
        b[k] = xi2;
    }
    return {std::move(a), std::move(b)};
}

namespace detail {

Stepper::Stepper(const SpdModel& model, const SimConfig& cfg, std::uint64_t stream)
    : rng_(stream),
      k1_(model.stiffness.k1()),
      k2_(model.stiffness.k2()),
      k3_(model.stiffness.k3()),
      beta_(model.damping.beta),
      beta1_(model.damping.beta1),
      dt_(cfg.dt),
      x_(cfg.x0),
      v_(cfg.v0) {
    model.validate();
    const bool case2 = model.noise_case == NoiseCase::CaseII;
    const NoisePairSpec& noise = model.noise;
    chan1_ = noise.n1.d > 0.0;
    chan2_ = case2 && noise.n2.d > 0.0;
    check_pair(noise, chan1_ && chan2_);
    lambda_ = chan1_ && chan2_ ? noise.lambda : 0.0;
    lambda_c_ = std::sqrt(std::max(0.0, 1.0 - lambda_ * lambda_));
    white1_ = chan1_ && noise.n1.tau == 0.0;
    white2_ = chan2_ && noise.n2.tau == 0.0;

    OuCoefficients c1{0, 0, 0}, c2{0, 0, 0};
    if (chan1_) {
        if (white1_) {
            kick1_ = std::sqrt(2.0 * noise.n1.d * dt_);
        } else {
            c1 = ou_coefficients(noise.n1, dt_);
            decay1_ = c1.decay;
            kick1_ = c1.innovation;
        }
    }
    if (chan2_) {
        if (white2_) {
            kick2_ = std::sqrt(2.0 * noise.n2.d * dt_);
        } else {
            c2 = ou_coefficients(noise.n2, dt_);
            decay2_ = c2.decay;
            kick2_ = c2.innovation;
        }
    }
    // Stationary start for coloured channels.
    const double z1 = normal_(rng_), z2 = normal_(rng_);
    if (chan1_ && !white1_) xi1_ = std::sqrt(c1.variance) * z1;
    if (chan2_ && !white2_) {
        if (chan1_ && !white1_ && lambda_ != 0.0) {
            const double cross = stationary_cross(c1, c2, lambda_);
            xi2_ = cross / c1.variance * xi1_ + std::sqrt(std::max(0.0, c2.variance - cross * cross / c1.variance)) * z2;
        } else {
            xi2_ = std::sqrt(c2.variance) * z2;
        }
    }
}

void Stepper::draw(double& z1, double& z2) {
    z1 = chan1_ ? normal_(rng_) : 0.0;
    z2 = 0.0;
    if (chan2_) {
        const double fresh = normal_(rng_);
        z2 = lambda_ == 0.0 ? fresh : lambda_ * z1 + lambda_c_ * fresh;
    }
}

void Stepper::step() {
    const double a0 = accel(x_, v_);
    const double xp = x_ + dt_ * v_;
    const double vp = v_ + dt_ * a0;
    const double a1 = accel(xp, vp);
    const double x_old = x_;
    x_ += 0.5 * dt_ * (v_ + vp);
    v_ += 0.5 * dt_ * (a0 + a1);

    if (!chan1_ && !chan2_) return;
    double z1, z2;
    draw(z1, z2);
    if (white1_) v_ += kick1_ * z1;
    if (white2_) v_ += x_old * kick2_ * z2;
    if (chan1_ && !white1_) xi1_ = xi1_ * decay1_ + kick1_ * z1;
    if (chan2_ && !white2_) xi2_ = xi2_ * decay2_ + kick2_ * z2;
}

void throw_divergence(const SimConfig& cfg, int realization, std::uint64_t stream, std::int64_t step, double x) {
    std::ostringstream os;
    os << "realization " << realization << " (sub-seed " << stream << ") left |x| <= 1e3 at step " << step
       << " (x = " << x << "); dt = " << cfg.dt << " is likely too large";
    throw Error(ErrorCode::Divergence, os.str());
}

}  // namespace detail

TimeSeries simulate(const SpdModel& model, const SimConfig& cfg, int realization) {
    cfg.validate();
    TimeSeries ts;
    ts.dt_effective = cfg.dt * cfg.decimation;
    ts.t0 = static_cast<double>(cfg.burn_in_steps() + cfg.decimation) * cfg.dt;
    ts.seed = realization_seed(cfg.seed, realization);
    ts.realization = realization;
    ts.config = cfg;
    ts.model = model;
    const auto n = static_cast<std::size_t>(cfg.kept_samples());
    ts.x.reserve(n);
    ts.v.reserve(n);
    if (cfg.record_noise) {
        ts.xi1.reserve(n);
        ts.xi2.reserve(n);
    }
    integrate(model, cfg, realization, [&](double, double x, double v, double a, double b) {
        ts.x.push_back(x);
        ts.v.push_back(v);
        if (cfg.record_noise) {
            ts.xi1.push_back(a);
            ts.xi2.push_back(b);
        }
    });
    return ts;
}

TimeSeries simulate_case1(const StiffnessParams& p, const DampingParams& damp, const NoiseSpec& n1,
                          const SimConfig& cfg) {
    require(damp.beta1 == 0.0, "the additive-noise system has no nonlinear damping (beta1 must be 0)");
    SpdModel model;
    model.noise_case = NoiseCase::CaseI;
    model.stiffness = p;
    model.damping = damp;
    model.noise.n1 = n1;
    return simulate(model, cfg);
}

TimeSeries simulate_case2(const StiffnessParams& p, const DampingParams& damp, const NoisePairSpec& pair,
                          const SimConfig& cfg) {
    SpdModel model;
    model.noise_case = NoiseCase::CaseII;
    model.stiffness = p;
    model.damping = damp;
    model.noise = pair;
    return simulate(model, cfg);
}

}  // namespace tristable
