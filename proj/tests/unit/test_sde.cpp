#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "tristable/error.hpp"
#include "tristable/estimation.hpp"
#include "tristable/sde.hpp"

using namespace tristable;

namespace {

const StiffnessParams kA{1.0, 4.5, 3.5};
const StiffnessParams kB{1.0, 4.5, 4.0};

double mean(const std::vector<double>& s) { return std::accumulate(s.begin(), s.end(), 0.0) / s.size(); }

double covariance(const std::vector<double>& a, const std::vector<double>& b, std::size_t lag = 0) {
    const double ma = mean(a), mb = mean(b);
    double s = 0.0;
    for (std::size_t i = 0; i + lag < a.size(); ++i) s += (a[i] - ma) * (b[i + lag] - mb);
    return s / (a.size() - lag);
}

SimConfig quiet(double dt, std::int64_t steps, double x0) {
    SimConfig c;
    c.dt = dt;
    c.n_steps = steps;
    c.burn_in_fraction = 0.0;
    c.x0 = x0;
    return c;
}

}  // namespace

TEST(Ou, StationaryStatistics) {
    const NoiseSpec n{0.01, 0.5};
    const double dt = 0.05;
    const auto s = ou_generate(n, dt, 1'000'000, 7);
    const double var = covariance(s, s);
    EXPECT_NEAR(var, 0.02, 0.02 * 0.02);
    const std::size_t lag = static_cast<std::size_t>(std::lround(0.5 / dt));
    EXPECT_NEAR(covariance(s, s, lag), 0.02 * std::exp(-1.0), 0.03 * 0.02 * std::exp(-1.0));
    EXPECT_NEAR(covariance(s, s, lag) / var, std::exp(-1.0), 0.03 * std::exp(-1.0));
}

TEST(Ou, ZeroIntensityAndDeterminism) {
    for (double x : ou_generate({0.0, 0.5}, 0.01, 1000, 3)) EXPECT_EQ(x, 0.0);
    EXPECT_EQ(ou_generate({0.01, 0.5}, 0.01, 5000, 11), ou_generate({0.01, 0.5}, 0.01, 5000, 11));
    EXPECT_NE(ou_generate({0.01, 0.5}, 0.01, 5000, 11), ou_generate({0.01, 0.5}, 0.01, 5000, 12));
}

TEST(Ou, WhiteLimitVariance) {
    const auto s = ou_generate({0.01, 0.0}, 0.01, 400'000, 5);
    EXPECT_NEAR(covariance(s, s), 2 * 0.01 / 0.01, 0.02 * 2.0);
    EXPECT_NEAR(covariance(s, s, 1) / covariance(s, s), 0.0, 0.01);
}

TEST(OuPair, CrossCovariance) {
    const NoiseSpec n{0.005, 0.5};
    const auto [a1, b1] = ou_generate_pair({n, n, 1.0}, 0.01, 10000, 9);
    EXPECT_EQ(a1, b1);
    const auto [a5, b5] = ou_generate_pair({n, n, 0.5}, 0.05, 1'000'000, 9);
    EXPECT_NEAR(covariance(a5, b5), 0.005, 0.05 * 0.005);
    EXPECT_NEAR(covariance(a5, a5), 0.01, 0.02 * 0.01);
    const auto [a0, b0] = ou_generate_pair({n, n, 0.0}, 0.05, 1'000'000, 9);
    EXPECT_NEAR(covariance(a0, b0) / covariance(a0, a0), 0.0, 0.03);
    EXPECT_THROW(ou_generate_pair({n, n, 1.2}, 0.01, 10, 1), Error);
}

TEST(OuPair, LaggedCrossCovarianceWithDistinctTimes) {
    // Correlated drivers: C(s) = lambda sqrt(D1 D2 / (tau1 tau2)) 2 sqrt(tau1 tau2)/(tau1 + tau2) e^{-s/tau2}.
    const NoiseSpec a{0.01, 0.2}, b{0.01, 0.8};
    const auto [x, y] = ou_generate_pair({a, b, 0.6}, 0.02, 2'000'000, 21);
    const double c0 = 0.6 * std::sqrt(0.01 * 0.01 / 0.16) * 2 * std::sqrt(0.16) / 1.0;
    EXPECT_NEAR(covariance(x, y), c0, 0.05 * c0);
    EXPECT_NEAR(covariance(x, y, 20), c0 * std::exp(-0.4 / 0.8), 0.06 * c0);
}

TEST(Sim, SampleCountAndSeeds) {
    SimConfig c;
    c.dt = 0.01;
    c.n_steps = 10'001;
    c.burn_in_fraction = 0.25;
    c.decimation = 3;
    EXPECT_EQ(c.kept_samples(), 2500);
    SpdModel m;
    m.stiffness = kA;
    m.damping = {0.1, 0.0};
    m.noise.n1 = {0.01, 0.5};
    const TimeSeries ts = simulate(m, c);
    EXPECT_EQ(ts.size(), 2500u);
    EXPECT_DOUBLE_EQ(ts.dt_effective, 0.03);
    EXPECT_EQ(ts.seed, realization_seed(c.seed, 0));
    EXPECT_NE(realization_seed(1, 0), realization_seed(1, 1));
    EXPECT_NE(realization_seed(1, 1), realization_seed(2, 0));
    EXPECT_TRUE(ts.xi1.empty());
    c.record_noise = true;
    const TimeSeries with = simulate(m, c);
    EXPECT_EQ(with.xi1.size(), 2500u);
    EXPECT_EQ(with.x, ts.x);
}

TEST(Sim, ConfigValidation) {
    SimConfig c;
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), Error);
    c = SimConfig{};
    c.burn_in_fraction = 1.0;
    EXPECT_THROW(c.validate(), Error);
    c = SimConfig{};
    c.ensemble = 0;
    EXPECT_THROW(c.validate(), Error);
    c = SimConfig{};
    c.decimation = 0;
    EXPECT_THROW(c.validate(), Error);
}

TEST(Sim, Determinism) {
    SpdModel m;
    m.stiffness = kB;
    m.damping = {0.1, 0.0};
    m.noise.n1 = {0.01, 0.5};
    SimConfig c;
    c.n_steps = 50'000;
    c.seed = 99;
    const TimeSeries a = simulate(m, c, 2), b = simulate(m, c, 2), other = simulate(m, c, 3);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.v, b.v);
    EXPECT_NE(a.x, other.x);
}

TEST(Sim, EnsembleMatchesSingleRealizations) {
    SpdModel m;
    m.stiffness = kB;
    m.damping = {0.1, 0.0};
    m.noise.n1 = {0.01, 0.5};
    SimConfig c;
    c.n_steps = 20'000;
    c.ensemble = 3;
    std::vector<std::vector<double>> got(3);
    struct Sink {
        std::vector<double>* out;
        void operator()(double, double x, double, double, double) { out->push_back(x); }
    };
    std::vector<Sink> sinks{{&got[0]}, {&got[1]}, {&got[2]}};
    run_ensemble(m, c, 2, sinks);
    for (int r = 0; r < 3; ++r) EXPECT_EQ(got[r], simulate(m, c, r).x);
}

TEST(Sim, ConservativeEnergyDrift) {
    const double h0 = oracle::potential(1.2, 1, 4.5, 3.5);
    EXPECT_NEAR(h0, 0.1290, 1e-4);
    const double t = period(evaluate_potential(1.2, kA), MotionPattern::CrossWell, kA);
    const SimConfig c = quiet(1e-3, static_cast<std::int64_t>(std::ceil(100 * t / 1e-3)), 1.2);
    const TimeSeries ts = simulate_case1(kA, {0.0, 0.0}, {0.0, 0.5}, c);
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        worst = std::max(worst, std::abs(evaluate_total_energy(ts.x[i], ts.v[i], kA) - h0) / h0);
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(Sim, DissipativeRelaxation) {
    const TimeSeries ts = simulate_case1(kA, {0.1, 0.0}, {0.0, 0.5}, quiet(1e-3, 400'000, 1.2));
    EXPECT_NEAR(std::abs(ts.x.back()), 1.0, 1e-3);
    EXPECT_NEAR(ts.v.back(), 0.0, 1e-3);
    EXPECT_NEAR(evaluate_total_energy(ts.x.back(), ts.v.back(), kA), -1.0 / 24.0, 1e-5);
}

TEST(Sim, DivergenceAtLargeStep) {
    SpdModel m;
    m.stiffness = kA;
    m.damping = {0.1, 0.0};
    m.noise.n1 = {0.01, 0.5};
    SimConfig c = quiet(0.5, 10'000, 1.2);
    try {
        simulate(m, c);
        FAIL() << "expected divergence";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Divergence);
    }
}

TEST(Sim, Case2ReducesToCase1) {
    SimConfig c;
    c.n_steps = 30'000;
    const NoiseSpec n1{0.01, 0.5};
    const TimeSeries a = simulate_case1(kB, {0.1, 0.0}, n1, c);
    const TimeSeries b = simulate_case2(kB, {0.1, 0.0}, {n1, {0.0, 0.5}, 0.0}, c);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.x[i], b.x[i], 1e-12);
}

TEST(Sim, CorrelatedChannelsTiltTheDisplacement) {
    SimConfig c;
    c.dt = 5e-3;
    c.n_steps = 4'000'000;
    c.decimation = 5;
    const NoiseSpec n{0.005, 0.5};
    const auto frac_right = [&](double lambda) {
        const TimeSeries ts = simulate_case2(kB, {0.1, 0.05}, {n, n, lambda}, c);
        double right = 0.0;
        for (double x : ts.x) right += x > 0.0;
        return right / ts.size();
    };
    const double plus = frac_right(0.9), minus = frac_right(-0.9);
    EXPECT_LT(plus, 0.5);
    EXPECT_GT(minus, 0.5);
}

TEST(Sim, ParameterSetBHistogramHasThreeModes) {
    SimConfig c;
    c.dt = 5e-3;
    c.n_steps = 6'000'000;
    c.decimation = 5;
    const TimeSeries ts = simulate_case1(kB, {0.1, 0.0}, {0.01, 0.5}, c);
    const HistogramDensity h = histogram_density(ts.x, BinSpec{-1.6, 1.6, 64});
    EXPECT_EQ(count_modes(h.density), 3);
    const auto centers = h.centers_x();
    const std::size_t peak_right =
        std::max_element(h.density.begin() + 40, h.density.end()) - h.density.begin();
    EXPECT_NEAR(centers[peak_right], 0.906, 0.06);
}

TEST(Sim, WeakConvergenceInStep) {
    SpdModel m;
    m.stiffness = kB;
    m.damping = {0.1, 0.0};
    m.noise.n1 = {0.01, 0.5};
    // Equal physical time, long enough that the seed-to-seed L1 is about 0.005.
    const auto hist = [&](double dt, std::int64_t steps, int dec) {
        SimConfig c;
        c.dt = dt;
        c.n_steps = steps;
        c.decimation = dec;
        c.ensemble = 4;
        Histogram1D h(BinSpec{-1.6, 1.6, 64});
        struct Sink {
            Histogram1D* h;
            void operator()(double, double x, double, double, double) { h->add(x); }
        };
        std::vector<Histogram1D> parts(4, h);
        std::vector<Sink> sinks{{&parts[0]}, {&parts[1]}, {&parts[2]}, {&parts[3]}};
        run_ensemble(m, c, 1, sinks);
        for (const auto& p : parts) h.merge(p);
        return h.density();
    };
    const HistogramDensity coarse = hist(5e-3, 200'000'000, 5), fine = hist(2.5e-3, 400'000'000, 10);
    EXPECT_LT(compare_densities(DensityCurve::from(coarse), DensityCurve::from(fine)).l1, 0.01);
}
