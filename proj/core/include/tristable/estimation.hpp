#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tristable/averaging.hpp"
#include "tristable/sde.hpp"

namespace tristable {

/// Uniform bins over [lo, hi).
struct BinSpec {
    double lo = -1.6;
    double hi = 1.6;
    int bins = 128;

    void validate() const;
    double width() const { return (hi - lo) / bins; }
    std::vector<double> edges() const;
    std::vector<double> centers() const;
};

struct HistogramDensity {
    int dimension = 1;
    std::vector<double> edges_x;
    std::vector<double> edges_y;  // dimension 2 only
    std::vector<double> density;  // row-major over (x, y) for dimension 2
    std::int64_t count = 0;       // samples offered
    double weight = 0.0;          // total weight offered
    double underflow = 0.0;       // weight fraction outside the grid, below / left
    double overflow = 0.0;        // above / right (any axis for dimension 2)

    std::vector<double> centers_x() const;
    /// Sum of density times bin measure (1 - out-of-range mass).
    double mass() const;
};

/// Streaming accumulators; merge() in a fixed order keeps pooled results deterministic.
class Histogram1D {
public:
    explicit Histogram1D(const BinSpec& spec);

    void add(double value, double weight = 1.0);
    void merge(const Histogram1D& other);
    HistogramDensity density() const;
    const BinSpec& spec() const { return spec_; }
    std::int64_t count() const { return count_; }

private:
    BinSpec spec_;
    std::vector<double> weights_;
    double under_ = 0.0, over_ = 0.0, total_ = 0.0;
    std::int64_t count_ = 0;
};

class Histogram2D {
public:
    Histogram2D(const BinSpec& x, const BinSpec& y);

    void add(double x, double y, double weight = 1.0);
    void merge(const Histogram2D& other);
    HistogramDensity density() const;

private:
    BinSpec sx_, sy_;
    std::vector<double> weights_;
    double under_ = 0.0, over_ = 0.0, total_ = 0.0;
    std::int64_t count_ = 0;
};

/// Emits (max |x|, duration) for every completed half-oscillation, delimited
/// by sign changes of v. The partial first half-oscillation is dropped.
class AmplitudeTracker {
public:
    explicit AmplitudeTracker(double dt) : dt_(dt) {}

    template <class Emit>
    void add(double x, double v, Emit&& emit) {
        const int sign = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (sign != 0 && sign != sign_) {
            if (sign_ != 0 && started_) emit(peak_, elapsed_);
            started_ = sign_ != 0;
            sign_ = sign;
            peak_ = 0.0;
            elapsed_ = 0.0;
        }
        peak_ = std::max(peak_, std::abs(x));
        elapsed_ += dt_;
    }

private:
    double dt_;
    int sign_ = 0;
    bool started_ = false;
    double peak_ = 0.0, elapsed_ = 0.0;
};

enum class SeriesVariable { Displacement, Velocity, Energy, Amplitude };
std::string_view to_string(SeriesVariable v) noexcept;

/// Throws EmptySeries for no samples; InvalidGridSpec for fewer than 8 bins.
HistogramDensity histogram_density(std::span<const double> samples, const BinSpec& bins);
HistogramDensity histogram_density(std::span<const double> samples, std::span<const double> weights,
                                   const BinSpec& bins);
/// Amplitudes are time-weighted: each half-oscillation counts with its duration.
HistogramDensity histogram_density(const TimeSeries& series, SeriesVariable variable, const BinSpec& bins);
HistogramDensity joint_histogram(const TimeSeries& series, const BinSpec& x, const BinSpec& v);

enum class Window { Hann, Rectangular };
std::string_view to_string(Window w) noexcept;

struct SpectrumEstimate {
    std::vector<double> omega;  // 0 .. pi / dt_effective
    std::vector<double> psd;
    int segment_length = 0;
    double overlap = 0.5;
    Window window = Window::Hann;
    int segments = 0;
    double dt_effective = 0.0;

    double d_omega() const;
    /// Riemann sum over the one-sided grid; equals the series variance.
    double integral() const;
};

struct WelchOptions {
    int segment_length = 4096;
    double overlap = 0.5;
    Window window = Window::Hann;
};

/// One-sided Welch estimate in angular frequency with per-segment mean
/// removal, scaled so that integral() reproduces the variance. For a process
/// with two-sided spectrum S(w) in the convention R(s) = (1/2pi) \int S e^{iws},
/// the estimate tracks S(w) / pi. Throws TooShort if fewer than 2 segments fit.
SpectrumEstimate welch_psd(std::span<const double> series, double dt_effective, const WelchOptions& opts = {});

/// Incremental Welch estimator for long streamed series.
class WelchAccumulator {
public:
    WelchAccumulator(double dt_effective, const WelchOptions& opts = {});
    ~WelchAccumulator();
    WelchAccumulator(WelchAccumulator&&) noexcept;
    WelchAccumulator& operator=(WelchAccumulator&&) noexcept;

    void add(double value);
    /// Adds the segment sums of another accumulator (its pending samples are ignored).
    void merge(const WelchAccumulator& other);
    int segments() const;
    SpectrumEstimate estimate() const;

private:
    struct Impl;
    Impl* impl_;
};

struct QualityFactor {
    double h = 0.0;
    double omega_m = 0.0;
    double delta_omega = 0.0;
    double eta = 0.0;
    double omega_lo = 0.0;
    double omega_hi = 0.0;
};

struct QualityOptions {
    int smoothing = 5;  // moving-average width in bins; 0 or 1 disables
};

/// Peak (excluding DC), level crossings at h / sqrt(e) by linear interpolation.
/// Throws NoPeak / NoWidth.
QualityFactor quality_factor(const SpectrumEstimate& spec, const QualityOptions& opts = {});

/// A 1-D density as either bin averages (x = edges, y.size() = x.size() - 1)
/// or point values joined linearly (x.size() = y.size()); zero outside.
struct DensityCurve {
    enum class Kind { Binned, Pointwise };
    Kind kind = Kind::Pointwise;
    std::vector<double> x;
    std::vector<double> y;

    static DensityCurve from(const HistogramDensity& h);
    static DensityCurve from(const DensityTable& t);
    static DensityCurve binned(std::vector<double> edges, std::vector<double> values);
    static DensityCurve pointwise(std::vector<double> grid, std::vector<double> values);
    double lo() const { return x.front(); }
    double hi() const { return x.back(); }
    double operator()(double at) const;
};

struct Comparison {
    double l1 = 0.0;
    double sup = 0.0;
    double ks = 0.0;
};

struct CompareOptions {
    bool require_overlap = false;  // SupportMismatch for disjoint supports
};

/// Distances on the union of both supports, merging all breakpoints so each
/// piece is linear in both curves. Throws SupportMismatch for malformed curves
/// or, when requested, disjoint supports.
Comparison compare_densities(const DensityCurve& a, const DensityCurve& b, const CompareOptions& opts = {});
/// Two-dimensional histograms on identical grids (L1 and sup; ks = 0).
Comparison compare_densities(const HistogramDensity& a, const HistogramDensity& b);

/// Local maxima whose prominence exceeds prominence_fraction of the global
/// maximum; the global maximum always counts, so flat input gives 1.
int count_modes(std::span<const double> density, double prominence_fraction = 0.05);

}  // namespace tristable
