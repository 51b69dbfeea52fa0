#include "tristable/estimation.hpp"

#include <fftw3.h>

#include <mutex>
#include <numbers>
#include <sstream>

#include "tristable/error.hpp"

namespace tristable {

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

int bin_index(const BinSpec& s, double value) {
    // Returns -1 below, bins above.
    if (!(value >= s.lo)) return -1;
    if (!(value < s.hi)) return s.bins;
    const int i = static_cast<int>((value - s.lo) / (s.hi - s.lo) * s.bins);
    return std::min(i, s.bins - 1);
}

}  // namespace

void BinSpec::validate() const {
    if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo)) {
        throw Error(ErrorCode::InvalidGridSpec, "bin range must satisfy lo < hi");
    }
    if (bins < 8) throw Error(ErrorCode::InvalidGridSpec, "at least 8 bins per axis are required");
}

std::vector<double> BinSpec::edges() const {
    std::vector<double> e(bins + 1);
    for (int i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * i / bins;
    return e;
}

std::vector<double> BinSpec::centers() const {
    std::vector<double> c(bins);
    for (int i = 0; i < bins; ++i) c[i] = lo + (hi - lo) * (i + 0.5) / bins;
    return c;
}

std::vector<double> HistogramDensity::centers_x() const {
    std::vector<double> c(edges_x.size() - 1);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (edges_x[i] + edges_x[i + 1]);
    return c;
}

double HistogramDensity::mass() const {
    double sum = 0.0;
    if (dimension == 1) {
        for (std::size_t i = 0; i + 1 < edges_x.size(); ++i) sum += density[i] * (edges_x[i + 1] - edges_x[i]);
        return sum;
    }
    const std::size_t ny = edges_y.size() - 1;
    for (std::size_t i = 0; i + 1 < edges_x.size(); ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            sum += density[i * ny + j] * (edges_x[i + 1] - edges_x[i]) * (edges_y[j + 1] - edges_y[j]);
        }
    }
    return sum;
}

// ---------------------------------------------------------------------------

Histogram1D::Histogram1D(const BinSpec& spec) : spec_(spec) {
    spec_.validate();
    weights_.assign(spec_.bins, 0.0);
}

void Histogram1D::add(double value, double weight) {
    ++count_;
    total_ += weight;
    const int i = bin_index(spec_, value);
    if (i < 0) {
        under_ += weight;
    } else if (i >= spec_.bins) {
        over_ += weight;
    } else {
        weights_[i] += weight;
    }
}

void Histogram1D::merge(const Histogram1D& other) {
    if (other.spec_.bins != spec_.bins || other.spec_.lo != spec_.lo || other.spec_.hi != spec_.hi) {
        throw Error(ErrorCode::SupportMismatch, "cannot merge histograms with different bins");
    }
    for (int i = 0; i < spec_.bins; ++i) weights_[i] += other.weights_[i];
    under_ += other.under_;
    over_ += other.over_;
    total_ += other.total_;
    count_ += other.count_;
}

HistogramDensity Histogram1D::density() const {
    if (count_ == 0 || !(total_ > 0.0)) throw Error(ErrorCode::EmptySeries, "histogram has no samples");
    HistogramDensity h;
    h.dimension = 1;
    h.edges_x = spec_.edges();
    h.density.resize(spec_.bins);
    const double w = spec_.width();
    for (int i = 0; i < spec_.bins; ++i) h.density[i] = weights_[i] / (total_ * w);
    h.count = count_;
    h.weight = total_;
    h.underflow = under_ / total_;
    h.overflow = over_ / total_;
    return h;
}

Histogram2D::Histogram2D(const BinSpec& x, const BinSpec& y) : sx_(x), sy_(y) {
    sx_.validate();
    sy_.validate();
    weights_.assign(static_cast<std::size_t>(sx_.bins) * sy_.bins, 0.0);
}

void Histogram2D::add(double x, double y, double weight) {
    ++count_;
    total_ += weight;
    const int i = bin_index(sx_, x), j = bin_index(sy_, y);
    if (i < 0 || j < 0) {
        under_ += weight;
    } else if (i >= sx_.bins || j >= sy_.bins) {
        over_ += weight;
    } else {
        weights_[static_cast<std::size_t>(i) * sy_.bins + j] += weight;
    }
}

void Histogram2D::merge(const Histogram2D& other) {
    if (other.weights_.size() != weights_.size() || other.sx_.lo != sx_.lo || other.sx_.hi != sx_.hi ||
        other.sy_.lo != sy_.lo || other.sy_.hi != sy_.hi) {
        throw Error(ErrorCode::SupportMismatch, "cannot merge histograms with different bins");
    }
    for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] += other.weights_[i];
    under_ += other.under_;
    over_ += other.over_;
    total_ += other.total_;
    count_ += other.count_;
}

HistogramDensity Histogram2D::density() const {
    if (count_ == 0 || !(total_ > 0.0)) throw Error(ErrorCode::EmptySeries, "histogram has no samples");
    HistogramDensity h;
    h.dimension = 2;
    h.edges_x = sx_.edges();
    h.edges_y = sy_.edges();
    h.density.resize(weights_.size());
    const double cell = sx_.width() * sy_.width();
    for (std::size_t i = 0; i < weights_.size(); ++i) h.density[i] = weights_[i] / (total_ * cell);
    h.count = count_;
    h.weight = total_;
    h.underflow = under_ / total_;
    h.overflow = over_ / total_;
    return h;
}

std::string_view to_string(SeriesVariable v) noexcept {
    switch (v) {
        case SeriesVariable::Displacement: return "x";
        case SeriesVariable::Velocity: return "v";
        case SeriesVariable::Energy: return "energy";
        case SeriesVariable::Amplitude: return "amplitude";
    }
    return "?";
}

HistogramDensity histogram_density(std::span<const double> samples, const BinSpec& bins) {
    Histogram1D h(bins);
    if (samples.empty()) throw Error(ErrorCode::EmptySeries, "no samples");
    for (double s : samples) h.add(s);
    return h.density();
}

HistogramDensity histogram_density(std::span<const double> samples, std::span<const double> weights,
                                   const BinSpec& bins) {
    Histogram1D h(bins);
    if (samples.empty()) throw Error(ErrorCode::EmptySeries, "no samples");
    if (weights.size() != samples.size()) throw Error(ErrorCode::InvalidParameter, "one weight per sample required");
    for (std::size_t i = 0; i < samples.size(); ++i) h.add(samples[i], weights[i]);
    return h.density();
}

HistogramDensity histogram_density(const TimeSeries& series, SeriesVariable variable, const BinSpec& bins) {
    if (series.size() == 0) throw Error(ErrorCode::EmptySeries, "time series is empty");
    Histogram1D h(bins);
    switch (variable) {
        case SeriesVariable::Displacement:
            for (double x : series.x) h.add(x);
            break;
        case SeriesVariable::Velocity:
            for (double v : series.v) h.add(v);
            break;
        case SeriesVariable::Energy:
            for (std::size_t i = 0; i < series.size(); ++i) {
                h.add(evaluate_total_energy(series.x[i], series.v[i], series.model.stiffness));
            }
            break;
        case SeriesVariable::Amplitude: {
            AmplitudeTracker tracker(series.dt_effective);
            for (std::size_t i = 0; i < series.size(); ++i) {
                tracker.add(series.x[i], series.v[i], [&](double a, double w) { h.add(a, w); });
            }
            if (h.count() == 0) throw Error(ErrorCode::EmptySeries, "no complete half-oscillation in the series");
            break;
        }
    }
    return h.density();
}

HistogramDensity joint_histogram(const TimeSeries& series, const BinSpec& x, const BinSpec& v) {
    if (series.size() == 0) throw Error(ErrorCode::EmptySeries, "time series is empty");
    Histogram2D h(x, v);
    for (std::size_t i = 0; i < series.size(); ++i) h.add(series.x[i], series.v[i]);
    return h.density();
}

// ---------------------------------------------------------------------------

std::string_view to_string(Window w) noexcept { return w == Window::Hann ? "hann" : "rectangular"; }

double SpectrumEstimate::d_omega() const { return 2.0 * std::numbers::pi / (segment_length * dt_effective); }

double SpectrumEstimate::integral() const {
    double sum = 0.0;
    for (double p : psd) sum += p;
    return sum * d_omega();
}

struct WelchAccumulator::Impl {
    double dt;
    WelchOptions opts;
    int step;
    std::vector<double> window;
    double window_power = 0.0;
    std::vector<double> pending;
    std::vector<double> power;  // sum of |X_k|^2 over segments
    int segments = 0;
    double* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan plan = nullptr;

    Impl(double dt_, const WelchOptions& o) : dt(dt_), opts(o) {
        const int n = opts.segment_length;
        if (n < 16) throw Error(ErrorCode::InvalidParameter, "segment length must be at least 16");
        if (!(opts.overlap >= 0.0 && opts.overlap < 1.0)) {
            throw Error(ErrorCode::InvalidParameter, "overlap must lie in [0, 1)");
        }
        if (!(dt > 0.0)) throw Error(ErrorCode::InvalidParameter, "dt_effective must be positive");
        step = std::max(1, static_cast<int>(std::lround(n * (1.0 - opts.overlap))));
        window.resize(n);
        for (int i = 0; i < n; ++i) {
            window[i] = opts.window == Window::Hann ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n) : 1.0;
            window_power += window[i] * window[i];
        }
        power.assign(n / 2 + 1, 0.0);
        pending.reserve(n);
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        in = fftw_alloc_real(n);
        out = fftw_alloc_complex(n / 2 + 1);
        plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        if (plan) fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }

    void process() {
        const int n = opts.segment_length;
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += pending[i];
        mean /= n;
        for (int i = 0; i < n; ++i) in[i] = (pending[i] - mean) * window[i];
        fftw_execute(plan);
        for (int k = 0; k <= n / 2; ++k) power[k] += out[k][0] * out[k][0] + out[k][1] * out[k][1];
        ++segments;
        pending.erase(pending.begin(), pending.begin() + step);
    }
};

WelchAccumulator::WelchAccumulator(double dt_effective, const WelchOptions& opts)
    : impl_(new Impl(dt_effective, opts)) {}

WelchAccumulator::~WelchAccumulator() { delete impl_; }

WelchAccumulator::WelchAccumulator(WelchAccumulator&& o) noexcept : impl_(o.impl_) { o.impl_ = nullptr; }

WelchAccumulator& WelchAccumulator::operator=(WelchAccumulator&& o) noexcept {
    if (this != &o) {
        delete impl_;
        impl_ = o.impl_;
        o.impl_ = nullptr;
    }
    return *this;
}

void WelchAccumulator::add(double value) {
    impl_->pending.push_back(value);
    if (static_cast<int>(impl_->pending.size()) == impl_->opts.segment_length) impl_->process();
}

void WelchAccumulator::merge(const WelchAccumulator& other) {
    if (other.impl_->opts.segment_length != impl_->opts.segment_length || other.impl_->dt != impl_->dt) {
        throw Error(ErrorCode::InvalidParameter, "cannot merge spectra with different segmentation");
    }
    for (std::size_t k = 0; k < impl_->power.size(); ++k) impl_->power[k] += other.impl_->power[k];
    impl_->segments += other.impl_->segments;
}

int WelchAccumulator::segments() const { return impl_->segments; }

SpectrumEstimate WelchAccumulator::estimate() const {
    const Impl& s = *impl_;
    if (s.segments < 1) throw Error(ErrorCode::TooShort, "no complete Welch segment");
    const int n = s.opts.segment_length;
    SpectrumEstimate e;
    e.segment_length = n;
    e.overlap = s.opts.overlap;
    e.window = s.opts.window;
    e.segments = s.segments;
    e.dt_effective = s.dt;
    e.omega.resize(n / 2 + 1);
    e.psd.resize(n / 2 + 1);
    const double scale = s.dt / (std::numbers::pi * s.window_power * s.segments);
    for (int k = 0; k <= n / 2; ++k) {
        e.omega[k] = k * e.d_omega();
        const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
        e.psd[k] = s.power[k] * scale * (edge ? 0.5 : 1.0);
    }
    return e;
}

SpectrumEstimate welch_psd(std::span<const double> series, double dt_effective, const WelchOptions& opts) {
    if (series.size() < 2 * static_cast<std::size_t>(std::max(opts.segment_length, 0))) {
        std::ostringstream os;
        os << "series of " << series.size() << " samples is shorter than two segments of " << opts.segment_length;
        throw Error(ErrorCode::TooShort, os.str());
    }
    WelchAccumulator acc(dt_effective, opts);
    for (double v : series) acc.add(v);
    return acc.estimate();
}

// ---------------------------------------------------------------------------

QualityFactor quality_factor(const SpectrumEstimate& spec, const QualityOptions& opts) {
    const std::size_t n = spec.psd.size();
    if (n < 16) throw Error(ErrorCode::TooShort, "quality factor needs at least 16 spectral bins");
    std::vector<double> s(spec.psd);
    const int width = opts.smoothing;
    if (width > 1) {
        const int half = width / 2;
        for (std::size_t k = 1; k < n; ++k) {
            const std::size_t lo = std::max<std::ptrdiff_t>(1, static_cast<std::ptrdiff_t>(k) - half);
            const std::size_t hi = std::min(n - 1, k + half);
            double sum = 0.0;
            for (std::size_t j = lo; j <= hi; ++j) sum += spec.psd[j];
            s[k] = sum / static_cast<double>(hi - lo + 1);
        }
    }
    std::size_t peak = 1;
    for (std::size_t k = 2; k < n; ++k) {
        if (s[k] > s[peak]) peak = k;
    }
    if (!(s[peak] > 0.0)) throw Error(ErrorCode::NoPeak, "spectrum vanishes");
    if (peak == 1) {
        bool decreasing = true;
        for (std::size_t k = 2; k < n && decreasing; ++k) decreasing = s[k] <= s[k - 1];
        if (decreasing) throw Error(ErrorCode::NoPeak, "spectrum decreases monotonically from the lowest frequency");
    }
    QualityFactor q;
    q.h = s[peak];
    q.omega_m = spec.omega[peak];
    const double level = q.h / std::sqrt(std::numbers::e);
    const auto cross = [&](std::size_t a, std::size_t b) {
        return spec.omega[a] + (level - s[a]) / (s[b] - s[a]) * (spec.omega[b] - spec.omega[a]);
    };
    std::size_t k = peak;
    while (k > 1 && s[k - 1] > level) --k;
    if (k == 1) throw Error(ErrorCode::NoWidth, "no crossing of h/sqrt(e) below the peak frequency");
    q.omega_lo = cross(k - 1, k);
    k = peak;
    while (k + 1 < n && s[k + 1] > level) ++k;
    if (k + 1 == n) throw Error(ErrorCode::NoWidth, "no crossing of h/sqrt(e) above the peak frequency");
    q.omega_hi = cross(k + 1, k);
    q.delta_omega = q.omega_hi - q.omega_lo;
    q.eta = q.h * q.omega_m / q.delta_omega;
    return q;
}

// ---------------------------------------------------------------------------

DensityCurve DensityCurve::binned(std::vector<double> edges, std::vector<double> values) {
    if (edges.size() < 2 || values.size() + 1 != edges.size()) {
        throw Error(ErrorCode::SupportMismatch, "binned curve needs one value per bin");
    }
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) throw Error(ErrorCode::SupportMismatch, "bin edges must increase");
    }
    return {Kind::Binned, std::move(edges), std::move(values)};
}

DensityCurve DensityCurve::pointwise(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() < 2 || values.size() != grid.size()) {
        throw Error(ErrorCode::SupportMismatch, "pointwise curve needs one value per grid point");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::SupportMismatch, "grid must increase");
    }
    return {Kind::Pointwise, std::move(grid), std::move(values)};
}

DensityCurve DensityCurve::from(const HistogramDensity& h) {
    if (h.dimension != 1) throw Error(ErrorCode::SupportMismatch, "expected a one-dimensional histogram");
    return binned(h.edges_x, h.density);
}

DensityCurve DensityCurve::from(const DensityTable& t) {
    if (t.kind == DensityKind::JointSPD) throw Error(ErrorCode::SupportMismatch, "expected a one-dimensional table");
    return pointwise(t.grid, t.values);
}

double DensityCurve::operator()(double at) const {
    if (at < x.front() || at > x.back()) return 0.0;
    auto it = std::upper_bound(x.begin(), x.end(), at);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    if (kind == Kind::Binned) return y[std::min(i, y.size() - 1)];
    if (i + 1 >= x.size()) return y.back();
    const double t = (at - x[i]) / (x[i + 1] - x[i]);
    return y[i] + t * (y[i + 1] - y[i]);
}

namespace {

// Values just inside [a, b] of a curve that is linear on that piece.
std::pair<double, double> piece_ends(const DensityCurve& c, double a, double b) {
    if (b <= c.lo() || a >= c.hi()) return {0.0, 0.0};
    const double mid = 0.5 * (a + b);
    if (c.kind == DensityCurve::Kind::Binned) {
        const double v = c(mid);
        return {v, v};
    }
    const double slope_at = c(mid);
    const auto it = std::upper_bound(c.x.begin(), c.x.end(), mid);
    const std::size_t i = static_cast<std::size_t>(it - c.x.begin()) - 1;
    const double slope = (c.y[i + 1] - c.y[i]) / (c.x[i + 1] - c.x[i]);
    return {slope_at + slope * (a - mid), slope_at + slope * (b - mid)};
}

// Exact \int_a^b |linear| given end values.
double abs_linear_integral(double da, double db, double w) {
    if ((da >= 0.0) == (db >= 0.0)) return 0.5 * w * std::abs(da + db);
    const double t = da / (da - db);
    return 0.5 * w * (t * std::abs(da) + (1.0 - t) * std::abs(db));
}

}  // namespace

Comparison compare_densities(const DensityCurve& a, const DensityCurve& b, const CompareOptions& opts) {
    const auto check = [](const DensityCurve& c) {
        const std::size_t want = c.kind == DensityCurve::Kind::Binned ? c.x.size() - 1 : c.x.size();
        if (c.x.size() < 2 || c.y.size() != want) throw Error(ErrorCode::SupportMismatch, "malformed density curve");
    };
    check(a);
    check(b);
    if (opts.require_overlap && (a.hi() <= b.lo() || b.hi() <= a.lo())) {
        std::ostringstream os;
        os << "supports [" << a.lo() << ", " << a.hi() << "] and [" << b.lo() << ", " << b.hi() << "] do not overlap";
        throw Error(ErrorCode::SupportMismatch, os.str());
    }
    std::vector<double> cuts(a.x);
    cuts.insert(cuts.end(), b.x.begin(), b.x.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Comparison r;
    double fa = 0.0, fb = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1], w = hi - lo;
        const auto [a0, a1] = piece_ends(a, lo, hi);
        const auto [b0, b1] = piece_ends(b, lo, hi);
        r.l1 += abs_linear_integral(a0 - b0, a1 - b1, w);
        r.sup = std::max({r.sup, std::abs(a0 - b0), std::abs(a1 - b1)});
        // CDF difference is quadratic on the piece; check both ends and the
        // interior stationary point where the densities cross.
        const double d0 = a0 - b0, d1 = a1 - b1;
        const double g0 = fa - fb;
        if ((d0 > 0.0) != (d1 > 0.0) && d0 != d1) {
            const double t = d0 / (d0 - d1);
            r.ks = std::max(r.ks, std::abs(g0 + w * t * (d0 + 0.5 * t * (d1 - d0))));
        }
        fa += 0.5 * w * (a0 + a1);
        fb += 0.5 * w * (b0 + b1);
        r.ks = std::max(r.ks, std::abs(fa - fb));
    }
    return r;
}

Comparison compare_densities(const HistogramDensity& a, const HistogramDensity& b) {
    if (a.dimension != b.dimension || a.edges_x != b.edges_x || a.edges_y != b.edges_y) {
        throw Error(ErrorCode::SupportMismatch, "histograms must share the same grid");
    }
    if (a.dimension == 1) return compare_densities(DensityCurve::from(a), DensityCurve::from(b));
    Comparison r;
    const std::size_t ny = a.edges_y.size() - 1;
    for (std::size_t i = 0; i + 1 < a.edges_x.size(); ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            const double d = std::abs(a.density[i * ny + j] - b.density[i * ny + j]);
            r.l1 += d * (a.edges_x[i + 1] - a.edges_x[i]) * (a.edges_y[j + 1] - a.edges_y[j]);
            r.sup = std::max(r.sup, d);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------

int count_modes(std::span<const double> y, double prominence_fraction) {
    const std::size_t n = y.size();
    if (n == 0) return 0;
    const double top = *std::max_element(y.begin(), y.end());
    const double threshold = prominence_fraction * top;
    int modes = 0;
    bool global_counted = false;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && y[j + 1] == y[i]) ++j;  // plateau [i, j]
        const bool left_lower = i == 0 || y[i - 1] < y[i];
        const bool right_lower = j + 1 == n || y[j + 1] < y[i];
        if (left_lower && right_lower) {
            if (y[i] == top && !global_counted) {
                global_counted = true;
                ++modes;
            } else if (y[i] < top || global_counted) {
                double left_base = y[i], right_base = y[i];
                for (std::size_t k = i; k-- > 0 && y[k] <= y[i];) left_base = std::min(left_base, y[k]);
                for (std::size_t k = j + 1; k < n && y[k] <= y[i]; ++k) right_base = std::min(right_base, y[k]);
                if (y[i] - std::max(left_base, right_base) > threshold) ++modes;
            }
        }
        i = j + 1;
    }
    return std::max(modes, 1);
}

}  // namespace tristable
