#include "tristable/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "tristable/error.hpp"

namespace tristable {

namespace {

double end_slope(double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (d * m0 <= 0.0) return 0.0;
    if (m0 * m1 <= 0.0 && std::abs(d) > std::abs(3.0 * m0)) return 3.0 * m0;
    return d;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), d_(x.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
        throw Error(ErrorCode::InvalidParameter, "monotone cubic needs at least two matched points");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) {
            throw Error(ErrorCode::InvalidParameter, "interpolation abscissae must be strictly increasing");
        }
    }
    std::vector<double> h(n - 1), m(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        m[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
        d_[0] = d_[1] = m[0];
        return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (m[i - 1] * m[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i]);
        }
    }
    d_[0] = end_slope(h[0], h[1], m[0], m[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
}

std::size_t MonotoneCubic::segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    x = std::clamp(x, x_.front(), x_.back());
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
    x = std::clamp(x, x_.front(), x_.back());
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double d00 = (6 * t2 - 6 * t) / h;
    const double d10 = 3 * t2 - 4 * t + 1;
    const double d01 = (-6 * t2 + 6 * t) / h;
    const double d11 = 3 * t2 - 2 * t;
    return d00 * y_[i] + d10 * d_[i] + d01 * y_[i + 1] + d11 * d_[i + 1];
}

}  // namespace tristable

namespace tristable {

namespace {

// Derivative at x[0] of the cubic through four points.
double lagrange_slope(const double* x, const double* y) {
    double d = 0.0;
    for (int j = 0; j < 4; ++j) {
        double denom = 1.0, sum = 0.0;
        for (int k = 0; k < 4; ++k) {
            if (k != j) denom *= x[j] - x[k];
        }
        for (int k = 0; k < 4; ++k) {
            if (k == j) continue;
            double prod = 1.0;
            for (int l = 0; l < 4; ++l) {
                if (l != j && l != k) prod *= x[0] - x[l];
            }
            sum += prod;
        }
        d += y[j] * sum / denom;
    }
    return d;
}

}  // namespace

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), d_(x.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n < 4 || y_.size() != n) throw Error(ErrorCode::InvalidParameter, "cubic spline needs at least four matched points");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) {
            throw Error(ErrorCode::InvalidParameter, "interpolation abscissae must be strictly increasing");
        }
    }
    d_[0] = lagrange_slope(x_.data(), y_.data());
    {
        const double xr[4] = {x_[n - 1], x_[n - 2], x_[n - 3], x_[n - 4]};
        const double yr[4] = {y_[n - 1], y_[n - 2], y_[n - 3], y_[n - 4]};
        d_[n - 1] = lagrange_slope(xr, yr);
    }
    // Continuity of the second derivative at interior knots, solved for the slopes.
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), r(n, 0.0);
    r[0] = d_[0];
    r[n - 1] = d_[n - 1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
        a[i] = 1.0 / hl;
        b[i] = 2.0 / hl + 2.0 / hr;
        c[i] = 1.0 / hr;
        r[i] = 3.0 * ((y_[i] - y_[i - 1]) / (hl * hl) + (y_[i + 1] - y_[i]) / (hr * hr));
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    d_[n - 1] = r[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d_[i] = (r[i] - c[i] * d_[i + 1]) / b[i];
}

double CubicSpline::operator()(double x) const {
    x = std::clamp(x, x_.front(), x_.back());
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
           (t3 - t2) * h * d_[i + 1];
}

}  // namespace tristable
