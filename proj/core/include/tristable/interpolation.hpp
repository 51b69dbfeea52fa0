#pragma once

#include <span>
#include <vector>

namespace tristable {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Butland
/// derivative estimates). Abscissae must be strictly increasing.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::span<const double> x, std::span<const double> y);

    /// Evaluates inside [front, back]; arguments outside are clamped.
    double operator()(double x) const;
    /// Derivative of the interpolant.
    double derivative(double x) const;

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

private:
    std::size_t segment(double x) const;

    std::vector<double> x_, y_, d_;
};

/// C2 cubic spline; end slopes come from the cubic through the four end points.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::span<const double> x, std::span<const double> y);

    /// Arguments outside [front, back] are clamped.
    double operator()(double x) const;

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, d_;
};

}  // namespace tristable
