#include "tristable/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tristable/error.hpp"

namespace tristable {

namespace {

// g(y) = U(sqrt(y)) for y = x^2.
double level_function(double y, const StiffnessParams& p) noexcept {
    return y * (0.5 * p.k1() + y * (-0.25 * p.k2() + y * p.k3() / 6.0));
}

double level_slope(double y, const StiffnessParams& p) noexcept {
    return 0.5 * p.k1() + y * (-0.5 * p.k2() + 0.5 * p.k3() * y);
}

// Critical points of g: y_u < y_s.
std::pair<double, double> critical_levels(const StiffnessParams& p) {
    const double root = std::sqrt(p.discriminant());
    // Smaller root through the product formula to avoid cancellation.
    const double y_s = (p.k2() + root) / (2.0 * p.k3());
    const double y_u = p.k1() / (p.k3() * y_s);
    return {y_u, y_s};
}

// g is monotone on [lo, hi] and g(lo) - h, g(hi) - h bracket a root.
// Safeguarded Newton: falls back to bisection whenever a step leaves the bracket.
double solve_bracketed(double h, double lo, double hi, double guess, const StiffnessParams& p) {
    double f_lo = level_function(lo, p) - h;
    double y = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = level_function(y, p) - h;
        if (f == 0.0) return y;
        if ((f < 0.0) == (f_lo < 0.0)) {
            lo = y;
            f_lo = f;
        } else {
            hi = y;
        }
        const double slope = level_slope(y, p);
        double next = slope != 0.0 ? y - f / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - y) <= 4e-16 * std::max(std::abs(y), 1e-300)) return next;
        y = next;
        if (hi - lo <= 4e-16 * std::max(std::abs(hi), 1e-300)) return y;
    }
    return y;
}

double upper_bracket(double h, double start, const StiffnessParams& p) {
    double hi = std::max(start, 1.0);
    while (level_function(hi, p) <= h) hi *= 2.0;
    return hi;
}

// Picks the Viete root nearest to the middle of (lo, hi) as a Newton seed.
double seed_from(const CubicRoots& roots, double lo, double hi) {
    for (int i = 0; i < roots.count; ++i) {
        if (roots.y[i] > lo && roots.y[i] < hi) return roots.y[i];
    }
    return 0.5 * (lo + hi);
}

// Final refinement directly in x so that |U(x) - h| is at rounding level.
double polish_in_x(double x, double h, const StiffnessParams& p) {
    for (int iter = 0; iter < 4; ++iter) {
        const double slope = potential_slope(x, p);
        if (slope == 0.0) break;
        const double step = (evaluate_potential(x, p) - h) / slope;
        if (!std::isfinite(step)) break;
        x -= step;
        if (std::abs(step) <= 1e-16 * std::abs(x)) break;
    }
    return x;
}

}  // namespace

StiffnessParams::StiffnessParams(double k1, double k2, double k3)
    : k1_(k1), k2_(k2), k3_(k3), discriminant_(k2 * k2 - 4.0 * k1 * k3) {
    if (!(std::isfinite(k1) && std::isfinite(k2) && std::isfinite(k3)) || k1 <= 0.0 || k2 <= 0.0 ||
        k3 <= 0.0) {
        std::ostringstream os;
        os << "stiffness coefficients must be positive (k1=" << k1 << ", k2=" << k2 << ", k3=" << k3
           << ")";
        throw Error(ErrorCode::InvalidParameter, os.str());
    }
}

std::string_view to_string(MotionPattern pattern) noexcept {
    switch (pattern) {
        case MotionPattern::CrossWell: return "cross";
        case MotionPattern::MiddleWell: return "middle";
        case MotionPattern::SideWellRight: return "side_right";
        case MotionPattern::SideWellLeft: return "side_left";
    }
    return "?";
}

std::string_view to_string(DeepestWell deepest) noexcept {
    switch (deepest) {
        case DeepestWell::MiddleDeepest: return "middle";
        case DeepestWell::SidesDeepest: return "sides";
        case DeepestWell::Tie: return "tie";
    }
    return "?";
}

double evaluate_potential(double x, const StiffnessParams& p) noexcept {
    return level_function(x * x, p);
}

double potential_slope(double x, const StiffnessParams& p) noexcept {
    const double y = x * x;
    return x * (p.k1() + y * (-p.k2() + y * p.k3()));
}

double potential_curvature(double x, const StiffnessParams& p) noexcept {
    const double y = x * x;
    return p.k1() + y * (-3.0 * p.k2() + 5.0 * p.k3() * y);
}

double evaluate_total_energy(double x, double v, const StiffnessParams& p) noexcept {
    return 0.5 * v * v + evaluate_potential(x, p);
}

double Landscape::guard_band() const noexcept { return 1e-9 * std::max(1.0, std::abs(u1)); }

double Landscape::separatrix_outer() const {
    const auto [y_u, y_s] = critical_levels(params);
    (void)y_u;
    const double hi = upper_bracket(u1, y_s, params);
    const double y = solve_bracketed(u1, y_s, hi, 0.5 * (y_s + hi), params);
    return polish_in_x(std::sqrt(y), u1, params);
}

Landscape classify_landscape(const StiffnessParams& p) {
    if (!p.tri_stable()) {
        std::ostringstream os;
        os << "k2^2 - 4 k1 k3 = " << p.discriminant() << " is not positive";
        throw Error(ErrorCode::NotTriStable, os.str());
    }
    const auto [y_u, y_s] = critical_levels(p);
    const double x_s = std::sqrt(y_s);
    const double x_u = std::sqrt(y_u);
    const double u_side = evaluate_potential(x_s, p);
    const double u1 = evaluate_potential(x_u, p);
    const double tie_tol = 1e-12 * std::max(std::abs(u_side), std::abs(u1));
    DeepestWell deepest = DeepestWell::MiddleDeepest;
    if (std::abs(u_side) <= tie_tol) {
        deepest = DeepestWell::Tie;
    } else if (u_side < 0.0) {
        deepest = DeepestWell::SidesDeepest;
    }
    return Landscape{p, x_s, x_u, u_side, 0.0, u1, std::max(u_side, 0.0), deepest};
}

CubicRoots energy_level_roots(double h, const StiffnessParams& p) {
    // y^3 + a y^2 + b y + c = 0
    const double a = -1.5 * p.k2() / p.k3();
    const double b = 3.0 * p.k1() / p.k3();
    const double c = -6.0 * h / p.k3();
    const double shift = a / 3.0;
    const double pp = b - a * a / 3.0;
    const double qq = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = -(4.0 * pp * pp * pp + 27.0 * qq * qq);

    CubicRoots out{{0.0, 0.0, 0.0}, 0};
    if (disc > 0.0 && pp < 0.0) {
        const double m = 2.0 * std::sqrt(-pp / 3.0);
        const double arg = std::clamp(3.0 * qq / (pp * m), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            out.y[k] = m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift;
        }
        out.count = 3;
    } else {
        // One real root (Cardano).
        const double sq = std::sqrt(std::max(0.0, qq * qq / 4.0 + pp * pp * pp / 27.0));
        const double t = std::cbrt(-qq / 2.0 + sq) + std::cbrt(-qq / 2.0 - sq);
        out.y[0] = t - shift;
        out.count = 1;
    }
    for (int k = 0; k < out.count; ++k) {
        double y = out.y[k];
        for (int iter = 0; iter < 3; ++iter) {
            const double slope = level_slope(y, p);
            if (slope == 0.0) break;
            const double step = (level_function(y, p) - h) / slope;
            if (!std::isfinite(step)) break;
            y -= step;
        }
        out.y[k] = y;
    }
    std::sort(out.y, out.y + out.count);
    return out;
}

MotionPattern branch_of(double h, double x, const Landscape& land) noexcept {
    if (h > land.u1) return MotionPattern::CrossWell;
    if (std::abs(x) < land.unstable) return MotionPattern::MiddleWell;
    return x > 0.0 ? MotionPattern::SideWellRight : MotionPattern::SideWellLeft;
}

MotionPattern classify_motion(double h, double x0, const Landscape& land) {
    const double floor = land.global_minimum();
    if (!(h >= floor)) {
        std::ostringstream os;
        os << "energy " << h << " is below the global minimum " << floor;
        throw Error(ErrorCode::EnergyBelowMinimum, os.str());
    }
    const double u0 = evaluate_potential(x0, land.params);
    if (u0 > h + 1e-12 * std::max(1.0, std::abs(h))) {
        std::ostringstream os;
        os << "U(" << x0 << ") = " << u0 << " exceeds the energy " << h;
        throw Error(ErrorCode::UnreachablePoint, os.str());
    }
    const MotionPattern pattern = branch_of(h, x0, land);
    const double eps = land.guard_band();
    const double bottom = is_side_well(pattern) ? land.u_side : land.u_middle;
    if (std::abs(h - land.u1) < eps || (pattern != MotionPattern::CrossWell && h - bottom < eps)) {
        std::ostringstream os;
        os << "energy " << h << " lies inside a guard band (u1 = " << land.u1
           << ", well bottom = " << bottom << ")";
        throw Error(ErrorCode::DegenerateEnergy, os.str());
    }
    return pattern;
}

TurningPoints turning_points(double h, MotionPattern pattern, const Landscape& land) {
    const StiffnessParams& p = land.params;
    const double eps = land.guard_band();
    const auto [y_u, y_s] = critical_levels(p);
    const auto degenerate = [&](double edge) {
        std::ostringstream os;
        os << "energy " << h << " is within " << eps << " of the critical energy " << edge;
        throw Error(ErrorCode::DegenerateEnergy, os.str());
    };
    const auto absent = [&]() {
        std::ostringstream os;
        os << "pattern " << to_string(pattern) << " does not exist at energy " << h;
        throw Error(ErrorCode::InvalidParameter, os.str());
    };
    if (!std::isfinite(h)) absent();
    if (std::abs(h - land.u1) < eps) degenerate(land.u1);

    const CubicRoots roots = energy_level_roots(h, p);
    if (pattern == MotionPattern::CrossWell) {
        if (h < land.u1) absent();
        const double hi = upper_bracket(h, y_s, p);
        const double y_c = solve_bracketed(h, y_s, hi, seed_from(roots, y_s, hi), p);
        const double x_c = polish_in_x(std::sqrt(y_c), h, p);
        return {-x_c, x_c};
    }
    if (pattern == MotionPattern::MiddleWell) {
        if (h <= land.u_middle || h > land.u1) absent();
        if (h - land.u_middle < eps) degenerate(land.u_middle);
        const double y_a = solve_bracketed(h, 0.0, y_u, seed_from(roots, 0.0, y_u), p);
        const double x_a = polish_in_x(std::sqrt(y_a), h, p);
        return {-x_a, x_a};
    }
    if (h <= land.u_side || h > land.u1) absent();
    if (h - land.u_side < eps) degenerate(land.u_side);
    const double y_b = solve_bracketed(h, y_u, y_s, seed_from(roots, y_u, y_s), p);
    const double hi = upper_bracket(h, y_s, p);
    const double y_c = solve_bracketed(h, y_s, hi, seed_from(roots, y_s, hi), p);
    const double x_b = polish_in_x(std::sqrt(y_b), h, p);
    const double x_c = polish_in_x(std::sqrt(y_c), h, p);
    if (pattern == MotionPattern::SideWellLeft) return {-x_c, -x_b};
    return {x_b, x_c};
}

TurningPoints turning_points(double h, MotionPattern pattern, const StiffnessParams& p) {
    return turning_points(h, pattern, classify_landscape(p));
}

}  // namespace tristable
