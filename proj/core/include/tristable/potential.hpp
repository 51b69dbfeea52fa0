#pragma once

#include <string_view>

namespace tristable {

/// Coefficients of U(x) = k1 x^2/2 - k2 x^4/4 + k3 x^6/6.
class StiffnessParams {
public:
    /// Throws InvalidParameter unless all three coefficients are finite and positive.
    StiffnessParams(double k1, double k2, double k3);

    double k1() const noexcept { return k1_; }
    double k2() const noexcept { return k2_; }
    double k3() const noexcept { return k3_; }

    /// k2^2 - 4 k1 k3; the potential has three wells iff this is positive.
    double discriminant() const noexcept { return discriminant_; }
    bool tri_stable() const noexcept { return discriminant_ > 0.0; }

private:
    double k1_, k2_, k3_;
    double discriminant_;
};

enum class DeepestWell { MiddleDeepest, SidesDeepest, Tie };

enum class MotionPattern { CrossWell, MiddleWell, SideWellRight, SideWellLeft };

std::string_view to_string(MotionPattern pattern) noexcept;
std::string_view to_string(DeepestWell deepest) noexcept;

/// Mirror image of a pattern under x -> -x.
constexpr MotionPattern mirror(MotionPattern pattern) noexcept {
    switch (pattern) {
        case MotionPattern::SideWellRight: return MotionPattern::SideWellLeft;
        case MotionPattern::SideWellLeft: return MotionPattern::SideWellRight;
        default: return pattern;
    }
}

constexpr bool is_side_well(MotionPattern pattern) noexcept {
    return pattern == MotionPattern::SideWellRight || pattern == MotionPattern::SideWellLeft;
}

/// Equilibria and critical energies of a tri-stable potential. Energies are
/// measured relative to U(0) = 0.
struct Landscape {
    StiffnessParams params;
    double stable_side;    // |x_s1|
    double unstable;       // |x_u|
    double u_side;         // U(x_s1)
    double u_middle = 0.0; // U(0)
    double u1;             // saddle energy U(x_u)
    double u2;             // bottom of the shallower well(s)
    DeepestWell deepest;

    double global_minimum() const noexcept { return u_side < u_middle ? u_side : u_middle; }
    /// Outermost turning point of the separatrix, U(x) = u1 with x > x_s1.
    double separatrix_outer() const;
    /// Half-width of the guard band around u1 and around each well bottom.
    double guard_band() const noexcept;
};

double evaluate_potential(double x, const StiffnessParams& p) noexcept;
/// U'(x) = k1 x - k2 x^3 + k3 x^5.
double potential_slope(double x, const StiffnessParams& p) noexcept;
/// U''(x) = k1 - 3 k2 x^2 + 5 k3 x^4.
double potential_curvature(double x, const StiffnessParams& p) noexcept;
double evaluate_total_energy(double x, double v, const StiffnessParams& p) noexcept;

/// Throws NotTriStable when the discriminant is not positive.
Landscape classify_landscape(const StiffnessParams& p);

/// Pattern of the conservative orbit through (x0, *) at energy h.
/// Throws EnergyBelowMinimum, UnreachablePoint or DegenerateEnergy.
MotionPattern classify_motion(double h, double x0, const Landscape& land);

/// Same geometric rule without validation or guard bands; used when a
/// density has to be evaluated at every phase-space point.
MotionPattern branch_of(double h, double x, const Landscape& land) noexcept;

/// Displacement range [lo, hi] swept by the orbit.
///   CrossWell: [-x_c, x_c], MiddleWell: [-x_a, x_a],
///   SideWellRight: [x_b, x_c], SideWellLeft: [-x_c, -x_b].
struct TurningPoints {
    double lo;
    double hi;
};

/// Solves U(x) = h for the turning points of the given pattern.
/// Throws DegenerateEnergy inside a guard band and InvalidParameter when the
/// pattern does not exist at energy h.
TurningPoints turning_points(double h, MotionPattern pattern, const Landscape& land);
TurningPoints turning_points(double h, MotionPattern pattern, const StiffnessParams& p);

/// Real roots of the cubic U(sqrt(y)) = h in y = x^2, ascending. At most three.
struct CubicRoots {
    double y[3];
    int count;
};
CubicRoots energy_level_roots(double h, const StiffnessParams& p);

}  // namespace tristable
