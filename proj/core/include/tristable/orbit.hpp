#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "tristable/interpolation.hpp"
#include "tristable/potential.hpp"
#include "tristable/quadrature.hpp"

namespace tristable {

/// Period averages <f>_t = (1/T) \oint f dt over one closed conservative orbit.
struct OrbitMoments {
    double m_v2 = 0.0;    // <v^2>
    double m_x = 0.0;     // <x>
    double m_x2 = 0.0;    // <x^2>
    double m_v2x = 0.0;   // <v^2 x>
    double m_v2x2 = 0.0;  // <v^2 x^2>

    OrbitMoments mirrored() const { return {m_v2, -m_x, m_x2, -m_v2x, m_v2x2}; }
};

struct Orbit {
    double h;
    MotionPattern pattern;
    TurningPoints turning;
    double period;
    OrbitMoments moments;

    double frequency() const { return 2.0 * std::numbers::pi / period; }
    /// \oint v dx = T <v^2>, the action (times 2 pi) of the orbit.
    double action() const { return period * moments.m_v2; }
};

/// Period and moments at energy h on the given branch. The two turning-point
/// singularities of 1/sqrt(2h - 2U) are removed by a sine substitution after
/// factoring the cubic in x^2 exactly, leaving a smooth integrand for the
/// adaptive Gauss-Legendre rule. Left side-well results mirror the right one.
Orbit solve_orbit(double h, MotionPattern pattern, const Landscape& land, const QuadratureOptions& opts = {});

double period(double h, MotionPattern pattern, const StiffnessParams& p);
double frequency(double h, MotionPattern pattern, const StiffnessParams& p);
OrbitMoments time_average(double h, MotionPattern pattern, const StiffnessParams& p);

/// Energy grid of one branch. Tabulated branches are CrossWell, MiddleWell and
/// SideWellRight; SideWellLeft queries are served by mirroring.
struct BranchGrid {
    enum class Spacing { Uniform, SaddleGraded };

    MotionPattern branch;
    double lo;
    double hi;
    int points;
    Spacing spacing = Spacing::SaddleGraded;
};

/// Natural grid for a branch: from just above its well bottom (or u1 for the
/// cross-well branch) to just below u1 (or h_max), graded toward u1 where the
/// period diverges logarithmically.
BranchGrid default_branch_grid(const Landscape& land, MotionPattern branch, int points, double h_max = 0.0);

/// Energies of a grid after clipping to the guard bands; strictly increasing.
std::vector<double> grid_energies(const Landscape& land, const BranchGrid& grid);

/// Abscissa +-ln|h - u1|, increasing in h on every branch. Table columns are
/// smooth in it near the separatrix, where they are logarithmic in h.
double separatrix_coordinate(const Landscape& land, MotionPattern branch, double h);

struct EnergyRow {
    double h;
    double period;
    double omega;
    OrbitMoments moments;
};

class EnergyFunctionTable {
public:
    struct Branch {
        MotionPattern pattern;
        std::vector<EnergyRow> rows;
        double lo() const { return rows.front().h; }
        double hi() const { return rows.back().h; }
    };

    EnergyFunctionTable(Landscape land, std::vector<Branch> branches);

    const Landscape& landscape() const { return land_; }
    const std::vector<Branch>& branches() const { return branches_; }

    bool has_branch(MotionPattern pattern) const;
    /// Rows of a tabulated branch; SideWellLeft maps onto SideWellRight storage.
    const Branch& branch(MotionPattern pattern) const;
    bool covers(MotionPattern pattern, double h) const;

    /// Interpolated row. Throws OutOfRange outside the branch's validity interval.
    EnergyRow interpolate(MotionPattern pattern, double h) const;
    /// Same, with h clamped into the validity interval.
    EnergyRow interpolate_clamped(MotionPattern pattern, double h) const;

private:
    struct Columns {
        CubicSpline period, omega, m_v2, m_x, m_x2, m_v2x, m_v2x2;
    };
    std::size_t slot(MotionPattern pattern) const;
    EnergyRow evaluate(std::size_t index, MotionPattern pattern, double h) const;

    Landscape land_;
    std::vector<Branch> branches_;
    std::vector<Columns> columns_;
};

/// Tabulates every requested branch. Throws InvalidGridSpec for an empty or
/// too-coarse grid (fewer than 16 points) or an interval that the guard bands
/// empty out; a failed point aborts the build with its energy reported.
EnergyFunctionTable build_energy_table(const Landscape& land, std::span<const BranchGrid> grids,
                                       const QuadratureOptions& opts = {}, unsigned threads = 1);

}  // namespace tristable
