#include "tristable/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tristable/error.hpp"
#include "tristable/parallel.hpp"

namespace tristable {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

// Orbits symmetric in x: quarter orbit 0 -> x_t with x = x_t sin(theta).
// 2h - 2U = (y_t - y) q(y), y = x^2, where q is the deflated quadratic.
// Components: T, v^2, x^2, v^2 x^2 (odd moments vanish).
Orbit symmetric_orbit(double h, MotionPattern pattern, const Landscape& land, const TurningPoints& tp,
                      const QuadratureOptions& opts) {
    const StiffnessParams& p = land.params;
    const double x_t = tp.hi;
    const double y_t = x_t * x_t;
    const double c3 = p.k3() / 3.0;

    // q(y) = (k3/3) (y - y_b)(y - y_c) for the two remaining roots. When they
    // are real and bracket-known (middle well above the side-well bottom) use
    // them directly; otherwise deflate through Vieta's relations.
    double y_b = 0.0, y_c = 0.0;
    bool explicit_roots = false;
    if (pattern == MotionPattern::MiddleWell && h > land.u_side + land.guard_band()) {
        const TurningPoints side = turning_points(h, MotionPattern::SideWellRight, land);
        y_b = side.lo * side.lo;
        y_c = side.hi * side.hi;
        explicit_roots = true;
    }
    const double sum = 1.5 * p.k2() / p.k3() - y_t;  // y_b + y_c
    const double prod = 6.0 * h / (p.k3() * y_t);     // y_b * y_c
    const double centre = 0.5 * sum;
    const double offset = prod - centre * centre;
    const auto q_of = [&](double y) {
        if (explicit_roots) return c3 * (y_b - y) * (y_c - y);
        const double dy = y - centre;
        return c3 * (dy * dy + offset);
    };

    auto integrand = [&](double theta) {
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        const double x = x_t * s;
        const double y = x * x;
        const double q = q_of(y);
        const double w = 1.0 / std::sqrt(q);
        const double v2 = y_t * c * c * q;
        return std::array<double, 4>{w, v2 * w, y * w, v2 * y * w};
    };
    const auto res = integrate_adaptive<4>(integrand, 0.0, kHalfPi, opts);
    const double T = 4.0 * res.value[0];
    OrbitMoments m;
    m.m_v2 = 4.0 * res.value[1] / T;
    m.m_x2 = 4.0 * res.value[2] / T;
    m.m_v2x2 = 4.0 * res.value[3] / T;
    return Orbit{h, pattern, tp, T, m};
}

// Right side well: x = mid + half sin(theta), theta in [-pi/2, pi/2].
// 2h - 2U = (k3/3)(y - y_a)(x + x_b)(x + x_c) * half^2 cos^2(theta).
Orbit side_orbit(double h, const Landscape& land, const TurningPoints& tp, const QuadratureOptions& opts) {
    const StiffnessParams& p = land.params;
    const double x_b = tp.lo, x_c = tp.hi;
    const double y_a = 6.0 * h / (p.k3() * x_b * x_b * x_c * x_c);
    const double mid = 0.5 * (x_b + x_c);
    const double half = 0.5 * (x_c - x_b);
    const double c3 = p.k3() / 3.0;

    auto integrand = [&](double theta) {
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        const double x = mid + half * s;
        const double y = x * x;
        const double r = c3 * (y - y_a) * (x + x_b) * (x + x_c);
        const double w = 1.0 / std::sqrt(r);
        const double v2 = r * half * half * c * c;
        return std::array<double, 6>{w, v2 * w, x * w, y * w, v2 * x * w, v2 * y * w};
    };
    const auto res = integrate_adaptive<6>(integrand, -kHalfPi, kHalfPi, opts);
    const double T = 2.0 * res.value[0];
    OrbitMoments m;
    m.m_v2 = 2.0 * res.value[1] / T;
    m.m_x = 2.0 * res.value[2] / T;
    m.m_x2 = 2.0 * res.value[3] / T;
    m.m_v2x = 2.0 * res.value[4] / T;
    m.m_v2x2 = 2.0 * res.value[5] / T;
    return Orbit{h, MotionPattern::SideWellRight, tp, T, m};
}

}  // namespace

Orbit solve_orbit(double h, MotionPattern pattern, const Landscape& land, const QuadratureOptions& opts) {
    if (pattern == MotionPattern::SideWellLeft) {
        Orbit right = solve_orbit(h, MotionPattern::SideWellRight, land, opts);
        right.pattern = MotionPattern::SideWellLeft;
        right.turning = {-right.turning.hi, -right.turning.lo};
        right.moments = right.moments.mirrored();
        return right;
    }
    const TurningPoints tp = turning_points(h, pattern, land);
    if (pattern == MotionPattern::SideWellRight) return side_orbit(h, land, tp, opts);
    return symmetric_orbit(h, pattern, land, tp, opts);
}

double period(double h, MotionPattern pattern, const StiffnessParams& p) {
    return solve_orbit(h, pattern, classify_landscape(p)).period;
}

double frequency(double h, MotionPattern pattern, const StiffnessParams& p) {
    return solve_orbit(h, pattern, classify_landscape(p)).frequency();
}

OrbitMoments time_average(double h, MotionPattern pattern, const StiffnessParams& p) {
    return solve_orbit(h, pattern, classify_landscape(p)).moments;
}

BranchGrid default_branch_grid(const Landscape& land, MotionPattern branch, int points, double h_max) {
    switch (branch) {
        case MotionPattern::CrossWell:
            if (!(h_max > land.u1)) {
                std::ostringstream os;
                os << "cross-well grid needs h_max above u1 = " << land.u1 << " (got " << h_max << ")";
                throw Error(ErrorCode::InvalidGridSpec, os.str());
            }
            return {branch, land.u1, h_max, points};
        case MotionPattern::MiddleWell: return {branch, land.u_middle, land.u1, points};
        default: return {MotionPattern::SideWellRight, land.u_side, land.u1, points};
    }
}

std::vector<double> grid_energies(const Landscape& land, const BranchGrid& grid) {
    if (grid.points < 16) {
        std::ostringstream os;
        os << "branch " << to_string(grid.branch) << " grid has " << grid.points
           << " points; at least 16 are required";
        throw Error(ErrorCode::InvalidGridSpec, os.str());
    }
    const double margin = 2.0 * land.guard_band();
    double lo = grid.lo, hi = grid.hi;
    const bool cross = grid.branch == MotionPattern::CrossWell;
    if (cross) {
        lo = std::max(lo, land.u1 + margin);
    } else {
        const double bottom = is_side_well(grid.branch) ? land.u_side : land.u_middle;
        lo = std::max(lo, bottom + margin);
        hi = std::min(hi, land.u1 - margin);
    }
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        std::ostringstream os;
        os << "branch " << to_string(grid.branch) << " interval [" << grid.lo << ", " << grid.hi
           << "] is empty after clipping to the guard bands";
        throw Error(ErrorCode::InvalidGridSpec, os.str());
    }

    std::vector<double> h;
    h.reserve(grid.points);
    const auto uniform = [&](int n) {
        for (int i = 0; i < n; ++i) h.push_back(lo + (hi - lo) * i / (n - 1));
    };
    if (grid.spacing == BranchGrid::Spacing::Uniform) {
        uniform(grid.points);
        return h;
    }
    // Half of the points uniform, half geometric in the distance from u1.
    const int n_geom = grid.points / 2;
    uniform(grid.points - n_geom);
    const double d_near = cross ? lo - land.u1 : land.u1 - hi;
    const double d_far = cross ? hi - land.u1 : land.u1 - lo;
    if (d_far > d_near * (1.0 + 1e-9)) {
        const double ratio = std::log(d_far / d_near);
        for (int i = 1; i + 1 < n_geom + 1; ++i) {
            const double d = d_near * std::exp(ratio * i / n_geom);
            h.push_back(cross ? land.u1 + d : land.u1 - d);
        }
    }
    std::sort(h.begin(), h.end());
    const double tol = 1e-12 * std::max(1.0, std::abs(hi));
    h.erase(std::unique(h.begin(), h.end(), [&](double a, double b) { return std::abs(b - a) <= tol; }), h.end());
    return h;
}

double separatrix_coordinate(const Landscape& land, MotionPattern branch, double h) {
    return branch == MotionPattern::CrossWell ? std::log(h - land.u1) : -std::log(land.u1 - h);
}

EnergyFunctionTable build_energy_table(const Landscape& land, std::span<const BranchGrid> grids,
                                       const QuadratureOptions& opts, unsigned threads) {
    if (grids.empty()) throw Error(ErrorCode::InvalidGridSpec, "no branch grids requested");
    std::vector<EnergyFunctionTable::Branch> branches;
    for (const BranchGrid& grid : grids) {
        const MotionPattern pattern =
            grid.branch == MotionPattern::SideWellLeft ? MotionPattern::SideWellRight : grid.branch;
        const std::vector<double> energies = grid_energies(land, grid);
        std::vector<EnergyRow> rows(energies.size());
        parallel_for(energies.size(), threads, [&](std::size_t i) {
            try {
                const Orbit orbit = solve_orbit(energies[i], pattern, land, opts);
                rows[i] = EnergyRow{orbit.h, orbit.period, orbit.frequency(), orbit.moments};
            } catch (const Error& e) {
                std::ostringstream os;
                os << "table point H = " << energies[i] << " on branch " << to_string(pattern) << ": " << e.what();
                throw Error(e.code(), os.str());
            }
        });
        branches.push_back({pattern, std::move(rows)});
    }
    return EnergyFunctionTable(land, std::move(branches));
}

EnergyFunctionTable::EnergyFunctionTable(Landscape land, std::vector<Branch> branches)
    : land_(std::move(land)), branches_(std::move(branches)) {
    for (const Branch& b : branches_) {
        const std::size_t n = b.rows.size();
        std::vector<double> h(n), T(n), w(n), v2(n), x(n), x2(n), v2x(n), v2x2(n);
        for (std::size_t i = 0; i < n; ++i) {
            const EnergyRow& r = b.rows[i];
            h[i] = separatrix_coordinate(land_, b.pattern, r.h);
            T[i] = r.period;
            w[i] = r.omega;
            v2[i] = r.moments.m_v2;
            x[i] = r.moments.m_x;
            x2[i] = r.moments.m_x2;
            v2x[i] = r.moments.m_v2x;
            v2x2[i] = r.moments.m_v2x2;
        }
        columns_.push_back(Columns{CubicSpline(h, T), CubicSpline(h, w), CubicSpline(h, v2), CubicSpline(h, x),
                                   CubicSpline(h, x2), CubicSpline(h, v2x), CubicSpline(h, v2x2)});
    }
}

std::size_t EnergyFunctionTable::slot(MotionPattern pattern) const {
    const MotionPattern stored = pattern == MotionPattern::SideWellLeft ? MotionPattern::SideWellRight : pattern;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        if (branches_[i].pattern == stored) return i;
    }
    return branches_.size();
}

bool EnergyFunctionTable::has_branch(MotionPattern pattern) const { return slot(pattern) < branches_.size(); }

const EnergyFunctionTable::Branch& EnergyFunctionTable::branch(MotionPattern pattern) const {
    const std::size_t i = slot(pattern);
    if (i == branches_.size()) {
        throw Error(ErrorCode::OutOfRange, std::string("branch ") + std::string(to_string(pattern)) + " is not tabulated");
    }
    return branches_[i];
}

bool EnergyFunctionTable::covers(MotionPattern pattern, double h) const {
    const std::size_t i = slot(pattern);
    return i < branches_.size() && h >= branches_[i].lo() && h <= branches_[i].hi();
}

EnergyRow EnergyFunctionTable::evaluate(std::size_t i, MotionPattern pattern, double h) const {
    const Columns& c = columns_[i];
    const double q = separatrix_coordinate(land_, pattern, h);
    EnergyRow row{h, c.period(q), c.omega(q), {c.m_v2(q), c.m_x(q), c.m_x2(q), c.m_v2x(q), c.m_v2x2(q)}};
    if (pattern == MotionPattern::SideWellLeft) row.moments = row.moments.mirrored();
    return row;
}

EnergyRow EnergyFunctionTable::interpolate(MotionPattern pattern, double h) const {
    const Branch& b = branch(pattern);
    if (!(h >= b.lo() && h <= b.hi())) {
        std::ostringstream os;
        os << "energy " << h << " outside the tabulated interval [" << b.lo() << ", " << b.hi() << "] of branch "
           << to_string(pattern);
        throw Error(ErrorCode::OutOfRange, os.str());
    }
    return evaluate(slot(pattern), pattern, h);
}

EnergyRow EnergyFunctionTable::interpolate_clamped(MotionPattern pattern, double h) const {
    const Branch& b = branch(pattern);
    return evaluate(slot(pattern), pattern, std::clamp(h, b.lo(), b.hi()));
}

}  // namespace tristable
