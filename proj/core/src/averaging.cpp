#include "tristable/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tristable/error.hpp"
#include "tristable/parallel.hpp"

namespace tristable {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidParameter, what);
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return sum;
}

bool branch_present(const Landscape& land, MotionPattern b, double h) {
    switch (b) {
        case MotionPattern::CrossWell: return h > land.u1;
        case MotionPattern::MiddleWell: return h > land.u_middle && h < land.u1;
        default: return h > land.u_side && h < land.u1;
    }
}

double initial_h_max(const SpdModel& model, const SpdOptions& opts, const Landscape& land) {
    if (opts.h_max > 0.0) return opts.h_max;
    const double intensity = model.noise.n1.d + (model.noise_case == NoiseCase::CaseII ? model.noise.n2.d : 0.0);
    const double dissipation = std::max(model.damping.beta, 1e-300);
    return land.u1 + std::max(0.25, 1.2 * opts.tail_log * intensity / dissipation);
}

EnergyFunctionTable make_table(const Landscape& land, double h_max, const SpdOptions& opts) {
    const double mid_lo = land.u_middle + 1e-6 * (land.u1 - land.u_middle);
    const double side_lo = land.u_side + 1e-6 * (land.u1 - land.u_side);
    const std::array<BranchGrid, 3> grids{
        BranchGrid{MotionPattern::CrossWell, land.u1, h_max, opts.cross_points},
        BranchGrid{MotionPattern::MiddleWell, mid_lo, land.u1, opts.well_points},
        BranchGrid{MotionPattern::SideWellRight, side_lo, land.u1, opts.well_points},
    };
    return build_energy_table(land, grids, opts.quadrature, opts.threads);
}

EnergyRow row_at(const EnergyFunctionTable::Branch& b, std::size_t i, MotionPattern pattern) {
    EnergyRow row = b.rows[i];
    if (pattern == MotionPattern::SideWellLeft) row.moments = row.moments.mirrored();
    return row;
}

}  // namespace

std::string_view to_string(NoiseCase c) noexcept { return c == NoiseCase::CaseI ? "I" : "II"; }
std::string_view to_string(SpdForm f) noexcept { return f == SpdForm::ClosedForm ? "closed" : "integral"; }
std::string_view to_string(CrossSpectrum c) noexcept { return c == CrossSpectrum::Verbatim ? "verbatim" : "generator"; }

std::string_view to_string(DensityKind k) noexcept {
    switch (k) {
        case DensityKind::EnergySPD: return "energy";
        case DensityKind::JointSPD: return "joint";
        case DensityKind::MarginalX: return "marginal_x";
        case DensityKind::MarginalV: return "marginal_v";
        case DensityKind::AmplitudeSPD: return "amplitude";
    }
    return "?";
}

void NoiseSpec::validate() const {
    require(std::isfinite(d) && d >= 0.0, "noise intensity must be finite and non-negative");
    require(std::isfinite(tau) && tau >= 0.0, "correlation time must be finite and non-negative");
}

double NoiseSpec::correlation(double lag) const {
    if (tau > 0.0) return d / tau * std::exp(-std::abs(lag) / tau);
    return lag == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

void NoisePairSpec::validate() const {
    n1.validate();
    n2.validate();
    require(std::isfinite(lambda) && std::abs(lambda) <= 1.0, "cross-correlation must lie in [-1, 1]");
}

void DampingParams::validate() const {
    require(std::isfinite(beta) && beta >= 0.0, "linear damping must be finite and non-negative");
    require(std::isfinite(beta1) && beta1 >= 0.0, "nonlinear damping must be finite and non-negative");
}

void SpdModel::validate() const {
    damping.validate();
    noise.validate();
    if (noise_case == NoiseCase::CaseI) {
        require(damping.beta1 == 0.0, "the additive-noise system has no nonlinear damping (beta1 must be 0)");
    }
}

DriftDiffusion energy_coefficients(NoiseCase noise_case, const EnergyRow& row, MotionPattern branch,
                                   const DampingParams& damp, const NoisePairSpec& noise, CrossSpectrum cross) {
    const double w2 = row.omega * row.omega;
    const OrbitMoments& mom = row.moments;
    const double d1 = noise.n1.d, t1 = noise.n1.tau;
    const double a1 = d1 / (1.0 + t1 * t1 * w2);
    if (noise_case == NoiseCase::CaseI) {
        return {-damp.beta * mom.m_v2 + a1, 2.0 * a1 * mom.m_v2, branch};
    }
    const double d2 = noise.n2.d, t2 = noise.n2.tau;
    const double a2 = d2 / (1.0 + t2 * t2 * w2);
    const double c = cross == CrossSpectrum::Verbatim
                         ? 2.0 * noise.lambda * std::sqrt(d1 * d2) / (1.0 + t1 * t1 * t2 * t2 * w2)
                         : 2.0 * noise.lambda * std::sqrt(d1 * d2) * (1.0 + t1 * t2 * w2) /
                               ((1.0 + t1 * t1 * w2) * (1.0 + t2 * t2 * w2));
    const double m = -(damp.beta * mom.m_v2 + damp.beta1 * mom.m_v2x2) + a1 + a2 * mom.m_x2 + c * mom.m_x;
    const double s2 = 2.0 * a1 * mom.m_v2 + 2.0 * a2 * mom.m_v2x2 + 2.0 * c * mom.m_v2x;
    return {m, s2, branch};
}

DriftDiffusion drift_diffusion_case1(double h, MotionPattern branch, const DampingParams& damp,
                                     const NoiseSpec& n1, const StiffnessParams& p) {
    damp.validate();
    n1.validate();
    require(damp.beta1 == 0.0, "the additive-noise system has no nonlinear damping (beta1 must be 0)");
    const Orbit orbit = solve_orbit(h, branch, classify_landscape(p));
    const EnergyRow row{h, orbit.period, orbit.frequency(), orbit.moments};
    return energy_coefficients(NoiseCase::CaseI, row, branch, damp, NoisePairSpec{n1, {}, 0.0});
}

DriftDiffusion drift_diffusion_case2(double h, MotionPattern branch, const DampingParams& damp,
                                     const NoisePairSpec& pair, const StiffnessParams& p) {
    damp.validate();
    pair.validate();
    const Orbit orbit = solve_orbit(h, branch, classify_landscape(p));
    const EnergyRow row{h, orbit.period, orbit.frequency(), orbit.moments};
    return energy_coefficients(NoiseCase::CaseII, row, branch, damp, pair);
}

// ---------------------------------------------------------------------------

StationaryDensity::StationaryDensity(const SpdModel& model, SpdForm form, const SpdOptions& options)
    : model_(model),
      form_(form),
      options_(options),
      h_max_(initial_h_max(model, options, classify_landscape(model.stiffness))),
      table_(make_table(classify_landscape(model.stiffness), h_max_, options)) {
    model_.validate();
    if (form_ == SpdForm::ClosedForm) {
        require(model_.noise_case == NoiseCase::CaseI, "the closed form exists only for the additive-noise system");
    }
    if (options_.fixed_frequency) {
        require(form_ == SpdForm::ClosedForm, "the fixed-frequency baseline is a closed-form evaluation");
    }
    const bool noiseless =
        model_.noise.n1.d == 0.0 && (model_.noise_case == NoiseCase::CaseI || model_.noise.n2.d == 0.0);
    if (noiseless) throw Error(ErrorCode::NonIntegrable, "no stationary density without noise");
    if (model_.damping.beta == 0.0 && model_.damping.beta1 == 0.0) {
        throw Error(ErrorCode::NonIntegrable, "no stationary density without dissipation");
    }
    if (form_ == SpdForm::ClosedForm && model_.noise.n1.d == 0.0) {
        throw Error(ErrorCode::NonIntegrable, "the closed form needs a positive additive intensity");
    }

    // Extend the cross-well branch until the density has decayed by tail_log.
    for (int attempt = 0;; ++attempt) {
        if (form_ == SpdForm::IntegralForm) build_integral_form();
        double peak = kNegInf;
        for (MotionPattern b : kBranches) {
            for (const EnergyRow& r : table_.branch(b).rows) peak = std::max(peak, log_unnormalized(b, r.h));
        }
        const double tail = log_unnormalized(MotionPattern::CrossWell, table_.branch(MotionPattern::CrossWell).hi());
        if (options_.h_max > 0.0 || tail < peak - options_.tail_log) {
            log_shift_ = peak;
            break;
        }
        if (attempt >= 12 || !std::isfinite(peak)) {
            std::ostringstream os;
            os << "density does not decay by e^-" << options_.tail_log << " below H = " << h_max_;
            throw Error(ErrorCode::NonIntegrable, os.str());
        }
        h_max_ = landscape().u1 + 2.0 * (h_max_ - landscape().u1);
        table_ = make_table(landscape(), h_max_, options_);
    }
    normalize();
}

void StationaryDensity::build_integral_form() {
    branches_.clear();
    const Landscape& land = landscape();
    const bool case1 = model_.noise_case == NoiseCase::CaseI;
    const double d1 = model_.noise.n1.d, d2 = case1 ? 0.0 : model_.noise.n2.d;
    const double cross_amp = case1 ? 0.0 : 2.0 * model_.noise.lambda * std::sqrt(d1 * d2);

    // ln <v^2>/sigma^2 in the separatrix limit w -> 0, expressed through loop
    // integrals T <.> which stay finite there.
    const auto separatrix_prefactor = [&](const EnergyRow& r) {
        const OrbitMoments& m = r.moments;
        const double denom = 2.0 * (d1 * m.m_v2 + d2 * m.m_v2x2 + cross_amp * m.m_v2x);
        return std::log(m.m_v2 / denom);
    };

    double cross_limit = 0.0;
    for (MotionPattern pattern : kBranches) {
        const auto& stored = table_.branch(pattern);
        const std::size_t n = stored.rows.size();
        std::vector<double> h(n), log_pref(n), g(n), phi(n);
        for (std::size_t i = 0; i < n; ++i) {
            const EnergyRow row = row_at(stored, i, pattern);
            const DriftDiffusion dd =
                energy_coefficients(model_.noise_case, row, pattern, model_.damping, model_.noise, options_.cross_spectrum);
            if (!(dd.sigma2 > 0.0)) {
                std::ostringstream os;
                os << "diffusion coefficient " << dd.sigma2 << " is not positive at H = " << row.h << " on branch "
                   << to_string(pattern);
                if (options_.cross_spectrum == CrossSpectrum::Verbatim && model_.noise.lambda != 0.0) {
                    os << " (the verbatim cross-spectrum can make it negative; see cross_spectrum = generator)";
                }
                throw Error(ErrorCode::NonIntegrable, os.str());
            }
            h[i] = row.h;
            log_pref[i] = std::log(row.moments.m_v2 / dd.sigma2);
            g[i] = 2.0 * dd.m / dd.sigma2 - 1.0 / row.moments.m_v2;
        }
        const MonotoneCubic g_fit(h, g);
        const auto cell = [&](std::size_t i) { return integrate_fixed(g_fit, h[i], h[i + 1], 4); };
        if (pattern == MotionPattern::CrossWell) {
            phi[0] = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) phi[i + 1] = phi[i] + cell(i);
        } else {
            phi[n - 1] = 0.0;
            for (std::size_t i = n - 1; i > 0; --i) phi[i - 1] = phi[i] - cell(i - 1);
        }
        BranchDensity bd{pattern, MonotoneCubic(h, log_pref), MonotoneCubic(h, phi), 0.0};
        const double limit =
            separatrix_prefactor(row_at(stored, pattern == MotionPattern::CrossWell ? 0 : n - 1, pattern));
        if (pattern == MotionPattern::CrossWell) cross_limit = limit;
        // Offset of the tabulated prefactor from its separatrix limit is kept;
        // only the limits are matched.
        bd.constant = cross_limit - limit;
        branches_.push_back(std::move(bd));
    }
    (void)land;
}

const StationaryDensity::BranchDensity& StationaryDensity::branch_density(MotionPattern branch) const {
    for (const auto& bd : branches_) {
        if (bd.pattern == branch) return bd;
    }
    throw Error(ErrorCode::OutOfRange, "branch density not built");
}

double StationaryDensity::log_unnormalized(MotionPattern branch, double h) const {
    if (h > h_max_ * (1.0 + 1e-12)) return kNegInf;
    if (form_ == SpdForm::ClosedForm) {
        const double omega = options_.fixed_frequency ? 1.0 : table_.interpolate_clamped(branch, h).omega;
        const double d1 = model_.noise.n1.d, tau = model_.noise.n1.tau;
        const double f = 1.0 + tau * tau * omega * omega;
        return std::log(f / d1) - model_.damping.beta * f * h / d1;
    }
    const BranchDensity& bd = branch_density(branch);
    return bd.constant + bd.log_prefactor(h) + bd.exponent(h);
}

void StationaryDensity::normalize() {
    const Landscape& land = landscape();
    // Near the saddle T ~ (passages / lambda_u) ln(1/|h - u1|) + const.
    const double lambda_u = std::sqrt(-potential_curvature(land.unstable, model_.stiffness));
    double total = 0.0;
    for (MotionPattern b : kBranches) {
        const auto& rows = table_.branch(b).rows;
        const auto weight = [&](double h) { return std::exp(log_unnormalized(b, h) - log_shift_); };
        const auto mass = [&](double h) {
            return weight(h) * solve_orbit(std::clamp(h, rows.front().h, rows.back().h), b, land).period;
        };
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) total += integrate_fixed(mass, rows[i].h, rows[i + 1].h, 8);
        const double passages = b == MotionPattern::CrossWell ? 4.0 : (b == MotionPattern::MiddleWell ? 2.0 : 1.0);
        const double edge = b == MotionPattern::CrossWell ? rows.front().h : rows.back().h;
        total += std::abs(edge - land.u1) * (mass(edge) + passages / lambda_u * weight(edge));
        if (b != MotionPattern::CrossWell) {
            const double bottom = is_side_well(b) ? land.u_side : land.u_middle;
            total += (rows.front().h - bottom) * mass(rows.front().h);
        }
    }
    if (!(total > 0.0) || !std::isfinite(total)) throw Error(ErrorCode::NonIntegrable, "normalization integral failed");
    log_norm_ = std::log(total);
}

double StationaryDensity::joint_on_branch(MotionPattern branch, double h) const {
    return std::exp(log_unnormalized(branch, h) - log_shift_ - log_norm_);
}

double StationaryDensity::joint(double x, double v) const {
    const StiffnessParams& p = model_.stiffness;
    const double h = evaluate_total_energy(x, v, p);
    return joint_on_branch(branch_of(h, x, landscape()), h);
}

double StationaryDensity::energy_on_branch(MotionPattern branch, double h) const {
    if (!branch_present(landscape(), branch, h)) return 0.0;
    return joint_on_branch(branch, h) * table_.interpolate_clamped(branch, h).period;
}

double StationaryDensity::energy(double h) const {
    double sum = 0.0;
    for (MotionPattern b : kBranches) sum += energy_on_branch(b, h);
    return sum;
}

double StationaryDensity::amplitude(double a) const {
    const Landscape& land = landscape();
    a = std::abs(a);
    const double h = evaluate_potential(a, model_.stiffness);
    const double jacobian = std::abs(potential_slope(a, model_.stiffness));
    if (a < land.unstable) return energy_on_branch(MotionPattern::MiddleWell, h) * jacobian;
    if (a <= land.stable_side) return 0.0;
    if (h < land.u1) {
        return (energy_on_branch(MotionPattern::SideWellRight, h) + energy_on_branch(MotionPattern::SideWellLeft, h)) *
               jacobian;
    }
    return energy_on_branch(MotionPattern::CrossWell, h) * jacobian;
}

QuadratureOptions StationaryDensity::marginal_quadrature(double width) const {
    const double peak = std::exp(-log_norm_);
    return QuadratureOptions{16, options_.marginal_rel_tol, 1e-3 * options_.marginal_rel_tol * peak * width, 2048};
}

namespace {

// Pieces pinched at the saddle point are narrower than the band in which the
// branch test is decided by roundoff; a fixed rule is exact enough there.
template <class F>
double integrate_piece(F&& f, double a, double b, const QuadratureOptions& q) {
    if (b - a < 1e-6) return integrate_fixed(f, a, b, 4);
    return integrate_adaptive_scalar(f, a, b, q);
}

}  // namespace

double StationaryDensity::marginal_x(double x) const {
    const Landscape& land = landscape();
    const double u = evaluate_potential(x, model_.stiffness);
    if (u >= h_max_) return 0.0;
    const double v_top = std::sqrt(2.0 * (h_max_ - u));
    const auto f = [&](double v) { return joint(x, v); };
    double sum = 0.0;
    if (u < land.u1) {
        const double v_sep = std::sqrt(2.0 * (land.u1 - u));
        sum += integrate_piece(f, 0.0, v_sep, marginal_quadrature(v_sep));
        sum += integrate_piece(f, v_sep, v_top, marginal_quadrature(v_top - v_sep));
    } else {
        sum += integrate_piece(f, 0.0, v_top, marginal_quadrature(v_top));
    }
    return 2.0 * sum;
}

double StationaryDensity::marginal_v(double v) const {
    const Landscape& land = landscape();
    const StiffnessParams& p = model_.stiffness;
    const double kinetic = 0.5 * v * v;
    const double top = h_max_ - kinetic;
    if (top <= land.global_minimum()) return 0.0;
    std::vector<double> cuts{0.0, land.unstable, -land.unstable};
    for (double level : {top, land.u1 - kinetic}) {
        const CubicRoots roots = energy_level_roots(level, p);
        for (int i = 0; i < roots.count; ++i) {
            if (roots.y[i] > 0.0) {
                cuts.push_back(std::sqrt(roots.y[i]));
                cuts.push_back(-std::sqrt(roots.y[i]));
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return b - a <= 1e-12 * std::max(1.0, std::abs(b)); }),
               cuts.end());
    const auto f = [&](double x) { return joint(x, v); };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a <= 0.0) continue;
        if (evaluate_potential(0.5 * (a + b), p) > top) continue;
        sum += integrate_piece(f, a, b, marginal_quadrature(b - a));
    }
    return sum;
}

std::vector<double> StationaryDensity::marginal_x_bins(std::span<const double> edges) const {
    std::vector<double> out(edges.size() > 0 ? edges.size() - 1 : 0);
    parallel_for(out.size(), options_.threads, [&](std::size_t i) {
        const auto f = [&](double x) { return marginal_x(x); };
        out[i] = integrate_fixed(f, edges[i], edges[i + 1], 6) / (edges[i + 1] - edges[i]);
    });
    return out;
}

std::vector<double> StationaryDensity::marginal_v_bins(std::span<const double> edges) const {
    std::vector<double> out(edges.size() > 0 ? edges.size() - 1 : 0);
    parallel_for(out.size(), options_.threads, [&](std::size_t i) {
        const auto f = [&](double v) { return marginal_v(v); };
        out[i] = integrate_fixed(f, edges[i], edges[i + 1], 6) / (edges[i + 1] - edges[i]);
    });
    return out;
}

double StationaryDensity::c0() const { return std::exp(-log_shift_ - log_norm_); }

double StationaryDensity::x_max() const {
    return turning_points(h_max_, MotionPattern::CrossWell, landscape()).hi;
}

double StationaryDensity::v_max() const { return std::sqrt(2.0 * (h_max_ - landscape().global_minimum())); }

std::pair<double, double> StationaryDensity::branch_interval(MotionPattern branch) const {
    const auto& b = table_.branch(branch);
    return {b.lo(), b.hi()};
}

// ---------------------------------------------------------------------------

double DensityTable::integral() const {
    if (kind != DensityKind::JointSPD) return trapezoid(grid, values);
    std::vector<double> rows(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rows[i] = trapezoid(grid2, std::span<const double>(values).subspan(i * grid2.size(), grid2.size()));
    }
    return trapezoid(grid, rows);
}

namespace {

DensityTable make_table_header(const StationaryDensity& density, DensityKind kind) {
    DensityTable t{kind, density.form(), density.options().fixed_frequency, {}, {}, {}, {}, {}, density.c0(), 0.0,
                   density.model()};
    return t;
}

void renormalize(DensityTable& t) {
    t.grid_mass = t.integral();
    if (!(t.grid_mass > 0.0)) {
        throw Error(ErrorCode::NonIntegrable, "density vanishes on the requested grid");
    }
    for (double& v : t.values) v /= t.grid_mass;
    for (auto& col : t.branch_values) {
        for (double& v : col) v /= t.grid_mass;
    }
}

void require_grid(std::span<const double> g, const char* name) {
    if (g.size() < 2) throw Error(ErrorCode::InvalidGridSpec, std::string(name) + " grid needs at least two points");
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (!(g[i] > g[i - 1])) throw Error(ErrorCode::InvalidGridSpec, std::string(name) + " grid must increase");
    }
}

}  // namespace

DensityTable spd_energy(const StationaryDensity& density, std::span<const double> energies) {
    require_grid(energies, "energy");
    DensityTable t = make_table_header(density, DensityKind::EnergySPD);
    t.grid.assign(energies.begin(), energies.end());
    t.values.resize(energies.size());
    t.branch_values.assign(4, std::vector<double>(energies.size()));
    for (std::size_t i = 0; i < energies.size(); ++i) {
        for (std::size_t b = 0; b < 4; ++b) {
            t.branch_values[b][i] = density.energy_on_branch(StationaryDensity::kBranches[b], energies[i]);
            t.values[i] += t.branch_values[b][i];
        }
    }
    renormalize(t);
    return t;
}

DensityTable spd_joint(const StationaryDensity& density, std::span<const double> xs, std::span<const double> vs) {
    require_grid(xs, "x");
    require_grid(vs, "v");
    DensityTable t = make_table_header(density, DensityKind::JointSPD);
    t.grid.assign(xs.begin(), xs.end());
    t.grid2.assign(vs.begin(), vs.end());
    t.values.resize(xs.size() * vs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < vs.size(); ++j) t.values[i * vs.size() + j] = density.joint(xs[i], vs[j]);
    }
    renormalize(t);
    return t;
}

std::pair<DensityTable, DensityTable> spd_marginals(const StationaryDensity& density, std::span<const double> xs,
                                                    std::span<const double> vs) {
    require_grid(xs, "x");
    require_grid(vs, "v");
    DensityTable px = make_table_header(density, DensityKind::MarginalX);
    DensityTable pv = make_table_header(density, DensityKind::MarginalV);
    px.grid.assign(xs.begin(), xs.end());
    pv.grid.assign(vs.begin(), vs.end());
    px.values.resize(xs.size());
    pv.values.resize(vs.size());
    const unsigned threads = density.options().threads;
    parallel_for(xs.size(), threads, [&](std::size_t i) { px.values[i] = density.marginal_x(xs[i]); });
    parallel_for(vs.size(), threads, [&](std::size_t i) { pv.values[i] = density.marginal_v(vs[i]); });
    renormalize(px);
    renormalize(pv);
    return {std::move(px), std::move(pv)};
}

DensityTable spd_amplitude(const StationaryDensity& density, std::span<const double> amplitudes) {
    require(density.model().noise_case == NoiseCase::CaseI, "the amplitude density is defined for the additive system");
    DensityTable t = make_table_header(density, DensityKind::AmplitudeSPD);
    const Landscape& land = density.landscape();
    const StiffnessParams& p = density.model().stiffness;
    const double x_sep = land.separatrix_outer();
    for (double a : amplitudes) {
        if (a <= 0.0) continue;
        if (std::abs(potential_slope(a, p)) < 1e-12) continue;  // equilibria
        t.grid.push_back(a);
        t.values.push_back(density.amplitude(a));
        MotionPattern label = MotionPattern::CrossWell;
        if (a < land.unstable) {
            label = MotionPattern::MiddleWell;
        } else if (a < x_sep) {
            label = MotionPattern::SideWellRight;
        }
        t.labels.push_back(label);
    }
    require_grid(t.grid, "amplitude");
    renormalize(t);
    return t;
}

std::pair<DensityTable, DensityTable> spd_fixed_frequency_baseline(const SpdModel& model, std::span<const double> xs,
                                                                   std::span<const double> vs, SpdOptions options) {
    require(model.noise_case == NoiseCase::CaseI, "the fixed-frequency baseline is defined for the additive system");
    options.fixed_frequency = true;
    const StationaryDensity density(model, SpdForm::ClosedForm, options);
    return spd_marginals(density, xs, vs);
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(std::max(n, 0));
    for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return out;
}

}  // namespace tristable
