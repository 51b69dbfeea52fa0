#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "tristable/orbit.hpp"
#include "tristable/potential.hpp"

namespace tristable {

/// Exponentially correlated noise: R(s) = (d/tau) exp(-|s|/tau),
/// S(w) = d / (1 + tau^2 w^2). tau = 0 is the white limit with \int R = 2d.
struct NoiseSpec {
    double d = 0.0;
    double tau = 0.0;

    void validate() const;
    double spectral_density(double omega) const { return d / (1.0 + tau * tau * omega * omega); }
    double correlation(double lag) const;
};

/// Additive channel n1, multiplicative channel n2 (g2(x) = x), cross-correlation lambda.
struct NoisePairSpec {
    NoiseSpec n1;
    NoiseSpec n2;
    double lambda = 0.0;

    void validate() const;
};

struct DampingParams {
    double beta = 0.0;   // linear
    double beta1 = 0.0;  // nonlinear, (beta + beta1 x^2) v

    void validate() const;
};

enum class NoiseCase { CaseI, CaseII };
enum class SpdForm { ClosedForm, IntegralForm };
/// Cross-spectral factor of the correlated pair in the Case II coefficients.
/// Verbatim: 2 lambda sqrt(D1 D2) / (1 + tau1^2 tau2^2 w^2).
/// Generator: the spectrum of the simulated pair (OU processes with
/// correlated drivers), 2 lambda sqrt(D1 D2) (1 + tau1 tau2 w^2) / ((1 + tau1^2 w^2)(1 + tau2^2 w^2)),
/// which keeps sigma^2 >= 0 for |lambda| <= 1.
enum class CrossSpectrum { Verbatim, Generator };

std::string_view to_string(NoiseCase c) noexcept;
std::string_view to_string(SpdForm f) noexcept;
std::string_view to_string(CrossSpectrum c) noexcept;

/// Drift m(H) and diffusion sigma^2(H) of the averaged energy process.
struct DriftDiffusion {
    double m;
    double sigma2;
    MotionPattern branch;
};

/// Coefficients from a precomputed orbit row: the additive-only system
///   m = -beta <v^2> + D1/(1 + tau1^2 w^2),  sigma^2 = 2 D1/(1 + tau1^2 w^2) <v^2>
/// or, for the correlated additive + multiplicative system,
///   m = -(beta <v^2> + beta1 <v^2 x^2>) + D1/(1+tau1^2 w^2) + D2/(1+tau2^2 w^2) <x^2>
///       + 2 lambda sqrt(D1 D2)/(1 + tau1^2 tau2^2 w^2) <x>
///   sigma^2 = 2 D1/(1+tau1^2 w^2) <v^2> + 2 D2/(1+tau2^2 w^2) <v^2 x^2>
///       + 4 lambda sqrt(D1 D2)/(1 + tau1^2 tau2^2 w^2) <v^2 x>.
DriftDiffusion energy_coefficients(NoiseCase noise_case, const EnergyRow& row, MotionPattern branch,
                                   const DampingParams& damp, const NoisePairSpec& noise,
                                   CrossSpectrum cross = CrossSpectrum::Verbatim);

/// Throws InvalidParameter when beta1 != 0.
DriftDiffusion drift_diffusion_case1(double h, MotionPattern branch, const DampingParams& damp,
                                     const NoiseSpec& n1, const StiffnessParams& p);
DriftDiffusion drift_diffusion_case2(double h, MotionPattern branch, const DampingParams& damp,
                                     const NoisePairSpec& pair, const StiffnessParams& p);

/// Everything needed to evaluate a stationary density.
struct SpdModel {
    NoiseCase noise_case = NoiseCase::CaseI;
    StiffnessParams stiffness{1.0, 4.5, 4.0};
    DampingParams damping;
    NoisePairSpec noise;

    void validate() const;
};

struct SpdOptions {
    int well_points = 128;         // table points per well branch
    int cross_points = 192;        // table points on the cross-well branch
    double tail_log = 40.0;        // discard where ln p < ln p_max - tail_log
    double h_max = 0.0;            // 0: chosen from tail_log
    bool fixed_frequency = false;  // closed form with w(H) = 1 (comparison baseline)
    QuadratureOptions quadrature{};
    double marginal_rel_tol = 1e-7;
    CrossSpectrum cross_spectrum = CrossSpectrum::Verbatim;
    unsigned threads = 1;
};

/// Stationary response of the averaged energy process.
///
/// The joint density depends on (x, v) only through H and the branch that
/// contains the point. Closed form (additive noise only):
///   p(x, v) = C0 (1 + tau1^2 w^2(H)) / D1 exp[-beta (1 + tau1^2 w^2(H)) H / D1].
/// Integral form:
///   p(x, v) = C0 K_b <v^2>/sigma^2 exp[\int_{u1}^{H} (2m/sigma^2 - 1/<v^2>) dmu]
/// with per-branch constants K_b chosen so the joint density is continuous
/// across the separatrix H = u1. Branch energy densities are p_b(H) = p(x, v) T_b(H).
class StationaryDensity {
public:
    StationaryDensity(const SpdModel& model, SpdForm form, const SpdOptions& options = {});

    const SpdModel& model() const { return model_; }
    SpdForm form() const { return form_; }
    const SpdOptions& options() const { return options_; }
    const Landscape& landscape() const { return table_.landscape(); }
    const EnergyFunctionTable& table() const { return table_; }

    /// Normalized joint density p(x, v).
    double joint(double x, double v) const;
    /// Joint density on a given branch as a function of energy.
    double joint_on_branch(MotionPattern branch, double h) const;
    /// Density of H restricted to one branch's phase-space region (zero where the branch is absent).
    double energy_on_branch(MotionPattern branch, double h) const;
    /// Sum over branches present at h.
    double energy(double h) const;
    /// Branch-wise amplitude density: a is the outermost |turning point|.
    double amplitude(double a) const;

    double marginal_x(double x) const;
    double marginal_v(double v) const;
    /// Mean density of p(x) over each bin [edges[i], edges[i+1]).
    std::vector<double> marginal_x_bins(std::span<const double> edges) const;
    std::vector<double> marginal_v_bins(std::span<const double> edges) const;

    /// C0 multiplying the unnormalized expression in the class comment.
    double c0() const;
    double h_max() const { return h_max_; }
    double x_max() const;
    double v_max() const;
    /// Energy interval [lo, hi] over which a branch is tabulated.
    std::pair<double, double> branch_interval(MotionPattern branch) const;
    static constexpr std::array<MotionPattern, 4> kBranches{MotionPattern::CrossWell, MotionPattern::MiddleWell,
                                                           MotionPattern::SideWellRight,
                                                           MotionPattern::SideWellLeft};

private:
    struct BranchDensity {
        MotionPattern pattern;
        MonotoneCubic log_prefactor;  // ln <v^2>/sigma^2 (integral form)
        MonotoneCubic exponent;       // \int_{u1}^{H} g (integral form)
        double constant = 0.0;        // ln K_b
    };

    double log_unnormalized(MotionPattern branch, double h) const;
    const BranchDensity& branch_density(MotionPattern branch) const;
    void build_integral_form();
    void normalize();
    QuadratureOptions marginal_quadrature(double width) const;

    SpdModel model_;
    SpdForm form_;
    SpdOptions options_;
    double h_max_ = 0.0;
    EnergyFunctionTable table_;
    std::vector<BranchDensity> branches_;
    double log_shift_ = 0.0;  // ln of the largest unnormalized value on the tables
    double log_norm_ = 0.0;   // ln Z of exp(log_unnormalized - log_shift)
};

enum class DensityKind { EnergySPD, JointSPD, MarginalX, MarginalV, AmplitudeSPD };
std::string_view to_string(DensityKind k) noexcept;

/// Tabulated density. One-dimensional tables use `grid`; the joint table is
/// row-major over (grid = x, grid2 = v). Values are renormalized so the
/// trapezoidal integral over the support is one; `grid_mass` records the
/// integral before that step.
struct DensityTable {
    DensityKind kind;
    SpdForm form;
    bool fixed_frequency = false;
    std::vector<double> grid;
    std::vector<double> grid2;
    std::vector<double> values;
    /// Energy tables: per-branch densities in branch order cross, middle,
    /// side_right, side_left. Amplitude tables: branch label of each point.
    std::vector<std::vector<double>> branch_values;
    std::vector<MotionPattern> labels;
    double c0 = 0.0;
    double grid_mass = 0.0;
    SpdModel model;

    double integral() const;
};

DensityTable spd_energy(const StationaryDensity& density, std::span<const double> energies);
DensityTable spd_joint(const StationaryDensity& density, std::span<const double> xs, std::span<const double> vs);
std::pair<DensityTable, DensityTable> spd_marginals(const StationaryDensity& density, std::span<const double> xs,
                                                    std::span<const double> vs);
/// Amplitude grid points at equilibria (U'(a) = 0) are dropped. Requires CaseI.
DensityTable spd_amplitude(const StationaryDensity& density, std::span<const double> amplitudes);
/// Marginals of the closed form with w(H) replaced by 1. Requires CaseI.
std::pair<DensityTable, DensityTable> spd_fixed_frequency_baseline(const SpdModel& model, std::span<const double> xs,
                                                                   std::span<const double> vs,
                                                                   SpdOptions options = {});

/// Evenly spaced points.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace tristable
