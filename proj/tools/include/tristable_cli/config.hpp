#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "tristable/averaging.hpp"
#include "tristable/estimation.hpp"
#include "tristable/sde.hpp"

namespace tristable::cli {

struct GridSpec {
    double lo;
    double hi;
    int points;

    std::vector<double> values() const { return linspace(lo, hi, points); }
};

struct SpdSection {
    enum class Form { Closed, Integral, Both };
    Form form = Form::Closed;
    std::vector<std::string> tables{"energy", "joint", "marginals", "amplitude", "baseline"};
    SpdOptions options;
};

struct PsdSection {
    WelchOptions welch;
    QualityOptions quality;
};

struct SweepSection {
    std::string parameter;
    std::vector<double> values;
};

struct CompareSection {
    std::string analytic;
    std::string empirical;
    std::string metric = "l1";
    double threshold = 0.08;
    bool require_overlap = true;
};

struct OutputSection {
    std::string dir = "out";
    std::string format = "csv";
    bool write_series = false;
    std::vector<std::string> histograms{"x", "v", "joint", "energy", "amplitude"};
};

/// Everything a subcommand needs. JSON grammar (all sections optional except
/// "stiffness"; unknown keys are errors):
///   case: "I" | "II"
///   stiffness: {k1, k2, k3}
///   damping: {beta, beta1}
///   noise: {d1, tau1, d2, tau2, lambda}
///   sim: {dt, n_steps, burn_in_fraction, ensemble, seed, x0, v0, decimation, record_noise}
///   grids: {x, v, energy, amplitude: {lo, hi, points}; bins_x, bins_v, bins_energy, bins_amplitude: {lo, hi, bins}}
///   spd: {form: closed|integral|both, tables: [...], well_points, cross_points, tail_log, h_max,
///         cross_spectrum: verbatim|generator}
///   frequency: {points, h_max}
///   psd: {segment_length, overlap, window: hann|rectangular, smoothing}
///   sweep: {parameter, values}
///   compare: {analytic, empirical, metric: l1|sup|ks, threshold, require_overlap}
///   output: {dir, format: csv|json, write_series, histograms: [...]}
///   description: free text
struct RunConfig {
    SpdModel model;
    SimConfig sim;
    std::optional<GridSpec> grid_x, grid_v, grid_energy, grid_amplitude;
    BinSpec bins_x{-1.6, 1.6, 128};
    BinSpec bins_v{-1.5, 1.5, 128};
    std::optional<BinSpec> bins_energy, bins_amplitude;
    SpdSection spd;
    int frequency_points = 64;
    double frequency_h_max = 0.0;
    PsdSection psd;
    std::optional<SweepSection> sweep;
    CompareSection compare;
    OutputSection output;
    std::string description;
    unsigned threads = 0;

    nlohmann::json source;  // the parsed document, for sidecars

    void validate() const;
};

/// Throws Error(ConfigError) naming the offending key (and line for syntax errors).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Effective configuration as JSON (round-trips through parse_config).
nlohmann::json to_json(const RunConfig& cfg);

/// Applies a sweep value; parameter in {D1, tau1, D2, lambda, k1, k2, k3, beta, beta1}.
void apply_parameter(RunConfig& cfg, const std::string& parameter, double value);

}  // namespace tristable::cli
