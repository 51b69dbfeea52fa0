#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tristable_cli/commands.hpp"
#include "tristable_cli/config.hpp"

namespace {

using namespace tristable;
using namespace tristable::cli;

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string format;
    std::optional<unsigned> threads;
    std::string parameter;
    std::optional<std::string> values;
    std::string analytic, empirical, metric;
    std::optional<double> threshold;
};

// Comma-delimited numbers; an empty string is an empty list.
std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start < text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const std::string item = text.substr(start, end - start);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size()) {
            throw Error(ErrorCode::ConfigError, "--values: '" + item + "' is not a number");
        }
        out.push_back(v);
        start = end + 1;
    }
    return out;
}

Invocation prepare(const Flags& f, bool config_required) {
    Invocation inv;
    if (!f.config.empty()) {
        inv.cfg = load_config(f.config);
    } else if (config_required) {
        throw Error(ErrorCode::ConfigError, "--config is required for this subcommand");
    }
    RunConfig& cfg = inv.cfg;
    if (f.seed) cfg.sim.seed = *f.seed;
    if (!f.format.empty()) cfg.output.format = f.format;
    if (f.threads) cfg.threads = *f.threads;
    if (!f.out.empty()) cfg.output.dir = f.out;
    if (!f.parameter.empty() || f.values) {
        SweepSection s = cfg.sweep.value_or(SweepSection{});
        if (!f.parameter.empty()) s.parameter = f.parameter;
        if (f.values) s.values = parse_values(*f.values);
        cfg.sweep = s;
    }
    if (!f.analytic.empty()) cfg.compare.analytic = f.analytic;
    if (!f.empirical.empty()) cfg.compare.empirical = f.empirical;
    if (!f.metric.empty()) cfg.compare.metric = f.metric;
    if (f.threshold) cfg.compare.threshold = *f.threshold;
    inv.out = cfg.output.dir;
    inv.log = &std::cout;
    return inv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stationary densities and coherence resonance of tri-stable oscillators under colored noise"};
    app.require_subcommand(1);
    app.set_version_flag("--version", TRISTABLE_VERSION);
    Flags f;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", f.out, "output directory (overrides output.dir)");
        sub->add_option("--seed", f.seed, "master seed (overrides sim.seed)");
        sub->add_option("--format", f.format, "table format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", f.threads, "worker threads, 0 = auto");
    };
    const auto sweep = [&](CLI::App* sub) {
        sub->add_option("--parameter", f.parameter, "sweep parameter");
        sub->add_option("--values", f.values, "comma-separated sweep values");
    };

    CLI::App* landscape = app.add_subcommand("landscape", "equilibria and critical energies");
    CLI::App* frequency = app.add_subcommand("frequency", "period and frequency versus energy per branch");
    CLI::App* spd = app.add_subcommand("spd", "stationary density tables");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble and pooled histograms");
    CLI::App* psd = app.add_subcommand("psd", "power spectrum of x and quality factor");
    CLI::App* cr = app.add_subcommand("cr-sweep", "quality factor across a noise parameter sweep");
    CLI::App* compare = app.add_subcommand("compare", "distances between two density tables");
    for (CLI::App* sub : {landscape, frequency, spd, simulate, psd, cr, compare}) common(sub);
    sweep(spd);
    sweep(cr);
    compare->add_option("--analytic", f.analytic, "reference table (CSV)");
    compare->add_option("--empirical", f.empirical, "table to compare (CSV)");
    compare->add_option("--metric", f.metric, "pass/fail metric")->check(CLI::IsMember({"l1", "sup", "ks"}));
    compare->add_option("--threshold", f.threshold, "pass threshold for the metric");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (landscape->parsed()) return cmd_landscape(prepare(f, true), std::cout);
        if (frequency->parsed()) return cmd_frequency(prepare(f, true));
        if (spd->parsed()) return cmd_spd(prepare(f, true));
        if (simulate->parsed()) return cmd_simulate(prepare(f, true));
        if (psd->parsed()) return cmd_psd(prepare(f, true));
        if (cr->parsed()) return cmd_cr_sweep(prepare(f, true));
        if (compare->parsed()) return cmd_compare(prepare(f, false), std::cout);
    } catch (const Error& e) {
        std::cerr << "tristable: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "tristable: unexpected failure: " << e.what() << '\n';
        return kUnexpected;
    }
    return kUsage;
}
