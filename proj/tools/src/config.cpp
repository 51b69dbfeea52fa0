#include "tristable_cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "tristable/error.hpp"

namespace tristable::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "': " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; });
        if (!known) fail(join(path, it.key()), "unknown key");
    }
}

double number(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    return v.get<double>();
}

double required_number(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(join(path, key), "missing required key");
    return number(obj, path, key, 0.0);
}

std::int64_t integer(const json& obj, const std::string& path, const char* key, std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d) && std::abs(d) < 9e18) return static_cast<std::int64_t>(d);
    }
    fail(join(path, key), "expected an integer");
}

std::uint64_t unsigned_integer(const json& obj, const std::string& path, const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(join(path, key), "expected a non-negative integer");
}

bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail(join(path, key), "expected true or false");
    return v.get<bool>();
}

std::string text(const json& obj, const std::string& path, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
}

std::string choice(const json& obj, const std::string& path, const char* key, const std::string& fallback,
                   std::initializer_list<const char*> options) {
    const std::string value = text(obj, path, key, fallback);
    if (std::none_of(options.begin(), options.end(), [&](const char* o) { return value == o; })) {
        std::string list;
        for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
        fail(join(path, key), "'" + value + "' is not one of " + list);
    }
    return value;
}

std::vector<std::string> strings(const json& obj, const std::string& path, const char* key,
                                 std::vector<std::string> fallback, std::initializer_list<const char*> options) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array()) fail(join(path, key), "expected an array of strings");
    std::vector<std::string> out;
    for (const json& e : v) {
        if (!e.is_string()) fail(join(path, key), "expected an array of strings");
        const std::string s = e.get<std::string>();
        if (std::none_of(options.begin(), options.end(), [&](const char* o) { return s == o; })) {
            fail(join(path, key), "unknown entry '" + s + "'");
        }
        out.push_back(s);
    }
    return out;
}

std::optional<GridSpec> grid(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const std::string p = join(path, key);
    const json& g = obj.at(key);
    check_keys(g, p, {"lo", "hi", "points"});
    GridSpec s{required_number(g, p, "lo"), required_number(g, p, "hi"), static_cast<int>(integer(g, p, "points", 0))};
    if (!(s.hi > s.lo)) fail(p, "hi must exceed lo");
    if (s.points < 2) fail(join(p, "points"), "at least 2 points are required");
    return s;
}

std::optional<BinSpec> bins(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const std::string p = join(path, key);
    const json& g = obj.at(key);
    check_keys(g, p, {"lo", "hi", "bins"});
    BinSpec s{required_number(g, p, "lo"), required_number(g, p, "hi"), static_cast<int>(integer(g, p, "bins", 128))};
    if (!(s.hi > s.lo)) fail(p, "hi must exceed lo");
    if (s.bins < 8) fail(join(p, "bins"), "at least 8 bins are required");
    return s;
}

const json& section(const json& root, const char* key) {
    static const json empty = json::object();
    return root.contains(key) ? root.at(key) : empty;
}

}  // namespace

void RunConfig::validate() const {
    try {
        model.validate();
        sim.validate();
        bins_x.validate();
        bins_v.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    if (frequency_points < 16) fail("frequency.points", "at least 16 points are required");
    if (output.format != "csv" && output.format != "json") fail("output.format", "expected csv or json");
}

RunConfig parse_config(const std::string& doc) {
    json root;
    try {
        root = json::parse(doc);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, std::string("syntax error: ") + e.what());
    }
    check_keys(root, "", {"description", "case", "stiffness", "damping", "noise", "sim", "grids", "spd", "frequency",
                          "psd", "sweep", "compare", "output"});
    RunConfig cfg;
    cfg.source = root;
    cfg.description = text(root, "", "description", "");
    cfg.model.noise_case = choice(root, "", "case", "I", {"I", "II"}) == "I" ? NoiseCase::CaseI : NoiseCase::CaseII;

    if (!root.contains("stiffness")) fail("stiffness", "missing required section");
    const json& st = root.at("stiffness");
    check_keys(st, "stiffness", {"k1", "k2", "k3"});
    try {
        cfg.model.stiffness = StiffnessParams(required_number(st, "stiffness", "k1"),
                                              required_number(st, "stiffness", "k2"),
                                              required_number(st, "stiffness", "k3"));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        fail("stiffness", e.what());
    }

    const json& dm = section(root, "damping");
    check_keys(dm, "damping", {"beta", "beta1"});
    cfg.model.damping = {number(dm, "damping", "beta", 0.1), number(dm, "damping", "beta1", 0.0)};

    const json& nz = section(root, "noise");
    check_keys(nz, "noise", {"d1", "tau1", "d2", "tau2", "lambda"});
    cfg.model.noise.n1 = {number(nz, "noise", "d1", 0.01), number(nz, "noise", "tau1", 0.5)};
    cfg.model.noise.n2 = {number(nz, "noise", "d2", 0.0), number(nz, "noise", "tau2", 0.0)};
    cfg.model.noise.lambda = number(nz, "noise", "lambda", 0.0);
    if (cfg.model.noise_case == NoiseCase::CaseI &&
        (cfg.model.noise.n2.d != 0.0 || cfg.model.noise.lambda != 0.0 || cfg.model.damping.beta1 != 0.0)) {
        fail("case", "case I has no multiplicative channel; d2, lambda and beta1 must be 0");
    }

    const json& sm = section(root, "sim");
    check_keys(sm, "sim", {"dt", "n_steps", "burn_in_fraction", "ensemble", "seed", "x0", "v0", "decimation",
                           "record_noise"});
    SimConfig& s = cfg.sim;
    s.dt = number(sm, "sim", "dt", s.dt);
    s.n_steps = integer(sm, "sim", "n_steps", s.n_steps);
    s.burn_in_fraction = number(sm, "sim", "burn_in_fraction", s.burn_in_fraction);
    s.ensemble = static_cast<int>(integer(sm, "sim", "ensemble", s.ensemble));
    s.seed = unsigned_integer(sm, "sim", "seed", s.seed);
    s.x0 = number(sm, "sim", "x0", s.x0);
    s.v0 = number(sm, "sim", "v0", s.v0);
    s.decimation = static_cast<int>(integer(sm, "sim", "decimation", s.decimation));
    s.record_noise = boolean(sm, "sim", "record_noise", s.record_noise);

    const json& gr = section(root, "grids");
    check_keys(gr, "grids",
               {"x", "v", "energy", "amplitude", "bins_x", "bins_v", "bins_energy", "bins_amplitude"});
    cfg.grid_x = grid(gr, "grids", "x");
    cfg.grid_v = grid(gr, "grids", "v");
    cfg.grid_energy = grid(gr, "grids", "energy");
    cfg.grid_amplitude = grid(gr, "grids", "amplitude");
    if (auto b = bins(gr, "grids", "bins_x")) cfg.bins_x = *b;
    if (auto b = bins(gr, "grids", "bins_v")) cfg.bins_v = *b;
    cfg.bins_energy = bins(gr, "grids", "bins_energy");
    cfg.bins_amplitude = bins(gr, "grids", "bins_amplitude");

    const json& sp = section(root, "spd");
    check_keys(sp, "spd", {"form", "tables", "well_points", "cross_points", "tail_log", "h_max", "cross_spectrum"});
    const std::string form = choice(sp, "spd", "form", cfg.model.noise_case == NoiseCase::CaseI ? "closed" : "integral",
                                   {"closed", "integral", "both"});
    cfg.spd.form = form == "closed" ? SpdSection::Form::Closed
                                    : (form == "integral" ? SpdSection::Form::Integral : SpdSection::Form::Both);
    cfg.spd.tables =
        strings(sp, "spd", "tables", cfg.spd.tables, {"energy", "joint", "marginals", "amplitude", "baseline"});
    SpdOptions& o = cfg.spd.options;
    o.well_points = static_cast<int>(integer(sp, "spd", "well_points", o.well_points));
    o.cross_points = static_cast<int>(integer(sp, "spd", "cross_points", o.cross_points));
    o.tail_log = number(sp, "spd", "tail_log", o.tail_log);
    o.h_max = number(sp, "spd", "h_max", o.h_max);
    o.cross_spectrum = choice(sp, "spd", "cross_spectrum", "verbatim", {"verbatim", "generator"}) == "verbatim"
                           ? CrossSpectrum::Verbatim
                           : CrossSpectrum::Generator;

    const json& fq = section(root, "frequency");
    check_keys(fq, "frequency", {"points", "h_max"});
    cfg.frequency_points = static_cast<int>(integer(fq, "frequency", "points", cfg.frequency_points));
    cfg.frequency_h_max = number(fq, "frequency", "h_max", cfg.frequency_h_max);

    const json& ps = section(root, "psd");
    check_keys(ps, "psd", {"segment_length", "overlap", "window", "smoothing"});
    cfg.psd.welch.segment_length = static_cast<int>(integer(ps, "psd", "segment_length", 4096));
    cfg.psd.welch.overlap = number(ps, "psd", "overlap", 0.5);
    cfg.psd.welch.window =
        choice(ps, "psd", "window", "hann", {"hann", "rectangular"}) == "hann" ? Window::Hann : Window::Rectangular;
    cfg.psd.quality.smoothing = static_cast<int>(integer(ps, "psd", "smoothing", 5));

    if (root.contains("sweep")) {
        const json& sw = root.at("sweep");
        check_keys(sw, "sweep", {"parameter", "values"});
        SweepSection sweep;
        sweep.parameter = choice(sw, "sweep", "parameter", "",
                                 {"D1", "tau1", "D2", "lambda", "k1", "k2", "k3", "beta", "beta1"});
        if (!sw.contains("values") || !sw.at("values").is_array()) fail("sweep.values", "expected an array of numbers");
        for (const json& v : sw.at("values")) {
            if (!v.is_number()) fail("sweep.values", "expected an array of numbers");
            sweep.values.push_back(v.get<double>());
        }
        cfg.sweep = sweep;
    }

    const json& cp = section(root, "compare");
    check_keys(cp, "compare", {"analytic", "empirical", "metric", "threshold", "require_overlap"});
    cfg.compare.analytic = text(cp, "compare", "analytic", "");
    cfg.compare.empirical = text(cp, "compare", "empirical", "");
    cfg.compare.metric = choice(cp, "compare", "metric", "l1", {"l1", "sup", "ks"});
    cfg.compare.threshold = number(cp, "compare", "threshold", cfg.compare.threshold);
    cfg.compare.require_overlap = boolean(cp, "compare", "require_overlap", true);

    const json& out = section(root, "output");
    check_keys(out, "output", {"dir", "format", "write_series", "histograms"});
    cfg.output.dir = text(out, "output", "dir", cfg.output.dir);
    cfg.output.format = choice(out, "output", "format", "csv", {"csv", "json"});
    cfg.output.write_series = boolean(out, "output", "write_series", false);
    cfg.output.histograms =
        strings(out, "output", "histograms", cfg.output.histograms, {"x", "v", "joint", "energy", "amplitude"});

    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ConfigError) throw;
        throw Error(ErrorCode::ConfigError, path + ": " + std::string(e.what()).substr(13));
    }
}

json to_json(const RunConfig& cfg) {
    const SpdModel& m = cfg.model;
    json j;
    if (!cfg.description.empty()) j["description"] = cfg.description;
    j["case"] = m.noise_case == NoiseCase::CaseI ? "I" : "II";
    j["stiffness"] = {{"k1", m.stiffness.k1()}, {"k2", m.stiffness.k2()}, {"k3", m.stiffness.k3()}};
    j["damping"] = {{"beta", m.damping.beta}, {"beta1", m.damping.beta1}};
    j["noise"] = {{"d1", m.noise.n1.d},
                  {"tau1", m.noise.n1.tau},
                  {"d2", m.noise.n2.d},
                  {"tau2", m.noise.n2.tau},
                  {"lambda", m.noise.lambda}};
    const SimConfig& s = cfg.sim;
    j["sim"] = {{"dt", s.dt},
                {"n_steps", s.n_steps},
                {"burn_in_fraction", s.burn_in_fraction},
                {"ensemble", s.ensemble},
                {"seed", s.seed},
                {"x0", s.x0},
                {"v0", s.v0},
                {"decimation", s.decimation},
                {"record_noise", s.record_noise}};
    json grids = json::object();
    const auto put_grid = [&](const char* key, const std::optional<GridSpec>& g) {
        if (g) grids[key] = {{"lo", g->lo}, {"hi", g->hi}, {"points", g->points}};
    };
    const auto put_bins = [&](const char* key, const BinSpec& b) {
        grids[key] = {{"lo", b.lo}, {"hi", b.hi}, {"bins", b.bins}};
    };
    put_grid("x", cfg.grid_x);
    put_grid("v", cfg.grid_v);
    put_grid("energy", cfg.grid_energy);
    put_grid("amplitude", cfg.grid_amplitude);
    put_bins("bins_x", cfg.bins_x);
    put_bins("bins_v", cfg.bins_v);
    if (cfg.bins_energy) put_bins("bins_energy", *cfg.bins_energy);
    if (cfg.bins_amplitude) put_bins("bins_amplitude", *cfg.bins_amplitude);
    j["grids"] = grids;
    const SpdOptions& o = cfg.spd.options;
    j["spd"] = {{"form", cfg.spd.form == SpdSection::Form::Closed
                             ? "closed"
                             : (cfg.spd.form == SpdSection::Form::Integral ? "integral" : "both")},
                {"tables", cfg.spd.tables},
                {"well_points", o.well_points},
                {"cross_points", o.cross_points},
                {"tail_log", o.tail_log},
                {"h_max", o.h_max},
                {"cross_spectrum", std::string(to_string(o.cross_spectrum))}};
    j["frequency"] = {{"points", cfg.frequency_points}, {"h_max", cfg.frequency_h_max}};
    j["psd"] = {{"segment_length", cfg.psd.welch.segment_length},
                {"overlap", cfg.psd.welch.overlap},
                {"window", std::string(to_string(cfg.psd.welch.window))},
                {"smoothing", cfg.psd.quality.smoothing}};
    if (cfg.sweep) j["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
    j["compare"] = {{"analytic", cfg.compare.analytic},
                    {"empirical", cfg.compare.empirical},
                    {"metric", cfg.compare.metric},
                    {"threshold", cfg.compare.threshold},
                    {"require_overlap", cfg.compare.require_overlap}};
    j["output"] = {{"dir", cfg.output.dir},
                   {"format", cfg.output.format},
                   {"write_series", cfg.output.write_series},
                   {"histograms", cfg.output.histograms}};
    return j;
}

void apply_parameter(RunConfig& cfg, const std::string& parameter, double value) {
    SpdModel& m = cfg.model;
    try {
        if (parameter == "D1") {
            m.noise.n1.d = value;
        } else if (parameter == "tau1") {
            m.noise.n1.tau = value;
        } else if (parameter == "D2") {
            m.noise.n2.d = value;
        } else if (parameter == "lambda") {
            m.noise.lambda = value;
        } else if (parameter == "k1") {
            m.stiffness = StiffnessParams(value, m.stiffness.k2(), m.stiffness.k3());
        } else if (parameter == "k2") {
            m.stiffness = StiffnessParams(m.stiffness.k1(), value, m.stiffness.k3());
        } else if (parameter == "k3") {
            m.stiffness = StiffnessParams(m.stiffness.k1(), m.stiffness.k2(), value);
        } else if (parameter == "beta") {
            m.damping.beta = value;
        } else if (parameter == "beta1") {
            m.damping.beta1 = value;
        } else {
            fail("sweep.parameter", "unknown parameter '" + parameter + "'");
        }
        m.validate();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        fail("sweep", parameter + " = " + std::to_string(value) + ": " + e.what());
    }
}

}  // namespace tristable::cli
