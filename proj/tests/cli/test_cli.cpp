#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tristable/error.hpp"
#include "tristable_cli/commands.hpp"
#include "tristable_cli/config.hpp"
#include "tristable_cli/output.hpp"

using namespace tristable;
using namespace tristable::cli;
namespace fs = std::filesystem;

namespace {

const char* kCase1 = R"({
  "case": "I",
  "stiffness": {"k1": 1.0, "k2": 4.5, "k3": 3.5},
  "damping": {"beta": 0.1},
  "noise": {"d1": 0.01, "tau1": 0.5}
})";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tristable_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::IoError;
}

std::string message_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

int run(const std::string& args) {
    const std::string cmd = std::string(TRISTABLE_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<double> col(const CsvData& d, const std::string& name) {
    const int i = d.column(name);
    EXPECT_GE(i, 0) << name;
    return i < 0 ? std::vector<double>{} : d.values(i);
}

double trapezoid(const CsvData& d, const std::string& x, const std::string& y) {
    const auto xs = col(d, x);
    const auto ys = col(d, y);
    double s = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) s += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    return s;
}

}  // namespace

TEST(Config, ParsesAndDefaults) {
    const RunConfig c = parse_config(kCase1);
    EXPECT_EQ(c.model.noise_case, NoiseCase::CaseI);
    EXPECT_DOUBLE_EQ(c.model.stiffness.k3(), 3.5);
    EXPECT_DOUBLE_EQ(c.model.damping.beta, 0.1);
    EXPECT_DOUBLE_EQ(c.model.noise.n1.tau, 0.5);
    EXPECT_EQ(c.spd.form, SpdSection::Form::Closed);
    EXPECT_EQ(c.output.format, "csv");
}

TEST(Config, StrictKeys) {
    const std::string extra = R"({"stiffness": {"k1": 1, "k2": 4.5, "k3": 3.5}, "nosie": {}})";
    EXPECT_EQ(code_of([&] { parse_config(extra); }), ErrorCode::ConfigError);
    EXPECT_NE(message_of([&] { parse_config(extra); }).find("nosie"), std::string::npos);
    const std::string nested = R"({"stiffness": {"k1": 1, "k2": 4.5, "k3": 3.5, "k4": 1}})";
    EXPECT_NE(message_of([&] { parse_config(nested); }).find("stiffness.k4"), std::string::npos);
}

TEST(Config, MissingKeyIsNamed) {
    const std::string text = R"({"stiffness": {"k1": 1, "k2": 4.5}})";
    EXPECT_EQ(code_of([&] { parse_config(text); }), ErrorCode::ConfigError);
    EXPECT_NE(message_of([&] { parse_config(text); }).find("stiffness.k3"), std::string::npos);
}

TEST(Config, SyntaxErrorReportsLine) {
    const std::string text = "{\n  \"stiffness\": {\"k1\": 1,,}\n}";
    const std::string msg = message_of([&] { parse_config(text); });
    EXPECT_NE(msg.find("syntax error"), std::string::npos);
    EXPECT_NE(msg.find("line 2"), std::string::npos);
}

TEST(Config, RejectsInvalidValues) {
    EXPECT_EQ(code_of([] { parse_config(R"({"stiffness": {"k1": 1, "k2": 4.5, "k3": -1}})"); }),
              ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] {
                  parse_config(R"({"stiffness": {"k1": 1, "k2": 4.5, "k3": 3.5}, "sim": {"dt": 0}})");
              }),
              ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] {
                  parse_config(R"({"case": "I", "stiffness": {"k1": 1, "k2": 4.5, "k3": 3.5}, "noise": {"lambda": 0.5}})");
              }),
              ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] {
                  parse_config(R"({"case": "II", "stiffness": {"k1": 1, "k2": 4.5, "k3": 4}, "noise": {"lambda": 1.5}})");
              }),
              ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_config(R"({"stiffness": {"k1": "one", "k2": 4.5, "k3": 3.5}})"); }),
              ErrorCode::ConfigError);
}

TEST(Config, RoundTrip) {
    const std::string text = R"({
      "case": "II",
      "stiffness": {"k1": 1, "k2": 4.5, "k3": 4},
      "damping": {"beta": 0.1, "beta1": 0.05},
      "noise": {"d1": 0.005, "tau1": 0.5, "d2": 0.005, "tau2": 0.5, "lambda": -0.45},
      "sim": {"dt": 0.005, "n_steps": 1000, "seed": 42, "decimation": 2},
      "spd": {"cross_spectrum": "generator"},
      "sweep": {"parameter": "D2", "values": [0.001, 0.01]},
      "output": {"dir": "somewhere", "format": "json"}
    })";
    const RunConfig a = parse_config(text);
    EXPECT_EQ(a.spd.form, SpdSection::Form::Integral);
    const RunConfig b = parse_config(to_json(a).dump());
    EXPECT_EQ(to_json(a), to_json(b));
    EXPECT_DOUBLE_EQ(b.model.noise.lambda, -0.45);
    EXPECT_EQ(b.sim.seed, 42u);
    EXPECT_EQ(b.spd.options.cross_spectrum, CrossSpectrum::Generator);
    ASSERT_TRUE(b.sweep.has_value());
    EXPECT_EQ(b.sweep->values.size(), 2u);
}

TEST(Config, ApplyParameter) {
    RunConfig c = parse_config(kCase1);
    apply_parameter(c, "D1", 0.02);
    apply_parameter(c, "tau1", 0.1);
    apply_parameter(c, "k3", 4.0);
    EXPECT_DOUBLE_EQ(c.model.noise.n1.d, 0.02);
    EXPECT_DOUBLE_EQ(c.model.noise.n1.tau, 0.1);
    EXPECT_DOUBLE_EQ(c.model.stiffness.k3(), 4.0);
    EXPECT_EQ(code_of([&] { apply_parameter(c, "omega", 1.0); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([&] { apply_parameter(c, "D1", -1.0); }), ErrorCode::ConfigError);
}

TEST(Output, CsvRoundTrip) {
    const fs::path dir = scratch("csv");
    Table t{{"a", "b", "label"}, {}};
    t.add({0.1, 1.0 / 3.0, std::string("x")});
    t.add({-2.5e-300, NAN, std::string("y")});
    write_table(dir, "t", t, "csv", nlohmann::json::object());
    const std::string text = slurp(dir / "t.csv");
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_EQ(text.substr(0, 12), "a,b,label\n0.");
    const CsvData d = read_csv(dir / "t.csv");
    EXPECT_EQ(col(d, "b")[0], 1.0 / 3.0);
    EXPECT_EQ(col(d, "a")[1], -2.5e-300);
    EXPECT_TRUE(std::isnan(col(d, "b")[1]));
    EXPECT_TRUE(fs::exists(dir / "t.meta.json"));
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Commands, LandscapeReport) {
    Invocation inv{parse_config(kCase1), scratch("landscape"), nullptr};
    std::ostringstream report;
    EXPECT_EQ(cmd_landscape(inv, report), kOk);
    const auto j = nlohmann::json::parse(report.str());
    EXPECT_NEAR(j["x_u"].get<double>(), 0.5345, 1e-4);
    EXPECT_NEAR(j["u1"].get<double>(), 0.0646, 1e-4);
    EXPECT_TRUE(fs::exists(inv.out / "landscape.json"));

    Invocation bad{parse_config(R"({"stiffness": {"k1": 1, "k2": 1, "k3": 1}})"), scratch("landscape_bad"), nullptr};
    std::ostringstream r2;
    EXPECT_NE(cmd_landscape(bad, r2), kOk);
    EXPECT_NE(r2.str().find("NotTriStable"), std::string::npos);
}

TEST(Commands, SpdTablesAreNormalized) {
    Invocation inv{parse_config(kCase1), scratch("spd"), nullptr};
    ASSERT_EQ(cmd_spd(inv), kOk);
    EXPECT_NEAR(trapezoid(read_csv(inv.out / "spd_energy.csv"), "h", "density"), 1.0, 1e-6);
    EXPECT_NEAR(trapezoid(read_csv(inv.out / "spd_marginal_x.csv"), "x", "density"), 1.0, 1e-6);
    EXPECT_NEAR(trapezoid(read_csv(inv.out / "spd_marginal_v.csv"), "v", "density"), 1.0, 1e-6);
    EXPECT_NEAR(trapezoid(read_csv(inv.out / "spd_amplitude.csv"), "a", "density"), 1.0, 1e-6);
    EXPECT_NEAR(trapezoid(read_csv(inv.out / "spd_baseline_x.csv"), "x", "density"), 1.0, 1e-6);

    const CsvData joint = read_csv(inv.out / "spd_joint.csv");
    const auto x = col(joint, "x");
    const auto v = col(joint, "v");
    const auto p = col(joint, "density");
    std::size_t nv = 1;
    while (nv < x.size() && x[nv] == x[0]) ++nv;
    const std::size_t nx = x.size() / nv;
    const double hx = x[nv] - x[0], hv = v[1] - v[0];
    double s = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t k = 0; k < nv; ++k) {
            const double w = (i == 0 || i + 1 == nx ? 0.5 : 1.0) * (k == 0 || k + 1 == nv ? 0.5 : 1.0);
            s += w * p[i * nv + k];
        }
    }
    EXPECT_NEAR(s * hx * hv, 1.0, 1e-6);

    for (const char* stem : {"spd_energy", "spd_joint", "spd_marginal_x", "spd_marginal_v", "spd_amplitude"}) {
        const auto meta = nlohmann::json::parse(slurp(inv.out / (std::string(stem) + ".meta.json")));
        EXPECT_EQ(meta["command"], "spd");
        EXPECT_TRUE(meta.contains("config"));
        EXPECT_TRUE(meta.contains("version"));
    }
}

TEST(Commands, SpdBothFormsWritesDiscrepancy) {
    RunConfig cfg = parse_config(kCase1);
    cfg.spd.form = SpdSection::Form::Both;
    cfg.spd.tables = {"energy", "marginals"};
    Invocation inv{cfg, scratch("spd_both"), nullptr};
    ASSERT_EQ(cmd_spd(inv), kOk);
    EXPECT_TRUE(fs::exists(inv.out / "spd_energy_closed.csv"));
    EXPECT_TRUE(fs::exists(inv.out / "spd_energy_integral.csv"));
    const auto d = nlohmann::json::parse(slurp(inv.out / "spd_discrepancy.json"));
    EXPECT_LT(d["closed_vs_integral"]["marginal_x"]["l1"].get<double>(), 0.2);
}

TEST(Commands, Case2MarginalTilts) {
    RunConfig cfg = parse_config(R"({
      "case": "II", "stiffness": {"k1": 1, "k2": 4.5, "k3": 4},
      "damping": {"beta": 0.1, "beta1": 0.05},
      "noise": {"d1": 0.005, "tau1": 0.5, "d2": 0.005, "tau2": 0.5, "lambda": 0.9},
      "spd": {"tables": ["marginals"], "cross_spectrum": "generator"}
    })");
    Invocation inv{cfg, scratch("spd_tilt"), nullptr};
    ASSERT_EQ(cmd_spd(inv), kOk);
    const CsvData m = read_csv(inv.out / "spd_marginal_x.csv");
    const auto x = col(m, "x");
    const auto p = col(m, "density");
    double left = 0.0, right = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) (x[i] < 0 ? left : right) += p[i];
    EXPECT_GT(left, 2.0 * right);
}

TEST(Commands, SimulateIsDeterministic) {
    RunConfig cfg = parse_config(kCase1);
    cfg.sim.n_steps = 200'000;
    cfg.sim.ensemble = 4;
    cfg.sim.seed = 5;
    cfg.output.histograms = {"x", "v", "energy"};
    Invocation a{cfg, scratch("sim_a"), nullptr};
    cfg.threads = 3;
    Invocation b{cfg, scratch("sim_b"), nullptr};
    ASSERT_EQ(cmd_simulate(a), kOk);
    ASSERT_EQ(cmd_simulate(b), kOk);
    for (const auto& entry : fs::directory_iterator(a.out)) {
        const fs::path other = b.out / entry.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
    }
    const auto meta = nlohmann::json::parse(slurp(a.out / "hist_x.meta.json"));
    EXPECT_TRUE(meta.contains("config"));
}

TEST(Commands, SimulateDivergenceNamesStep) {
    RunConfig cfg = parse_config(kCase1);
    cfg.sim.dt = 0.5;
    cfg.sim.n_steps = 10'000;
    cfg.sim.x0 = 1.2;
    Invocation inv{cfg, scratch("sim_div"), nullptr};
    const std::string msg = message_of([&] { cmd_simulate(inv); });
    EXPECT_NE(msg.find("dt"), std::string::npos);
    EXPECT_EQ(code_of([&] { cmd_simulate(inv); }), ErrorCode::Divergence);
}

TEST(Commands, CrSweepFlagsFailedPoints) {
    RunConfig cfg = parse_config(kCase1);
    cfg.sim.dt = 0.01;
    cfg.sim.n_steps = 400'000;
    cfg.sim.decimation = 10;
    cfg.psd.welch.segment_length = 1024;
    cfg.sweep = SweepSection{"D1", {0.001, 0.05}};
    Invocation inv{cfg, scratch("cr"), nullptr};
    ASSERT_EQ(cmd_cr_sweep(inv), kOk);
    const CsvData d = read_csv(inv.out / "cr_sweep.csv");
    EXPECT_EQ(d.rows.size(), 2u);
    for (const char* name : {"value", "h", "omega_m", "delta_omega", "eta", "status"}) {
        EXPECT_GE(d.column(name), 0) << name;
    }
    cfg.sweep = SweepSection{"D1", {}};
    Invocation empty{cfg, scratch("cr_empty"), nullptr};
    EXPECT_EQ(code_of([&] { cmd_cr_sweep(empty); }), ErrorCode::ConfigError);
}

TEST(Commands, CompareSelfAndMismatch) {
    const fs::path dir = scratch("compare");
    Table t{{"bin_lo", "bin_hi", "density"}, {}};
    t.add({0.0, 0.5, 1.0});
    t.add({0.5, 1.0, 1.0});
    write_table(dir, "a", t, "csv", nlohmann::json::object());
    Table u{{"bin_lo", "bin_hi", "density"}, {}};
    u.add({2.0, 3.0, 1.0});
    write_table(dir, "b", u, "csv", nlohmann::json::object());

    RunConfig cfg = parse_config(kCase1);
    cfg.compare.analytic = (dir / "a.csv").string();
    cfg.compare.empirical = (dir / "a.csv").string();
    Invocation inv{cfg, dir / "self", nullptr};
    std::ostringstream report;
    EXPECT_EQ(cmd_compare(inv, report), kOk);
    const CsvData m = read_csv(inv.out / "compare_metrics.csv");
    for (double v : col(m, "value")) EXPECT_EQ(v, 0.0);

    cfg.compare.empirical = (dir / "b.csv").string();
    Invocation mis{cfg, dir / "mismatch", nullptr};
    const std::string msg = message_of([&] { cmd_compare(mis, report); });
    EXPECT_NE(msg.find("[0, 1]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[2, 3]"), std::string::npos) << msg;
    EXPECT_EQ(code_of([&] { cmd_compare(mis, report); }), ErrorCode::SupportMismatch);
}

TEST(Binary, ExitCodes) {
    const fs::path dir = scratch("bin");
    const fs::path good = write_file(dir / "good.json", kCase1);
    const fs::path flat = write_file(dir / "flat.json", R"({"stiffness": {"k1": 1, "k2": 1, "k3": 1}})");
    const fs::path missing = write_file(dir / "missing.json", R"({"stiffness": {"k1": 1, "k2": 4.5}})");
    const fs::path unknown = write_file(dir / "unknown.json", R"({"stiffness": {"k1": 1, "k2": 4.5, "k3": 3.5}, "x": 1})");
    const std::string out = " --out " + (dir / "o").string();
    EXPECT_EQ(run("landscape --config " + good.string() + out), 0);
    EXPECT_EQ(run("landscape --config " + flat.string() + out), 3);
    EXPECT_EQ(run("landscape --config " + missing.string() + out), 2);
    EXPECT_EQ(run("landscape --config " + unknown.string() + out), 2);
    EXPECT_EQ(run("landscape"), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("--help"), 0);
    EXPECT_EQ(run("cr-sweep --config " + good.string() + " --parameter D1 --values ''" + out), 2);

    write_file(dir / "a.csv", "bin_lo,bin_hi,density\n0,1,1\n");
    write_file(dir / "b.csv", "bin_lo,bin_hi,density\n0,0.5,2\n");
    EXPECT_EQ(run("compare --analytic " + (dir / "a.csv").string() + " --empirical " + (dir / "a.csv").string() + out),
              0);
    EXPECT_EQ(run("compare --analytic " + (dir / "a.csv").string() + " --empirical " + (dir / "b.csv").string() +
                  " --threshold 0.5" + out),
              4);
}
