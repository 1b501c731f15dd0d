#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tsvf/cli/config.hpp"
#include "tsvf/cli/csv.hpp"
#include "tsvf/cli/run.hpp"
#include "tsvf/error.hpp"
#include "tsvf/measurement.hpp"

namespace tsvf::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tsvf_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunConfig parse_ok(const std::string& text, const std::vector<Override>& overrides = {}) {
  std::vector<Diagnostic> d;
  RunConfig c = parse_config(text, overrides, d);
  EXPECT_TRUE(d.empty()) << (d.empty() ? "" : d.front().str());
  return c;
}

std::vector<Diagnostic> diagnostics_of(const std::string& text) {
  std::vector<Diagnostic> d;
  parse_config(text, {}, d);
  return d;
}

std::size_t column(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return i;
  }
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

TEST(FormatNumber, SeventeenSignificantDigits) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-1.0), "-1");
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1e-9), "1.0000000000000001e-09");
  for (double v : {std::acos(-1.0), -2.5e-300, 123456789.123, 1.0 / 3.0}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

TEST(Csv, WriteReadRoundTrip) {
  const fs::path dir = scratch("csv");
  fs::create_directories(dir);
  CsvTable t{{"a", "b"}, {}};
  t.add({"1", "x"});
  t.add({"2", ""});
  EXPECT_THROW(t.add({"3"}), std::logic_error);
  EXPECT_EQ(write_csv(dir / "t.csv", t), 2u);
  EXPECT_EQ(slurp(dir / "t.csv"), "a,b\n1,x\n2,\n");
  const CsvTable back = read_csv(dir / "t.csv");
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.rows, t.rows);
  fs::remove_all(dir);
}

TEST(Config, DefaultsAreRunnable) {
  const RunConfig c = parse_ok("");
  EXPECT_EQ(c.scenario.name, "fluorescence");
  EXPECT_DOUBLE_EQ(c.scenario.omega_mhz, 1.16);
  EXPECT_DOUBLE_EQ(c.scenario.k_khz, 95.0);
  EXPECT_EQ(c.rho0, ground_projector());
  EXPECT_FALSE(c.sweep.has_value());
  EXPECT_FALSE(c.measurement.exact_correction);
  EXPECT_DOUBLE_EQ(c.measurement.jump_threshold, 0.5);
  EXPECT_DOUBLE_EQ(c.t_final, 2e-6);
  EXPECT_DOUBLE_EQ(parse_ok("[sweep]\npoints = 4\n").t_final, 4e-6);
  EXPECT_DOUBLE_EQ(parse_ok("[grid]\nt_final = 1e-6\n[sweep]\npoints = 4\n").t_final, 1e-6);
}

TEST(Config, OverridesMirrorConfigPaths) {
  const RunConfig c = parse_ok("[grid]\nt_final = 2e-6\ndt = 1e-9\n",
                               {{"grid.dt", "2e-9"},
                                {"scenario.name", "dephasing"},
                                {"observables", "sigma_z, voltage"},
                                {"boundary.rho0", "plus"},
                                {"measurement.exact_correction", "true"},
                                {"sweep.points", "5"}});
  EXPECT_DOUBLE_EQ(c.dt, 2e-9);
  EXPECT_DOUBLE_EQ(c.t_final, 2e-6);
  EXPECT_EQ(c.scenario.name, "dephasing");
  EXPECT_EQ(c.observables, (std::vector<std::string>{"sigma_z", "voltage"}));
  EXPECT_EQ(c.rho0, plus_projector());
  EXPECT_TRUE(c.measurement.exact_correction);
  ASSERT_TRUE(c.sweep.has_value());
  EXPECT_EQ(c.sweep->points, 5);
  EXPECT_EQ(c.sweep->parameter, "omega");
}

TEST(Config, CustomScenarioMatrices) {
  const RunConfig c = parse_ok(R"(
[scenario]
name = "custom"
hamiltonian = { re = [[0.5, 0.0], [0.0, -0.5]] }
lindblad = [ { re = [[0.0, 0.0], [1.0, 0.0]] }, { re = [[0.0, 0.0], [0.0, 0.0]], im = [[0.0, -0.5], [0.5, 0.0]] } ]
[boundary]
rho0 = { re = [[0.5, 0.5], [0.5, 0.5]] }
effect_final = "identity"
)");
  EXPECT_EQ(c.scenario.hamiltonian, ComplexMatrix(0.5 * pauli_z()));
  ASSERT_EQ(c.scenario.lindblad.size(), 2u);
  EXPECT_EQ(c.scenario.lindblad[0], sigma_minus());
  EXPECT_EQ(c.scenario.lindblad[1], ComplexMatrix(0.5 * pauli_y()));
  EXPECT_EQ(c.rho0, plus_projector());
  EXPECT_EQ(c.model().lindblad_ops().size(), 2u);
}

TEST(Validate, ShippedConfigsAreClean) {
  for (const char* name : {"fluorescence", "dephasing", "sweep_omega", "sweep_k"}) {
    const fs::path p = fs::path(TSVF_SOURCE_DIR) / "configs" / (std::string(name) + ".toml");
    EXPECT_TRUE(validate_file(p).empty()) << name;
    const RunConfig c = load_config(p);
    if (c.sweep) EXPECT_TRUE(check_runnable(c, RunKind::sweep).empty()) << name;
  }
}

TEST(Validate, DtLargerThanTFinalNamesBothFields) {
  const auto d = diagnostics_of("[grid]\nt_final = 1e-9\ndt = 2e-9\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NE(d[0].field.find("grid.dt"), std::string::npos);
  EXPECT_NE(d[0].field.find("grid.t_final"), std::string::npos);
}

TEST(Validate, UnknownObservableListsValidNames) {
  const auto d = diagnostics_of("observables = [\"sigma_z\", \"sigma_q\"]\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].field, "observables");
  EXPECT_NE(d[0].message.find("sigma_q"), std::string::npos);
  for (const auto& name : kObservableNames) EXPECT_NE(d[0].message.find(name), std::string::npos) << name;
}

TEST(Validate, ParseErrorCarriesLine) {
  const auto d = diagnostics_of("[grid]\ndt = 1e-9\nt_final = = 4\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].line, 3);
  EXPECT_NE(d[0].str().find("line 3"), std::string::npos);
}

TEST(Validate, FieldLevelProblems) {
  EXPECT_EQ(diagnostics_of("[grid]\ndt = \"fast\"\n").size(), 1u);
  EXPECT_EQ(diagnostics_of("[grid]\nstep = 1e-9\n").at(0).line, 2);
  EXPECT_EQ(diagnostics_of("[grid]\nt_final = 1e-6\ndt = 3e-7\n").size(), 1u);
  EXPECT_EQ(diagnostics_of("modes = [\"forwards\"]\n").at(0).field, "modes");
  EXPECT_EQ(diagnostics_of("[sweep]\npoints = 1\n").at(0).field, "sweep.points");
  EXPECT_EQ(diagnostics_of("[sweep]\nparameter = \"a\"\n").at(0).field, "sweep.parameter");
  EXPECT_EQ(diagnostics_of("[measurement]\na = 0\n").at(0).field, "measurement.a");
  EXPECT_EQ(diagnostics_of("[measurement]\njump_threshold = 1.5\n").at(0).field, "measurement.jump_threshold");
  EXPECT_EQ(diagnostics_of("[boundary]\nrho0 = \"vacuum\"\n").at(0).field, "boundary.rho0");
  EXPECT_EQ(diagnostics_of("[boundary]\nrho0 = { re = [[1, 0], [0, -1]] }\n").at(0).field, "boundary.rho0");
  EXPECT_EQ(diagnostics_of("[scenario]\nname = \"cavity\"\n").at(0).field, "scenario.name");
  EXPECT_EQ(diagnostics_of("[scenario]\nname = \"custom\"\nhamiltonian = { re = [[0, 1], [0, 0]] }\n").at(0).field,
            "scenario.hamiltonian");
  EXPECT_FALSE(diagnostics_of("[scenario]\nname = \"custom\"\n").empty());
}

TEST(Validate, UnreadableFileThrows) {
  EXPECT_THROW(validate_file("/nonexistent/config.toml"), ConfigError);
}

TEST(CheckRunnable, SweepNeedsTableAndSweepableModes) {
  EXPECT_EQ(check_runnable(parse_ok(""), RunKind::sweep).size(), 1u);
  const RunConfig c = parse_ok("modes = [\"bloch\", \"weak_two_time\"]\n[sweep]\npoints = 3\n");
  const auto d = check_runnable(c, RunKind::sweep);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NE(d[0].message.find("bloch"), std::string::npos);
  EXPECT_TRUE(check_runnable(c, RunKind::simulate).empty());
  EXPECT_THROW(run(c, RunKind::sweep), ConfigError);
}

TEST(Run, ForwardStartsInGroundState) {
  const fs::path dir = scratch("forward");
  const RunConfig c = parse_ok("modes = [\"forward\"]\n[grid]\nt_final = 1e-6\ndt = 1e-9\n", {{"output_dir", "'" + dir.string() + "'"}});
  const RunReport r = run(c);
  ASSERT_EQ(r.files_written.size(), 1u);
  const CsvTable t = read_csv(dir / "forward.csv");
  ASSERT_EQ(t.rows.size(), 1001u);
  EXPECT_EQ(t.rows[0][column(t, "t_s")], "0");
  EXPECT_EQ(std::stod(t.rows[0][column(t, "re_sigma_z")]), -1.0);
  EXPECT_EQ(std::stod(t.rows[0][column(t, "re_photon_n")]), 1.0);
  fs::remove_all(dir);
}

TEST(Run, ManifestMatchesFiles) {
  const fs::path dir = scratch("manifest");
  const RunConfig c = parse_ok(
      "observables = [\"sigma_z\", \"photon_n\", \"sigma_minus\", \"voltage\"]\n"
      "modes = [\"forward\", \"backward\", \"enlarged\", \"weak_conventional\", \"weak_two_time\", \"voltage\", "
      "\"bloch\", \"jumps\"]\n[grid]\nt_final = 2e-6\ndt = 2e-9\n",
      {{"output_dir", "'" + dir.string() + "'"}});
  const RunReport r = run(c);
  EXPECT_EQ(r.files_written.size(), 8u);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["tool"], "tsvf");
  EXPECT_EQ(manifest["version"], kToolVersion);
  EXPECT_TRUE(manifest["wall_time_s"].is_number());
  EXPECT_EQ(manifest["config"]["grid"]["dt"], 2e-9);
  EXPECT_EQ(manifest["config"]["scenario"]["name"], "fluorescence");
  ASSERT_EQ(manifest["files"].size(), 8u);
  for (const auto& f : manifest["files"]) {
    const fs::path p = dir / f["path"].get<std::string>();
    ASSERT_TRUE(fs::exists(p)) << p;
    const CsvTable t = read_csv(p);
    EXPECT_EQ(t.rows.size(), f["rows"].get<std::size_t>()) << p;
    EXPECT_EQ(t.columns, f["columns"].get<std::vector<std::string>>()) << p;
    for (const auto& row : t.rows) ASSERT_EQ(row.size(), t.columns.size()) << p;
  }
  EXPECT_EQ(read_csv(dir / "bloch.csv").rows.size(), 4u * 1001u);
  EXPECT_FALSE(read_csv(dir / "jumps.csv").rows.empty());
  fs::remove_all(dir);
}

TEST(Run, TwoTimeMatchesConventionalAtHalfTime) {
  for (const char* scenario : {"fluorescence", "dephasing"}) {
    const fs::path dir = scratch(std::string("half_") + scenario);
    const RunConfig c = parse_ok("modes = [\"enlarged\", \"weak_two_time\", \"weak_conventional\"]\n"
                                 "[grid]\nt_final = 2e-6\ndt = 1e-9\n",
                                 {{"output_dir", "'" + dir.string() + "'"}, {"scenario.name", scenario}});
    run(c);
    const CsvTable two = read_csv(dir / "weak_two_time.csv");
    const CsvTable conv = read_csv(dir / "weak_conventional.csv");
    ASSERT_EQ(two.rows.size(), 2001u);
    const std::size_t half = 1000;
    EXPECT_DOUBLE_EQ(std::stod(two.rows[half][0]), 1e-6);
    for (const auto& o : c.observables) {
      const Complex a(std::stod(two.rows[half][column(two, "re_" + o)]), std::stod(two.rows[half][column(two, "im_" + o)]));
      const Complex b(std::stod(conv.rows[half][column(conv, "re_" + o)]),
                      std::stod(conv.rows[half][column(conv, "im_" + o)]));
      EXPECT_LT(std::abs(a - b), 1e-8) << scenario << " " << o;
    }
    fs::remove_all(dir);
  }
}

TEST(Run, IdenticalConfigsGiveIdenticalBytes) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string text =
      "observables = [\"sigma_z\", \"voltage\"]\nmodes = [\"forward\", \"weak_two_time\", \"voltage\", \"jumps\"]\n"
      "[scenario]\nname = \"dephasing\"\n[grid]\nt_final = 2e-6\ndt = 1e-9\n";
  const RunReport ra = run(parse_ok(text, {{"output_dir", "'" + a.string() + "'"}}));
  run(parse_ok(text, {{"output_dir", "'" + b.string() + "'"}}));
  for (const auto& f : ra.files_written) EXPECT_EQ(slurp(a / f.path), slurp(b / f.path)) << f.path;
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Run, SweepIsLongFormatInParameterOrder) {
  const fs::path dir = scratch("sweep");
  const std::string text =
      "observables = [\"sigma_z\", \"voltage\"]\nmodes = [\"weak_two_time\", \"jumps\"]\n"
      "[grid]\nt_final = 1e-6\ndt = 2e-9\n[sweep]\nparameter = \"omega\"\nstart = 0.5\nstop = 2.0\npoints = 7\n";
  const RunConfig c = parse_ok(text, {{"output_dir", "'" + dir.string() + "'"}});
  const RunReport r = run(c, RunKind::sweep);
  ASSERT_EQ(r.files_written.size(), 3u);
  const CsvTable t = read_csv(dir / "sweep_weak_two_time_sigma_z.csv");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"param_name", "param_value", "t_s", "re", "im", "diverged"}));
  ASSERT_EQ(t.rows.size(), 7u * 501u);
  const std::vector<double> values = c.sweep->values();
  for (std::size_t p = 0; p < values.size(); ++p) {
    for (std::size_t i = 0; i < 501; ++i) {
      const auto& row = t.rows[p * 501 + i];
      ASSERT_EQ(row[0], "omega_mhz");
      ASSERT_EQ(row[1], format_number(values[p]));
      ASSERT_EQ(std::stod(row[2]), TimeGrid(1e-6, 2e-9).time(i));
    }
  }

  // Each block equals a single simulation at that parameter.
  const fs::path single = scratch("sweep_single");
  const RunConfig one = parse_ok(text, {{"output_dir", "'" + single.string() + "'"},
                                        {"scenario.omega_mhz", format_number(values[3])}});
  run(one);
  const CsvTable s = read_csv(single / "weak_two_time.csv");
  for (std::size_t i = 0; i < 501; ++i) {
    EXPECT_EQ(t.rows[3 * 501 + i][3], s.rows[i][column(s, "re_sigma_z")]);
    EXPECT_EQ(t.rows[3 * 501 + i][5], s.rows[i][column(s, "diverged_sigma_z")]);
  }
  const CsvTable jumps = read_csv(dir / "sweep_jumps.csv");
  EXPECT_EQ(jumps.columns.size(), 6u);
  fs::remove_all(dir);
  fs::remove_all(single);
}

TEST(Run, DivergencePropagatesWithStep) {
  const fs::path dir = scratch("diverge");
  const RunConfig c = parse_ok(R"(
modes = ["forward"]
[scenario]
name = "custom"
hamiltonian = { re = [[1e12, 0.0], [0.0, -1e12]] }
[boundary]
rho0 = "plus"
[grid]
t_final = 1e-6
dt = 1e-9
)",
                               {{"output_dir", "'" + dir.string() + "'"}});
  EXPECT_THROW(run(c), IntegrationDiverged);
  fs::remove_all(dir);
}

int exit_code(const std::string& args) {
  const std::string cmd = std::string(TSVF_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Binary, ExitCodes) {
  const fs::path dir = scratch("binary");
  fs::create_directories(dir);
  const std::string configs = std::string(TSVF_SOURCE_DIR) + "/configs/";
  EXPECT_EQ(exit_code("validate " + configs + "fluorescence.toml"), 0);
  {
    std::ofstream(dir / "bad.toml") << "[grid]\nt_final = 1e-9\ndt = 2e-9\n";
  }
  EXPECT_EQ(exit_code("validate " + (dir / "bad.toml").string()), 1);
  EXPECT_EQ(exit_code("validate " + (dir / "missing.toml").string()), 1);
  EXPECT_EQ(exit_code("simulate --grid.dt 0 --out " + (dir / "o").string()), 1);
  EXPECT_EQ(exit_code("frobnicate"), 1);
  {
    std::ofstream(dir / "diverge.toml") << "modes = [\"forward\"]\n[scenario]\nname = \"custom\"\n"
                                           "hamiltonian = { re = [[1e12, 0.0], [0.0, -1e12]] }\n"
                                           "[boundary]\nrho0 = \"plus\"\n[grid]\nt_final = 1e-6\ndt = 1e-9\n";
  }
  EXPECT_EQ(exit_code("simulate --config " + (dir / "diverge.toml").string() + " --out " + (dir / "d").string()), 2);
  EXPECT_EQ(exit_code("simulate --grid.t_final 1e-7 --out " + (dir / "s").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "s" / "forward.csv"));
  EXPECT_EQ(exit_code("voltage --a 2 --exact-correction --grid.t_final 1e-7 --out " + (dir / "v").string()), 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "v" / "manifest.json"));
  EXPECT_EQ(manifest["config"]["measurement"]["a"], 2.0);
  EXPECT_EQ(manifest["config"]["measurement"]["exact_correction"], true);
  EXPECT_TRUE(fs::exists(dir / "v" / "voltage.csv"));
  EXPECT_EQ(exit_code("jumps --threshold 0.4 --grid.t_final 2e-6 --out " + (dir / "j").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "j" / "jumps.csv"));
  EXPECT_EQ(exit_code("jumps --threshold 1.5 --out " + (dir / "j2").string()), 1);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace tsvf::cli
