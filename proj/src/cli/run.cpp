#include "tsvf/cli/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>

#include "tsvf/cli/csv.hpp"
#include "tsvf/enlarged.hpp"
#include "tsvf/measurement.hpp"

namespace tsvf::cli {

namespace {

const std::vector<std::string> kSweepModes{"forward", "backward", "weak_conventional", "weak_two_time", "jumps"};
constexpr double kPositivityTolerance = 1e-8;

// Per-sample warnings (e.g. block leakage at every step) collapse into one
// entry keyed by the text before the first '('.
class WarningCollector {
 public:
  WarningCollector() {
    previous_ = set_warning_sink([this](const std::string& m) {
      const std::string key = m.substr(0, m.find('('));
      auto [it, inserted] = seen_.try_emplace(key, m, 0);
      ++it->second.second;
      if (!inserted) return;
      if (previous_) {
        previous_(m);
      } else {
        std::cerr << "warning: " << m << '\n';
      }
    });
  }
  ~WarningCollector() { set_warning_sink(previous_); }
  WarningCollector(const WarningCollector&) = delete;
  WarningCollector& operator=(const WarningCollector&) = delete;

  std::vector<std::string> messages() const {
    std::vector<std::string> out;
    for (const auto& [key, entry] : seen_) {
      out.push_back(entry.second > 1 ? entry.first + " [" + std::to_string(entry.second) + " occurrences]"
                                     : entry.first);
    }
    return out;
  }

 private:
  WarningSink previous_;
  std::map<std::string, std::pair<std::string, std::size_t>> seen_;
};

struct Simulation {
  std::optional<Trajectory> forward;
  std::optional<Trajectory> backward;  // E_t at physical time t
  std::optional<Trajectory> enlarged;
};

void check_positivity(const Trajectory& t, const char* kind) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double lo = min_eigenvalue(t[i]);
    if (lo < -kPositivityTolerance) {
      warn(std::string(kind) + " trajectory loses positivity (min eigenvalue " + format_number(lo) + " at t = " +
           format_number(t.grid.time(i)) + " s)");
      return;
    }
  }
}

bool needs(const std::vector<std::string>& modes, std::initializer_list<const char*> any) {
  for (const char* m : any) {
    if (std::find(modes.begin(), modes.end(), m) != modes.end()) return true;
  }
  return false;
}

Simulation simulate(const RunConfig& c, const LindbladModel& model, const std::vector<std::string>& modes) {
  const TimeGrid grid(c.t_final, c.dt);
  Simulation s;
  if (needs(modes, {"forward", "voltage", "bloch"})) {
    s.forward = evolve_forward(model, c.rho0, grid);
    check_positivity(*s.forward, "forward");
  }
  if (needs(modes, {"backward", "voltage", "bloch"})) {
    s.backward = evolve_backward(model, c.effect_final, grid);
    check_positivity(*s.backward, "backward");
  }
  if (needs(modes, {"enlarged", "weak_conventional", "weak_two_time", "voltage", "bloch", "jumps"})) {
    s.enlarged = evolve_enlarged(model, c.rho0, c.effect_final, grid);
    double off = 0.0;
    for (const auto& m : s.enlarged->states) {
      const Eigen::Index d = m.rows() / 2;
      off = std::max({off, m.block(0, d, d, d).norm(), m.block(d, 0, d, d).norm()});
    }
    if (off > EnlargedState::kBlockTolerance) {
      warn("enlarged trajectory leaves block-diagonal form (max off-diagonal block norm " + format_number(off) + ")");
    }
  }
  return s;
}

std::vector<WeakValueSample> expectation_series(const ComplexMatrix& a, const Trajectory& t) {
  std::vector<WeakValueSample> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out.push_back({t.grid.time(i), expectation(a, t[i]), Complex(1.0), false});
  }
  return out;
}

// "voltage" reads as sigma_z in plain expectations (the pointer mean) and
// through the closed-form Gaussian expressions in weak-value modes.
std::vector<WeakValueSample> series_for(const RunConfig& c, const Simulation& s, const std::string& mode,
                                        const std::string& observable) {
  const auto obs = c.observables_by_name();
  const ComplexMatrix a = observable == "voltage" ? pauli_z() : obs.at(observable);
  const MeasurementConfig& m = c.measurement;
  if (mode == "forward") return expectation_series(a, *s.forward);
  if (mode == "backward") return expectation_series(a, *s.backward);
  if (mode == "weak_conventional") {
    return observable == "voltage" ? voltage_weak_value_series(*s.enlarged, m.exact_correction, m.a)
                                   : conventional_weak_value_series(a, *s.enlarged);
  }
  if (mode == "weak_two_time") {
    return observable == "voltage" ? voltage_two_time_weak_value_series(*s.enlarged, m.exact_correction, m.a)
                                   : two_time_weak_value_series(a, *s.enlarged);
  }
  throw std::logic_error("no series for mode " + mode);
}

std::vector<JumpEvent> jumps_for(const RunConfig& c, const Simulation& s) {
  return detect_jumps(series_for(c, s, "weak_two_time", c.measurement.jump_observable), c.measurement.jump_threshold);
}

std::string flag(bool b) { return b ? "1" : "0"; }

FileRecord finish(CsvWriter& w, const std::filesystem::path& name) {
  w.close();
  return {name, w.rows(), w.columns()};
}

FileRecord write_timeseries(const RunConfig& c, const Simulation& s, const std::string& mode,
                            const std::filesystem::path& dir) {
  const bool weak = mode.rfind("weak_", 0) == 0;
  std::vector<std::string> columns{"t_s"};
  std::vector<std::vector<WeakValueSample>> all;
  for (const auto& o : c.observables) {
    columns.push_back("re_" + o);
    columns.push_back("im_" + o);
    if (weak) columns.push_back("diverged_" + o);
    all.push_back(series_for(c, s, mode, o));
  }
  const std::string name = mode + ".csv";
  CsvWriter w(dir / name, columns);
  const std::size_t n = all.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    CsvRow row{format_number(all.front()[i].time)};
    for (const auto& series : all) {
      row.push_back(format_number(series[i].value.real()));
      row.push_back(format_number(series[i].value.imag()));
      if (weak) row.push_back(flag(series[i].diverged));
    }
    w.row(row);
  }
  return finish(w, name);
}

FileRecord write_enlarged(const Simulation& s, const std::filesystem::path& dir) {
  const Trajectory& t = *s.enlarged;
  const Eigen::Index n = t[0].rows();
  std::vector<std::string> columns{"t_s"};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      columns.push_back("re_" + std::to_string(i) + "_" + std::to_string(j));
      columns.push_back("im_" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  CsvWriter w(dir / "enlarged.csv", columns);
  for (std::size_t k = 0; k < t.size(); ++k) {
    CsvRow row{format_number(t.grid.time(k))};
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        row.push_back(format_number(t[k](i, j).real()));
        row.push_back(format_number(t[k](i, j).imag()));
      }
    }
    w.row(row);
  }
  return finish(w, "enlarged.csv");
}

FileRecord write_voltage(const RunConfig& c, const Simulation& s, const std::filesystem::path& dir) {
  const auto fwd = series_for(c, s, "forward", "voltage");
  const auto bwd = series_for(c, s, "backward", "voltage");
  const auto weak = series_for(c, s, "weak_conventional", "voltage");
  const auto two_time = series_for(c, s, "weak_two_time", "voltage");
  CsvWriter w(dir / "voltage.csv",
              {"t_s", "voltage_forward", "voltage_backward", "re_voltage_weak", "im_voltage_weak",
               "diverged_voltage_weak", "re_voltage_two_time", "im_voltage_two_time", "diverged_voltage_two_time"});
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    w.row({format_number(fwd[i].time), format_number(fwd[i].value.real()), format_number(bwd[i].value.real()),
           format_number(weak[i].value.real()), format_number(weak[i].value.imag()), flag(weak[i].diverged),
           format_number(two_time[i].value.real()), format_number(two_time[i].value.imag()),
           flag(two_time[i].diverged)});
  }
  return finish(w, "voltage.csv");
}

FileRecord write_bloch(const Simulation& s, const std::filesystem::path& dir) {
  CsvWriter w(dir / "bloch.csv", {"t_s", "x", "y", "z", "state_kind"});
  auto emit = [&w](double t, const ComplexMatrix& state, const char* kind) {
    const BlochVector b = bloch_coordinates(state);
    w.row({format_number(t), format_number(b.x), format_number(b.y), format_number(b.z), kind});
  };
  const Trajectory& enl = *s.enlarged;
  for (std::size_t i = 0; i < s.forward->size(); ++i) emit(s.forward->grid.time(i), (*s.forward)[i], "forward");
  for (std::size_t i = 0; i < s.backward->size(); ++i) emit(s.backward->grid.time(i), (*s.backward)[i], "backward");
  for (std::size_t i = 0; i < enl.size(); ++i) emit(enl.grid.time(i), decode_rho(EnlargedState(enl[i])), "enlarged_block0");
  for (std::size_t i = 0; i < enl.size(); ++i) {
    emit(enl.grid.time(i), decode_effect(EnlargedState(enl[i])), "enlarged_block1");
  }
  return finish(w, "bloch.csv");
}

const std::vector<std::string> kJumpColumns{"t_start_s", "t_end_s", "direction", "delta_j_s"};

CsvRow jump_cells(const JumpEvent& e) {
  return {format_number(e.t_start), format_number(e.t_end), std::to_string(e.direction), format_number(e.duration())};
}

FileRecord write_jumps(const RunConfig& c, const Simulation& s, const std::filesystem::path& dir) {
  CsvWriter w(dir / "jumps.csv", kJumpColumns);
  for (const auto& e : jumps_for(c, s)) w.row(jump_cells(e));
  return finish(w, "jumps.csv");
}

std::vector<FileRecord> run_simulate(const RunConfig& c, const std::filesystem::path& dir) {
  const Simulation s = simulate(c, c.model(), c.modes);
  std::vector<FileRecord> files;
  for (const auto& mode : kModeNames) {
    if (!c.has_mode(mode)) continue;
    if (mode == "forward" || mode == "backward" || mode == "weak_conventional" || mode == "weak_two_time") {
      files.push_back(write_timeseries(c, s, mode, dir));
    } else if (mode == "enlarged") {
      files.push_back(write_enlarged(s, dir));
    } else if (mode == "voltage") {
      files.push_back(write_voltage(c, s, dir));
    } else if (mode == "bloch") {
      files.push_back(write_bloch(s, dir));
    } else if (mode == "jumps") {
      files.push_back(write_jumps(c, s, dir));
    }
  }
  return files;
}

struct CompactSample {
  double time;
  double re;
  double im;
  bool diverged;
};

struct PointResult {
  // keyed by (mode, observable); jumps keyed by ("jumps", "")
  std::map<std::pair<std::string, std::string>, std::vector<CompactSample>> series;
  std::vector<JumpEvent> jumps;
};

PointResult run_point(const RunConfig& c, double value) {
  const bool omega = c.sweep->parameter == "omega";
  const LindbladModel model = c.model_at(omega ? value : c.scenario.omega_mhz, omega ? c.scenario.k_khz : value);
  const Simulation s = simulate(c, model, c.modes);
  PointResult r;
  for (const auto& mode : c.modes) {
    if (mode == "jumps") {
      r.jumps = jumps_for(c, s);
      continue;
    }
    for (const auto& o : c.observables) {
      std::vector<CompactSample> out;
      for (const auto& w : series_for(c, s, mode, o)) out.push_back({w.time, w.value.real(), w.value.imag(), w.diverged});
      r.series[{mode, o}] = std::move(out);
    }
  }
  return r;
}

std::vector<FileRecord> run_sweep(const RunConfig& c, const std::filesystem::path& dir) {
  const std::vector<double> values = c.sweep->values();
  std::vector<PointResult> results(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        results[i] = run_point(c, values[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), values.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);  // lowest parameter index first
  }

  const std::string param = c.sweep->column_name();
  std::vector<FileRecord> files;
  for (const auto& mode : kModeNames) {
    if (!c.has_mode(mode)) continue;
    if (mode == "jumps") {
      std::vector<std::string> columns{"param_name", "param_value"};
      columns.insert(columns.end(), kJumpColumns.begin(), kJumpColumns.end());
      CsvWriter w(dir / "sweep_jumps.csv", columns);
      for (std::size_t p = 0; p < values.size(); ++p) {
        for (const auto& e : results[p].jumps) {
          CsvRow row{param, format_number(values[p])};
          const CsvRow cells = jump_cells(e);
          row.insert(row.end(), cells.begin(), cells.end());
          w.row(row);
        }
      }
      files.push_back(finish(w, "sweep_jumps.csv"));
      continue;
    }
    for (const auto& o : c.observables) {
      const std::string name = "sweep_" + mode + "_" + o + ".csv";
      CsvWriter w(dir / name, {"param_name", "param_value", "t_s", "re", "im", "diverged"});
      for (std::size_t p = 0; p < values.size(); ++p) {
        const std::string pv = format_number(values[p]);
        for (const auto& s : results[p].series.at({mode, o})) {
          w.row({param, pv, format_number(s.time), format_number(s.re), format_number(s.im), flag(s.diverged)});
        }
      }
      files.push_back(finish(w, name));
    }
  }
  return files;
}

void write_manifest(const RunConfig& c, RunKind kind, const RunReport& report, double wall_seconds,
                    const std::filesystem::path& dir) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : report.files_written) {
    files.push_back({{"path", f.path.string()}, {"rows", f.rows}, {"columns", f.columns}});
  }
  const nlohmann::json manifest{{"tool", "tsvf"},
                                {"version", kToolVersion},
                                {"kind", kind == RunKind::sweep ? "sweep" : "simulate"},
                                {"config", nlohmann::json::parse(c.echo_json)},
                                {"wall_time_s", wall_seconds},
                                {"files", files},
                                {"warnings", report.warnings}};
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

}  // namespace

std::vector<Diagnostic> check_runnable(const RunConfig& config, RunKind kind) {
  std::vector<Diagnostic> out;
  if (kind != RunKind::sweep) return out;
  if (!config.sweep) {
    out.push_back({"sweep", "the sweep subcommand needs a [sweep] table"});
    return out;
  }
  for (const auto& m : config.modes) {
    if (std::find(kSweepModes.begin(), kSweepModes.end(), m) == kSweepModes.end()) {
      std::string valid;
      for (const auto& s : kSweepModes) valid += (valid.empty() ? "" : ", ") + s;
      out.push_back({"modes", "mode \"" + m + "\" cannot be swept; sweepable modes: " + valid});
    }
  }
  return out;
}

RunReport run(const RunConfig& config, RunKind kind) {
  if (auto problems = check_runnable(config, kind); !problems.empty()) throw ConfigError(std::move(problems));
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(config.output_dir);
  RunReport report;
  {
    WarningCollector warnings;
    report.files_written =
        kind == RunKind::sweep ? run_sweep(config, config.output_dir) : run_simulate(config, config.output_dir);
    report.warnings = warnings.messages();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(config, kind, report, wall, config.output_dir);
  return report;
}

}  // namespace tsvf::cli
