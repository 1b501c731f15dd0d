#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsvf/linalg.hpp"
#include "tsvf/models.hpp"

namespace tsvf::cli {

inline const std::vector<std::string> kModeNames{"forward",        "backward", "enlarged", "weak_conventional",
                                                 "weak_two_time", "voltage",  "bloch",    "jumps"};
inline const std::vector<std::string> kObservableNames{"sigma_z", "photon_n", "sigma_minus", "voltage"};
inline const std::vector<std::string> kPresetNames{"ground", "excited", "plus", "identity"};
inline const std::vector<std::string> kScenarioNames{"fluorescence", "dephasing", "custom"};

// Final time when grid.t_final is absent: single runs use the shorter
// window, sweeps the longer one.
inline constexpr double kDefaultTFinal = 2e-6;
inline constexpr double kDefaultSweepTFinal = 4e-6;

struct Diagnostic {
  std::string field;  // dotted config path, or several joined by " and "
  std::string message;
  int line = 0;  // 1-based source line when known

  std::string str() const;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct ScenarioConfig {
  std::string name = "fluorescence";
  double omega_mhz = kReferenceRabiMHz;
  double k_khz = kReferenceRateKHz;
  // Only for name == "custom", in rad/s units of the time axis.
  ComplexMatrix hamiltonian;
  std::vector<ComplexMatrix> lindblad;
};

struct SweepConfig {
  std::string parameter = "omega";  // "omega" (MHz) or "k" (kHz)
  double start = 0.2;
  double stop = 3.0;
  int points = 200;

  std::vector<double> values() const;
  std::string column_name() const { return parameter == "omega" ? "omega_mhz" : "k_khz"; }
};

struct MeasurementConfig {
  double a = 1.0;
  bool exact_correction = false;
  double jump_threshold = 0.5;
  std::string jump_observable = "sigma_z";
  PhotonConvention photon_convention = PhotonConvention::lowering_raising;
};

struct RunConfig {
  ScenarioConfig scenario;
  std::string rho0_label = "ground";
  std::string effect_label = "ground";
  ComplexMatrix rho0 = ground_projector();
  ComplexMatrix effect_final = ground_projector();
  double t_final = kDefaultTFinal;
  double dt = 1e-9;
  std::vector<std::string> observables{"sigma_z", "photon_n", "sigma_minus"};
  std::vector<std::string> modes{"forward"};
  std::optional<SweepConfig> sweep;
  MeasurementConfig measurement;
  std::filesystem::path output_dir = "out";
  std::string echo_json;  // effective configuration, overrides applied

  LindbladModel model() const { return model_at(scenario.omega_mhz, scenario.k_khz); }
  LindbladModel model_at(double omega_mhz, double k_khz) const;
  std::map<std::string, ComplexMatrix> observables_by_name() const;
  bool has_mode(const std::string& mode) const;
};

/// Override of a config field by dotted path, value in TOML syntax
/// (bare words are taken as strings).
struct Override {
  std::string path;
  std::string value;
};

/// Parses TOML text and applies overrides. Every problem found is
/// collected; the returned config is only meaningful when `diagnostics`
/// stays empty.
RunConfig parse_config(const std::string& text, const std::vector<Override>& overrides,
                       std::vector<Diagnostic>& diagnostics, const std::string& source_name = "<config>");

/// Reads and parses a file. Throws ConfigError on any diagnostic.
RunConfig load_config(const std::filesystem::path& path, const std::vector<Override>& overrides = {});

/// Throws ConfigError if the file cannot be read.
std::vector<Diagnostic> validate_file(const std::filesystem::path& path);

}  // namespace tsvf::cli
