#include "tsvf/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <toml.hpp>

namespace tsvf::cli {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

bool contains(const std::vector<std::string>& items, const std::string& s) {
  return std::find(items.begin(), items.end(), s) != items.end();
}

int line_of(const toml::node* node) { return node ? static_cast<int>(node->source().begin.line) : 0; }

class Reader {
 public:
  explicit Reader(std::vector<Diagnostic>& out) : out_(out) {}

  void error(std::string field, std::string message, const toml::node* node = nullptr) {
    out_.push_back({std::move(field), std::move(message), line_of(node)});
  }

  void check_keys(const toml::table& table, const std::string& prefix, const std::vector<std::string>& allowed) {
    for (auto&& [key, node] : table) {
      const std::string k(key.str());
      if (!contains(allowed, k)) {
        error(prefix.empty() ? k : prefix + "." + k, "unknown key; expected one of " + join(allowed), &node);
      }
    }
  }

  void number(const toml::table& table, const std::string& prefix, const char* key, double& target) {
    const toml::node* node = table.get(key);
    if (!node) return;
    if (auto v = node->value<double>(); v && node->is_number()) {
      target = *v;
    } else {
      error(prefix + "." + key, "expected a number", node);
    }
  }

  void integer(const toml::table& table, const std::string& prefix, const char* key, int& target) {
    const toml::node* node = table.get(key);
    if (!node) return;
    if (auto v = node->value<int64_t>(); v && node->is_integer()) {
      target = static_cast<int>(*v);
    } else {
      error(prefix + "." + key, "expected an integer", node);
    }
  }

  void boolean(const toml::table& table, const std::string& prefix, const char* key, bool& target) {
    const toml::node* node = table.get(key);
    if (!node) return;
    if (auto v = node->value<bool>()) {
      target = *v;
    } else {
      error(prefix + "." + key, "expected true or false", node);
    }
  }

  void string(const toml::table& table, const std::string& prefix, const char* key, std::string& target) {
    const toml::node* node = table.get(key);
    if (!node) return;
    if (auto v = node->value<std::string>()) {
      target = *v;
    } else {
      error(prefix + "." + key, "expected a string", node);
    }
  }

  // Array of strings, or a single comma-separated string (as given on the
  // command line).
  void names(const toml::table& table, const char* key, std::vector<std::string>& target) {
    const toml::node* node = table.get(key);
    if (!node) return;
    std::vector<std::string> out;
    if (auto s = node->value<std::string>()) {
      std::stringstream in(*s);
      for (std::string item; std::getline(in, item, ',');) {
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (!item.empty()) out.push_back(item);
      }
    } else if (const toml::array* arr = node->as_array()) {
      for (const auto& el : *arr) {
        if (auto v = el.value<std::string>()) {
          out.push_back(*v);
        } else {
          error(key, "expected a list of strings", &el);
          return;
        }
      }
    } else {
      error(key, "expected a list of strings", node);
      return;
    }
    target = std::move(out);
  }

  // {re = [[...]], im = [[...]]}; im is optional.
  std::optional<ComplexMatrix> matrix(const toml::node& node, const std::string& field) {
    const toml::table* t = node.as_table();
    if (!t) {
      error(field, "expected a table with 're' and optional 'im' rows", &node);
      return std::nullopt;
    }
    check_keys(*t, field, {"re", "im"});
    auto rows_of = [&](const char* part) -> std::optional<std::vector<std::vector<double>>> {
      const toml::node* p = t->get(part);
      if (!p) return std::vector<std::vector<double>>{};
      const toml::array* rows = p->as_array();
      std::vector<std::vector<double>> out;
      if (!rows) {
        error(field + "." + part, "expected an array of rows", p);
        return std::nullopt;
      }
      for (const auto& row : *rows) {
        const toml::array* r = row.as_array();
        if (!r) {
          error(field + "." + part, "expected an array of rows", &row);
          return std::nullopt;
        }
        std::vector<double> values;
        for (const auto& el : *r) {
          auto v = el.value<double>();
          if (!v || !el.is_number()) {
            error(field + "." + part, "matrix entries must be numbers", &el);
            return std::nullopt;
          }
          values.push_back(*v);
        }
        out.push_back(std::move(values));
      }
      return out;
    };
    auto re = rows_of("re");
    auto im = rows_of("im");
    if (!re || !im) return std::nullopt;
    if (re->empty()) {
      error(field + ".re", "missing or empty", &node);
      return std::nullopt;
    }
    const auto n = static_cast<Eigen::Index>(re->size());
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>((*re)[i].size()) != n) {
        error(field + ".re", "matrix must be square", &node);
        return std::nullopt;
      }
      for (Eigen::Index j = 0; j < n; ++j) m(i, j).real((*re)[i][j]);
    }
    if (!im->empty()) {
      if (static_cast<Eigen::Index>(im->size()) != n) {
        error(field + ".im", "shape differs from 're'", &node);
        return std::nullopt;
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>((*im)[i].size()) != n) {
          error(field + ".im", "shape differs from 're'", &node);
          return std::nullopt;
        }
        for (Eigen::Index j = 0; j < n; ++j) m(i, j).imag((*im)[i][j]);
      }
    }
    return m;
  }

  // Preset name or explicit matrix.
  void boundary(const toml::table& table, const char* key, std::string& label, ComplexMatrix& target) {
    const toml::node* node = table.get(key);
    if (!node) return;
    const std::string field = std::string("boundary.") + key;
    if (auto s = node->value<std::string>()) {
      label = *s;
      if (*s == "ground") {
        target = ground_projector();
      } else if (*s == "excited") {
        target = excited_projector();
      } else if (*s == "plus") {
        target = plus_projector();
      } else if (*s == "identity") {
        target = identity(2);
      } else {
        error(field, "unknown preset \"" + *s + "\"; valid presets: " + join(kPresetNames), node);
      }
      return;
    }
    if (auto m = matrix(*node, field)) {
      label = "matrix";
      target = *m;
    }
  }

 private:
  std::vector<Diagnostic>& out_;
};

void merge_into(toml::table& dst, const toml::table& src) {
  for (auto&& [key, node] : src) {
    toml::node* existing = dst.get(key.str());
    if (node.is_table() && existing && existing->is_table()) {
      merge_into(*existing->as_table(), *node.as_table());
      continue;
    }
    node.visit([&](const auto& n) { dst.insert_or_assign(key, n); });
  }
}

toml::table override_table(const Override& o) {
  try {
    return toml::parse(o.path + " = " + o.value, std::string_view("<override>"));
  } catch (const toml::parse_error&) {
  }
  // Bare word: take it as a string, rebuilding the nesting by hand.
  toml::table root;
  toml::table* cur = &root;
  std::stringstream in(o.path);
  std::vector<std::string> keys;
  for (std::string k; std::getline(in, k, '.');) keys.push_back(k);
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    cur = cur->insert_or_assign(keys[i], toml::table{}).first->second.as_table();
  }
  cur->insert_or_assign(keys.back(), o.value);
  return root;
}

void semantic_checks(const RunConfig& c, Reader& r) {
  if (!(c.t_final > 0.0) || !std::isfinite(c.t_final)) r.error("grid.t_final", "must be a positive finite number");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) r.error("grid.dt", "must be a positive finite number");
  if (c.t_final > 0.0 && c.dt > 0.0) {
    if (c.dt >= c.t_final) {
      std::ostringstream msg;
      msg << "dt (" << c.dt << ") must be smaller than t_final (" << c.t_final << ")";
      r.error("grid.dt and grid.t_final", msg.str());
    } else {
      const double ratio = c.t_final / c.dt;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        r.error("grid.dt and grid.t_final", "t_final must be an integer multiple of dt");
      }
    }
  }

  for (const auto& o : c.observables) {
    if (!contains(kObservableNames, o)) {
      r.error("observables", "unknown observable \"" + o + "\"; valid names: " + join(kObservableNames));
    }
  }
  if (c.observables.empty()) r.error("observables", "at least one observable is required");
  for (const auto& m : c.modes) {
    if (!contains(kModeNames, m)) r.error("modes", "unknown mode \"" + m + "\"; valid modes: " + join(kModeNames));
  }
  if (c.modes.empty()) r.error("modes", "at least one mode is required");

  const ScenarioConfig& s = c.scenario;
  if (!contains(kScenarioNames, s.name)) {
    r.error("scenario.name", "unknown scenario \"" + s.name + "\"; valid names: " + join(kScenarioNames));
    return;
  }
  if (!(s.k_khz >= 0.0)) r.error("scenario.k_khz", "must be non-negative");
  if (!std::isfinite(s.omega_mhz)) r.error("scenario.omega_mhz", "must be finite");

  Eigen::Index dim = 2;
  if (s.name == "custom") {
    if (s.hamiltonian.size() == 0) {
      r.error("scenario.hamiltonian", "required for a custom scenario");
      return;
    }
    dim = s.hamiltonian.rows();
    if (!is_hermitian(s.hamiltonian, 1e-12 * std::max(1.0, s.hamiltonian.norm()))) {
      r.error("scenario.hamiltonian", "must be Hermitian");
    }
    for (std::size_t i = 0; i < s.lindblad.size(); ++i) {
      if (s.lindblad[i].rows() != dim) {
        r.error("scenario.lindblad[" + std::to_string(i) + "]", "dimension differs from the Hamiltonian");
      }
    }
  }

  auto check_boundary = [&](const ComplexMatrix& m, const char* field) {
    if (m.rows() != dim) {
      r.error(field, "dimension " + std::to_string(m.rows()) + " differs from the model dimension " +
                         std::to_string(dim));
      return;
    }
    if (!is_hermitian(m, 1e-12 * std::max(1.0, m.norm()))) r.error(field, "must be Hermitian");
    if (!is_psd(m, 1e-12)) r.error(field, "must be positive semidefinite");
    if (!(m.trace().real() > 0.0)) r.error(field, "must have positive trace");
  };
  check_boundary(c.rho0, "boundary.rho0");
  check_boundary(c.effect_final, "boundary.effect_final");

  if (dim != 2) r.error("scenario.hamiltonian", "the named observables and modes are defined for a two-level system");

  const MeasurementConfig& m = c.measurement;
  if (!(m.a > 0.0) || !std::isfinite(m.a)) r.error("measurement.a", "must be a positive finite number");
  if (!(m.jump_threshold > 0.0 && m.jump_threshold < 1.0)) {
    r.error("measurement.jump_threshold", "must lie strictly between 0 and 1");
  }
  if (!contains(kObservableNames, m.jump_observable)) {
    r.error("measurement.jump_observable",
            "unknown observable \"" + m.jump_observable + "\"; valid names: " + join(kObservableNames));
  }

  if (c.sweep) {
    const SweepConfig& w = *c.sweep;
    if (w.parameter != "omega" && w.parameter != "k") r.error("sweep.parameter", "must be \"omega\" or \"k\"");
    if (w.points < 2) r.error("sweep.points", "must be at least 2");
    if (!std::isfinite(w.start) || !std::isfinite(w.stop)) r.error("sweep.start and sweep.stop", "must be finite");
    if (w.parameter == "k" && (w.start < 0.0 || w.stop < 0.0)) {
      r.error("sweep.start and sweep.stop", "rates must be non-negative");
    }
    if (s.name == "custom") r.error("sweep", "a custom scenario has no omega or k to sweep");
  }
}

toml::table matrix_table(const ComplexMatrix& m) {
  toml::array re, im;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    toml::array re_row, im_row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return toml::table{{"re", std::move(re)}, {"im", std::move(im)}};
}

toml::array string_array(const std::vector<std::string>& items) {
  toml::array out;
  for (const auto& s : items) out.push_back(s);
  return out;
}

// Every field with its effective value, defaults included.
std::string effective_json(const RunConfig& c) {
  toml::table scenario{{"name", c.scenario.name}, {"omega_mhz", c.scenario.omega_mhz}, {"k_khz", c.scenario.k_khz}};
  if (c.scenario.name == "custom") {
    scenario.insert("hamiltonian", matrix_table(c.scenario.hamiltonian));
    toml::array ops;
    for (const auto& op : c.scenario.lindblad) ops.push_back(matrix_table(op));
    scenario.insert("lindblad", std::move(ops));
  }
  auto boundary_node = [](const std::string& label, const ComplexMatrix& m) -> toml::table {
    toml::table t = matrix_table(m);
    t.insert("label", label);
    return t;
  };
  toml::table root{
      {"scenario", std::move(scenario)},
      {"boundary",
       toml::table{{"rho0", boundary_node(c.rho0_label, c.rho0)},
                   {"effect_final", boundary_node(c.effect_label, c.effect_final)}}},
      {"grid", toml::table{{"t_final", c.t_final}, {"dt", c.dt}}},
      {"observables", string_array(c.observables)},
      {"modes", string_array(c.modes)},
      {"measurement",
       toml::table{{"a", c.measurement.a},
                   {"exact_correction", c.measurement.exact_correction},
                   {"jump_threshold", c.measurement.jump_threshold},
                   {"jump_observable", c.measurement.jump_observable},
                   {"photon_convention", c.measurement.photon_convention == PhotonConvention::raising_lowering
                                             ? "raising_lowering"
                                             : "lowering_raising"}}},
      {"output_dir", c.output_dir.string()}};
  if (c.sweep) {
    root.insert("sweep", toml::table{{"parameter", c.sweep->parameter},
                                     {"start", c.sweep->start},
                                     {"stop", c.sweep->stop},
                                     {"points", c.sweep->points}});
  }
  std::ostringstream os;
  os << toml::json_formatter{root};
  return os.str();
}

}  // namespace

std::string Diagnostic::str() const {
  std::string out = field;
  if (line > 0) out += " (line " + std::to_string(line) + ")";
  return out + ": " + message;
}

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration";
        for (const auto& d : diagnostics) msg += "\n  " + d.str();
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

std::vector<double> SweepConfig::values() const {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[i] = start + (stop - start) * i / (points - 1);
  if (points >= 2) out.back() = stop;
  return out;
}

LindbladModel RunConfig::model_at(double omega_mhz, double k_khz) const {
  if (scenario.name == "custom") return LindbladModel(scenario.hamiltonian, scenario.lindblad);
  const double omega = angular_from_mhz(omega_mhz), k = angular_from_khz(k_khz);
  return scenario.name == "dephasing" ? dephasing_qubit(omega, k) : resonance_fluorescence(omega, k);
}

std::map<std::string, ComplexMatrix> RunConfig::observables_by_name() const {
  return observable_set(measurement.photon_convention);
}

bool RunConfig::has_mode(const std::string& mode) const { return contains(modes, mode); }

RunConfig parse_config(const std::string& text, const std::vector<Override>& overrides,
                       std::vector<Diagnostic>& diagnostics, const std::string& source_name) {
  RunConfig c;
  Reader r(diagnostics);
  toml::table root;
  try {
    root = toml::parse(text, std::string_view(source_name));
  } catch (const toml::parse_error& e) {
    r.error(source_name, std::string(e.description()));
    diagnostics.back().line = static_cast<int>(e.source().begin.line);
    return c;
  }
  for (const auto& o : overrides) {
    if (o.path.empty()) continue;
    merge_into(root, override_table(o));
  }

  r.check_keys(root, "", {"scenario", "boundary", "grid", "observables", "modes", "sweep", "measurement", "output_dir"});

  auto section = [&](const char* key) -> const toml::table* {
    const toml::node* n = root.get(key);
    if (!n) return nullptr;
    if (!n->is_table()) {
      r.error(key, "expected a table", n);
      return nullptr;
    }
    return n->as_table();
  };

  if (const toml::table* s = section("scenario")) {
    r.check_keys(*s, "scenario", {"name", "omega_mhz", "k_khz", "hamiltonian", "lindblad"});
    r.string(*s, "scenario", "name", c.scenario.name);
    r.number(*s, "scenario", "omega_mhz", c.scenario.omega_mhz);
    r.number(*s, "scenario", "k_khz", c.scenario.k_khz);
    if (const toml::node* h = s->get("hamiltonian")) {
      if (auto m = r.matrix(*h, "scenario.hamiltonian")) c.scenario.hamiltonian = *m;
    }
    if (const toml::node* l = s->get("lindblad")) {
      if (const toml::array* arr = l->as_array()) {
        for (std::size_t i = 0; i < arr->size(); ++i) {
          if (auto m = r.matrix((*arr)[i], "scenario.lindblad[" + std::to_string(i) + "]")) {
            c.scenario.lindblad.push_back(*m);
          }
        }
      } else {
        r.error("scenario.lindblad", "expected an array of matrices", l);
      }
    }
    if (c.scenario.name != "custom" && (s->get("hamiltonian") || s->get("lindblad"))) {
      r.error("scenario", "hamiltonian and lindblad are only read for name = \"custom\"");
    }
  }

  if (const toml::table* b = section("boundary")) {
    r.check_keys(*b, "boundary", {"rho0", "effect_final"});
    r.boundary(*b, "rho0", c.rho0_label, c.rho0);
    r.boundary(*b, "effect_final", c.effect_label, c.effect_final);
  }

  if (const toml::table* g = section("grid")) {
    r.check_keys(*g, "grid", {"t_final", "dt"});
    r.number(*g, "grid", "t_final", c.t_final);
    r.number(*g, "grid", "dt", c.dt);
  }

  const toml::node* t_final_node = root.at_path("grid.t_final").node();
  if (!t_final_node) c.t_final = root.get("sweep") ? kDefaultSweepTFinal : kDefaultTFinal;

  r.names(root, "observables", c.observables);
  r.names(root, "modes", c.modes);

  if (const toml::table* w = section("sweep")) {
    r.check_keys(*w, "sweep", {"parameter", "start", "stop", "points"});
    SweepConfig sweep;
    r.string(*w, "sweep", "parameter", sweep.parameter);
    r.number(*w, "sweep", "start", sweep.start);
    r.number(*w, "sweep", "stop", sweep.stop);
    r.integer(*w, "sweep", "points", sweep.points);
    c.sweep = sweep;
  }

  if (const toml::table* m = section("measurement")) {
    r.check_keys(*m, "measurement", {"a", "exact_correction", "jump_threshold", "jump_observable", "photon_convention"});
    r.number(*m, "measurement", "a", c.measurement.a);
    r.boolean(*m, "measurement", "exact_correction", c.measurement.exact_correction);
    r.number(*m, "measurement", "jump_threshold", c.measurement.jump_threshold);
    r.string(*m, "measurement", "jump_observable", c.measurement.jump_observable);
    std::string convention = "lowering_raising";
    r.string(*m, "measurement", "photon_convention", convention);
    if (convention == "raising_lowering") {
      c.measurement.photon_convention = PhotonConvention::raising_lowering;
    } else if (convention != "lowering_raising") {
      r.error("measurement.photon_convention", "must be \"lowering_raising\" or \"raising_lowering\"",
              m->get("photon_convention"));
    }
  }

  std::string out_dir = c.output_dir.string();
  r.string(root, "", "output_dir", out_dir);
  if (out_dir.empty()) r.error("output_dir", "must not be empty");
  c.output_dir = out_dir;

  if (diagnostics.empty()) semantic_checks(c, r);
  if (diagnostics.empty()) c.echo_json = effective_json(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<Override>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({{path.string(), "cannot read file"}});
  std::stringstream buf;
  buf << in.rdbuf();
  std::vector<Diagnostic> diagnostics;
  RunConfig c = parse_config(buf.str(), overrides, diagnostics, path.string());
  if (!diagnostics.empty()) throw ConfigError(std::move(diagnostics));
  return c;
}

std::vector<Diagnostic> validate_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({{path.string(), "cannot read file"}});
  std::stringstream buf;
  buf << in.rdbuf();
  std::vector<Diagnostic> diagnostics;
  parse_config(buf.str(), {}, diagnostics, path.string());
  return diagnostics;
}

}  // namespace tsvf::cli
