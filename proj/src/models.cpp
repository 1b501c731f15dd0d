#include "tsvf/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tsvf/measurement.hpp"

namespace tsvf {

double angular_from_mhz(double mhz) { return 2.0 * std::numbers::pi * mhz * 1e6; }
double angular_from_khz(double khz) { return 2.0 * std::numbers::pi * khz * 1e3; }

namespace {

void require_rate(double k, const char* what) {
  if (!(k >= 0.0)) throw std::invalid_argument(std::string(what) + ": rate k must be non-negative");
}

}  // namespace

LindbladModel resonance_fluorescence(double omega, double k) {
  require_rate(k, "resonance_fluorescence");
  return LindbladModel(0.5 * omega * pauli_y(), {std::sqrt(k) * sigma_minus()});
}

LindbladModel dephasing_qubit(double omega, double k) {
  require_rate(k, "dephasing_qubit");
  return LindbladModel(0.5 * omega * pauli_y(), {std::sqrt(k) * pauli_z()});
}

Scenario paper_scenario(std::string_view name, double t_final, double dt) {
  const double omega = angular_from_mhz(kReferenceRabiMHz);
  const double k = angular_from_khz(kReferenceRateKHz);
  TimeGrid grid(t_final, dt);
  if (name == "fluorescence") {
    return {"fluorescence", resonance_fluorescence(omega, k), ground_projector(), ground_projector(), grid, omega, k};
  }
  if (name == "dephasing") {
    return {"dephasing", dephasing_qubit(omega, k), ground_projector(), ground_projector(), grid, omega, k};
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "' (expected fluorescence or dephasing)");
}

ComplexMatrix photon_number(PhotonConvention convention) {
  return convention == PhotonConvention::lowering_raising ? ComplexMatrix(sigma_minus() * sigma_plus())
                                                          : ComplexMatrix(sigma_plus() * sigma_minus());
}

std::map<std::string, ComplexMatrix> observable_set(PhotonConvention convention) {
  return {{"sigma_z", pauli_z()}, {"photon_n", photon_number(convention)}, {"sigma_minus", sigma_minus()}};
}

BlochVector bloch_coordinates(const ComplexMatrix& state) {
  if (state.rows() != 2 || state.cols() != 2) throw DimensionError("bloch_coordinates: expected a 2x2 state");
  return {expectation(pauli_x(), state).real(), expectation(pauli_y(), state).real(),
          expectation(pauli_z(), state).real()};
}

}  // namespace tsvf
