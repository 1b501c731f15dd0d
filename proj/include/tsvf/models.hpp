#pragma once

#include <map>
#include <string>
#include <string_view>

#include "tsvf/dynamics.hpp"

namespace tsvf {

// Rabi frequency Omega/2pi = 1.16 MHz and decay rate k/2pi = 95 kHz.
inline constexpr double kReferenceRabiMHz = 1.16;
inline constexpr double kReferenceRateKHz = 95.0;

/// Omega/2pi in MHz -> rad/s.
double angular_from_mhz(double mhz);
/// k/2pi in kHz -> rad/s.
double angular_from_khz(double khz);

/// H = (omega/2) sigma_y, C = sqrt(k) sigma_minus.
LindbladModel resonance_fluorescence(double omega, double k);

/// H = (omega/2) sigma_y, C = sqrt(k) sigma_z, i.e. the dissipator
/// k (sigma_z rho sigma_z - rho).
LindbladModel dephasing_qubit(double omega, double k);

struct Scenario {
  std::string label;
  LindbladModel model;
  ComplexMatrix rho_initial;
  ComplexMatrix effect_final;
  TimeGrid grid;
  double rabi_frequency;  // rad/s
  double rate;            // rad/s
};

/// "fluorescence" or "dephasing", with the reference parameters and
/// rho_0 = E_T = |g><g|. Throws std::invalid_argument for other names.
Scenario paper_scenario(std::string_view name, double t_final, double dt);

/// Which operator stands for the photon number.
enum class PhotonConvention {
  lowering_raising,  // n = sigma_minus sigma_plus = (I - sigma_z)/2
  raising_lowering,  // n = sigma_plus sigma_minus = (I + sigma_z)/2
};

ComplexMatrix photon_number(PhotonConvention convention = PhotonConvention::lowering_raising);

/// Qubit observables by name: sigma_z, photon_n, sigma_minus. The pointer
/// readout "voltage" is not a plain matrix and is handled by measurement.
std::map<std::string, ComplexMatrix> observable_set(PhotonConvention convention = PhotonConvention::lowering_raising);

struct BlochVector {
  double x;
  double y;
  double z;
};

/// Trace-normalized Bloch coordinates, so effect matrices plot on the same
/// sphere as density matrices.
BlochVector bloch_coordinates(const ComplexMatrix& state);

}  // namespace tsvf
