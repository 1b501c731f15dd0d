#pragma once

#include <vector>

#include "tsvf/dynamics.hpp"
#include "tsvf/enlarged.hpp"

namespace tsvf {

/// One weak-value evaluation. When `diverged` is set the denominator is
/// numerically indistinguishable from zero and `value` must be ignored.
struct WeakValueSample {
  double time = 0.0;
  Complex value{};
  Complex denominator{};
  bool diverged = false;
};

/// Relative threshold: a sample diverges when |denominator| falls below this
/// times the product of the Frobenius norms of the two states involved.
inline constexpr double kDivergenceThreshold = 1e-10;

/// Gaussian pointer POVM Omega_V = (2 pi a^2)^(-1/4) exp(-(V - A)^2 / 4a^2).
class GaussianPovm {
 public:
  GaussianPovm(double strength_a, ComplexMatrix observable);

  /// Voltage readout of sigma_z.
  static GaussianPovm voltage(double strength_a);

  double strength_a() const { return strength_a_; }
  const ComplexMatrix& observable() const { return observable_; }

  /// Measurement operator Omega_V at outcome v.
  ComplexMatrix kraus(double v) const;

  /// Integration window [min_eig - 8a, max_eig + 8a].
  double lower_limit() const;
  double upper_limit() const;

 private:
  double strength_a_;
  ComplexMatrix observable_;
  Eigen::VectorXd eigenvalues_;
  ComplexMatrix eigenvectors_;
};

/// Tr(state A) / Tr(state). Throws DegenerateStateError if |Tr state| < 1e-12.
Complex expectation(const ComplexMatrix& observable, const ComplexMatrix& state);

/// Tr[E A rho] / Tr[E rho].
WeakValueSample conventional_weak_value(const ComplexMatrix& observable, const ComplexMatrix& rho_t,
                                        const ComplexMatrix& effect_t);

/// Conventional weak value from the enlarged states at t and T - t.
WeakValueSample conventional_weak_value_enlarged(const ComplexMatrix& observable, const EnlargedState& enl_t,
                                                 const EnlargedState& enl_tmt);

/// Tr[E_{T-t} A rho_t] / Tr[E_{T-t} rho_t].
WeakValueSample two_time_weak_value(const ComplexMatrix& observable, const ComplexMatrix& rho_t,
                                    const ComplexMatrix& effect_tmt);

/// Two-time correlation weak value Tr[A S] / Tr[S] with
/// S = (M varrho N)(M varrho (sigma_x (x) I) N), needing only the single
/// enlarged state at time t.
WeakValueSample two_time_weak_value_enlarged(const ComplexMatrix& observable, const EnlargedState& enl_t);

// Voltage readout (qubit, sigma_z pointer).

/// Unnormalized outcome density Tr(Omega_V rho Omega_V^+ E), expanded into
/// its three Gaussians. Requires d = 2 and a sigma_z observable.
double voltage_pdf(const GaussianPovm& povm, const ComplexMatrix& rho_t, const ComplexMatrix& effect, double v);

/// The same density written in terms of enlarged-state elements:
/// rho from varrho_t, E from varrho_{T-t}.
double voltage_pdf_enlarged(double strength_a, const EnlargedState& enl_t, const EnlargedState& enl_tmt, double v);

/// Integral of voltage_pdf over the POVM window (adaptive Gauss-Kronrod).
double voltage_normalization(const GaussianPovm& povm, const ComplexMatrix& rho_t, const ComplexMatrix& effect);

/// First moment of the normalized outcome density, by quadrature.
double voltage_mean_numeric(const GaussianPovm& povm, const ComplexMatrix& rho_t, const ComplexMatrix& effect);

/// Closed-form voltage weak value. With exact_correction = false this is the
/// weak-limit formula (cross terms at full weight); with it set, the cross
/// terms carry the exp(-1/2a^2) weight the Gaussian moments produce.
WeakValueSample voltage_weak_value_analytic(const EnlargedState& enl_t, const EnlargedState& enl_tmt,
                                            bool exact_correction, double strength_a);

WeakValueSample voltage_two_time_weak_value_analytic(const EnlargedState& enl_t, bool exact_correction,
                                                     double strength_a);

// Series over an enlarged trajectory. Each sample carries its grid time.

std::vector<WeakValueSample> conventional_weak_value_series(const ComplexMatrix& observable,
                                                            const Trajectory& enlarged);
std::vector<WeakValueSample> two_time_weak_value_series(const ComplexMatrix& observable, const Trajectory& enlarged);
std::vector<WeakValueSample> voltage_weak_value_series(const Trajectory& enlarged, bool exact_correction,
                                                       double strength_a);
std::vector<WeakValueSample> voltage_two_time_weak_value_series(const Trajectory& enlarged, bool exact_correction,
                                                                double strength_a);

// Jumps.

struct JumpEvent {
  double t_start = 0.0;
  double t_end = 0.0;
  int direction = 0;  // +1 for low -> high, -1 for high -> low

  double duration() const { return t_end - t_start; }
};

inline constexpr double kDefaultJumpThreshold = 0.5;

/// Finds transits of Re(value) from below -threshold to above +threshold
/// (or the reverse). A jump starts where the signal last leaves its old
/// plateau and ends where it first reaches the new one; both crossing times
/// are linearly interpolated between neighbouring samples. Diverged samples
/// are skipped.
std::vector<JumpEvent> detect_jumps(const std::vector<WeakValueSample>& series, double threshold);

}  // namespace tsvf
