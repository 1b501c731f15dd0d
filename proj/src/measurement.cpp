#include "tsvf/measurement.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace tsvf {
namespace {

constexpr double kDegenerateTrace = 1e-12;
constexpr double kQuadratureTolerance = 1e-13;
constexpr unsigned kQuadratureDepth = 20;

void require_match(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  detail::require_same_square(a, b, what);
}

WeakValueSample ratio(Complex numerator, Complex denominator, double scale) {
  WeakValueSample s;
  s.denominator = denominator;
  s.diverged = !(std::abs(denominator) >= kDivergenceThreshold * scale);
  s.value = s.diverged ? Complex(std::nan(""), std::nan("")) : numerator / denominator;
  return s;
}

// Weak value Tr[A S]/Tr[S] with S = left * right, scaled by |left| |right|.
WeakValueSample sandwiched(const ComplexMatrix& observable, const ComplexMatrix& effect_part,
                           const ComplexMatrix& rho_part) {
  const Complex num = (effect_part * observable * rho_part).trace();
  const Complex den = (effect_part * rho_part).trace();
  return ratio(num, den, effect_part.norm() * rho_part.norm());
}

void require_qubit(const EnlargedState& s, const char* what) {
  if (s.dim_original() != 2) {
    throw DimensionError(std::string(what) + ": voltage readout requires a qubit (d = 2)");
  }
}

double quadrature(const GaussianPovm& povm, const auto& f) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, povm.lower_limit(), povm.upper_limit(),
                                                                       kQuadratureDepth, kQuadratureTolerance);
}

// Elements of the three-Gaussian expansion from rho (at t) and E (at t):
// diag+ = rho00 E00, diag- = rho11 E11, cross = rho10 E01 + rho01 E10.
struct VoltageWeights {
  Complex up;
  Complex down;
  Complex cross;
};

VoltageWeights weights_from_enlarged(const EnlargedState& enl_t, const EnlargedState& enl_tmt) {
  // Factor 4 = 2 x 2 from rho = 2 [varrho]^{00} and E = 2 [varrho]^{11}.
  return {enl_t.element(0, 0) * enl_tmt.element(2, 2), enl_t.element(1, 1) * enl_tmt.element(3, 3),
          enl_t.element(1, 0) * enl_tmt.element(2, 3) + enl_t.element(0, 1) * enl_tmt.element(3, 2)};
}

double three_gaussians(const VoltageWeights& w, double a, double v) {
  const double two_a2 = 2.0 * a * a;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * a * a);
  const Complex total = w.up * std::exp(-(v - 1.0) * (v - 1.0) / two_a2) +
                        w.down * std::exp(-(v + 1.0) * (v + 1.0) / two_a2) +
                        w.cross * std::exp(-(v * v + 1.0) / two_a2);
  return norm * total.real();
}

WeakValueSample voltage_from_weights(const VoltageWeights& w, bool exact_correction, double a, double scale) {
  const double cross_weight = exact_correction ? std::exp(-1.0 / (2.0 * a * a)) : 1.0;
  return ratio(w.up - w.down, w.up + w.down + cross_weight * w.cross, scale);
}

double weight_scale(const EnlargedState& enl_t, const EnlargedState& enl_tmt) {
  return enl_t.block(0, 0).norm() * enl_tmt.block(1, 1).norm();
}

template <typename F>
std::vector<WeakValueSample> series(const Trajectory& enlarged, F&& at) {
  std::vector<WeakValueSample> out;
  out.reserve(enlarged.size());
  for (std::size_t i = 0; i < enlarged.size(); ++i) {
    WeakValueSample s = at(i);
    s.time = enlarged.grid.time(i);
    out.push_back(s);
  }
  return out;
}

}  // namespace

GaussianPovm::GaussianPovm(double strength_a, ComplexMatrix observable)
    : strength_a_(strength_a), observable_(std::move(observable)) {
  if (!(strength_a_ > 0.0)) throw std::invalid_argument("GaussianPovm: strength a must be positive");
  detail::require_square(observable_, "GaussianPovm");
  if (!is_hermitian(observable_, 1e-12)) throw std::invalid_argument("GaussianPovm: observable is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(observable_);
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

GaussianPovm GaussianPovm::voltage(double strength_a) { return GaussianPovm(strength_a, pauli_z()); }

ComplexMatrix GaussianPovm::kraus(double v) const {
  const double a = strength_a_;
  const double prefactor = std::pow(2.0 * std::numbers::pi * a * a, -0.25);
  Eigen::VectorXcd g(eigenvalues_.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double x = v - eigenvalues_(i);
    g(i) = prefactor * std::exp(-x * x / (4.0 * a * a));
  }
  return eigenvectors_ * g.asDiagonal() * eigenvectors_.adjoint();
}

double GaussianPovm::lower_limit() const { return eigenvalues_.minCoeff() - 8.0 * strength_a_; }
double GaussianPovm::upper_limit() const { return eigenvalues_.maxCoeff() + 8.0 * strength_a_; }

Complex expectation(const ComplexMatrix& observable, const ComplexMatrix& state) {
  require_match(observable, state, "expectation");
  const Complex tr = state.trace();
  if (std::abs(tr) < kDegenerateTrace) {
    throw DegenerateStateError("expectation: state trace " + std::to_string(std::abs(tr)) + " is below 1e-12");
  }
  return (state * observable).trace() / tr;
}

WeakValueSample conventional_weak_value(const ComplexMatrix& observable, const ComplexMatrix& rho_t,
                                        const ComplexMatrix& effect_t) {
  require_match(observable, rho_t, "conventional_weak_value");
  require_match(rho_t, effect_t, "conventional_weak_value");
  return sandwiched(observable, effect_t, rho_t);
}

WeakValueSample two_time_weak_value(const ComplexMatrix& observable, const ComplexMatrix& rho_t,
                                    const ComplexMatrix& effect_tmt) {
  require_match(observable, rho_t, "two_time_weak_value");
  require_match(rho_t, effect_tmt, "two_time_weak_value");
  return sandwiched(observable, effect_tmt, rho_t);
}

WeakValueSample conventional_weak_value_enlarged(const ComplexMatrix& observable, const EnlargedState& enl_t,
                                                 const EnlargedState& enl_tmt) {
  if (enl_t.dim_original() != enl_tmt.dim_original()) {
    throw DimensionError("conventional_weak_value_enlarged: enlarged states differ in dimension");
  }
  const Eigen::Index d = enl_t.dim_original();
  if (observable.rows() != d || observable.cols() != d) {
    throw DimensionError("conventional_weak_value_enlarged: observable does not match the original dimension");
  }
  const ComplexMatrix m = block_summer(d);
  const ComplexMatrix n = first_block_selector(d);
  const ComplexMatrix effect_part = m * enl_tmt.matrix() * ancilla_flip(d) * n;
  const ComplexMatrix rho_part = m * enl_t.matrix() * n;
  return sandwiched(observable, effect_part, rho_part);
}

WeakValueSample two_time_weak_value_enlarged(const ComplexMatrix& observable, const EnlargedState& enl_t) {
  const Eigen::Index d = enl_t.dim_original();
  if (observable.rows() != d || observable.cols() != d) {
    throw DimensionError("two_time_weak_value_enlarged: observable does not match the original dimension");
  }
  const ComplexMatrix m = block_summer(d);
  const ComplexMatrix n = first_block_selector(d);
  const ComplexMatrix rho_part = m * enl_t.matrix() * n;
  const ComplexMatrix effect_part = m * enl_t.matrix() * ancilla_flip(d) * n;
  const ComplexMatrix combined = rho_part * effect_part;
  return ratio((observable * combined).trace(), combined.trace(), rho_part.norm() * effect_part.norm());
}

double voltage_pdf(const GaussianPovm& povm, const ComplexMatrix& rho_t, const ComplexMatrix& effect, double v) {
  require_match(rho_t, effect, "voltage_pdf");
  if (rho_t.rows() != 2 || frob_distance(povm.observable(), pauli_z()) > 1e-12) {
    throw DimensionError("voltage_pdf: closed form requires a qubit and a sigma_z pointer");
  }
  const VoltageWeights w{rho_t(0, 0) * effect(0, 0), rho_t(1, 1) * effect(1, 1),
                         rho_t(1, 0) * effect(0, 1) + rho_t(0, 1) * effect(1, 0)};
  return three_gaussians(w, povm.strength_a(), v);
}

double voltage_pdf_enlarged(double strength_a, const EnlargedState& enl_t, const EnlargedState& enl_tmt, double v) {
  require_qubit(enl_t, "voltage_pdf_enlarged");
  require_qubit(enl_tmt, "voltage_pdf_enlarged");
  VoltageWeights w = weights_from_enlarged(enl_t, enl_tmt);
  w.up *= 4.0;
  w.down *= 4.0;
  w.cross *= 4.0;
  return three_gaussians(w, strength_a, v);
}

double voltage_normalization(const GaussianPovm& povm, const ComplexMatrix& rho_t, const ComplexMatrix& effect) {
  return quadrature(povm, [&](double v) { return voltage_pdf(povm, rho_t, effect, v); });
}

double voltage_mean_numeric(const GaussianPovm& povm, const ComplexMatrix& rho_t, const ComplexMatrix& effect) {
  const double moment = quadrature(povm, [&](double v) { return v * voltage_pdf(povm, rho_t, effect, v); });
  return moment / voltage_normalization(povm, rho_t, effect);
}

WeakValueSample voltage_weak_value_analytic(const EnlargedState& enl_t, const EnlargedState& enl_tmt,
                                            bool exact_correction, double strength_a) {
  require_qubit(enl_t, "voltage_weak_value_analytic");
  require_qubit(enl_tmt, "voltage_weak_value_analytic");
  return voltage_from_weights(weights_from_enlarged(enl_t, enl_tmt), exact_correction, strength_a,
                              weight_scale(enl_t, enl_tmt));
}

WeakValueSample voltage_two_time_weak_value_analytic(const EnlargedState& enl_t, bool exact_correction,
                                                     double strength_a) {
  require_qubit(enl_t, "voltage_two_time_weak_value_analytic");
  return voltage_from_weights(weights_from_enlarged(enl_t, enl_t), exact_correction, strength_a,
                              weight_scale(enl_t, enl_t));
}

std::vector<WeakValueSample> conventional_weak_value_series(const ComplexMatrix& observable,
                                                            const Trajectory& enlarged) {
  const std::size_t last = enlarged.size() - 1;
  return series(enlarged, [&](std::size_t i) {
    return conventional_weak_value_enlarged(observable, EnlargedState(enlarged[i]),
                                            EnlargedState(enlarged[last - i]));
  });
}

std::vector<WeakValueSample> two_time_weak_value_series(const ComplexMatrix& observable, const Trajectory& enlarged) {
  return series(enlarged,
                [&](std::size_t i) { return two_time_weak_value_enlarged(observable, EnlargedState(enlarged[i])); });
}

std::vector<WeakValueSample> voltage_weak_value_series(const Trajectory& enlarged, bool exact_correction,
                                                       double strength_a) {
  const std::size_t last = enlarged.size() - 1;
  return series(enlarged, [&](std::size_t i) {
    return voltage_weak_value_analytic(EnlargedState(enlarged[i]), EnlargedState(enlarged[last - i]),
                                       exact_correction, strength_a);
  });
}

std::vector<WeakValueSample> voltage_two_time_weak_value_series(const Trajectory& enlarged, bool exact_correction,
                                                                double strength_a) {
  return series(enlarged, [&](std::size_t i) {
    return voltage_two_time_weak_value_analytic(EnlargedState(enlarged[i]), exact_correction, strength_a);
  });
}

std::vector<JumpEvent> detect_jumps(const std::vector<WeakValueSample>& series, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("detect_jumps: threshold must lie in (0, 1)");
  }
  enum class Side { unknown, low, high };

  std::vector<JumpEvent> events;
  Side side = Side::unknown;
  bool have_prev = false;
  double t_prev = 0.0;
  double y_prev = 0.0;
  double left_at = 0.0;

  auto crossing = [&](double t, double y, double level) {
    if (y == y_prev) return t;
    return t_prev + (level - y_prev) / (y - y_prev) * (t - t_prev);
  };

  for (const auto& s : series) {
    if (s.diverged || !std::isfinite(s.value.real())) continue;
    const double t = s.time;
    const double y = s.value.real();

    if (side == Side::unknown) {
      if (y <= -threshold) side = Side::low;
      if (y >= threshold) side = Side::high;
    } else if (side == Side::low) {
      if (have_prev && y_prev <= -threshold && y > -threshold) left_at = crossing(t, y, -threshold);
      if (y >= threshold) {
        events.push_back({left_at, crossing(t, y, threshold), +1});
        side = Side::high;
      }
    } else {
      if (have_prev && y_prev >= threshold && y < threshold) left_at = crossing(t, y, threshold);
      if (y <= -threshold) {
        events.push_back({left_at, crossing(t, y, -threshold), -1});
        side = Side::low;
      }
    }
    t_prev = t;
    y_prev = y;
    have_prev = true;
  }
  return events;
}

}  // namespace tsvf
