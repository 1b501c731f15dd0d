#pragma once

#include <cstddef>
#include <vector>

#include "tsvf/linalg.hpp"

namespace tsvf {

/// Hamiltonian (angular frequency, hbar = 1) plus Lindblad operators
/// C_n = sqrt(k_n) A_n with the rates already absorbed.
class LindbladModel {
 public:
  LindbladModel(ComplexMatrix hamiltonian, std::vector<ComplexMatrix> lindblad_ops);

  const ComplexMatrix& hamiltonian() const { return hamiltonian_; }
  const std::vector<ComplexMatrix>& lindblad_ops() const { return lindblad_ops_; }
  Eigen::Index dim() const { return hamiltonian_.rows(); }

 private:
  ComplexMatrix hamiltonian_;
  std::vector<ComplexMatrix> lindblad_ops_;
};

/// Uniform grid on [0, t_final]; sample i sits at i * dt.
class TimeGrid {
 public:
  TimeGrid(double t_final, double dt);

  double t_final() const { return t_final_; }
  double dt() const { return dt_; }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t n_samples() const { return n_steps_ + 1; }
  double time(std::size_t i) const { return static_cast<double>(i) * dt_; }

 private:
  double t_final_;
  double dt_;
  std::size_t n_steps_;
};

struct Trajectory {
  TimeGrid grid;
  std::vector<ComplexMatrix> states;

  std::size_t size() const { return states.size(); }
  const ComplexMatrix& operator[](std::size_t i) const { return states[i]; }
};

// d(rho)/dt = -i[H, rho] + sum_n (2 C rho C^+ - {C^+ C, rho}) / 2
ComplexMatrix forward_rhs(const LindbladModel& model, const ComplexMatrix& rho);

// Adjoint equation for the effect matrix, meant to be stepped from T down to t.
ComplexMatrix backward_rhs(const LindbladModel& model, const ComplexMatrix& effect);

// Exact negation of backward_rhs. Stepping it forward from E_T yields E_{T-t}
// at time t.
ComplexMatrix backward_forward_rhs(const LindbladModel& model, const ComplexMatrix& effect);

/// Classical fixed-step RK4. Each accepted step is re-Hermitized as
/// (X + X^dagger)/2. Throws IntegrationDiverged naming the first step that
/// produced a non-finite entry.
template <typename Rhs>
Trajectory integrate(Rhs&& rhs, const ComplexMatrix& initial, const TimeGrid& grid) {
  detail::require_square(initial, "integrate");
  Trajectory traj{grid, {}};
  traj.states.reserve(grid.n_samples());
  traj.states.push_back(initial);

  const double h = grid.dt();
  ComplexMatrix x = initial;
  for (std::size_t step = 1; step <= grid.n_steps(); ++step) {
    const ComplexMatrix k1 = rhs(x);
    const ComplexMatrix k2 = rhs(ComplexMatrix(x + (h / 2) * k1));
    const ComplexMatrix k3 = rhs(ComplexMatrix(x + (h / 2) * k2));
    const ComplexMatrix k4 = rhs(ComplexMatrix(x + h * k3));
    x += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x = hermitize(x);
    if (!x.allFinite()) throw IntegrationDiverged(step);
    traj.states.push_back(x);
  }
  return traj;
}

/// Sample i of the result is sample n_steps - i of the input.
Trajectory time_reverse(const Trajectory& traj);

// Convenience wrappers over integrate().
Trajectory evolve_forward(const LindbladModel& model, const ComplexMatrix& rho0, const TimeGrid& grid);

/// Backward-evolving trajectory indexed by physical time: sample i is E at
/// time i * dt, obtained by stepping backward_forward_rhs from E_T and
/// reversing.
Trajectory evolve_backward(const LindbladModel& model, const ComplexMatrix& effect_final, const TimeGrid& grid);

}  // namespace tsvf
