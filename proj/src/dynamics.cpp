#include "tsvf/dynamics.hpp"

#include <cmath>
#include <string>

namespace tsvf {

LindbladModel::LindbladModel(ComplexMatrix hamiltonian, std::vector<ComplexMatrix> lindblad_ops)
    : hamiltonian_(std::move(hamiltonian)), lindblad_ops_(std::move(lindblad_ops)) {
  detail::require_square(hamiltonian_, "LindbladModel");
  const double scale = std::max(1.0, hamiltonian_.norm());
  if (!is_hermitian(hamiltonian_, 1e-12 * scale)) {
    throw std::invalid_argument("LindbladModel: Hamiltonian is not Hermitian");
  }
  for (const auto& c : lindblad_ops_) {
    if (c.rows() != dim() || c.cols() != dim()) {
      throw DimensionError("LindbladModel: Lindblad operator is " + std::to_string(c.rows()) + "x" +
                           std::to_string(c.cols()) + ", expected " + std::to_string(dim()) + "x" +
                           std::to_string(dim()));
    }
  }
}

TimeGrid::TimeGrid(double t_final, double dt) : t_final_(t_final), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be positive");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("TimeGrid: t_final must be positive");
  const double steps = std::round(t_final / dt);
  if (steps < 1.0) throw std::invalid_argument("TimeGrid: dt exceeds t_final");
  n_steps_ = static_cast<std::size_t>(steps);
  if (std::abs(steps * dt - t_final) > 1e-12 * t_final) {
    throw std::invalid_argument("TimeGrid: t_final is not an integer multiple of dt");
  }
}

namespace {

void require_state_dim(const LindbladModel& model, const ComplexMatrix& x, const char* what) {
  if (x.rows() != model.dim() || x.cols() != model.dim()) {
    throw DimensionError(std::string(what) + ": state is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", model dimension is " + std::to_string(model.dim()));
  }
}

const Complex kI(0.0, 1.0);

}  // namespace

ComplexMatrix forward_rhs(const LindbladModel& model, const ComplexMatrix& rho) {
  require_state_dim(model, rho, "forward_rhs");
  ComplexMatrix out = -kI * commutator(model.hamiltonian(), rho);
  for (const auto& c : model.lindblad_ops()) {
    const ComplexMatrix cdc = c.adjoint() * c;
    out += c * rho * c.adjoint() - 0.5 * anticommutator(cdc, rho);
  }
  return out;
}

ComplexMatrix backward_rhs(const LindbladModel& model, const ComplexMatrix& effect) {
  require_state_dim(model, effect, "backward_rhs");
  ComplexMatrix out = -kI * commutator(model.hamiltonian(), effect);
  for (const auto& c : model.lindblad_ops()) {
    const ComplexMatrix cdc = c.adjoint() * c;
    out -= c.adjoint() * effect * c - 0.5 * anticommutator(cdc, effect);
  }
  return out;
}

ComplexMatrix backward_forward_rhs(const LindbladModel& model, const ComplexMatrix& effect) {
  require_state_dim(model, effect, "backward_forward_rhs");
  ComplexMatrix out = kI * commutator(model.hamiltonian(), effect);
  for (const auto& c : model.lindblad_ops()) {
    const ComplexMatrix cdc = c.adjoint() * c;
    out += c.adjoint() * effect * c - 0.5 * anticommutator(cdc, effect);
  }
  return out;
}

Trajectory time_reverse(const Trajectory& traj) {
  return Trajectory{traj.grid, {traj.states.rbegin(), traj.states.rend()}};
}

Trajectory evolve_forward(const LindbladModel& model, const ComplexMatrix& rho0, const TimeGrid& grid) {
  return integrate([&model](const ComplexMatrix& x) { return forward_rhs(model, x); }, rho0, grid);
}

Trajectory evolve_backward(const LindbladModel& model, const ComplexMatrix& effect_final, const TimeGrid& grid) {
  return time_reverse(
      integrate([&model](const ComplexMatrix& x) { return backward_forward_rhs(model, x); }, effect_final, grid));
}

}  // namespace tsvf
