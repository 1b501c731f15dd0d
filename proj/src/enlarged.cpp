#include "tsvf/enlarged.hpp"

#include <string>

namespace tsvf {

EnlargedState::EnlargedState(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  detail::require_square(matrix_, "EnlargedState");
  if (matrix_.rows() % 2 != 0 || matrix_.rows() == 0) {
    throw DimensionError("EnlargedState: dimension must be even and positive, got " + std::to_string(matrix_.rows()));
  }
  const double off = off_diagonal_norm();
  if (off > kBlockTolerance) {
    warn("enlarged state is not block-diagonal (off-diagonal block norm " + std::to_string(off) + ")");
  }
}

ComplexMatrix EnlargedState::block(int row, int col) const {
  const Eigen::Index d = dim_original();
  return matrix_.block(row * d, col * d, d, d);
}

double EnlargedState::off_diagonal_norm() const {
  const Eigen::Index d = dim_original();
  return std::max(matrix_.block(0, d, d, d).norm(), matrix_.block(d, 0, d, d).norm());
}

EnlargedState embed(const ComplexMatrix& rho, const ComplexMatrix& effect) {
  detail::require_same_square(rho, effect, "embed");
  return EnlargedState(0.5 * (kron(ancilla_projector(0), rho) + kron(ancilla_projector(1), effect)));
}

ComplexMatrix decode_rho(const EnlargedState& enl) {
  const Eigen::Index d = enl.dim_original();
  return 2.0 * block_summer(d) * enl.matrix() * first_block_selector(d);
}

ComplexMatrix decode_effect(const EnlargedState& enl) {
  const Eigen::Index d = enl.dim_original();
  return 2.0 * block_summer(d) * enl.matrix() * ancilla_flip(d) * first_block_selector(d);
}

EnlargedModel enlarge_model(const LindbladModel& model) {
  EnlargedModel out;
  out.dim_original = model.dim();
  out.hamiltonian = kron(pauli_z(), model.hamiltonian());
  for (const auto& c : model.lindblad_ops()) {
    out.jump_ops.push_back(kron(ancilla_projector(0), c) + kron(ancilla_projector(1), ComplexMatrix(c.adjoint())));
    out.anticomm_ops.push_back(kron(identity(2), c));
  }
  return out;
}

ComplexMatrix enlarged_rhs(const EnlargedModel& model, const ComplexMatrix& state) {
  const Eigen::Index n = 2 * model.dim_original;
  if (state.rows() != n || state.cols() != n) {
    throw DimensionError("enlarged_rhs: state is " + std::to_string(state.rows()) + "x" +
                         std::to_string(state.cols()) + ", expected " + std::to_string(n) + "x" + std::to_string(n));
  }
  ComplexMatrix out = Complex(0.0, -1.0) * commutator(model.hamiltonian, state);
  for (std::size_t i = 0; i < model.jump_ops.size(); ++i) {
    const auto& c = model.jump_ops[i];
    const auto& cbar = model.anticomm_ops[i];
    const ComplexMatrix cbar_dc = cbar.adjoint() * cbar;
    out += c * state * c.adjoint() - 0.5 * anticommutator(cbar_dc, state);
  }
  return out;
}

ComplexMatrix enlarged_unitary(double omega, double t) {
  const ComplexMatrix generator = kron(pauli_z(), pauli_y());
  return matrix_exponential(ComplexMatrix(Complex(0.0, -0.5 * omega * t) * generator));
}

Trajectory evolve_enlarged(const LindbladModel& model, const ComplexMatrix& rho0, const ComplexMatrix& effect_final,
                           const TimeGrid& grid) {
  const EnlargedModel enl = enlarge_model(model);
  return integrate([&enl](const ComplexMatrix& x) { return enlarged_rhs(enl, x); },
                   embed(rho0, effect_final).matrix(), grid);
}

}  // namespace tsvf
