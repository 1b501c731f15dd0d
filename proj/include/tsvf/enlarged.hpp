#pragma once

#include <vector>

#include "tsvf/dynamics.hpp"

namespace tsvf {

/// A 2d x 2d state on ancilla (x) system. States built by embed() are
/// block-diagonal, (1/2) diag(rho, E). Arbitrary matrices are accepted so that
/// block preservation can be checked after the fact; a warning is raised when
/// the off-diagonal blocks are not negligible.
class EnlargedState {
 public:
  static constexpr double kBlockTolerance = 1e-9;

  explicit EnlargedState(ComplexMatrix matrix);

  const ComplexMatrix& matrix() const { return matrix_; }
  Eigen::Index dim_original() const { return matrix_.rows() / 2; }

  /// Direct block views (no factor of 2). Block (0,0) holds rho/2 and block
  /// (1,1) holds E/2 for embedded states.
  ComplexMatrix block(int row, int col) const;

  /// Larger Frobenius norm of the two off-diagonal blocks.
  double off_diagonal_norm() const;

  Complex element(Eigen::Index i, Eigen::Index j) const { return matrix_(i, j); }

 private:
  ComplexMatrix matrix_;
};

struct EnlargedModel {
  ComplexMatrix hamiltonian;                 // sigma_z (x) H
  std::vector<ComplexMatrix> jump_ops;       // |0><0| (x) C + |1><1| (x) C^+
  std::vector<ComplexMatrix> anticomm_ops;   // I_2 (x) C
  Eigen::Index dim_original = 0;
};

EnlargedState embed(const ComplexMatrix& rho, const ComplexMatrix& effect);

// rho = 2 M varrho N and E = 2 M varrho (sigma_x (x) I) N, evaluated as the
// literal matrix products with M = (1,1) (x) I_d and N = (1,0)^T (x) I_d.
ComplexMatrix decode_rho(const EnlargedState& enl);
ComplexMatrix decode_effect(const EnlargedState& enl);

EnlargedModel enlarge_model(const LindbladModel& model);

// -i[H, varrho] + sum_n (2 C varrho C^+ - {Cbar^+ Cbar, varrho}) / 2
//
// The sandwich term uses the block operator C while the anticommutator uses
// Cbar = I_2 (x) C. On a block-diagonal state this reproduces the forward
// equation in the upper block and the forward version of the backward
// equation in the lower block.
ComplexMatrix enlarged_rhs(const EnlargedModel& model, const ComplexMatrix& state);

/// exp(-i (omega/2) (sigma_z (x) sigma_y) t).
ComplexMatrix enlarged_unitary(double omega, double t);

/// Integrates the enlarged equation from embed(rho0, effect_final).
Trajectory evolve_enlarged(const LindbladModel& model, const ComplexMatrix& rho0, const ComplexMatrix& effect_final,
                           const TimeGrid& grid);

}  // namespace tsvf
