#pragma once

// Dense complex-matrix helpers shared by every module. Everything here is a
// free function over Eigen expressions, templated on the real scalar type.
//
// Qubit basis convention: index 0 is the excited state |e>, index 1 is the
// ground state |g>, so sigma_z = diag(+1, -1). Enlarged (ancilla x system)
// indices run as (0,e), (0,g), (1,e), (1,g).

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>
#include <string>

#include "tsvf/error.hpp"

namespace tsvf {

template <typename Real>
using CMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using ComplexMatrix = CMatrixT<double>;

namespace detail {

template <typename A, typename B>
void require_same_square(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, const char* what) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionError(std::string(what) + ": expected square operands of equal size, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

template <typename A>
void require_square(const Eigen::MatrixBase<A>& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()));
  }
}

}  // namespace detail

template <typename A, typename B>
typename A::PlainObject kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return Eigen::kroneckerProduct(a.derived(), b.derived()).eval();
}

template <typename A, typename B>
typename A::PlainObject commutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  detail::require_same_square(a, b, "commutator");
  return a * b - b * a;
}

template <typename A, typename B>
typename A::PlainObject anticommutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  detail::require_same_square(a, b, "anticommutator");
  return a * b + b * a;
}

template <typename A, typename B>
typename A::RealScalar frob_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("frob_distance: operand shapes differ");
  }
  return (a - b).norm();
}

/// Frobenius norm of the anti-Hermitian part, ||a - a^dagger||.
template <typename A>
typename A::RealScalar hermiticity_defect(const Eigen::MatrixBase<A>& a) {
  detail::require_square(a, "hermiticity_defect");
  return (a - a.adjoint()).norm();
}

template <typename A>
bool is_hermitian(const Eigen::MatrixBase<A>& a, typename A::RealScalar tol) {
  return hermiticity_defect(a) <= tol;
}

template <typename A>
typename A::PlainObject hermitize(const Eigen::MatrixBase<A>& a) {
  detail::require_square(a, "hermitize");
  return (a + a.adjoint()) / typename A::RealScalar(2);
}

/// Smallest eigenvalue of the Hermitian part of a.
template <typename A>
typename A::RealScalar min_eigenvalue(const Eigen::MatrixBase<A>& a) {
  detail::require_square(a, "min_eigenvalue");
  const typename A::PlainObject h = hermitize(a);
  Eigen::SelfAdjointEigenSolver<typename A::PlainObject> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

template <typename A>
bool is_psd(const Eigen::MatrixBase<A>& a, typename A::RealScalar tol) {
  return is_hermitian(a, tol) && min_eigenvalue(a) >= -tol;
}

/// exp(a) by scaling and squaring with Pade approximants.
template <typename A>
typename A::PlainObject matrix_exponential(const Eigen::MatrixBase<A>& a) {
  detail::require_square(a, "matrix_exponential");
  const typename A::PlainObject m = a;
  return m.exp();
}

// Named constant operators.

template <typename Real = double>
CMatrixT<Real> identity(Eigen::Index d) {
  return CMatrixT<Real>::Identity(d, d);
}

template <typename Real = double>
CMatrixT<Real> pauli_x() {
  CMatrixT<Real> m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

template <typename Real = double>
CMatrixT<Real> pauli_y() {
  using C = std::complex<Real>;
  CMatrixT<Real> m(2, 2);
  m << C(0, 0), C(0, -1), C(0, 1), C(0, 0);
  return m;
}

template <typename Real = double>
CMatrixT<Real> pauli_z() {
  CMatrixT<Real> m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Lowering operator |g><e|.
template <typename Real = double>
CMatrixT<Real> sigma_minus() {
  CMatrixT<Real> m = CMatrixT<Real>::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}

/// Raising operator |e><g|.
template <typename Real = double>
CMatrixT<Real> sigma_plus() {
  CMatrixT<Real> m = CMatrixT<Real>::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

template <typename Real = double>
CMatrixT<Real> excited_projector() {
  CMatrixT<Real> m = CMatrixT<Real>::Zero(2, 2);
  m(0, 0) = 1;
  return m;
}

template <typename Real = double>
CMatrixT<Real> ground_projector() {
  CMatrixT<Real> m = CMatrixT<Real>::Zero(2, 2);
  m(1, 1) = 1;
  return m;
}

/// |+><+| with |+> = (|e> + |g>)/sqrt(2).
template <typename Real = double>
CMatrixT<Real> plus_projector() {
  CMatrixT<Real> m(2, 2);
  m.setConstant(Real(0.5));
  return m;
}

// Ancilla projectors |0><0| and |1><1|; numerically identical to the excited
// and ground projectors but named for their role.
template <typename Real = double>
CMatrixT<Real> ancilla_projector(int which) {
  CMatrixT<Real> m = CMatrixT<Real>::Zero(2, 2);
  m(which, which) = 1;
  return m;
}

/// The d x 2d row-summing decoder (1, 1) (x) I_d.
template <typename Real = double>
CMatrixT<Real> block_summer(Eigen::Index d) {
  CMatrixT<Real> row(1, 2);
  row << 1, 1;
  return kron(row, identity<Real>(d));
}

/// The 2d x d column selector (1, 0)^T (x) I_d.
template <typename Real = double>
CMatrixT<Real> first_block_selector(Eigen::Index d) {
  CMatrixT<Real> col(2, 1);
  col << 1, 0;
  return kron(col, identity<Real>(d));
}

/// sigma_x (x) I_d, which swaps the ancilla blocks.
template <typename Real = double>
CMatrixT<Real> ancilla_flip(Eigen::Index d) {
  return kron(pauli_x<Real>(), identity<Real>(d));
}

}  // namespace tsvf
