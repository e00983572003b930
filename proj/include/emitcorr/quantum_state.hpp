#pragma once

// Dense two-qubit state utilities.
//
// Basis ordering is {|00>, |01>, |10>, |11>} with qubit A as the left
// (slow) index, so |ab> has index 2a + b. Entropies are in bits.

#include <array>
#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace emitcorr {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

enum class Subsystem { A, B };

Subsystem parse_subsystem(std::string_view label);
std::string_view to_string(Subsystem s);

namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double trace = 1e-9;
inline constexpr double min_eigenvalue = -1e-8;
inline constexpr double negligible_eigenvalue = 1e-12;
inline constexpr double normalization = 1e-12;
}  // namespace tol

namespace ops {
Matrix2c identity2();
Matrix2c sigma_x();
Matrix2c sigma_y();
Matrix2c sigma_z();
/// |1><0|
Matrix2c sigma_plus();
/// |0><1|
Matrix2c sigma_minus();
}  // namespace ops

/// Kronecker product of two square matrices. Throws std::invalid_argument
/// on non-square input.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct HermitianEigen {
  Eigen::VectorXd values;   // ascending
  ComplexMatrix vectors;    // orthonormal columns
};

/// Throws std::invalid_argument when ‖m − m†‖_max exceeds 1e-10.
HermitianEigen eig_hermitian(const ComplexMatrix& m);

double hermiticity_defect(const ComplexMatrix& m);

/// -Tr(m log2 m) for a (possibly reduced) density matrix. Eigenvalues in
/// [-1e-8, 1e-12) contribute zero; anything more negative throws
/// std::domain_error.
double von_neumann_entropy(const ComplexMatrix& m);

/// Entropy of a 2x2 Hermitian unit-trace matrix from its closed-form
/// spectrum. Used in the measurement-optimization inner loop.
double entropy_2x2(const Matrix2c& m);

/// -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0.
double binary_entropy(double x);

struct StateReport {
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool hermitian = false;
  bool unit_trace = false;
  bool positive = false;

  bool passed() const { return hermitian && unit_trace && positive; }
  std::string describe() const;
};

/// Report-only check of the density-matrix invariants. Never throws.
StateReport validate_state(const Matrix4c& m);

/// Normalized pure state over {|00>, |01>, |10>, |11>}.
class PureState {
 public:
  explicit PureState(const std::array<cplx, 4>& amplitudes);

  /// One of "00", "01", "10", "11".
  static PureState basis(std::string_view label);
  /// (|01> + |10>)/sqrt(2)
  static PureState psi_plus();
  /// (|01> - |10>)/sqrt(2)
  static PureState psi_minus();
  /// sqrt(alpha)|01> + sqrt(1-alpha)|10>, alpha in [0, 1].
  static PureState alpha_superposition(double alpha);

  const std::array<cplx, 4>& amplitudes() const { return amplitudes_; }
  Eigen::Vector4cd ket() const;

 private:
  std::array<cplx, 4> amplitudes_;
};

/// Two-qubit density matrix. Construction enforces the invariants
/// (Hermitian within 1e-10, unit trace within 1e-9, min eigenvalue
/// >= -1e-8) and throws std::invalid_argument otherwise.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix4c& m);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed();
  static DensityMatrix product(const Matrix2c& rho_a, const Matrix2c& rho_b);

  const Matrix4c& matrix() const { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }

  /// <psi|rho|psi>
  double population(const PureState& psi) const;

 private:
  Matrix4c m_;
};

/// Reduced state of the kept qubit.
Matrix2c partial_trace(const Matrix4c& rho, Subsystem keep);
inline Matrix2c partial_trace(const DensityMatrix& rho, Subsystem keep) {
  return partial_trace(rho.matrix(), keep);
}

/// Exchanges the roles of qubits A and B.
Matrix4c swap_qubits(const Matrix4c& rho);

}  // namespace emitcorr
