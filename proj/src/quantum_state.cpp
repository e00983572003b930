#include "emitcorr/quantum_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace emitcorr {

Subsystem parse_subsystem(std::string_view label) {
  if (label == "A" || label == "a") return Subsystem::A;
  if (label == "B" || label == "b") return Subsystem::B;
  throw std::invalid_argument("invalid subsystem label '" + std::string(label) +
                              "' (expected A or B)");
}

std::string_view to_string(Subsystem s) { return s == Subsystem::A ? "A" : "B"; }

namespace ops {
Matrix2c identity2() { return Matrix2c::Identity(); }
Matrix2c sigma_x() {
  Matrix2c m;
  m << 0, 1, 1, 0;
  return m;
}
Matrix2c sigma_y() {
  Matrix2c m;
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
Matrix2c sigma_z() {
  Matrix2c m;
  m << 1, 0, 0, -1;
  return m;
}
Matrix2c sigma_plus() {
  Matrix2c m;
  m << 0, 0, 1, 0;
  return m;
}
Matrix2c sigma_minus() {
  Matrix2c m;
  m << 0, 1, 0, 0;
  return m;
}
}  // namespace ops

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw std::invalid_argument("kron: inputs must be square");
  }
  const Eigen::Index na = a.rows();
  const Eigen::Index nb = b.rows();
  ComplexMatrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
    }
  }
  return out;
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianEigen eig_hermitian(const ComplexMatrix& m) {
  const double defect = hermiticity_defect(m);
  if (!(defect <= tol::hermitian)) {
    std::ostringstream os;
    os << "eig_hermitian: matrix is not Hermitian (defect " << defect << ")";
    throw std::invalid_argument(os.str());
  }
  // Symmetrize so the solver sees an exactly Hermitian input.
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_hermitian: eigensolver failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

double entropy_from_spectrum(const double* values, Eigen::Index n) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = values[i];
    if (lambda < tol::min_eigenvalue) {
      std::ostringstream os;
      os << "von_neumann_entropy: negative eigenvalue " << lambda;
      throw std::domain_error(os.str());
    }
    if (lambda < tol::negligible_eigenvalue) continue;
    s -= lambda * std::log2(lambda);
  }
  return std::max(s, 0.0);
}

}  // namespace

double von_neumann_entropy(const ComplexMatrix& m) {
  const auto eig = eig_hermitian(m);
  return entropy_from_spectrum(eig.values.data(), eig.values.size());
}

double entropy_2x2(const Matrix2c& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
  const double mean = 0.5 * (a + d);
  const double values[2] = {mean - half_gap, mean + half_gap};
  return entropy_from_spectrum(values, 2);
}

double binary_entropy(double x) {
  double h = 0.0;
  if (x > 0.0 && x < 1.0) {
    h = -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
  }
  return h;
}

std::string StateReport::describe() const {
  std::ostringstream os;
  os << "hermiticity_defect=" << hermiticity_defect << (hermitian ? "" : " (FAIL)")
     << " trace_defect=" << trace_defect << (unit_trace ? "" : " (FAIL)")
     << " min_eigenvalue=" << min_eigenvalue << (positive ? "" : " (FAIL)");
  return os.str();
}

StateReport validate_state(const Matrix4c& m) {
  StateReport r;
  r.hermiticity_defect = hermiticity_defect(m);
  r.trace_defect = std::abs(m.trace() - cplx(1.0, 0.0));
  r.hermitian = r.hermiticity_defect <= tol::hermitian;
  r.unit_trace = r.trace_defect <= tol::trace;
  const Matrix4c h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(h, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = solver.eigenvalues()(0);
  r.positive = r.min_eigenvalue >= tol::min_eigenvalue;
  return r;
}

PureState::PureState(const std::array<cplx, 4>& amplitudes) : amplitudes_(amplitudes) {
  double norm = 0.0;
  for (const auto& a : amplitudes_) norm += std::norm(a);
  if (std::abs(norm - 1.0) > tol::normalization) {
    std::ostringstream os;
    os << "pure state is not normalized (sum |a|^2 = " << norm << ")";
    throw std::invalid_argument(os.str());
  }
}

PureState PureState::basis(std::string_view label) {
  static constexpr std::array<std::string_view, 4> labels = {"00", "01", "10", "11"};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) {
      std::array<cplx, 4> a{};
      a[i] = 1.0;
      return PureState(a);
    }
  }
  throw std::invalid_argument("unknown basis state '" + std::string(label) + "'");
}

PureState PureState::psi_plus() {
  const double r = 1.0 / std::sqrt(2.0);
  return PureState({0.0, r, r, 0.0});
}

PureState PureState::psi_minus() {
  const double r = 1.0 / std::sqrt(2.0);
  return PureState({0.0, r, -r, 0.0});
}

PureState PureState::alpha_superposition(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  return PureState({0.0, std::sqrt(alpha), std::sqrt(1.0 - alpha), 0.0});
}

Eigen::Vector4cd PureState::ket() const {
  return Eigen::Vector4cd(amplitudes_[0], amplitudes_[1], amplitudes_[2], amplitudes_[3]);
}

DensityMatrix::DensityMatrix(const Matrix4c& m) : m_(m) {
  const auto report = validate_state(m);
  if (!report.passed()) {
    throw std::invalid_argument("invalid density matrix: " + report.describe());
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const Eigen::Vector4cd k = psi.ket();
  return DensityMatrix(k * k.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() {
  return DensityMatrix(Matrix4c::Identity() / 4.0);
}

DensityMatrix DensityMatrix::product(const Matrix2c& rho_a, const Matrix2c& rho_b) {
  return DensityMatrix(Matrix4c(kron(rho_a, rho_b)));
}

double DensityMatrix::population(const PureState& psi) const {
  const Eigen::Vector4cd k = psi.ket();
  return (k.adjoint() * m_ * k)(0, 0).real();
}

Matrix2c partial_trace(const Matrix4c& rho, Subsystem keep) {
  Matrix2c out = Matrix2c::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        if (keep == Subsystem::A) {
          out(i, j) += rho(2 * i + k, 2 * j + k);
        } else {
          out(i, j) += rho(2 * k + i, 2 * k + j);
        }
      }
    }
  }
  return out;
}

Matrix4c swap_qubits(const Matrix4c& rho) {
  static constexpr int perm[4] = {0, 2, 1, 3};
  Matrix4c out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out(perm[r], perm[c]) = rho(r, c);
  }
  return out;
}

}  // namespace emitcorr
