#pragma once

// Driven two-emitter master equation with collective dissipation.
//
// The Hamiltonian is written in the frame rotating at the (common) laser
// frequency:
//   H = V (|01><10| + |10><01|) + sum_i [ l_i (s+_i + s-_i) - D_i s+_i s-_i ]
// and the dissipator uses the rate matrix [[G, g], [g, G]] with real g.

#include <stdexcept>
#include <vector>

#include "emitcorr/coupling.hpp"
#include "emitcorr/quantum_state.hpp"

namespace emitcorr {

using Liouvillian = Eigen::Matrix<cplx, 16, 16>;

struct DriveConfig {
  double amplitude1 = 0.0;
  double amplitude2 = 0.0;
  double detuning1 = 0.0;
  double detuning2 = 0.0;

  bool driven() const { return amplitude1 != 0.0 || amplitude2 != 0.0; }
  void validate() const;

  bool operator==(const DriveConfig&) const = default;
};

struct EvolutionSpec {
  DensityMatrix initial_state = DensityMatrix::from_pure(PureState::basis("10"));
  CollectiveParams params;
  DriveConfig drive;
  double t_final = 10.0;
  int sample_count = 500;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

class StepSizeUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SteadyStateAmbiguity : public std::runtime_error {
 public:
  SteadyStateAmbiguity(const std::string& what, int null_dimension)
      : std::runtime_error(what), null_dimension_(null_dimension) {}
  int null_dimension() const { return null_dimension_; }

 private:
  int null_dimension_;
};

/// Throws std::invalid_argument unless G > 0 and |g| <= G (the rate
/// matrix must be positive semidefinite).
void validate_rates(const CollectiveParams& p);

/// H / hbar in the rotating frame. Hermitian by construction.
Matrix4c build_hamiltonian(const CollectiveParams& p, const DriveConfig& d);

/// Right-hand side d(rho)/dt of the master equation, evaluated directly
/// in operator form.
Matrix4c lindblad_rhs(const Matrix4c& rho, const Matrix4c& h, const CollectiveParams& p);
inline Matrix4c lindblad_rhs(const DensityMatrix& rho, const Matrix4c& h,
                             const CollectiveParams& p) {
  return lindblad_rhs(rho.matrix(), h, p);
}

/// Generator acting on the column-stacked density matrix vec(rho).
Liouvillian build_liouvillian(const Matrix4c& h, const CollectiveParams& p);

/// Adaptive Dormand-Prince 5(4) integration sampled at sample_count
/// uniform times in [0, t_final]. Emitted states are checked for trace
/// drift (> 1e-9 is an error), then hermitized and renormalized.
Trajectory evolve(const EvolutionSpec& spec);

/// Unique fixed point of the generator with unit trace. Throws
/// SteadyStateAmbiguity when the null space is more than one-dimensional.
DensityMatrix steady_state(const CollectiveParams& p, const DriveConfig& d);

}  // namespace emitcorr
