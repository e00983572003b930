#pragma once

// Entropic and entanglement measures of a two-qubit state, in bits.
//
// Classical correlations are maximized over rank-1 projective
// measurements {|a><a|, |b><b|} on one qubit, with
//   |a> = cos(theta)|0> + e^{i phi} sin(theta)|1>
//   |b> = e^{-i phi} sin(theta)|0> - cos(theta)|1>.
// The pair at (theta, phi) and (pi - theta, phi + pi) is the same
// measurement, so the search covers theta in [0, pi/2] only.

#include <array>
#include <optional>

#include "emitcorr/quantum_state.hpp"

namespace emitcorr {

struct MeasurementBasis {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2 pi)

  /// Throws std::invalid_argument for angles outside the stated ranges.
  void validate() const;
  /// {|a>, |b>}
  std::array<Eigen::Vector2cd, 2> kets() const;
};

struct OptimizerSettings {
  int grid_theta = 64;
  int grid_phi = 128;
  double refine_tol = 1e-6;   // bits
  int max_refine_iters = 200;

  /// Grid at least 16 x 32, refine_tol in (0, 1e-5].
  void validate() const;

  bool operator==(const OptimizerSettings&) const = default;
};

struct MeasurementOutcome {
  double conditional_entropy = 0.0;   // sum_j p_j S(rho^j)
  std::array<double, 2> probabilities{};
};

/// Entropy of the unmeasured qubit averaged over the outcomes of a
/// projective measurement on `measured`. Outcomes with p < 1e-12
/// contribute zero.
MeasurementOutcome conditional_entropy_after_measurement(const DensityMatrix& rho,
                                                         const MeasurementBasis& basis,
                                                         Subsystem measured = Subsystem::B);

struct ClassicalCorrelation {
  double value = 0.0;   // bits
  MeasurementBasis argmax;
  bool converged = true;
  int refine_iterations = 0;
};

/// Supremum over projective measurements of the entropy reduction of the
/// unmeasured qubit. Coarse grid followed by compass search from the best
/// grid cells. A result with converged == false carries the best value
/// found when max_refine_iters ran out.
ClassicalCorrelation classical_correlation(const DensityMatrix& rho,
                                           Subsystem measured = Subsystem::B,
                                           const OptimizerSettings& settings = {});

double mutual_information(const DensityMatrix& rho);

struct Discord {
  double value = 0.0;
  ClassicalCorrelation classical;
  double mutual_information = 0.0;
};

/// I - CC at the optimal basis.
Discord quantum_discord(const DensityMatrix& rho, Subsystem measured = Subsystem::B,
                        const OptimizerSettings& settings = {});

/// S(rho_measured) - S(rho) + sum_j p_j S(rho^j) at a given basis. At the
/// optimal basis this is the discord.
double discord_at_basis(const DensityMatrix& rho, const MeasurementBasis& basis,
                        Subsystem measured = Subsystem::B);

/// Wootters concurrence from the spectrum of rho * rho~. Throws
/// std::runtime_error when an eigenvalue of rho * rho~ has an imaginary
/// part above 1e-8.
double concurrence(const DensityMatrix& rho);

/// h((1 + sqrt(1 - C^2)) / 2)
double eof_from_concurrence(double c);
double entanglement_of_formation(const DensityMatrix& rho);

struct CorrelationRecord {
  std::optional<double> t;  // empty for a stationary state
  double mutual_information = 0.0;
  double classical = 0.0;
  double discord = 0.0;
  double eof = 0.0;
  double concurrence = 0.0;
  bool converged = true;
};

CorrelationRecord correlation_record(const DensityMatrix& rho, std::optional<double> t,
                                     const OptimizerSettings& settings = {},
                                     Subsystem measured = Subsystem::B);

/// Empty when the record satisfies its invariants, otherwise a message.
std::optional<std::string> check_record(const CorrelationRecord& r);

}  // namespace emitcorr
