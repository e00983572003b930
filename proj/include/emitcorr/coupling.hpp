#pragma once

// Collective parameters {V, gamma} of two emitters, either from the
// free-space dipole-dipole formulas or from the plasmonic-waveguide
// approximation. All rates are in units of the individual decay rate.

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace emitcorr {

using Vec3 = std::array<double, 3>;

struct CollectiveParams {
  double gamma_individual = 1.0;  // time unit
  double gamma_collective = 0.0;
  double v_coherent = 0.0;

  /// Direct construction, bypassing any geometry model. Throws when
  /// gamma_individual <= 0 or any value is non-finite.
  static CollectiveParams direct(double v, double gamma, double gamma_individual = 1.0);

  bool operator==(const CollectiveParams&) const = default;
};

struct DipoleGeometry {
  Vec3 mu1_hat{0.0, 0.0, 1.0};
  Vec3 mu2_hat{0.0, 0.0, 1.0};
  Vec3 r12_hat{1.0, 0.0, 0.0};
  double separation_over_wavelength = 0.75;
  double refractive_index = 1.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;

  /// Throws std::invalid_argument on non-unit directions, non-positive
  /// separation, n < 1 or non-positive rates.
  void validate() const;
  /// n k0 r12 = 2 pi n r12 / lambda0
  double z() const;

  bool operator==(const DipoleGeometry&) const = default;
};

struct PlasmonWaveguide {
  double beta = 0.94;
  double propagation_length_nm = 2000.0;
  double plasmon_wavelength_nm = 542.0;
  double zeta = 1.0;  // emitter separation d / lambda_pl

  void validate() const;

  bool operator==(const PlasmonWaveguide&) const = default;
};

struct CouplingResult {
  CollectiveParams params;
  std::vector<std::string> warnings;
};

/// V and gamma from the bare-emitter dipole formulas. Throws
/// std::domain_error for coincident emitters (z = 0).
CollectiveParams free_space_coupling(const DipoleGeometry& g);

/// beta * exp(-lambda_pl * zeta / (2 L))
double beta_tilde(const PlasmonWaveguide& w);

/// V = beta~ sin(2 pi zeta) / 2, gamma = beta~ cos(2 pi zeta), with the
/// plasmon-modified individual rate as the time unit. A warning is
/// attached when zeta < 1/4, where the approximation is not reliable.
CouplingResult plasmonic_coupling(const PlasmonWaveguide& w);

struct DispersionSample {
  double plasmon_wavelength_nm = 0.0;
  double propagation_length_nm = 0.0;
};

struct FeasibilityEntry {
  DispersionSample sample;
  double ratio = 0.0;              // lambda_pl / L of the sample
  double achieved_beta_tilde = 0.0;
  bool feasible = false;
};

struct FeasibilityReport {
  double beta = 0.0;
  double target_beta_tilde = 0.0;
  double zeta = 1.0;
  double required_ratio = 0.0;     // lambda_pl / L needed to reach the target
  std::vector<FeasibilityEntry> entries;
};

/// Inverts beta~ for the loss ratio lambda_pl / L at separation zeta
/// (default one plasmon wavelength) and checks each dispersion sample
/// against it: a sample is feasible when its ratio does not exceed the
/// required one. A target equal to beta needs ratio 0; a target above
/// beta throws std::domain_error.
FeasibilityReport feasibility_check(double beta, double target_beta_tilde,
                                    const std::vector<DispersionSample>& samples,
                                    double zeta = 1.0);

}  // namespace emitcorr
