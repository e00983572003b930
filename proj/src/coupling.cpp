#include "emitcorr/coupling.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace emitcorr {

namespace {

constexpr double kUnitTol = 1e-12;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void require_unit(const Vec3& v, const char* name) {
  if (std::abs(std::sqrt(dot(v, v)) - 1.0) > kUnitTol) {
    throw std::invalid_argument(std::string(name) + " must be a unit vector");
  }
}

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(name) + " must be finite");
}

}  // namespace

CollectiveParams CollectiveParams::direct(double v, double gamma, double gamma_individual) {
  require_finite(v, "V");
  require_finite(gamma, "gamma");
  if (!(gamma_individual > 0.0) || !std::isfinite(gamma_individual)) {
    throw std::invalid_argument("individual decay rate must be positive");
  }
  return {gamma_individual, gamma, v};
}

void DipoleGeometry::validate() const {
  require_unit(mu1_hat, "mu1");
  require_unit(mu2_hat, "mu2");
  require_unit(r12_hat, "r12_hat");
  if (!(separation_over_wavelength > 0.0) || !std::isfinite(separation_over_wavelength)) {
    throw std::invalid_argument("separation_over_wavelength must be positive");
  }
  if (!(refractive_index >= 1.0) || !std::isfinite(refractive_index)) {
    throw std::invalid_argument("refractive_index must be >= 1");
  }
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) {
    throw std::invalid_argument("individual decay rates must be positive");
  }
}

double DipoleGeometry::z() const {
  return 2.0 * std::numbers::pi * refractive_index * separation_over_wavelength;
}

CollectiveParams free_space_coupling(const DipoleGeometry& g) {
  const double z = g.z();
  if (!(z > 0.0)) {
    throw std::domain_error("free_space_coupling: coincident emitters (z = 0)");
  }
  g.validate();

  const double m12 = dot(g.mu1_hat, g.mu2_hat);
  const double m1r = dot(g.mu1_hat, g.r12_hat);
  const double m2r = dot(g.mu2_hat, g.r12_hat);
  const double far = m12 - m1r * m2r;         // radiative (1/z) pattern
  const double near = m12 - 3.0 * m1r * m2r;  // induction/static pattern

  const double s = std::sin(z);
  const double c = std::cos(z);
  const double z2 = z * z;
  const double z3 = z2 * z;
  const double rate = std::sqrt(g.gamma1 * g.gamma2);

  CollectiveParams p;
  p.gamma_individual = rate;
  p.v_coherent = 0.75 * rate * (-far * c / z + near * (c / z3 + s / z2));
  p.gamma_collective = 1.5 * rate * (far * s / z + near * (c / z2 - s / z3));
  return p;
}

void PlasmonWaveguide::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  if (!(propagation_length_nm > 0.0)) throw std::invalid_argument("L must be positive");
  if (!(plasmon_wavelength_nm > 0.0)) throw std::invalid_argument("lambda_pl must be positive");
  if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
  require_finite(propagation_length_nm, "L");
  require_finite(plasmon_wavelength_nm, "lambda_pl");
  require_finite(zeta, "zeta");
}

double beta_tilde(const PlasmonWaveguide& w) {
  w.validate();
  return w.beta * std::exp(-w.plasmon_wavelength_nm * w.zeta / (2.0 * w.propagation_length_nm));
}

CouplingResult plasmonic_coupling(const PlasmonWaveguide& w) {
  const double bt = beta_tilde(w);
  const double phase = 2.0 * std::numbers::pi * w.zeta;
  CouplingResult out;
  out.params.gamma_individual = 1.0;
  out.params.v_coherent = 0.5 * bt * std::sin(phase);
  out.params.gamma_collective = bt * std::cos(phase);
  if (w.zeta < 0.25) {
    std::ostringstream os;
    os << "plasmonic approximation breaks down for zeta < 1/4 (zeta = " << w.zeta << ")";
    out.warnings.push_back(os.str());
  }
  return out;
}

FeasibilityReport feasibility_check(double beta, double target_beta_tilde,
                                    const std::vector<DispersionSample>& samples, double zeta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  if (!(target_beta_tilde > 0.0 && target_beta_tilde < 1.0)) {
    throw std::invalid_argument("target beta~ must lie in (0, 1)");
  }
  if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
  if (target_beta_tilde > beta) {
    throw std::domain_error("target beta~ exceeds beta: the loss factor cannot exceed 1");
  }

  FeasibilityReport report;
  report.beta = beta;
  report.target_beta_tilde = target_beta_tilde;
  report.zeta = zeta;
  report.required_ratio = -2.0 * std::log(target_beta_tilde / beta) / zeta;

  for (const auto& s : samples) {
    if (!(s.plasmon_wavelength_nm > 0.0) || !(s.propagation_length_nm > 0.0)) {
      throw std::invalid_argument("dispersion samples need positive lambda_pl and L");
    }
    FeasibilityEntry e;
    e.sample = s;
    e.ratio = s.plasmon_wavelength_nm / s.propagation_length_nm;
    e.achieved_beta_tilde = beta * std::exp(-e.ratio * zeta / 2.0);
    e.feasible = e.ratio <= report.required_ratio;
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace emitcorr
