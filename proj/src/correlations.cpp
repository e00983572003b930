#include "emitcorr/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace emitcorr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegligibleProbability = 1e-12;

// Blocks of rho indexed by the measured qubit: block(b, b') is the 2x2
// operator on the unmeasured qubit, so the post-measurement (unnormalized)
// state for outcome |v> is sum_{b,b'} conj(v_b) v_b' block(b, b').
struct MeasurementKernel {
  std::array<std::array<Matrix2c, 2>, 2> block;

  explicit MeasurementKernel(const Matrix4c& rho_measuring_b) {
    for (int b = 0; b < 2; ++b) {
      for (int bp = 0; bp < 2; ++bp) {
        for (int a = 0; a < 2; ++a) {
          for (int ap = 0; ap < 2; ++ap) {
            block[b][bp](a, ap) = rho_measuring_b(2 * a + b, 2 * ap + bp);
          }
        }
      }
    }
  }

  MeasurementOutcome evaluate(double theta, double phi) const {
    const MeasurementBasis basis{theta, phi};
    const auto kets = basis.kets();
    MeasurementOutcome out;
    for (int j = 0; j < 2; ++j) {
      const auto& v = kets[j];
      Matrix2c cond = Matrix2c::Zero();
      for (int b = 0; b < 2; ++b) {
        for (int bp = 0; bp < 2; ++bp) {
          cond += std::conj(v(b)) * v(bp) * block[b][bp];
        }
      }
      const double p = cond.trace().real();
      out.probabilities[j] = p;
      if (p < kNegligibleProbability) continue;
      out.conditional_entropy += p * entropy_2x2(cond / p);
    }
    return out;
  }

  double objective(double theta, double phi) const {
    return evaluate(theta, phi).conditional_entropy;
  }
};

Matrix4c oriented(const DensityMatrix& rho, Subsystem measured) {
  return measured == Subsystem::B ? rho.matrix() : swap_qubits(rho.matrix());
}

Subsystem other(Subsystem s) { return s == Subsystem::A ? Subsystem::B : Subsystem::A; }

MeasurementBasis canonical(double theta, double phi) {
  // theta -> theta + pi only flips the global sign of both kets.
  theta = std::fmod(theta, kPi);
  if (theta < 0.0) theta += kPi;
  phi = std::fmod(phi, 2.0 * kPi);
  if (phi < 0.0) phi += 2.0 * kPi;
  return {theta, phi};
}

struct SearchPoint {
  double value;
  double theta;
  double phi;
};

// Compass search minimizing the conditional entropy. Returns the number
// of polls used; `converged` is false when the budget ran out first.
int compass_search(const MeasurementKernel& kernel, SearchPoint& best, double step_theta,
                   double step_phi, double min_step, int max_iters, bool& converged) {
  int iters = 0;
  while (std::max(step_theta, step_phi) >= min_step) {
    if (iters >= max_iters) {
      converged = false;
      return iters;
    }
    ++iters;
    const std::array<std::pair<double, double>, 4> moves = {
        {{step_theta, 0.0}, {-step_theta, 0.0}, {0.0, step_phi}, {0.0, -step_phi}}};
    bool improved = false;
    for (const auto& [dt, dp] : moves) {
      const double th = best.theta + dt;
      const double ph = best.phi + dp;
      const double f = kernel.objective(th, ph);
      if (f < best.value) {
        best = {f, th, ph};
        improved = true;
        break;
      }
    }
    if (!improved) {
      step_theta *= 0.5;
      step_phi *= 0.5;
    }
  }
  return iters;
}

}  // namespace

void MeasurementBasis::validate() const {
  if (!(theta >= 0.0 && theta <= kPi)) throw std::invalid_argument("theta must lie in [0, pi]");
  if (!(phi >= 0.0 && phi < 2.0 * kPi)) throw std::invalid_argument("phi must lie in [0, 2 pi)");
}

std::array<Eigen::Vector2cd, 2> MeasurementBasis::kets() const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const cplx phase = std::polar(1.0, phi);
  Eigen::Vector2cd a(c, phase * s);
  Eigen::Vector2cd b(std::conj(phase) * s, -c);
  return {a, b};
}

void OptimizerSettings::validate() const {
  if (grid_theta < 16 || grid_phi < 32) {
    throw std::invalid_argument("optimizer grid must be at least 16 x 32");
  }
  if (!(refine_tol > 0.0 && refine_tol <= 1e-5)) {
    throw std::invalid_argument("refine_tol must lie in (0, 1e-5]");
  }
  if (max_refine_iters < 1) throw std::invalid_argument("max_refine_iters must be positive");
}

MeasurementOutcome conditional_entropy_after_measurement(const DensityMatrix& rho,
                                                         const MeasurementBasis& basis,
                                                         Subsystem measured) {
  basis.validate();
  const MeasurementKernel kernel(oriented(rho, measured));
  return kernel.evaluate(basis.theta, basis.phi);
}

ClassicalCorrelation classical_correlation(const DensityMatrix& rho, Subsystem measured,
                                           const OptimizerSettings& settings) {
  settings.validate();
  const MeasurementKernel kernel(oriented(rho, measured));
  const double s_unmeasured = von_neumann_entropy(partial_trace(rho, other(measured)));

  const double d_theta = (kPi / 2.0) / (settings.grid_theta - 1);
  const double d_phi = 2.0 * kPi / settings.grid_phi;

  std::vector<SearchPoint> grid;
  grid.reserve(static_cast<std::size_t>(settings.grid_theta) * settings.grid_phi);
  for (int i = 0; i < settings.grid_theta; ++i) {
    const double theta = i * d_theta;
    for (int k = 0; k < settings.grid_phi; ++k) {
      const double phi = k * d_phi;
      grid.push_back({kernel.objective(theta, phi), theta, phi});
    }
  }

  constexpr std::size_t kStarts = 4;
  const std::size_t starts = std::min(kStarts, grid.size());
  std::partial_sort(grid.begin(), grid.begin() + starts, grid.end(),
                    [](const SearchPoint& a, const SearchPoint& b) { return a.value < b.value; });

  // Quadratic objective near the optimum: an angular step of
  // 1e-3 sqrt(tol) leaves an error far below tol.
  const double min_step = 1e-3 * std::sqrt(settings.refine_tol);

  ClassicalCorrelation result;
  SearchPoint overall = grid.front();
  int total_iters = 0;
  for (std::size_t s = 0; s < starts; ++s) {
    SearchPoint p = grid[s];
    bool converged = true;
    total_iters += compass_search(kernel, p, d_theta, d_phi, min_step, settings.max_refine_iters,
                                  converged);
    result.converged = result.converged && converged;
    if (p.value < overall.value) overall = p;
  }

  result.value = s_unmeasured - overall.value;
  result.argmax = canonical(overall.theta, overall.phi);
  result.refine_iterations = total_iters;
  return result;
}

double mutual_information(const DensityMatrix& rho) {
  const double sa = von_neumann_entropy(partial_trace(rho, Subsystem::A));
  const double sb = von_neumann_entropy(partial_trace(rho, Subsystem::B));
  const double sab = von_neumann_entropy(rho.matrix());
  return sa + sb - sab;
}

Discord quantum_discord(const DensityMatrix& rho, Subsystem measured,
                        const OptimizerSettings& settings) {
  Discord d;
  d.classical = classical_correlation(rho, measured, settings);
  d.mutual_information = mutual_information(rho);
  d.value = d.mutual_information - d.classical.value;
  return d;
}

double discord_at_basis(const DensityMatrix& rho, const MeasurementBasis& basis,
                        Subsystem measured) {
  const double s_measured = von_neumann_entropy(partial_trace(rho, measured));
  const double s_joint = von_neumann_entropy(rho.matrix());
  return s_measured - s_joint +
         conditional_entropy_after_measurement(rho, basis, measured).conditional_entropy;
}

double concurrence(const DensityMatrix& rho) {
  const Matrix4c yy = kron(ops::sigma_y(), ops::sigma_y());
  const Matrix4c& m = rho.matrix();
  const Matrix4c flipped = yy * m.conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix4c> solver(m * flipped, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("concurrence: eigensolver failed");
  }
  std::array<double, 4> lambda{};
  for (int i = 0; i < 4; ++i) {
    const cplx ev = solver.eigenvalues()(i);
    if (std::abs(ev.imag()) > 1e-8) {
      std::ostringstream os;
      os << "concurrence: eigenvalue " << ev << " of rho * rho~ is not real";
      throw std::runtime_error(os.str());
    }
    lambda[i] = std::sqrt(std::max(ev.real(), 0.0));
  }
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  const double c = lambda[0] - lambda[1] - lambda[2] - lambda[3];
  return std::clamp(c, 0.0, 1.0);
}

double eof_from_concurrence(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("concurrence must lie in [0, 1]");
  return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

double entanglement_of_formation(const DensityMatrix& rho) {
  return eof_from_concurrence(concurrence(rho));
}

CorrelationRecord correlation_record(const DensityMatrix& rho, std::optional<double> t,
                                     const OptimizerSettings& settings, Subsystem measured) {
  const Discord d = quantum_discord(rho, measured, settings);
  CorrelationRecord r;
  r.t = t;
  r.mutual_information = d.mutual_information;
  r.classical = d.classical.value;
  r.discord = d.value;
  r.concurrence = concurrence(rho);
  r.eof = eof_from_concurrence(r.concurrence);
  r.converged = d.classical.converged;
  return r;
}

std::optional<std::string> check_record(const CorrelationRecord& r) {
  constexpr double slack = 1e-6;
  std::ostringstream os;
  if (r.mutual_information < -slack) os << "I < 0; ";
  if (r.classical < -slack) os << "CC < 0; ";
  if (r.discord < -slack) os << "D < 0; ";
  if (r.eof < -slack) os << "EoF < 0; ";
  if (!(r.concurrence >= 0.0 && r.concurrence <= 1.0)) os << "C outside [0, 1]; ";
  if (std::abs(r.discord - (r.mutual_information - r.classical)) > 1e-9) os << "D != I - CC; ";
  const std::string msg = os.str();
  if (msg.empty()) return std::nullopt;
  return msg;
}

}  // namespace emitcorr
