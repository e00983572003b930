#include "emitcorr/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace emitcorr {

namespace {

using StateVec = Eigen::Matrix<cplx, 16, 1>;

// Single-emitter operators embedded in the two-qubit space.
struct EmitterOps {
  std::array<Matrix4c, 2> lower;  // s-_i
  std::array<Matrix4c, 2> raise;  // s+_i
};

const EmitterOps& emitter_ops() {
  static const EmitterOps ops = [] {
    EmitterOps o;
    const ComplexMatrix id = ops::identity2();
    o.lower[0] = kron(ops::sigma_minus(), id);
    o.lower[1] = kron(id, ops::sigma_minus());
    o.raise[0] = kron(ops::sigma_plus(), id);
    o.raise[1] = kron(id, ops::sigma_plus());
    return o;
  }();
  return ops;
}

double rate(const CollectiveParams& p, int i, int j) {
  return i == j ? p.gamma_individual : p.gamma_collective;
}

StateVec vec(const Matrix4c& m) { return Eigen::Map<const StateVec>(m.data()); }

Matrix4c unvec(const StateVec& v) { return Eigen::Map<const Matrix4c>(v.data()); }

// vec(A X B) = (B^T kron A) vec(X)
Liouvillian sandwich(const Matrix4c& left, const Matrix4c& right) {
  return Liouvillian(kron(right.transpose(), left));
}

}  // namespace

void DriveConfig::validate() const {
  for (double x : {amplitude1, amplitude2, detuning1, detuning2}) {
    if (!std::isfinite(x)) throw std::invalid_argument("drive parameters must be finite");
  }
}

void EvolutionSpec::validate() const {
  validate_rates(params);
  drive.validate();
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw std::invalid_argument("t_final must be positive");
  }
  if (sample_count < 2) throw std::invalid_argument("sample_count must be at least 2");
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2) || !(abs_tol > 0.0 && abs_tol <= 1e-2)) {
    throw std::invalid_argument("integrator tolerances must lie in (0, 1e-2]");
  }
}

void validate_rates(const CollectiveParams& p) {
  if (!(p.gamma_individual > 0.0) || !std::isfinite(p.gamma_individual)) {
    throw std::invalid_argument("individual decay rate must be positive");
  }
  if (!std::isfinite(p.gamma_collective) || !std::isfinite(p.v_coherent)) {
    throw std::invalid_argument("collective parameters must be finite");
  }
  if (std::abs(p.gamma_collective) > p.gamma_individual * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "|gamma| = " << std::abs(p.gamma_collective) << " exceeds the individual rate "
       << p.gamma_individual << ": dissipator is unphysical";
    throw std::invalid_argument(os.str());
  }
}

Matrix4c build_hamiltonian(const CollectiveParams& p, const DriveConfig& d) {
  const auto& e = emitter_ops();
  const std::array<double, 2> amplitude = {d.amplitude1, d.amplitude2};
  const std::array<double, 2> detuning = {d.detuning1, d.detuning2};

  Matrix4c h = Matrix4c::Zero();
  // (sx sx + sy sy)/2 = s+ s- + s- s+
  h += p.v_coherent * (e.raise[0] * e.lower[1] + e.lower[0] * e.raise[1]);
  for (int i = 0; i < 2; ++i) {
    h += amplitude[i] * (e.raise[i] + e.lower[i]);
    h -= detuning[i] * e.raise[i] * e.lower[i];
  }
  return h;
}

Matrix4c lindblad_rhs(const Matrix4c& rho, const Matrix4c& h, const CollectiveParams& p) {
  validate_rates(p);
  const auto& e = emitter_ops();
  const cplx minus_i(0.0, -1.0);
  Matrix4c out = minus_i * (h * rho - rho * h);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double g = rate(p, i, j);
      if (g == 0.0) continue;
      const Matrix4c pm = e.raise[i] * e.lower[j];
      out -= 0.5 * g * (rho * pm + pm * rho - 2.0 * e.lower[i] * rho * e.raise[j]);
    }
  }
  return out;
}

Liouvillian build_liouvillian(const Matrix4c& h, const CollectiveParams& p) {
  validate_rates(p);
  const auto& e = emitter_ops();
  const Matrix4c id = Matrix4c::Identity();
  const cplx minus_i(0.0, -1.0);
  Liouvillian l = minus_i * (sandwich(h, id) - sandwich(id, h));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double g = rate(p, i, j);
      if (g == 0.0) continue;
      const Matrix4c pm = e.raise[i] * e.lower[j];
      l -= 0.5 * g * (sandwich(id, pm) + sandwich(pm, id) - 2.0 * sandwich(e.lower[i], e.raise[j]));
    }
  }
  return l;
}

namespace {

// Dormand-Prince 5(4) tableau. The generator is autonomous, so the
// stage nodes c_i never enter.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (difference between the 5th- and embedded 4th-order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

class DormandPrince {
 public:
  DormandPrince(const Liouvillian& generator, double rel_tol, double abs_tol)
      : l_(generator), rel_tol_(rel_tol), abs_tol_(abs_tol) {}

  // Advances y from t to t_end. h carries the step-size proposal across
  // calls.
  void advance(StateVec& y, double t, double t_end, double& h) {
    StateVec k1 = l_ * y;
    while (t < t_end) {
      const double remaining = t_end - t;
      const bool last = h >= remaining;
      const double step = last ? remaining : h;
      const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
      if (step < h_min) {
        std::ostringstream os;
        os << "integrator step size underflow at t = " << t << " (h = " << step << ")";
        throw StepSizeUnderflow(os.str());
      }

      const StateVec k2 = l_ * (y + step * a21 * k1);
      const StateVec k3 = l_ * (y + step * (a31 * k1 + a32 * k2));
      const StateVec k4 = l_ * (y + step * (a41 * k1 + a42 * k2 + a43 * k3));
      const StateVec k5 = l_ * (y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const StateVec k6 = l_ * (y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const StateVec y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const StateVec k7 = l_ * y_new;
      const StateVec err =
          step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double sum = 0.0;
      for (int i = 0; i < 16; ++i) {
        const double scale = abs_tol_ + rel_tol_ * std::max(std::abs(y(i)), std::abs(y_new(i)));
        const double r = std::abs(err(i)) / scale;
        sum += r * r;
      }
      const double err_norm = std::sqrt(sum / 16.0);

      // A NaN norm is treated as a maximal rejection.
      double factor = 0.2;
      if (err_norm == 0.0) factor = 5.0;
      else if (std::isfinite(err_norm)) factor = std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
      if (err_norm <= 1.0) {
        t = last ? t_end : t + step;
        y = y_new;
        k1 = k7;
        // A clipped final step says nothing about the natural step size.
        h = last ? std::max(h, step * factor) : step * factor;
      } else {
        h = step * std::min(factor, 1.0);
      }
    }
  }

 private:
  const Liouvillian& l_;
  double rel_tol_;
  double abs_tol_;
};

DensityMatrix emit_state(const Matrix4c& raw, double t) {
  const double trace_defect = std::abs(raw.trace() - cplx(1.0, 0.0));
  if (trace_defect > tol::trace) {
    std::ostringstream os;
    os << "trace drift " << trace_defect << " at t = " << t;
    throw std::runtime_error(os.str());
  }
  Matrix4c m = 0.5 * (raw + raw.adjoint());
  m /= m.trace().real();
  try {
    return DensityMatrix(m);
  } catch (const std::invalid_argument& ex) {
    std::ostringstream os;
    os << "state validation failed at t = " << t << ": " << ex.what();
    throw std::runtime_error(os.str());
  }
}

}  // namespace

Trajectory evolve(const EvolutionSpec& spec) {
  spec.validate();
  const Liouvillian l = build_liouvillian(build_hamiltonian(spec.params, spec.drive), spec.params);
  DormandPrince stepper(l, spec.rel_tol, spec.abs_tol);

  Trajectory traj;
  traj.times.reserve(spec.sample_count);
  traj.states.reserve(spec.sample_count);

  StateVec y = vec(spec.initial_state.matrix());
  const double dt = spec.t_final / (spec.sample_count - 1);
  double h = std::min(dt, 1e-2 / std::max(1.0, l.cwiseAbs().maxCoeff()));

  traj.times.push_back(0.0);
  traj.states.push_back(spec.initial_state);
  double t = 0.0;
  for (int k = 1; k < spec.sample_count; ++k) {
    const double t_next = k == spec.sample_count - 1 ? spec.t_final : spec.t_final * k / (spec.sample_count - 1);
    stepper.advance(y, t, t_next, h);
    t = t_next;
    traj.times.push_back(t);
    traj.states.push_back(emit_state(unvec(y), t));
  }
  return traj;
}

DensityMatrix steady_state(const CollectiveParams& p, const DriveConfig& d) {
  validate_rates(p);
  d.validate();
  const Matrix4c h = build_hamiltonian(p, d);
  const Liouvillian l = build_liouvillian(h, p);

  Eigen::JacobiSVD<Liouvillian> svd(l, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();  // decreasing
  const double threshold = 1e-9 * std::max(1.0, sv(0));
  int null_dim = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) <= threshold) ++null_dim;
  }
  if (null_dim == 0) {
    throw std::runtime_error("steady_state: generator has no null space");
  }
  if (null_dim > 1) {
    std::ostringstream os;
    os << "steady_state: null space of the generator has dimension " << null_dim
       << "; the stationary state is not unique";
    throw SteadyStateAmbiguity(os.str(), null_dim);
  }

  Matrix4c m = unvec(svd.matrixV().col(15));
  const cplx tr = m.trace();
  if (std::abs(tr) < 1e-12) {
    throw std::runtime_error("steady_state: null vector is traceless");
  }
  m /= tr;
  m = 0.5 * (m + m.adjoint());

  const double residual = lindblad_rhs(m, h, p).cwiseAbs().maxCoeff();
  if (residual > 1e-10) {
    std::ostringstream os;
    os << "steady_state: residual " << residual << " exceeds 1e-10";
    throw std::runtime_error(os.str());
  }
  return DensityMatrix(m);
}

}  // namespace emitcorr
