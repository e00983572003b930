// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "emitcorr/scenario.hpp"
#include "test_support.hpp"

using namespace emitcorr;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

EvolutionSpec spec_for(const ScenarioConfig& cfg) {
  EvolutionSpec s;
  s.initial_state = DensityMatrix::from_pure(cfg.initial.pure_state());
  s.params = collective_params(cfg).params;
  s.drive = cfg.drive;
  s.t_final = cfg.t_final;
  s.sample_count = cfg.sample_count;
  return s;
}

double population(const DensityMatrix& rho, const PureState& psi) { return rho.population(psi); }

// Preset runs shared by criteria 5 and 6.
std::map<std::string, ScenarioResult>& preset_runs() {
  static std::map<std::string, ScenarioResult> runs = [] {
    std::map<std::string, ScenarioResult> m;
    for (auto id : kFigureIds) m.emplace(std::string(id), run_scenario(figure_preset(id)));
    return m;
  }();
  return runs;
}

Outcome criterion1() {
  Outcome o;
  const auto cfg = figure_preset("fig2a");
  const auto start = Clock::now();
  const auto traj = evolve(spec_for(cfg));
  const double elapsed = seconds_since(start);
  const auto& rho = traj.states.back();
  const double p00 = population(rho, PureState::basis("00"));
  const double pm = population(rho, PureState::psi_minus());
  const double bt = beta_tilde(cfg.plasmonic);
  const double analytic = 0.5 * std::exp(-(1.0 - bt) * 10.0);
  o.require(std::abs(traj.times.back() - 10.0) < 1e-12, "final time is not 10");
  o.require(std::abs(p00 - 0.9166) <= 0.002, fmt("P(00) = %.6f", p00));
  o.require(std::abs(pm - 0.0834) <= 0.002, fmt("P(psi-) = %.6f", pm));
  o.require(std::abs(pm - analytic) <= 1e-6, fmt("P(psi-) %.9f vs analytic %.9f", pm, analytic));
  o.require(elapsed < 1.0, fmt("runtime %.3f s", elapsed));
  if (o.pass) {
    o.detail = fmt("P(00) = %.5f, P(psi-) = %.5f", p00, pm) +
               fmt(", analytic %.5f, runtime %.3f s", analytic, elapsed);
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  const double bt = beta_tilde(figure_preset("fig2a").plasmonic);
  const double ratio = feasibility_check(0.94, 0.9, {}).required_ratio;
  o.require(std::abs(bt - 0.82) <= 0.005, fmt("beta tilde = %.6f", bt));
  o.require(std::abs(ratio - 0.08697) <= 0.0005, fmt("ratio = %.6f", ratio));
  if (o.pass) o.detail = fmt("beta tilde = %.5f, lambda/L = %.5f", bt, ratio);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto cfg = figure_preset("fig2a");
  const auto traj = evolve(spec_for(cfg));
  const auto r = correlation_record(traj.states.back(), traj.times.back(), cfg.optimizer);
  o.require(std::abs(r.concurrence - 0.0834) <= 0.001, fmt("C = %.6f", r.concurrence));
  o.require(std::abs(r.eof - 0.0185) <= 0.001, fmt("EoF = %.6f", r.eof));
  o.require(std::abs(r.mutual_information - 0.0860) <= 0.001, fmt("I = %.6f", r.mutual_information));
  o.require(r.discord > r.eof, fmt("D = %.6f not above EoF = %.6f", r.discord, r.eof));
  o.require(r.classical < r.discord, fmt("CC = %.6f not below D = %.6f", r.classical, r.discord));
  if (o.pass) {
    o.detail = fmt("C = %.5f, EoF = %.5f", r.concurrence, r.eof) +
               fmt(", I = %.5f, D = %.5f", r.mutual_information, r.discord) +
               fmt(", CC = %.5f", r.classical);
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto start = Clock::now();
  const double s = 1.0 / std::sqrt(2.0);
  const std::map<std::string, PureState> bells = {
      {"phi+", PureState({s, 0.0, 0.0, s})},
      {"phi-", PureState({s, 0.0, 0.0, -s})},
      {"psi+", PureState::psi_plus()},
      {"psi-", PureState::psi_minus()},
  };
  for (const auto& [name, psi] : bells) {
    const auto r = correlation_record(DensityMatrix::from_pure(psi), 0.0);
    const bool ok = std::abs(r.mutual_information - 2.0) <= 1e-9 && std::abs(r.classical - 1.0) <= 1e-6 &&
                    std::abs(r.discord - 1.0) <= 1e-6 && std::abs(r.concurrence - 1.0) <= 1e-9 &&
                    std::abs(r.eof - 1.0) <= 1e-9;
    o.require(ok, "Bell state " + name);
  }

  std::mt19937_64 rng(2024);
  for (int k = 0; k < 10; ++k) {
    const auto rho = DensityMatrix::product(emitcorr::testing::random_qubit_state(rng),
                                            emitcorr::testing::random_qubit_state(rng));
    const auto r = correlation_record(rho, 0.0);
    const double worst = std::max({std::abs(r.mutual_information), std::abs(r.classical), std::abs(r.discord),
                                   r.concurrence, r.eof});
    o.require(worst <= 1e-6, fmt("product state measure %.3g", worst));
  }

  // Bell-diagonal closed form with c = 1/2.
  const double werner_oracle = 0.75 * std::log2(1.5) + 0.25 * std::log2(0.5);
  const Eigen::Vector4cd k = PureState::psi_minus().ket();
  const DensityMatrix werner(0.5 * Matrix4c(k * k.adjoint()) + 0.5 * Matrix4c::Identity() / 4.0);
  const double cc = classical_correlation(werner).value;
  o.require(std::abs(cc - werner_oracle) <= 1e-4, fmt("Werner CC = %.6f vs %.6f", cc, werner_oracle));

  double worst_pure = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto rho = DensityMatrix::from_pure(emitcorr::testing::random_pure(rng));
    const double sb = von_neumann_entropy(partial_trace(rho, Subsystem::B));
    worst_pure = std::max(worst_pure, std::abs(quantum_discord(rho).value - sb));
  }
  o.require(worst_pure <= 1e-4, fmt("pure-state |D - S_B| = %.3g", worst_pure));

  const double elapsed = seconds_since(start);
  o.require(elapsed < 30.0, fmt("runtime %.2f s", elapsed));
  if (o.pass) {
    o.detail = fmt("Werner CC = %.5f, max pure |D - S_B| = %.2g", cc, worst_pure) +
               fmt(", runtime %.2f s", elapsed);
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  double worst_trace = 0.0, worst_herm = 0.0, lowest_eig = 1.0, worst_identity = 0.0;
  for (const auto& [id, result] : preset_runs()) {
    for (const auto& rho : result.trajectory.states) {
      const auto report = validate_state(rho.matrix());
      worst_trace = std::max(worst_trace, report.trace_defect);
      worst_herm = std::max(worst_herm, report.hermiticity_defect);
      lowest_eig = std::min(lowest_eig, report.min_eigenvalue);
    }
    for (const auto& r : result.records) {
      worst_identity =
          std::max(worst_identity, std::abs(r.discord - (r.mutual_information - r.classical)));
    }
  }
  o.require(worst_trace <= 1e-9, fmt("trace defect %.3g", worst_trace));
  o.require(worst_herm <= 1e-9, fmt("Hermiticity defect %.3g", worst_herm));
  o.require(lowest_eig >= -1e-8, fmt("min eigenvalue %.3g", lowest_eig));
  o.require(worst_identity <= 1e-12, fmt("|D - (I - CC)| = %.3g", worst_identity));
  if (o.pass) {
    o.detail = fmt("8 presets, trace defect %.2g, Hermiticity defect %.2g", worst_trace, worst_herm) +
               fmt(", min eigenvalue %.2g, |D - (I - CC)| %.2g", lowest_eig, worst_identity);
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  int c_above_i = 0;
  for (const auto& r : preset_runs().at("fig1b").records) {
    if (r.concurrence > r.mutual_information) ++c_above_i;
  }
  int eof_violations = 0;
  for (const auto& [id, result] : preset_runs()) {
    for (const auto& r : result.records) {
      if (r.eof > r.concurrence) ++eof_violations;
    }
  }
  o.require(c_above_i > 0, "no fig1b sample with C > I");
  o.require(eof_violations == 0, fmt("%g samples with EoF > C", eof_violations));
  if (o.pass) o.detail = fmt("fig1b samples with C > I: %g of 500, EoF <= C everywhere", c_above_i);
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto p = collective_params(figure_preset("fig1b")).params;
  o.require(std::abs(p.v_coherent + 0.0338) <= 1e-4, fmt("V = %.6f", p.v_coherent));
  o.require(std::abs(p.gamma_collective + 0.3040) <= 1e-4, fmt("gamma = %.6f", p.gamma_collective));
  o.require(p.gamma_collective < 0.0, "gamma is not negative");
  if (o.pass) o.detail = fmt("V = %.6f, gamma = %.6f", p.v_coherent, p.gamma_collective);
  return o;
}

Outcome criterion8() {
  Outcome o;
  auto cfg = figure_preset("fig3a");
  cfg.t_final = 50.0;
  const auto spec = spec_for(cfg);
  const auto traj = evolve(spec);
  const auto& rho = traj.states.back();
  const Matrix4c h = build_hamiltonian(spec.params, spec.drive);
  const double rate = emitcorr::testing::max_abs(lindblad_rhs(rho, h, spec.params));
  const auto at50 = correlation_record(rho, 50.0, cfg.optimizer);
  const auto ss = run_steady(cfg).record;
  const double diff = std::max({std::abs(at50.mutual_information - ss.mutual_information),
                                std::abs(at50.classical - ss.classical), std::abs(at50.discord - ss.discord),
                                std::abs(at50.eof - ss.eof), std::abs(at50.concurrence - ss.concurrence)});
  o.require(rate <= 1e-6, fmt("max |drho/dt| at t = 50 is %.3g", rate));
  o.require(diff <= 1e-4, fmt("record differs from steady state by %.3g", diff));
  o.require(ss.discord > 0.0, "D_ss is not positive");
  o.require(ss.discord > ss.eof, fmt("D_ss = %.6f not above EoF_ss = %.6f", ss.discord, ss.eof));
  if (o.pass) {
    o.detail = fmt("max |drho/dt| = %.2g, record gap %.2g", rate, diff) +
               fmt(", D_ss = %.5f, EoF_ss = %.5f", ss.discord, ss.eof);
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"fig2a mixed state populations", criterion1},
      {"beta tilde and feasibility ratio", criterion2},
      {"correlations at the fig2a state", criterion3},
      {"analytic metric suite", criterion4},
      {"trajectory invariants on all presets", criterion5},
      {"concurrence above mutual information", criterion6},
      {"free-space coupling at fig1b", criterion7},
      {"driven steady state plateau", criterion8},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    if (!o.pass) ++failures;
    std::printf("criterion %d %s: %s (%s)\n", n, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  std::printf("%d of %d criteria passed\n", n - failures, n);
  return failures == 0 ? 0 : 1;
}
