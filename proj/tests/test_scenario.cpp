#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "emitcorr/scenario.hpp"
#include "test_support.hpp"

using namespace emitcorr;
using doctest::Approx;
using emitcorr::testing::h2;

namespace {

constexpr const char* kFig1aText = R"(# two emitters, direct coupling
coupling_model = direct
V = 7
gamma = 0.2
initial = 10
t_final = 5
)";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

ScenarioConfig shortened(ScenarioConfig cfg, double t_final, int samples) {
  cfg.t_final = t_final;
  cfg.sample_count = samples;
  return cfg;
}

void check_records_close(const CorrelationRecord& a, const CorrelationRecord& b, double tol) {
  CHECK(std::abs(a.mutual_information - b.mutual_information) <= tol);
  CHECK(std::abs(a.classical - b.classical) <= tol);
  CHECK(std::abs(a.discord - b.discord) <= tol);
  CHECK(std::abs(a.eof - b.eof) <= tol);
  CHECK(std::abs(a.concurrence - b.concurrence) <= tol);
}

}  // namespace

TEST_CASE("minimal direct config") {
  const auto cfg = parse_config(kFig1aText);
  CHECK(cfg.model == CouplingModel::direct);
  CHECK(cfg.direct.v_coherent == 7.0);
  CHECK(cfg.direct.gamma_collective == 0.2);
  CHECK(cfg.initial.kind == InitialState::Kind::basis10);
  CHECK(cfg.t_final == 5.0);
  CHECK(cfg.sample_count == 500);
  CHECK(cfg.measured == Subsystem::B);
  CHECK_FALSE(cfg.drive.driven());
  CHECK(cfg == figure_preset("fig1a"));
}

TEST_CASE("sections and top-level block keys are equivalent") {
  const auto a = parse_config("coupling_model = direct\ninitial = 10\nt_final = 5\n[direct]\nV = 7\ngamma = 0.2\n");
  CHECK(a == parse_config(kFig1aText));
  CHECK(error_line("coupling_model = direct\n[drive]\nV = 7\n") == 3);
}

TEST_CASE("missing t_final names the key") {
  const std::string text = "coupling_model = direct\nV = 7\ngamma = 0.2\ninitial = 10\n";
  CHECK(error_message(text).find("t_final") != std::string::npos);
}

TEST_CASE("two coupling blocks conflict") {
  const std::string text =
      "coupling_model = plasmonic\ninitial = 10\nt_final = 10\n"
      "[free_space]\nmu1 = 0, 0, 1\nmu2 = 0, 0, 1\nr12_hat = 1, 0, 0\nseparation_over_wavelength = 0.75\n"
      "[plasmonic]\nbeta = 0.94\nL_nm = 2000\nlambda_pl_nm = 542\nzeta = 1\n";
  CHECK(error_message(text).find("conflict") != std::string::npos);
  CHECK(error_line(text) > 0);
}

TEST_CASE("parse errors name the offending line") {
  CHECK(error_line(std::string(kFig1aText) + "colour = blue\n") == 7);
  CHECK(error_line("coupling_model = direct\nV = seven\ngamma = 0.2\ninitial = 10\nt_final = 5\n") == 2);
  CHECK(error_line(std::string(kFig1aText) + "V = 8\n") == 7);
  CHECK(error_line("coupling_model = direct\nV = 7\ngamma = 0.2\ninitial = alpha:1.5\nt_final = 5\n") == 4);
  CHECK(error_line("coupling_model = direct\nV = 7\ngamma = 0.2\ninitial = 10\nt_final = 0\n") == 5);
  CHECK(error_line("coupling_model = direct\nV = 7\ngamma = 0.2\ninitial = 10\nalpha = 0.3\nt_final = 5\n") == 5);
  CHECK(error_line("coupling_model = direct\n[nonsense]\n") == 2);
  CHECK_THROWS_AS(load_config("/nonexistent/emitcorr.cfg"), std::runtime_error);
}

TEST_CASE("initial state labels") {
  CHECK(InitialState::parse("psi_minus").pure_state().ket().isApprox(PureState::psi_minus().ket()));
  const auto a = InitialState::parse("alpha:0.25");
  CHECK(a.kind == InitialState::Kind::alpha);
  CHECK(a.alpha == 0.25);
  CHECK(InitialState::parse(a.label()) == a);
  CHECK_THROWS(InitialState::parse("alpha:-0.1"));
  CHECK_THROWS(InitialState::parse("12"));
}

TEST_CASE("figure presets carry the caption parameters") {
  const auto f2a = figure_preset("fig2a");
  CHECK(f2a.model == CouplingModel::plasmonic);
  CHECK(f2a.plasmonic.beta == 0.94);
  CHECK(f2a.plasmonic.propagation_length_nm == 2000.0);
  CHECK(f2a.plasmonic.plasmon_wavelength_nm == 542.0);
  CHECK(f2a.plasmonic.zeta == 1.0);
  CHECK_FALSE(f2a.drive.driven());
  CHECK(f2a.initial.kind == InitialState::Kind::basis10);

  const auto f3a = figure_preset("fig3a");
  CHECK(f3a.drive.amplitude1 == 0.2);
  CHECK(f3a.drive.amplitude2 == -0.2);
  CHECK(f3a.initial.kind == InitialState::Kind::basis01);
  CHECK(f3a.plasmonic.zeta == 1.0);

  const auto f1b = figure_preset("fig1b");
  CHECK(f1b.model == CouplingModel::free_space);
  CHECK(f1b.free_space.separation_over_wavelength == 0.75);
  CHECK(f1b.free_space.mu1_hat == f1b.free_space.mu2_hat);
  const auto& mu = f1b.free_space.mu1_hat;
  const auto& r = f1b.free_space.r12_hat;
  CHECK(mu[0] * r[0] + mu[1] * r[1] + mu[2] * r[2] == 0.0);

  CHECK(figure_preset("fig2b").plasmonic.zeta == 0.75);
  CHECK(figure_preset("fig2b").drive.amplitude1 == 0.2);
  CHECK(figure_preset("fig2b").drive.amplitude2 == 0.2);
  CHECK_FALSE(figure_preset("fig2b_inset").drive.driven());
  CHECK(figure_preset("fig3c").initial == InitialState::parse("alpha:1"));
  CHECK(figure_preset("fig1a").t_final == 5.0);
  CHECK(figure_preset("fig3c").t_final == 10.0);
  CHECK_THROWS_AS(figure_preset("fig4"), std::invalid_argument);

  const auto sweep = figure_sweep("fig3b");
  REQUIRE(sweep.has_value());
  CHECK(sweep->path == "initial_state.alpha");
  CHECK(sweep->values.size() == 11);
  CHECK_FALSE(figure_sweep("fig2a").has_value());
}

TEST_CASE("render is the inverse of parse for every preset") {
  for (auto id : kFigureIds) {
    const auto cfg = figure_preset(id);
    CAPTURE(id);
    CHECK(parse_config(render_config(cfg)) == cfg);
  }
  auto odd = figure_preset("fig1b");
  odd.free_space.separation_over_wavelength = 0.1 + 0.2;
  odd.free_space.mu1_hat = {0.6, 0.0, 0.8};
  odd.measured = Subsystem::A;
  odd.optimizer.refine_tol = 3.3e-7;
  CHECK(parse_config(render_config(odd)) == odd);
}

TEST_CASE("collective parameters per model") {
  CHECK(collective_params(figure_preset("fig1a")).params == CollectiveParams::direct(7.0, 0.2));
  const auto pl = collective_params(figure_preset("fig2a")).params;
  CHECK(pl.gamma_collective == Approx(0.94 * std::exp(-542.0 / 4000.0)));
  auto close = figure_preset("fig2a");
  close.plasmonic.zeta = 0.2;
  CHECK(collective_params(close).warnings.size() == 1);
}

TEST_CASE("fig2a reproduces the quoted mixed state at t = 10") {
  const auto result = run_scenario(shortened(figure_preset("fig2a"), 10.0, 11));
  REQUIRE(result.records.size() == 11);
  const auto& last = result.records.back();
  REQUIRE(last.t.has_value());
  CHECK(*last.t == 10.0);
  CHECK(last.concurrence == Approx(0.0834).epsilon(0.001 / 0.0834));
  CHECK(last.mutual_information == Approx(0.0860).epsilon(0.001 / 0.086));
  CHECK(last.discord > last.eof);
  CHECK(last.classical < last.discord);
}

TEST_CASE("fig1a decorrelates by t = 5") {
  const auto result = run_scenario(shortened(figure_preset("fig1a"), 5.0, 6));
  const auto& last = result.records.back();
  for (double x : {last.mutual_information, last.classical, last.discord, last.eof, last.concurrence}) {
    CHECK(x < 0.05);
  }
}

TEST_CASE("t_final of zero is rejected") {
  auto cfg = figure_preset("fig2a");
  cfg.t_final = 0.0;
  CHECK_THROWS(run_scenario(cfg));
}

TEST_CASE("CSV output is deterministic and re-reads with valid records") {
  const auto cfg = shortened(figure_preset("fig3a"), 4.0, 9);
  std::ostringstream a, b;
  write_csv(a, run_scenario(cfg).records);
  write_csv(b, run_scenario(cfg).records);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind(std::string(kCsvHeader) + "\n", 0) == 0);

  std::istringstream in(a.str());
  const auto blocks = read_csv(in);
  REQUIRE(blocks.size() == 1);
  CHECK_FALSE(blocks[0].tag.has_value());
  REQUIRE(blocks[0].records.size() == 9);
  const auto original = run_scenario(cfg).records;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const auto& r = blocks[0].records[i];
    CHECK_FALSE(check_record(r).has_value());
    // 17 significant digits round-trip exactly.
    CHECK(r.t == original[i].t);
    CHECK(r.discord == original[i].discord);
  }

  std::istringstream bad("t,I,CC,D,EoF,C\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(bad), std::runtime_error);
}

TEST_CASE("sweep grids") {
  CHECK(SweepSpec::parse_grid("0, 0.5,1") == std::vector<double>{0.0, 0.5, 1.0});
  const auto g = SweepSpec::parse_grid("0:1:5");
  REQUIRE(g.size() == 5);
  CHECK(g[1] == Approx(0.25));
  CHECK(g[4] == 1.0);
  CHECK_THROWS(SweepSpec::parse_grid("0.3"));
  CHECK_THROWS(SweepSpec::parse_grid("0:1:1"));
  CHECK_THROWS(SweepSpec::parse_grid("a,b"));
}

TEST_CASE("alpha sweep starts from the binary-entropy discord") {
  const auto cfg = shortened(figure_preset("fig3b"), 1.0, 2);
  const SweepSpec sweep{"initial_state.alpha", {1.0, 0.25, 0.0, 0.75, 0.5}};
  const auto blocks = run_sweep(cfg, sweep);
  REQUIRE(blocks.size() == 5);
  const std::array<double, 5> expected = {0.0, h2(0.25), 1.0, h2(0.75), 0.0};
  CHECK(h2(0.25) == Approx(0.8113).epsilon(1e-4));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    CHECK(blocks[i].value == 0.25 * static_cast<double>(i));
    const auto& first = blocks[i].result.records.front();
    CHECK(*first.t == 0.0);
    CHECK(first.discord == Approx(expected[i]).epsilon(1e-6));
  }

  std::ostringstream os;
  write_sweep_csv(os, sweep.path, blocks);
  std::istringstream in(os.str());
  const auto back = read_csv(in);
  REQUIRE(back.size() == 5);
  CHECK(*back[2].tag == "initial_state.alpha = 0.5");
}

TEST_CASE("amplitude sweep reaches a plateau in each block") {
  const auto cfg = shortened(figure_preset("fig3a"), 50.0, 3);
  const auto blocks = run_sweep(cfg, {"drive.amplitude", {0.4, 0.2}});
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].value == 0.2);
  for (const auto& b : blocks) {
    const auto driven = apply_sweep_value(cfg, "drive.amplitude", b.value);
    CHECK(driven.drive.amplitude1 == b.value);
    CHECK(driven.drive.amplitude2 == -b.value);
    check_records_close(b.result.records.back(), run_steady(driven).record, 1e-4);
  }
}

TEST_CASE("sweep paths must exist") {
  const auto cfg = figure_preset("fig3a");
  CHECK_THROWS_AS(run_sweep(cfg, {"drive.colour", {0.1, 0.2}}), ConfigError);
  CHECK_THROWS_AS(apply_sweep_value(cfg, "initial_state.alpha", 0.5), ConfigError);
  CHECK_THROWS_AS(apply_sweep_value(cfg, "direct.V", 1.0), ConfigError);
  CHECK(apply_sweep_value(cfg, "plasmonic.zeta", 0.75).plasmonic.zeta == 0.75);
  CHECK_THROWS(run_sweep(cfg, {"drive.amplitude1", {0.1}}));
}

TEST_CASE("steady-state records") {
  const auto f3a = run_steady(figure_preset("fig3a"));
  CHECK(f3a.record.discord > f3a.record.eof);
  CHECK(f3a.record.eof > 0.0);
  CHECK_FALSE(f3a.record.t.has_value());

  const auto rest = run_steady(figure_preset("fig2a")).record;
  for (double x : {rest.mutual_information, rest.classical, rest.discord, rest.eof, rest.concurrence}) {
    CHECK(std::abs(x) <= 1e-9);
  }

  const auto f2b = figure_preset("fig2b");
  const auto traj = run_scenario(shortened(f2b, 50.0, 3));
  check_records_close(traj.records.back(), run_steady(f2b).record, 1e-4);

  std::ostringstream os;
  write_csv(os, {f3a.record});
  CHECK(os.str().find("\n,") != std::string::npos);
}

TEST_CASE("flipping both drive signs leaves the correlations unchanged") {
  const auto cfg = shortened(figure_preset("fig3b"), 4.0, 5);
  auto flipped = cfg;
  flipped.drive.amplitude1 = -cfg.drive.amplitude1;
  flipped.drive.amplitude2 = -cfg.drive.amplitude2;
  const auto a = run_scenario(cfg).records;
  const auto b = run_scenario(flipped).records;
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) check_records_close(a[i], b[i], 1e-6);
}
