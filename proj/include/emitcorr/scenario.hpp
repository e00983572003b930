#pragma once

// Scenario configuration, figure presets and CSV output for the runner.
//
// Config files are line-oriented `key = value` with `#` comments and
// optional section headers ([direct], [free_space], [plasmonic], [drive],
// [optimizer]). Keys of a block may also appear before any section
// header; keys under a section must belong to it.

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "emitcorr/correlations.hpp"
#include "emitcorr/coupling.hpp"
#include "emitcorr/dynamics.hpp"

namespace emitcorr {

enum class CouplingModel { direct, free_space, plasmonic };

std::string_view to_string(CouplingModel m);

struct InitialState {
  enum class Kind { basis00, basis01, basis10, basis11, psi_plus, psi_minus, alpha };
  Kind kind = Kind::basis10;
  double alpha = 0.0;  // used only when kind == alpha

  /// "00", "01", "10", "11", "psi_plus", "psi_minus", "alpha:<x>"
  static InitialState parse(std::string_view text);
  std::string label() const;
  PureState pure_state() const;

  bool operator==(const InitialState&) const = default;
};

struct ScenarioConfig {
  CouplingModel model = CouplingModel::direct;
  CollectiveParams direct;
  DipoleGeometry free_space;
  PlasmonWaveguide plasmonic;
  DriveConfig drive;
  InitialState initial;
  double t_final = 10.0;
  int sample_count = 500;
  Subsystem measured = Subsystem::B;
  OptimizerSettings optimizer;

  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parse or validation failure. line() is 0 when the problem is not tied
/// to a single line (e.g. a missing key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// Canonical text form; parse_config(render_config(c)) == c.
std::string render_config(const ScenarioConfig& cfg);

/// Collective parameters of the selected coupling model, with any model
/// warnings.
CouplingResult collective_params(const ScenarioConfig& cfg);

struct SweepSpec {
  std::string path;
  std::vector<double> values;

  /// "v1,v2,..." or "start:stop:count".
  static std::vector<double> parse_grid(std::string_view text);
  void validate() const;
};

/// Throws ConfigError when the path does not name a parameter of cfg.
ScenarioConfig apply_sweep_value(const ScenarioConfig& cfg, std::string_view path, double value);

inline constexpr std::array<std::string_view, 8> kFigureIds = {
    "fig1a", "fig1b", "fig2a", "fig2b", "fig2b_inset", "fig3a", "fig3b", "fig3c"};

/// Figure-caption parameters. fig1a covers Gamma t in [0, 5]; every
/// other preset covers [0, 10]. fig3b is the alpha = 1/2 member of its
/// sweep family (see figure_sweep).
ScenarioConfig figure_preset(std::string_view id);

/// Default sweep attached to a preset, if any (fig3b: alpha in 0, 0.1, ..., 1).
std::optional<SweepSpec> figure_sweep(std::string_view id);

struct ScenarioResult {
  Trajectory trajectory;
  std::vector<CorrelationRecord> records;
  std::vector<std::string> warnings;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

struct SweepBlock {
  double value = 0.0;
  ScenarioResult result;
};

std::vector<SweepBlock> run_sweep(const ScenarioConfig& cfg, const SweepSpec& sweep);

struct SteadyResult {
  DensityMatrix state;
  CorrelationRecord record;
  std::vector<std::string> warnings;
};

SteadyResult run_steady(const ScenarioConfig& cfg);

/// Records for each state, evaluated concurrently; output order matches
/// input order.
std::vector<CorrelationRecord> correlation_records(const std::vector<double>& times,
                                                   const std::vector<DensityMatrix>& states,
                                                   const OptimizerSettings& settings,
                                                   Subsystem measured);

// CSV: header "t,I,CC,D,EoF,C", 17 significant digits, '\n' line ends.
inline constexpr std::string_view kCsvHeader = "t,I,CC,D,EoF,C";

std::string format_double(double x);
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const CorrelationRecord& r);
void write_csv(std::ostream& os, const std::vector<CorrelationRecord>& records);
void write_sweep_csv(std::ostream& os, const std::string& path,
                     const std::vector<SweepBlock>& blocks);

struct CsvBlock {
  std::optional<std::string> tag;  // comment line text after "# "
  std::vector<CorrelationRecord> records;
};

/// Reads CSV written by the functions above. Throws std::runtime_error on
/// malformed input.
std::vector<CsvBlock> read_csv(std::istream& is);

}  // namespace emitcorr
