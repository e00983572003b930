#include "emitcorr/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace emitcorr {

namespace {

enum class Block { general, direct, free_space, plasmonic, drive, optimizer };

const std::map<std::string, Block, std::less<>>& key_blocks() {
  static const std::map<std::string, Block, std::less<>> keys = {
      {"coupling_model", Block::general},
      {"initial", Block::general},
      {"alpha", Block::general},
      {"t_final", Block::general},
      {"sample_count", Block::general},
      {"measured_qubit", Block::general},
      {"V", Block::direct},
      {"gamma", Block::direct},
      {"mu1", Block::free_space},
      {"mu2", Block::free_space},
      {"r12_hat", Block::free_space},
      {"separation_over_wavelength", Block::free_space},
      {"refractive_index", Block::free_space},
      {"beta", Block::plasmonic},
      {"L_nm", Block::plasmonic},
      {"lambda_pl_nm", Block::plasmonic},
      {"zeta", Block::plasmonic},
      {"amplitude1", Block::drive},
      {"amplitude2", Block::drive},
      {"detuning1", Block::drive},
      {"detuning2", Block::drive},
      {"grid_theta", Block::optimizer},
      {"grid_phi", Block::optimizer},
      {"refine_tol", Block::optimizer},
  };
  return keys;
}

std::optional<Block> section_block(std::string_view name) {
  if (name == "direct") return Block::direct;
  if (name == "free_space") return Block::free_space;
  if (name == "plasmonic") return Block::plasmonic;
  if (name == "drive") return Block::drive;
  if (name == "optimizer") return Block::optimizer;
  return std::nullopt;
}

std::string_view block_name(Block b) {
  switch (b) {
    case Block::general: return "general";
    case Block::direct: return "direct";
    case Block::free_space: return "free_space";
    case Block::plasmonic: return "plasmonic";
    case Block::drive: return "drive";
    case Block::optimizer: return "optimizer";
  }
  return "?";
}

bool is_model_block(Block b) {
  return b == Block::direct || b == Block::free_space || b == Block::plasmonic;
}

CouplingModel model_of(Block b) {
  if (b == Block::free_space) return CouplingModel::free_space;
  if (b == Block::plasmonic) return CouplingModel::plasmonic;
  return CouplingModel::direct;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

std::optional<int> to_int(std::string_view s) {
  s = trim(s);
  int x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

struct Entry {
  std::string value;
  int line = 0;
};

double require_double(const Entry& e, std::string_view key) {
  const auto x = to_double(e.value);
  if (!x || !std::isfinite(*x)) {
    throw ConfigError(e.line, "key '" + std::string(key) + "' expects a real number, got '" +
                                  e.value + "'");
  }
  return *x;
}

int require_int(const Entry& e, std::string_view key) {
  const auto x = to_int(e.value);
  if (!x) {
    throw ConfigError(e.line,
                      "key '" + std::string(key) + "' expects an integer, got '" + e.value + "'");
  }
  return *x;
}

Vec3 require_vec3(const Entry& e, std::string_view key) {
  Vec3 v{};
  std::string_view rest = e.value;
  for (int i = 0; i < 3; ++i) {
    const auto comma = rest.find(',');
    const std::string_view part = i < 2 ? rest.substr(0, comma) : rest;
    const auto x = to_double(part);
    if ((i < 2 && comma == std::string_view::npos) || !x) {
      throw ConfigError(e.line, "key '" + std::string(key) +
                                    "' expects three comma-separated reals, got '" + e.value + "'");
    }
    v[i] = *x;
    if (i < 2) rest = rest.substr(comma + 1);
  }
  return v;
}

// Shortest text that parses back to the same double.
std::string format_shortest(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string format_vec3(const Vec3& v) {
  return format_shortest(v[0]) + ", " + format_shortest(v[1]) + ", " + format_shortest(v[2]);
}

// Rethrow a domain validation failure as a config error pointing at the
// line that introduced the offending block.
template <typename F>
void checked(int line, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(line, ex.what());
  }
}

}  // namespace

std::string_view to_string(CouplingModel m) {
  switch (m) {
    case CouplingModel::direct: return "direct";
    case CouplingModel::free_space: return "free_space";
    case CouplingModel::plasmonic: return "plasmonic";
  }
  return "?";
}

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

InitialState InitialState::parse(std::string_view text) {
  text = trim(unquote(trim(text)));
  InitialState s;
  if (text == "00") s.kind = Kind::basis00;
  else if (text == "01") s.kind = Kind::basis01;
  else if (text == "10") s.kind = Kind::basis10;
  else if (text == "11") s.kind = Kind::basis11;
  else if (text == "psi_plus") s.kind = Kind::psi_plus;
  else if (text == "psi_minus") s.kind = Kind::psi_minus;
  else if (text.starts_with("alpha:")) {
    const auto x = to_double(text.substr(6));
    if (!x || !(*x >= 0.0 && *x <= 1.0)) {
      throw std::invalid_argument("alpha:<x> requires x in [0, 1]");
    }
    s.kind = Kind::alpha;
    s.alpha = *x;
  } else {
    throw std::invalid_argument("unknown initial state '" + std::string(text) + "'");
  }
  return s;
}

std::string InitialState::label() const {
  switch (kind) {
    case Kind::basis00: return "00";
    case Kind::basis01: return "01";
    case Kind::basis10: return "10";
    case Kind::basis11: return "11";
    case Kind::psi_plus: return "psi_plus";
    case Kind::psi_minus: return "psi_minus";
    case Kind::alpha: return "alpha:" + format_shortest(alpha);
  }
  return "?";
}

PureState InitialState::pure_state() const {
  switch (kind) {
    case Kind::basis00: return PureState::basis("00");
    case Kind::basis01: return PureState::basis("01");
    case Kind::basis10: return PureState::basis("10");
    case Kind::basis11: return PureState::basis("11");
    case Kind::psi_plus: return PureState::psi_plus();
    case Kind::psi_minus: return PureState::psi_minus();
    case Kind::alpha: return PureState::alpha_superposition(alpha);
  }
  throw std::logic_error("unhandled initial state");
}

void ScenarioConfig::validate() const {
  switch (model) {
    case CouplingModel::direct: validate_rates(direct); break;
    case CouplingModel::free_space: free_space.validate(); break;
    case CouplingModel::plasmonic: plasmonic.validate(); break;
  }
  drive.validate();
  (void)initial.pure_state();
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw std::invalid_argument("t_final must be positive");
  }
  if (sample_count < 2) throw std::invalid_argument("sample_count must be at least 2");
  optimizer.validate();
}

ScenarioConfig parse_config(std::string_view text) {
  std::map<std::string, Entry, std::less<>> entries;
  std::optional<Block> section;
  // First line at which each coupling-model block appears.
  std::map<Block, int> model_blocks;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "malformed section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      section = section_block(name);
      if (!section) throw ConfigError(line_no, "unknown section [" + std::string(name) + "]");
      if (is_model_block(*section)) model_blocks.emplace(*section, line_no);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(unquote(trim(line.substr(eq + 1)))));
    const auto it = key_blocks().find(key);
    if (it == key_blocks().end()) throw ConfigError(line_no, "unknown key '" + key + "'");
    const Block owner = it->second;
    if (section && owner != *section) {
      throw ConfigError(line_no, "key '" + key + "' does not belong to section [" +
                                     std::string(block_name(*section)) + "]");
    }
    if (entries.count(key)) throw ConfigError(line_no, "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(line_no, "key '" + key + "' has an empty value");
    entries[key] = {value, line_no};
    if (is_model_block(owner)) model_blocks.emplace(owner, line_no);
  }

  if (model_blocks.size() > 1) {
    auto it = model_blocks.begin();
    const auto first = *it++;
    const auto second = *it;
    const int line = std::max(first.second, second.second);
    throw ConfigError(line, "conflicting coupling blocks [" + std::string(block_name(first.first)) +
                                "] and [" + std::string(block_name(second.first)) + "]");
  }

  auto get = [&](std::string_view key) -> const Entry* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto need = [&](std::string_view key) -> const Entry& {
    const Entry* e = get(key);
    if (!e) throw ConfigError(0, "missing required key '" + std::string(key) + "'");
    return *e;
  };

  ScenarioConfig cfg;

  const Entry& model_entry = need("coupling_model");
  if (model_entry.value == "direct") cfg.model = CouplingModel::direct;
  else if (model_entry.value == "free_space") cfg.model = CouplingModel::free_space;
  else if (model_entry.value == "plasmonic") cfg.model = CouplingModel::plasmonic;
  else throw ConfigError(model_entry.line, "unknown coupling_model '" + model_entry.value + "'");

  if (!model_blocks.empty() && model_of(model_blocks.begin()->first) != cfg.model) {
    throw ConfigError(model_blocks.begin()->second,
                      "block [" + std::string(block_name(model_blocks.begin()->first)) +
                          "] conflicts with coupling_model = " + model_entry.value);
  }

  switch (cfg.model) {
    case CouplingModel::direct: {
      const double v = require_double(need("V"), "V");
      const double g = require_double(need("gamma"), "gamma");
      checked(need("V").line, [&] {
        cfg.direct = CollectiveParams::direct(v, g);
        validate_rates(cfg.direct);
      });
      break;
    }
    case CouplingModel::free_space: {
      auto& g = cfg.free_space;
      g.mu1_hat = require_vec3(need("mu1"), "mu1");
      g.mu2_hat = require_vec3(need("mu2"), "mu2");
      g.r12_hat = require_vec3(need("r12_hat"), "r12_hat");
      const Entry& sep = need("separation_over_wavelength");
      g.separation_over_wavelength = require_double(sep, "separation_over_wavelength");
      if (const Entry* n = get("refractive_index")) g.refractive_index = require_double(*n, "refractive_index");
      checked(sep.line, [&] { g.validate(); });
      break;
    }
    case CouplingModel::plasmonic: {
      auto& w = cfg.plasmonic;
      w.beta = require_double(need("beta"), "beta");
      w.propagation_length_nm = require_double(need("L_nm"), "L_nm");
      w.plasmon_wavelength_nm = require_double(need("lambda_pl_nm"), "lambda_pl_nm");
      const Entry& z = need("zeta");
      w.zeta = require_double(z, "zeta");
      checked(z.line, [&] { w.validate(); });
      break;
    }
  }

  if (const Entry* e = get("amplitude1")) cfg.drive.amplitude1 = require_double(*e, "amplitude1");
  if (const Entry* e = get("amplitude2")) cfg.drive.amplitude2 = require_double(*e, "amplitude2");
  if (const Entry* e = get("detuning1")) cfg.drive.detuning1 = require_double(*e, "detuning1");
  if (const Entry* e = get("detuning2")) cfg.drive.detuning2 = require_double(*e, "detuning2");

  const Entry& init = need("initial");
  if (init.value == "alpha") {
    const Entry& a = need("alpha");
    const double alpha = require_double(a, "alpha");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError(a.line, "alpha must lie in [0, 1]");
    cfg.initial.kind = InitialState::Kind::alpha;
    cfg.initial.alpha = alpha;
  } else {
    checked(init.line, [&] { cfg.initial = InitialState::parse(init.value); });
    if (const Entry* a = get("alpha")) {
      throw ConfigError(a->line, "key 'alpha' requires initial = alpha");
    }
  }

  const Entry& tf = need("t_final");
  cfg.t_final = require_double(tf, "t_final");
  if (!(cfg.t_final > 0.0)) throw ConfigError(tf.line, "t_final must be positive");

  if (const Entry* e = get("sample_count")) {
    cfg.sample_count = require_int(*e, "sample_count");
    if (cfg.sample_count < 2) throw ConfigError(e->line, "sample_count must be at least 2");
  }
  if (const Entry* e = get("measured_qubit")) {
    checked(e->line, [&] { cfg.measured = parse_subsystem(e->value); });
  }
  int optimizer_line = 0;
  if (const Entry* e = get("grid_theta")) {
    cfg.optimizer.grid_theta = require_int(*e, "grid_theta");
    optimizer_line = e->line;
  }
  if (const Entry* e = get("grid_phi")) {
    cfg.optimizer.grid_phi = require_int(*e, "grid_phi");
    optimizer_line = e->line;
  }
  if (const Entry* e = get("refine_tol")) {
    cfg.optimizer.refine_tol = require_double(*e, "refine_tol");
    optimizer_line = e->line;
  }
  checked(optimizer_line, [&] { cfg.optimizer.validate(); });
  checked(0, [&] { cfg.drive.validate(); });
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "coupling_model = " << to_string(cfg.model) << "\n";
  if (cfg.initial.kind == InitialState::Kind::alpha) {
    os << "initial = alpha\n";
    os << "alpha = " << format_shortest(cfg.initial.alpha) << "\n";
  } else {
    os << "initial = " << cfg.initial.label() << "\n";
  }
  os << "t_final = " << format_shortest(cfg.t_final) << "\n";
  os << "sample_count = " << cfg.sample_count << "\n";
  os << "measured_qubit = " << to_string(cfg.measured) << "\n";

  switch (cfg.model) {
    case CouplingModel::direct:
      os << "\n[direct]\n";
      os << "V = " << format_shortest(cfg.direct.v_coherent) << "\n";
      os << "gamma = " << format_shortest(cfg.direct.gamma_collective) << "\n";
      break;
    case CouplingModel::free_space:
      os << "\n[free_space]\n";
      os << "mu1 = " << format_vec3(cfg.free_space.mu1_hat) << "\n";
      os << "mu2 = " << format_vec3(cfg.free_space.mu2_hat) << "\n";
      os << "r12_hat = " << format_vec3(cfg.free_space.r12_hat) << "\n";
      os << "separation_over_wavelength = " << format_shortest(cfg.free_space.separation_over_wavelength) << "\n";
      os << "refractive_index = " << format_shortest(cfg.free_space.refractive_index) << "\n";
      break;
    case CouplingModel::plasmonic:
      os << "\n[plasmonic]\n";
      os << "beta = " << format_shortest(cfg.plasmonic.beta) << "\n";
      os << "L_nm = " << format_shortest(cfg.plasmonic.propagation_length_nm) << "\n";
      os << "lambda_pl_nm = " << format_shortest(cfg.plasmonic.plasmon_wavelength_nm) << "\n";
      os << "zeta = " << format_shortest(cfg.plasmonic.zeta) << "\n";
      break;
  }

  os << "\n[drive]\n";
  os << "amplitude1 = " << format_shortest(cfg.drive.amplitude1) << "\n";
  os << "amplitude2 = " << format_shortest(cfg.drive.amplitude2) << "\n";
  os << "detuning1 = " << format_shortest(cfg.drive.detuning1) << "\n";
  os << "detuning2 = " << format_shortest(cfg.drive.detuning2) << "\n";

  os << "\n[optimizer]\n";
  os << "grid_theta = " << cfg.optimizer.grid_theta << "\n";
  os << "grid_phi = " << cfg.optimizer.grid_phi << "\n";
  os << "refine_tol = " << format_shortest(cfg.optimizer.refine_tol) << "\n";
  return os.str();
}

CouplingResult collective_params(const ScenarioConfig& cfg) {
  switch (cfg.model) {
    case CouplingModel::direct: return {cfg.direct, {}};
    case CouplingModel::free_space: return {free_space_coupling(cfg.free_space), {}};
    case CouplingModel::plasmonic: return plasmonic_coupling(cfg.plasmonic);
  }
  throw std::logic_error("unhandled coupling model");
}

std::vector<double> SweepSpec::parse_grid(std::string_view text) {
  text = trim(text);
  std::vector<double> values;
  if (text.find(':') != std::string_view::npos) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw std::invalid_argument("grid must be start:stop:count");
    const auto start = to_double(text.substr(0, c1));
    const auto stop = to_double(text.substr(c1 + 1, c2 - c1 - 1));
    const auto count = to_int(text.substr(c2 + 1));
    if (!start || !stop || !count) throw std::invalid_argument("grid must be start:stop:count");
    if (*count < 2) throw std::invalid_argument("a sweep needs at least 2 points");
    for (int i = 0; i < *count; ++i) {
      values.push_back(i == *count - 1 ? *stop : *start + (*stop - *start) * i / (*count - 1));
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const auto part = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      const auto x = to_double(part);
      if (!x) throw std::invalid_argument("invalid sweep value '" + std::string(trim(part)) + "'");
      values.push_back(*x);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  }
  if (values.size() < 2) throw std::invalid_argument("a sweep needs at least 2 points");
  return values;
}

void SweepSpec::validate() const {
  if (values.size() < 2) throw std::invalid_argument("a sweep needs at least 2 points");
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& cfg, std::string_view path, double value) {
  ScenarioConfig out = cfg;
  const bool direct = cfg.model == CouplingModel::direct;
  const bool free = cfg.model == CouplingModel::free_space;
  const bool plas = cfg.model == CouplingModel::plasmonic;
  auto signed_like = [](double reference, double magnitude) {
    return std::signbit(reference) ? -magnitude : magnitude;
  };

  if (path == "initial_state.alpha" && cfg.initial.kind == InitialState::Kind::alpha) {
    out.initial.alpha = value;
  } else if (path == "drive.amplitude1") {
    out.drive.amplitude1 = value;
  } else if (path == "drive.amplitude2") {
    out.drive.amplitude2 = value;
  } else if (path == "drive.amplitude") {
    // Common magnitude, keeping each emitter's sign (relative phase).
    out.drive.amplitude1 = signed_like(cfg.drive.amplitude1, value);
    out.drive.amplitude2 = signed_like(cfg.drive.amplitude2, value);
  } else if (path == "drive.detuning1") {
    out.drive.detuning1 = value;
  } else if (path == "drive.detuning2") {
    out.drive.detuning2 = value;
  } else if (path == "direct.V" && direct) {
    out.direct.v_coherent = value;
  } else if (path == "direct.gamma" && direct) {
    out.direct.gamma_collective = value;
  } else if (path == "free_space.separation_over_wavelength" && free) {
    out.free_space.separation_over_wavelength = value;
  } else if (path == "free_space.refractive_index" && free) {
    out.free_space.refractive_index = value;
  } else if (path == "plasmonic.beta" && plas) {
    out.plasmonic.beta = value;
  } else if (path == "plasmonic.L_nm" && plas) {
    out.plasmonic.propagation_length_nm = value;
  } else if (path == "plasmonic.lambda_pl_nm" && plas) {
    out.plasmonic.plasmon_wavelength_nm = value;
  } else if (path == "plasmonic.zeta" && plas) {
    out.plasmonic.zeta = value;
  } else {
    throw ConfigError(0, "sweep path '" + std::string(path) + "' does not exist in this config");
  }
  checked(0, [&] { out.validate(); });
  return out;
}

ScenarioConfig figure_preset(std::string_view id) {
  ScenarioConfig cfg;
  PlasmonWaveguide waveguide;  // beta 0.94, L 2 um, lambda_pl 542 nm
  auto plasmonic = [&](double zeta) {
    cfg.model = CouplingModel::plasmonic;
    cfg.plasmonic = waveguide;
    cfg.plasmonic.zeta = zeta;
  };

  if (id == "fig1a") {
    // The plotted window is not stated; [0, 5] shows the full decay.
    cfg.model = CouplingModel::direct;
    cfg.direct = CollectiveParams::direct(7.0, 0.2);
    cfg.initial.kind = InitialState::Kind::basis10;
  } else if (id == "fig1b") {
    cfg.model = CouplingModel::free_space;
    cfg.free_space.mu1_hat = {0.0, 0.0, 1.0};
    cfg.free_space.mu2_hat = {0.0, 0.0, 1.0};
    cfg.free_space.r12_hat = {1.0, 0.0, 0.0};
    cfg.free_space.separation_over_wavelength = 0.75;
    cfg.free_space.refractive_index = 1.0;
    cfg.initial.kind = InitialState::Kind::basis10;
  } else if (id == "fig2a") {
    plasmonic(1.0);
    cfg.initial.kind = InitialState::Kind::basis10;
  } else if (id == "fig2b") {
    plasmonic(0.75);
    cfg.drive.amplitude1 = 0.2;
    cfg.drive.amplitude2 = 0.2;
    cfg.initial.kind = InitialState::Kind::basis10;
  } else if (id == "fig2b_inset") {
    plasmonic(0.75);
    cfg.initial.kind = InitialState::Kind::basis10;
  } else if (id == "fig3a") {
    plasmonic(1.0);
    cfg.drive.amplitude1 = 0.2;
    cfg.drive.amplitude2 = -0.2;
    cfg.initial.kind = InitialState::Kind::basis01;
  } else if (id == "fig3b") {
    plasmonic(1.0);
    cfg.drive.amplitude1 = 0.4;
    cfg.drive.amplitude2 = -0.4;
    cfg.initial.kind = InitialState::Kind::alpha;
    cfg.initial.alpha = 0.5;
  } else if (id == "fig3c") {
    plasmonic(1.0);
    cfg.drive.amplitude1 = 0.4;
    cfg.drive.amplitude2 = -0.4;
    cfg.initial.kind = InitialState::Kind::alpha;
    cfg.initial.alpha = 1.0;
  } else {
    throw std::invalid_argument("unknown figure id '" + std::string(id) + "'");
  }
  cfg.t_final = id == "fig1a" ? 5.0 : 10.0;
  return cfg;
}

std::optional<SweepSpec> figure_sweep(std::string_view id) {
  (void)figure_preset(id);
  if (id != "fig3b") return std::nullopt;
  SweepSpec s;
  s.path = "initial_state.alpha";
  for (int i = 0; i <= 10; ++i) s.values.push_back(i / 10.0);
  return s;
}

std::vector<CorrelationRecord> correlation_records(const std::vector<double>& times,
                                                   const std::vector<DensityMatrix>& states,
                                                   const OptimizerSettings& settings,
                                                   Subsystem measured) {
  if (times.size() != states.size()) throw std::invalid_argument("times/states size mismatch");
  const std::size_t n = states.size();
  std::vector<std::optional<CorrelationRecord>> slots(n);
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(n, 1));

  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t i = w; i < n; i += workers) {
        slots[i] = correlation_record(states[i], times[i], settings, measured);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<CorrelationRecord> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(*s);
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioResult result;
  auto coupling = collective_params(cfg);
  result.warnings = std::move(coupling.warnings);

  EvolutionSpec spec;
  spec.initial_state = DensityMatrix::from_pure(cfg.initial.pure_state());
  spec.params = coupling.params;
  spec.drive = cfg.drive;
  spec.t_final = cfg.t_final;
  spec.sample_count = cfg.sample_count;
  result.trajectory = evolve(spec);
  result.records = correlation_records(result.trajectory.times, result.trajectory.states,
                                       cfg.optimizer, cfg.measured);
  return result;
}

std::vector<SweepBlock> run_sweep(const ScenarioConfig& cfg, const SweepSpec& sweep) {
  sweep.validate();
  std::vector<double> values = sweep.values;
  std::sort(values.begin(), values.end());
  // Resolve every point before running any, so a bad path fails fast.
  std::vector<ScenarioConfig> configs;
  for (double v : values) configs.push_back(apply_sweep_value(cfg, sweep.path, v));

  std::vector<SweepBlock> blocks;
  for (std::size_t i = 0; i < values.size(); ++i) {
    blocks.push_back({values[i], run_scenario(configs[i])});
  }
  return blocks;
}

SteadyResult run_steady(const ScenarioConfig& cfg) {
  cfg.validate();
  auto coupling = collective_params(cfg);
  DensityMatrix rho = steady_state(coupling.params, cfg.drive);
  CorrelationRecord record = correlation_record(rho, std::nullopt, cfg.optimizer, cfg.measured);
  return {std::move(rho), record, std::move(coupling.warnings)};
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv_header(std::ostream& os) { os << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& os, const CorrelationRecord& r) {
  if (r.t) os << format_double(*r.t);
  os << ',' << format_double(r.mutual_information) << ',' << format_double(r.classical) << ','
     << format_double(r.discord) << ',' << format_double(r.eof) << ','
     << format_double(r.concurrence) << '\n';
}

void write_csv(std::ostream& os, const std::vector<CorrelationRecord>& records) {
  write_csv_header(os);
  for (const auto& r : records) write_csv_row(os, r);
}

void write_sweep_csv(std::ostream& os, const std::string& path,
                     const std::vector<SweepBlock>& blocks) {
  write_csv_header(os);
  for (const auto& b : blocks) {
    os << "# " << path << " = " << format_shortest(b.value) << '\n';
    for (const auto& r : b.result.records) write_csv_row(os, r);
  }
}

std::vector<CsvBlock> read_csv(std::istream& is) {
  std::vector<CsvBlock> blocks;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.starts_with("#")) {
      CsvBlock b;
      b.tag = std::string(trim(std::string_view(line).substr(1)));
      blocks.push_back(std::move(b));
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": expected CSV header");
      }
      header_seen = true;
      continue;
    }
    std::array<std::string_view, 6> fields;
    std::string_view rest = line;
    for (int i = 0; i < 6; ++i) {
      const auto comma = rest.find(',');
      if ((i < 5) == (comma == std::string_view::npos)) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": expected 6 fields");
      }
      fields[i] = rest.substr(0, comma);
      if (i < 5) rest = rest.substr(comma + 1);
    }
    CorrelationRecord r;
    if (!fields[0].empty()) {
      r.t = to_double(fields[0]);
      if (!r.t) throw std::runtime_error("line " + std::to_string(line_no) + ": bad t");
    }
    std::array<double*, 5> targets = {&r.mutual_information, &r.classical, &r.discord, &r.eof,
                                      &r.concurrence};
    for (int i = 0; i < 5; ++i) {
      const auto x = to_double(fields[i + 1]);
      if (!x) throw std::runtime_error("line " + std::to_string(line_no) + ": bad number");
      *targets[i] = *x;
    }
    if (blocks.empty()) blocks.emplace_back();
    blocks.back().records.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("missing CSV header");
  return blocks;
}

}  // namespace emitcorr
