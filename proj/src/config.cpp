#include "gfl/config.hpp"

#include <boost/algorithm/string/split.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "gfl/errors.hpp"

namespace gfl {

Potential ModelConfig::trap() const {
  if (potential == "box") return Potential::box();
  return Potential::power(exponent);
}

PairPotential InteractionConfig::build(const GridSpec& grid) const {
  if (kind == "gaussian_bump") return PairPotential::gaussian_bump(grid, amplitude, width);
  if (kind == "grid_delta") return PairPotential::grid_delta(grid, strength);
  if (kind == "tabulated") return PairPotential::from_file(grid, file);
  throw ConfigError("interaction.kind: unknown potential '" + kind + "'");
}

GridSpec HartreeConfig::grid(const ModelConfig& model) const {
  GridSpec g = model.grid();
  if (points > 0) g.points = points;
  return g;
}

RunConfig RunConfig::defaults_1d() { return RunConfig{}; }

RunConfig RunConfig::defaults_2d() {
  RunConfig c;
  c.model.dimension = 2;
  c.model.exponent = 2.0;
  c.model.half_width = 4.5;
  c.model.points = 40;
  c.model.modes = 8;
  c.interaction.renormalized = true;
  c.classical.samples = 100000;
  c.hartree.points = 32;
  c.hartree.counterterm.momentum_measure = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
  c.hartree.counterterm.lattice_density = true;
  return c;
}

namespace {

template <class T>
T parse_scalar(const std::string& key, const std::string& text) {
  try {
    return boost::lexical_cast<T>(boost::algorithm::trim_copy(text));
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError(key + ": cannot parse '" + text + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = boost::algorithm::trim_copy(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, [](char c) { return c == ','; });
  std::vector<T> out;
  for (const auto& p : parts) {
    if (boost::algorithm::trim_copy(p).empty()) continue;
    out.push_back(parse_scalar<T>(key, p));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

double parse_measure(const std::string& key, const std::string& text) {
  const std::string t = boost::algorithm::trim_copy(text);
  if (t == "unit") return 1.0;
  if (t == "2pi") return 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
  return parse_scalar<double>(key, t);
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.dimension", [](RunConfig& c, auto& k, auto& v) { c.model.dimension = parse_scalar<int>(k, v); }},
      {"model.potential", [](RunConfig& c, auto&, auto& v) { c.model.potential = boost::algorithm::trim_copy(v); }},
      {"model.exponent", [](RunConfig& c, auto& k, auto& v) { c.model.exponent = parse_scalar<double>(k, v); }},
      {"model.half_width", [](RunConfig& c, auto& k, auto& v) { c.model.half_width = parse_scalar<double>(k, v); }},
      {"model.points", [](RunConfig& c, auto& k, auto& v) { c.model.points = parse_scalar<int>(k, v); }},
      {"model.modes", [](RunConfig& c, auto& k, auto& v) { c.model.modes = parse_scalar<int>(k, v); }},
      {"model.nu", [](RunConfig& c, auto& k, auto& v) { c.model.nu = parse_scalar<double>(k, v); }},
      {"interaction.kind", [](RunConfig& c, auto&, auto& v) { c.interaction.kind = boost::algorithm::trim_copy(v); }},
      {"interaction.amplitude", [](RunConfig& c, auto& k, auto& v) { c.interaction.amplitude = parse_scalar<double>(k, v); }},
      {"interaction.width", [](RunConfig& c, auto& k, auto& v) { c.interaction.width = parse_scalar<double>(k, v); }},
      {"interaction.strength", [](RunConfig& c, auto& k, auto& v) { c.interaction.strength = parse_scalar<double>(k, v); }},
      {"interaction.file", [](RunConfig& c, auto&, auto& v) { c.interaction.file = boost::algorithm::trim_copy(v); }},
      {"interaction.renormalized", [](RunConfig& c, auto& k, auto& v) { c.interaction.renormalized = parse_bool(k, v); }},
      {"classical.samples", [](RunConfig& c, auto& k, auto& v) { c.classical.samples = parse_scalar<std::size_t>(k, v); }},
      {"classical.seed", [](RunConfig& c, auto& k, auto& v) { c.classical.seed = parse_scalar<std::uint64_t>(k, v); }},
      {"classical.ess_floor", [](RunConfig& c, auto& k, auto& v) { c.classical.ess_floor = parse_scalar<double>(k, v); }},
      {"quantum.max_particles", [](RunConfig& c, auto& k, auto& v) { c.quantum.max_particles = parse_scalar<int>(k, v); }},
      {"quantum.temperatures", [](RunConfig& c, auto& k, auto& v) { c.quantum.temperatures = parse_list<double>(k, v); }},
      {"quantum.coupling_c", [](RunConfig& c, auto& k, auto& v) { c.quantum.coupling_c = parse_scalar<double>(k, v); }},
      {"quantum.audit_schedule", [](RunConfig& c, auto& k, auto& v) { c.quantum.audit_schedule = parse_list<int>(k, v); }},
      {"hartree.kappa", [](RunConfig& c, auto& k, auto& v) { c.hartree.kappa = parse_scalar<double>(k, v); }},
      {"hartree.coupling_c", [](RunConfig& c, auto& k, auto& v) { c.hartree.coupling_c = parse_scalar<double>(k, v); }},
      {"hartree.temperatures", [](RunConfig& c, auto& k, auto& v) { c.hartree.temperatures = parse_list<double>(k, v); }},
      {"hartree.points", [](RunConfig& c, auto& k, auto& v) { c.hartree.points = parse_scalar<int>(k, v); }},
      {"hartree.damping", [](RunConfig& c, auto& k, auto& v) { c.hartree.rhf.damping = parse_scalar<double>(k, v); }},
      {"hartree.tol", [](RunConfig& c, auto& k, auto& v) { c.hartree.rhf.tol = parse_scalar<double>(k, v); }},
      {"hartree.max_iter", [](RunConfig& c, auto& k, auto& v) { c.hartree.rhf.max_iter = parse_scalar<int>(k, v); }},
      {"hartree.min_damping", [](RunConfig& c, auto& k, auto& v) { c.hartree.rhf.min_damping = parse_scalar<double>(k, v); }},
      {"hartree.momentum_measure", [](RunConfig& c, auto& k, auto& v) { c.hartree.counterterm.momentum_measure = parse_measure(k, v); }},
      {"hartree.lattice_density", [](RunConfig& c, auto& k, auto& v) { c.hartree.counterterm.lattice_density = parse_bool(k, v); }},
      {"hartree.schatten_p", [](RunConfig& c, auto& k, auto& v) { c.hartree.schatten_p = parse_scalar<double>(k, v); }},
      {"hartree.shared_modes", [](RunConfig& c, auto& k, auto& v) { c.hartree.shared_modes = parse_scalar<int>(k, v); }},
      {"hartree.relative_modes", [](RunConfig& c, auto& k, auto& v) { c.hartree.relative_modes = parse_scalar<int>(k, v); }},
      {"study.cutoffs", [](RunConfig& c, auto& k, auto& v) { c.study.cutoffs = parse_list<int>(k, v); }},
      {"study.cauchy_cutoffs", [](RunConfig& c, auto& k, auto& v) { c.study.cauchy_cutoffs = parse_list<int>(k, v); }},
      {"study.wick_cutoffs", [](RunConfig& c, auto& k, auto& v) { c.study.wick_cutoffs = parse_list<int>(k, v); }},
      {"study.wick_samples", [](RunConfig& c, auto& k, auto& v) { c.study.wick_samples = parse_scalar<std::size_t>(k, v); }},
      {"study.cauchy_samples", [](RunConfig& c, auto& k, auto& v) { c.study.cauchy_samples = parse_scalar<std::size_t>(k, v); }},
      {"study.stall_threshold", [](RunConfig& c, auto& k, auto& v) { c.study.stall_threshold = parse_scalar<double>(k, v); }},
      {"output.dir", [](RunConfig& c, auto&, auto& v) { c.output.dir = boost::algorithm::trim_copy(v); }},
      {"output.stem", [](RunConfig& c, auto&, auto& v) { c.output.stem = boost::algorithm::trim_copy(v); }},
      {"output.format", [](RunConfig& c, auto&, auto& v) { c.output.format = boost::algorithm::trim_copy(v); }},
  };
  return table;
}

template <class T>
void require_increasing(const std::vector<T>& values, const std::string& key,
                        std::vector<std::string>& problems) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      problems.push_back(key + " must be strictly increasing");
      return;
    }
  }
}

template <class T>
void require_positive(const std::vector<T>& values, const std::string& key,
                      std::vector<std::string>& problems) {
  for (const T& v : values) {
    if (!(v > T{0})) {
      problems.push_back(key + " entries must be positive");
      return;
    }
  }
}

}  // namespace

RunConfig load_config(const std::string& path, RunConfig base) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read config: " + std::string(e.what()));
  }
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section + ": key outside of a section");
    for (const auto& [name, node] : body) {
      const std::string key = section + "." + name;
      const auto it = table.find(key);
      if (it == table.end()) throw ConfigError(key + ": unknown key");
      it->second(base, key, node.data());
    }
  }
  return base;
}

void validate(const RunConfig& c, Purpose purpose) {
  std::vector<std::string> problems;
  const auto& m = c.model;
  if (m.dimension != 1 && m.dimension != 2) problems.push_back("model.dimension must be 1 or 2");
  if (m.potential != "power" && m.potential != "box") {
    problems.push_back("model.potential must be 'power' or 'box'");
  }
  if (m.potential == "power" && !(m.exponent > 1.0)) problems.push_back("model.exponent must exceed 1");
  if (!(m.half_width > 0.0)) problems.push_back("model.half_width must be positive");
  if (m.points < 8) problems.push_back("model.points must be at least 8");
  if (m.modes < 1) problems.push_back("model.modes must be positive");
  if (m.dimension == 1 || m.dimension == 2) {
    const std::size_t total = m.dimension == 1 ? static_cast<std::size_t>(m.points)
                                               : static_cast<std::size_t>(m.points) * m.points;
    if (total > kDefaultGridCap) problems.push_back("model.points exceeds the grid cap");
    if (static_cast<std::size_t>(m.modes) > total) problems.push_back("model.modes exceeds model.points^d");
  }

  const auto& in = c.interaction;
  if (in.kind != "gaussian_bump" && in.kind != "grid_delta" && in.kind != "tabulated") {
    problems.push_back("interaction.kind must be gaussian_bump, grid_delta or tabulated");
  }
  if (in.kind == "tabulated" && in.file.empty()) problems.push_back("interaction.file is required for interaction.kind=tabulated");
  if (in.kind == "gaussian_bump" && !(in.width > 0.0)) problems.push_back("interaction.width must be positive");
  if (in.renormalized && in.kind == "grid_delta" && m.dimension == 2) {
    problems.push_back(
        "interaction.renormalized=true with interaction.kind=grid_delta is not allowed for model.dimension=2");
  }

  if (c.classical.samples < 2) problems.push_back("classical.samples must be at least 2");
  if (!(c.classical.ess_floor >= 0.0 && c.classical.ess_floor <= 1.0)) {
    problems.push_back("classical.ess_floor must lie in [0, 1]");
  }

  const auto& q = c.quantum;
  require_increasing(q.temperatures, "quantum.temperatures", problems);
  require_positive(q.temperatures, "quantum.temperatures", problems);
  require_increasing(q.audit_schedule, "quantum.audit_schedule", problems);
  require_positive(q.audit_schedule, "quantum.audit_schedule", problems);
  if (q.coupling_c < 0.0) problems.push_back("quantum.coupling_c must be nonnegative");
  const bool quantum = purpose == Purpose::Quantum || purpose == Purpose::Study1d;
  if (quantum) {
    if (m.modes > kMaxTensorModes) {
      problems.push_back("model.modes must be at most 12 for quantum runs");
    }
    if (q.max_particles < 1 || q.max_particles > 255) {
      problems.push_back("quantum.max_particles must lie in [1, 255]");
    }
    if (m.dimension == 2 && q.max_particles > 20) {
      problems.push_back("quantum.max_particles must be at most 20 for model.dimension=2");
    }
  }
  if (purpose == Purpose::Study1d) {
    if (m.dimension != 1) problems.push_back("model.dimension must be 1 for study-1d");
    if (in.renormalized) problems.push_back("interaction.renormalized must be false for study-1d");
  }

  const auto& h = c.hartree;
  require_increasing(h.temperatures, "hartree.temperatures", problems);
  require_positive(h.temperatures, "hartree.temperatures", problems);
  if (!(h.kappa > 0.0)) problems.push_back("hartree.kappa must be positive");
  if (!(h.rhf.damping > 0.0 && h.rhf.damping <= 1.0)) problems.push_back("hartree.damping must lie in (0, 1]");
  if (!(h.rhf.tol > 0.0)) problems.push_back("hartree.tol must be positive");
  if (h.rhf.max_iter < 1) problems.push_back("hartree.max_iter must be positive");
  if (!(h.counterterm.momentum_measure > 0.0)) problems.push_back("hartree.momentum_measure must be positive");
  if (!(h.schatten_p > 0.0)) problems.push_back("hartree.schatten_p must be positive");
  if (purpose == Purpose::Hartree || purpose == Purpose::Study2d) {
    const GridSpec g = h.grid(m);
    if (h.points != 0 && h.points < 8) problems.push_back("hartree.points must be at least 8");
    if (h.temperatures.size() < 2) problems.push_back("hartree.temperatures needs at least two points");
    const bool known_grid = m.dimension == 1 || m.dimension == 2;
    if (h.shared_modes < 1 ||
        (known_grid && static_cast<std::size_t>(h.shared_modes) > g.size())) {
      problems.push_back("hartree.shared_modes must lie in [1, grid size]");
    }
  }

  const auto& s = c.study;
  require_increasing(s.cutoffs, "study.cutoffs", problems);
  require_positive(s.cutoffs, "study.cutoffs", problems);
  require_increasing(s.cauchy_cutoffs, "study.cauchy_cutoffs", problems);
  require_positive(s.cauchy_cutoffs, "study.cauchy_cutoffs", problems);
  require_increasing(s.wick_cutoffs, "study.wick_cutoffs", problems);
  require_positive(s.wick_cutoffs, "study.wick_cutoffs", problems);
  if (purpose == Purpose::Study2d) {
    if (m.dimension != 2) problems.push_back("model.dimension must be 2 for study-2d-classical");
    if (s.wick_samples < 2 || s.cauchy_samples < 2) {
      problems.push_back("study.wick_samples and study.cauchy_samples must be at least 2");
    }
  }

  if (c.output.format != "json" && c.output.format != "csv") {
    problems.push_back("output.format must be json or csv");
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid configuration:";
    for (const auto& p : problems) msg << "\n  " << p;
    throw ConfigError(msg.str());
  }
}

}  // namespace gfl
