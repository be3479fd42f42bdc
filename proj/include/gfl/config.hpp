#ifndef GFL_CONFIG_HPP
#define GFL_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gfl/classical_gibbs.hpp"
#include "gfl/hartree.hpp"
#include "gfl/interaction.hpp"
#include "gfl/spectral.hpp"

namespace gfl {

struct ModelConfig {
  int dimension = 1;
  std::string potential = "power";  // power | box
  double exponent = 4.0;
  double half_width = 8.0;
  int points = 512;
  int modes = 4;
  double nu = 0.0;

  GridSpec grid() const { return {dimension, half_width, points}; }
  Potential trap() const;
};

struct InteractionConfig {
  std::string kind = "gaussian_bump";  // gaussian_bump | grid_delta | tabulated
  double amplitude = 1.0;
  double width = 1.0;
  double strength = 1.0;  // grid_delta
  std::string file;       // tabulated
  bool renormalized = false;

  PairPotential build(const GridSpec& grid) const;
};

struct ClassicalConfig {
  std::size_t samples = 200000;
  std::uint64_t seed = 1;
  double ess_floor = kDefaultEssFloor;
};

struct QuantumConfig {
  int max_particles = 14;
  std::vector<double> temperatures{2.0, 4.0, 8.0, 16.0};
  double coupling_c = 1.0;  // lambda = c / T; 0 gives the free theory
  std::vector<int> audit_schedule{8, 10, 12, 14};
};

struct HartreeConfig {
  double kappa = 4.0;
  double coupling_c = 1.0;
  std::vector<double> temperatures{4.0, 8.0, 16.0, 32.0};
  int points = 0;  // 0: model.points
  RhfOptions rhf;
  CountertermOptions counterterm;
  double schatten_p = 2.0;
  int shared_modes = 128;
  int relative_modes = 16;  // cutoff of the classical relative one-body difference

  GridSpec grid(const ModelConfig& model) const;
};

struct StudyConfig {
  std::vector<int> cutoffs{8, 16, 32, 64};
  std::vector<int> cauchy_cutoffs{8, 16, 32};
  std::vector<int> wick_cutoffs{1, 4, 8};
  std::size_t wick_samples = 100000;
  std::size_t cauchy_samples = 20000;
  double stall_threshold = 1e-3;
};

struct OutputConfig {
  std::string dir = ".";
  std::string stem = "gfl";
  std::string format = "json";  // json | csv
};

struct RunConfig {
  ModelConfig model;
  InteractionConfig interaction;
  ClassicalConfig classical;
  QuantumConfig quantum;
  HartreeConfig hartree;
  StudyConfig study;
  OutputConfig output;

  static RunConfig defaults_1d();
  static RunConfig defaults_2d();
};

enum class Purpose { Spectrum, Sample, Classical, Quantum, Hartree, Study1d, Study2d };

// Overlays the keys of an INI file on `base`. Unknown sections or keys and
// malformed values raise ConfigError naming the key.
RunConfig load_config(const std::string& path, RunConfig base);

// Cross-field checks; messages name every offending field.
void validate(const RunConfig& config, Purpose purpose);

}  // namespace gfl

#endif  // GFL_CONFIG_HPP
