#ifndef GFL_STUDIES_HPP
#define GFL_STUDIES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfl/classical_gibbs.hpp"
#include "gfl/config.hpp"
#include "gfl/fock.hpp"
#include "gfl/hartree.hpp"
#include "gfl/interaction.hpp"
#include "gfl/report.hpp"
#include "gfl/spectral.hpp"

namespace gfl {

// Echo of every configuration field.
Document config_document(const RunConfig& config);

// Distinct stream seeds for the independent ensembles of one study.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return seed + 0x9e3779b97f4a7c15ULL * stream;
}

// Mean and standard error of a per-sample quantity.
struct SampleMean {
  double mean = 0.0;
  double standard_error = 0.0;
};
SampleMean sample_mean(const std::vector<double>& values);

struct WickRow {
  int K = 0;
  SampleMean bare;
  double bare_exact = 0.0;  // direct + exchange
  SampleMean renormalized;
  double renormalized_exact = 0.0;  // exchange
  double bare_z = 0.0;              // |mean - exact| / standard error
  double renormalized_z = 0.0;
};
// Monte Carlo means of D_K and D^R_K over the Gaussian measure against the
// exact Gaussian expectations, one ensemble truncated to each cutoff.
std::vector<WickRow> wick_checks(const OneBodyOperator& op, const PairPotential& w,
                                 const std::vector<int>& cutoffs, std::size_t n,
                                 std::uint64_t seed);

struct CutoffRow {
  int K = 0;
  double direct = 0.0;
  double exchange = 0.0;
  double direct_increment = 0.0;    // against the previous cutoff; 0 for the first
  double exchange_increment = 0.0;
};
std::vector<CutoffRow> cutoff_sequence(const OneBodyOperator& op, const PairPotential& w,
                                       const std::vector<int>& cutoffs);

struct CauchyRow {
  int K = 0;
  SampleMean renormalized;  // E|D^R_{2K} - D^R_K|
  SampleMean bare;          // E|D_{2K} - D_K|
  // Paired decrease of the renormalized mean against the previous row.
  SampleMean renormalized_decrease;
};
std::vector<CauchyRow> cauchy_diagnostic(const OneBodyOperator& op, const PairPotential& w,
                                         const std::vector<int>& cutoffs, std::size_t n,
                                         std::uint64_t seed);

struct Study1dRow {
  double T = 0.0;
  double lambda = 0.0;
  double free_energy = 0.0;             // F_lambda
  double free_energy_free = 0.0;        // closed form, untruncated in N
  double free_energy_free_truncated = 0.0;  // same K and N_max as F_lambda
  double discrepancy = 0.0;             // |(F_lambda - F_0)/T + log z_r|
  double discrepancy_truncated = 0.0;   // same with the truncated F_0
  double delta1 = 0.0;
  double delta2 = 0.0;
  double mean_number = 0.0;
  double top_sector_fraction = 0.0;
  bool cutoff_unsafe = false;
  CutoffAudit audit;
};

struct Study1dReport {
  Eigen::VectorXd eigenvalues;  // lambda_j - nu, j <= K
  SchattenTrace trace;          // p = 1 on every grid mode
  int modes = 0;
  int max_particles = 0;
  double coupling_c = 0.0;
  double nu = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  LogPartition log_zr;  // -log z_r
  double ess = 0.0;
  bool low_confidence = false;
  ReducedMoment moment1;
  ReducedMoment moment2;
  std::vector<Study1dRow> rows;
  bool discrepancy_decreasing = false;
  bool delta1_decreasing = false;
  bool delta2_decreasing = false;
  double final_threshold = 0.0;  // max(0.05, 5 stderr)
  bool final_ok = false;
};
Study1dReport run_study_1d(const RunConfig& config);

struct RelativeOneBody {
  int modes = 0;
  double trace_norm = 0.0;  // |int |u><u| dmu - int |u><u| dmu_0|_1
  double max_standard_error = 0.0;
  double ess = 0.0;
  bool low_confidence = false;
};

struct LogZrRow {
  int K = 0;
  LogPartition log_zr;
  double ess = 0.0;
};

struct Study2dReport {
  Eigen::VectorXd eigenvalues;
  SchattenTrace trace_p1;
  SchattenTrace trace_p2;
  IntegrabilityReport integrability;
  std::vector<CutoffRow> cutoffs;
  bool direct_diverging = false;
  bool exchange_increments_shrinking = false;
  std::vector<WickRow> wick;
  std::vector<CauchyRow> cauchy;
  bool cauchy_decreasing = false;  // every step beyond 2 standard errors
  std::vector<LogZrRow> log_zr;
  StabilizationReport hartree;
  RelativeOneBody relative;
};
Study2dReport run_study_2d_classical(const RunConfig& config);

// Serializable result of any subcommand. `issues` collects cutoff-unsafe,
// low-confidence and nonconvergence notes; --strict turns them into failures.
struct RunOutput {
  Document document;
  Table table;
  std::vector<std::string> issues;
};
RunOutput to_output(const Study1dReport& report);
RunOutput to_output(const Study2dReport& report);
RunOutput to_output(const StabilizationReport& report);
// spectrum | sample | classical | quantum | hartree. Binary dumps are written
// next to the main result under config.output.
RunOutput run_single(const RunConfig& config, Purpose which);

}  // namespace gfl

#endif  // GFL_STUDIES_HPP
