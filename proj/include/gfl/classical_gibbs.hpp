#ifndef GFL_CLASSICAL_GIBBS_HPP
#define GFL_CLASSICAL_GIBBS_HPP

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "gfl/gaussian.hpp"
#include "gfl/interaction.hpp"

namespace gfl {

// Symmetric k-mode multi-indices for k = 2: pairs (i, j), i <= j, in
// lexicographic order. The orthonormal symmetric basis vector for (i, j) is
// (u_i x u_j + u_j x u_i) / sqrt 2 when i < j and u_i x u_i when i = j.
std::vector<std::array<int, 2>> symmetric_pairs(int K);
inline double symmetric_pair_norm(int i, int j) { return i == j ? 1.0 : 1.4142135623730951; }

// k-body operator in the mode basis: K x K for k = 1, and the restriction to
// the symmetric subspace in the basis above for k = 2. Shared by classical
// moments and quantum reduced density matrices so either side can be compared.
struct ReducedOperator {
  int order = 1;
  int modes = 0;
  Eigen::MatrixXcd matrix;

  // For k = 2: the raw four-index value E[alpha_i alpha_j conj(alpha_k alpha_l)]
  // (classical) or <a+_k a+_l a_j a_i> (quantum).
  std::complex<double> raw(int i, int j, int k, int l) const;
};

ReducedOperator scaled(const ReducedOperator& op, double factor);

struct ReducedMoment {
  ReducedOperator value;
  Eigen::MatrixXd standard_error;  // entrywise, for the complex modulus
};

struct Reweighted {
  Ensemble ensemble;             // weights exp(-D)
  std::vector<double> energies;  // D per sample
  double ess = 0.0;
  bool low_confidence = false;
};

inline constexpr double kDefaultEssFloor = 0.05;

// Attaches weights exp(-g D[u]) with D evaluated at the ensemble's cutoff.
Reweighted reweight(const Ensemble& ensemble, EnergyKind energy, const OneBodyOperator& op,
                    const PairPotential& w, double ess_floor = kDefaultEssFloor,
                    double coupling = 1.0);

double effective_sample_size(const Eigen::VectorXd& weights);

struct LogPartition {
  double value = 0.0;  // -log z_r
  double standard_error = 0.0;
};
LogPartition estimate_log_zr(const Ensemble& weighted);

ReducedMoment reduced_moment(const Ensemble& weighted, int k);

// Sum of absolute eigenvalues of the Hermitian difference.
double trace_distance(const ReducedOperator& a, const ReducedOperator& b);

// One renormalized mode: X = |alpha|^2 ~ Exponential(mean 1 / lambda) and
// weight exp(-W (X - 1/lambda)^2 / 2). Deterministic quadrature.
struct SingleMode {
  double z_r = 0.0;
  double first_moment = 0.0;  // E_mu[X]
  double mean_energy = 0.0;   // E_mu0[W (X - 1/lambda)^2 / 2]
};
SingleMode single_mode_renormalized(double lambda, double w11);

}  // namespace gfl

#endif  // GFL_CLASSICAL_GIBBS_HPP
