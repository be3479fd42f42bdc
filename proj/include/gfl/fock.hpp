#ifndef GFL_FOCK_HPP
#define GFL_FOCK_HPP

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gfl/classical_gibbs.hpp"
#include "gfl/interaction.hpp"
#include "gfl/spectral.hpp"

namespace gfl {

// Occupation vectors (n_1, ..., n_K) with sum n <= N_max, grouped by sector n
// and sorted lexicographically inside each sector.
class FockBasis {
 public:
  FockBasis(int modes, int max_particles);

  int modes() const { return modes_; }
  int max_particles() const { return max_particles_; }
  std::size_t sector_size(int n) const { return sectors_[static_cast<std::size_t>(n)].size() / modes_; }
  std::size_t dimension() const;

  // Pointer to the K occupation numbers of state `index` in sector n.
  const std::uint8_t* occupation(int n, std::size_t index) const {
    return sectors_[static_cast<std::size_t>(n)].data() + index * static_cast<std::size_t>(modes_);
  }
  // Index of an occupation vector inside its sector, if it is in the basis.
  std::optional<std::size_t> index_of(const std::uint8_t* occupation) const;

 private:
  std::uint64_t key(const std::uint8_t* occupation) const;

  int modes_;
  int max_particles_;
  std::vector<std::vector<std::uint8_t>> sectors_;
  std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> index_;
};

FockBasis build_fock(int K, int n_max);

// Number-conserving operator stored as one real symmetric sparse block per
// sector.
struct FockOperator {
  std::vector<Eigen::SparseMatrix<double>> blocks;

  double hermiticity_defect() const;
};

FockOperator operator+(const FockOperator& a, const FockOperator& b);
FockOperator operator*(double c, const FockOperator& a);

// sum_ij A_ij a+_i a_j for a real symmetric K x K matrix A.
FockOperator second_quantize_one_body(const FockBasis& basis, const Eigen::MatrixXd& one_body);
// Diagonal in the eigenbasis: sum_j lambda_j n_j with the unshifted lambda_j.
FockOperator second_quantize_one_body(const FockBasis& basis, const OneBodyOperator& op, int K);
// 1/2 sum_ijkl W_ijkl a+_i a+_j a_k a_l.
FockOperator second_quantize_pair(const FockBasis& basis, const PairTensor& tensor);
FockOperator number_operator(const FockBasis& basis);

// Gamma_n = basis * diag(populations) * basis^dagger. An empty basis matrix
// stands for the occupation basis itself.
struct FockBlock {
  Eigen::VectorXd populations;
  Eigen::MatrixXcd basis;

  bool occupation_basis() const { return basis.size() == 0; }
};

struct FockState {
  std::vector<FockBlock> blocks;

  double trace() const;
  Eigen::MatrixXcd block_matrix(int n) const;
  double min_population() const;
  // Spectral decomposition of given Hermitian sector blocks.
  static FockState from_matrices(const std::vector<Eigen::MatrixXcd>& matrices);
};

inline constexpr double kDefaultSaturation = 1e-6;
inline constexpr std::size_t kMaxDenseSector = 10000;

struct GibbsResult {
  FockState state;
  double log_partition = 0.0;
  double free_energy = 0.0;
  double ground_energy = 0.0;  // lowest eigenvalue of H - nu N + E0
  double mean_number = 0.0;
  double top_sector_fraction = 0.0;
  bool cutoff_unsafe = false;
};

// exp(-(H - nu N + E0) / T) / Z, assembled per sector with exponents anchored
// at the global ground energy.
GibbsResult gibbs_state(const FockOperator& H, const FockBasis& basis, double T, double nu,
                        double E0 = 0.0, double saturation = kDefaultSaturation);

// Gamma^(1)_{ij} = <a+_j a_i>; Gamma^(2) on the symmetric pair basis with raw
// entries <a+_k a+_l a_j a_i>, so tr Gamma^(1) = <N>, tr Gamma^(2) = <N(N-1)>.
ReducedOperator reduced_density(const FockState& state, const FockBasis& basis, int k);

// Factor turning Gamma^(k) above into the object compared with the classical
// k-th moment: k!/T^k applied to Gamma^(k)/k!, i.e. 1/T^k.
inline double classical_comparison_factor(int k, double T) { return 1.0 / std::pow(T, k); }

struct CoherentState {
  FockState state;
  // exp(-|v|^2) sum_{n <= N_max} |v|^{2n} / n!: squared norm kept by the
  // truncation of the unit-norm coherent vector.
  double captured_norm_sq = 0.0;
  bool truncation_warning = false;
};

// Components prod_j v_j^{n_j} / sqrt(n_j!) renormalized on the truncated space.
// Only the number-conserving blocks are stored, which is exact for every
// number-conserving observable.
CoherentState coherent_state(const Eigen::VectorXcd& v, const FockBasis& basis);

// tr((H - nu N + E0) Gamma) + T tr(Gamma log Gamma).
double free_energy_functional(const FockState& state, const FockOperator& H,
                              const FockBasis& basis, double T, double nu, double E0 = 0.0);

// One-body energies (unshifted) plus an optional coupled pair tensor.
struct QuantumModel {
  Eigen::VectorXd energies;
  std::optional<PairTensor> tensor;
  double coupling = 0.0;
};
FockOperator hamiltonian(const QuantumModel& model, const FockBasis& basis);

struct CutoffAuditRow {
  int max_particles = 0;
  double free_energy = 0.0;
  double mean_number = 0.0;
  double top_sector_fraction = 0.0;
  double delta_free_energy = 0.0;  // against the previous row; 0 for the first
};
struct CutoffAudit {
  std::vector<CutoffAuditRow> rows;
  bool converged = false;
  int converged_at = -1;
};
// Converged at the first N_max whose |Delta F| < tol (default 1e-6 T).
CutoffAudit cutoff_audit(const QuantumModel& model, const std::vector<int>& schedule, double T,
                         double nu, std::optional<double> tol = std::nullopt);

}  // namespace gfl

#endif  // GFL_FOCK_HPP
