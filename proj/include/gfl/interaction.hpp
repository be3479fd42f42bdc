#ifndef GFL_INTERACTION_HPP
#define GFL_INTERACTION_HPP

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gfl/gaussian.hpp"
#include "gfl/spectral.hpp"

namespace gfl {

namespace detail {
struct ConvolutionPlan;
}

// Even pair potential sampled on the difference grid of a GridSpec, with its
// Fourier table on the dual grid of the zero-padded (2M)^d box. Lattice sums
// below take weighted densities (h^d rho), so
//   sum_{x,y} f(x) w(x - y) g(y)  =  iint (f/h^d)(x) w(x - y) (g/h^d)(y).
class PairPotential {
 public:
  enum class Kind { GaussianBump, GridDelta, Tabulated };

  // w(x) = amplitude * exp(-|x|^2 / (2 width^2)).
  static PairPotential gaussian_bump(const GridSpec& grid, double amplitude, double width);
  // strength * delta_0 with the delta spread over one grid cell.
  static PairPotential grid_delta(const GridSpec& grid, double strength);
  // Radial profile w(|x|) interpolated linearly from (radius, value) pairs;
  // zero beyond the last radius.
  static PairPotential tabulated(const GridSpec& grid, const std::vector<double>& radii,
                                 const std::vector<double>& values);
  // Two whitespace-separated columns per line: offset, value. Lines starting
  // with '#' are skipped. Offsets are read as radii.
  static PairPotential from_file(const GridSpec& grid, const std::string& path);

  Kind kind() const { return kind_; }
  const GridSpec& grid() const { return grid_; }

  // w at a lattice offset given in grid steps, |dx|, |dy| <= M - 1.
  double offset_value(int dx, int dy = 0) const;

  // h^d times the discrete transform of the padded kernel, r2c half layout:
  // index m (d = 1) or mx * (P/2 + 1) + my (d = 2), wavevector 2 pi m / (P h).
  const std::vector<double>& fourier() const { return fourier_; }
  int padded_points() const;
  double fourier_at_zero() const { return fourier().front(); }
  double min_fourier() const;
  bool positive_definite(double tol = 1e-10) const { return min_fourier() >= -tol; }

  // sum_{x,y} f(x) w(x - y) f(y).
  double lattice_self_pair(const double* f) const;
  // sum_{x,y} f(x) w(x - y) g(y).
  double lattice_pair(const double* f, const double* g) const;
  // out(x) = sum_y w(x - y) f(y).
  void lattice_convolve(const double* f, double* out) const;

 private:
  PairPotential(GridSpec grid, Kind kind, std::vector<double> kernel);

  GridSpec grid_;
  Kind kind_;
  std::vector<double> kernel_;  // (2M - 1)^d offsets, row-major
  std::vector<double> fourier_;
  std::shared_ptr<const detail::ConvolutionPlan> plan_;
};

// Sufficient integrability conditions for the renormalized 2D regime,
// evaluated on the grid: int w^(k) (1 + |k|^{1/2}) dk and int |w| V^2 dx.
struct IntegrabilityReport {
  double fourier_moment = 0.0;
  double fourier_tail_fraction = 0.0;  // share carried by the outer half of the dual box
  double potential_moment = 0.0;
  double potential_tail_fraction = 0.0;  // share carried by the outer quarter of offsets
  bool fourier_condition = false;
  bool potential_condition = false;
};
IntegrabilityReport check_integrability(const PairPotential& w, const Potential& trap);

// 1/2 iint |u|^2 w |u|^2.
double bare_interaction(const FieldSample& sample, const OneBodyOperator& op,
                        const PairPotential& w);
// 1/2 iint (|P_K u|^2 - rho_K) w (|P_K u|^2 - rho_K); the sample cutoff must be K.
double renormalized_interaction(const FieldSample& sample, const OneBodyOperator& op,
                                const PairPotential& w, int K);
// 1/2 iint |G_K(x, y)|^2 w(x - y).
double exchange_term(const OneBodyOperator& op, const PairPotential& w, int K);
// 1/2 iint rho_K(x) w(x - y) rho_K(y).
double direct_term(const OneBodyOperator& op, const PairPotential& w, int K);
// Exact Gaussian expectation of the bare interaction at cutoff K.
double wick_expectation_bare(const OneBodyOperator& op, const PairPotential& w, int K);
// <u, h u> + g D[|u|^2] with h the unshifted operator.
double mf_energy(const FieldSample& sample, const OneBodyOperator& op, const PairPotential& w,
                 double g);

enum class EnergyKind { Bare, Renormalized };

// Batch evaluator with the synthesis matrix and counterterm prepared once.
class InteractionEvaluator {
 public:
  InteractionEvaluator(const OneBodyOperator& op, const PairPotential& w, int K);

  int cutoff() const { return K_; }
  double evaluate(const std::complex<double>* alpha, EnergyKind kind) const;
  // One value per sample, in sample order; only the first K columns are used.
  std::vector<double> evaluate(const Ensemble& ensemble, EnergyKind kind) const;

 private:
  void density(const std::complex<double>* alpha, double* rho) const;

  PairPotential w_;
  int K_;
  Eigen::MatrixXd modes_;         // N x K weighted eigenvectors
  Eigen::VectorXd counterterm_;   // h^d rho_K
};

// W_ijkl = iint u_i(x) u_j(y) w(x - y) u_l(x) u_k(y), real eigenfunctions.
struct PairTensor {
  int cutoff = 0;
  std::vector<double> values;  // index ((i K + j) K + k) K + l
  double max_exchange_asymmetry = 0.0;   // before symmetrization
  double max_hermitian_asymmetry = 0.0;  // before symmetrization

  double operator()(int i, int j, int k, int l) const {
    return values[((static_cast<std::size_t>(i) * cutoff + j) * cutoff + k) * cutoff + l];
  }
  // Matrix over pair indices (il), (jk): entry W_ijkl.
  Eigen::MatrixXd pair_matrix() const;
};

inline constexpr int kMaxTensorModes = 12;
PairTensor build_pair_tensor(const OneBodyOperator& op, const PairPotential& w, int K);

}  // namespace gfl

#endif  // GFL_INTERACTION_HPP
