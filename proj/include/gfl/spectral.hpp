#ifndef GFL_SPECTRAL_HPP
#define GFL_SPECTRAL_HPP

#include <cstddef>
#include <cstdint>
#include <memory>

#include <Eigen/Dense>

namespace gfl {

inline constexpr std::size_t kDefaultGridCap = 4096;

// Uniform grid on the open cube (-L, L)^d with Dirichlet walls at +-L.
// Interior points per axis are x_i = -L + (i + 1) h, h = 2L / (M + 1).
// Multi-dimensional points are stored row-major (last axis fastest).
struct GridSpec {
  int dimension = 1;
  double half_width = 8.0;
  int points = 512;

  double spacing() const { return 2.0 * half_width / (points + 1); }
  double cell_volume() const;
  std::size_t size() const;
  double coordinate(int i) const { return -half_width + (i + 1) * spacing(); }
  // Euclidean distance from the origin of flat grid point `index`.
  double radius(std::size_t index) const;

  void validate(std::size_t cap = kDefaultGridCap) const;
};

struct Potential {
  enum class Kind { Power, Box, Tabulated };
  Kind kind = Kind::Power;
  double exponent = 2.0;

  static Potential power(double s) { return {Kind::Power, s}; }
  static Potential box() { return {Kind::Box, 0.0}; }

  double at_radius(double r) const;
};

// Lowest eigenpairs of h = -Laplacian + V discretized by second-order central
// differences. Eigenvectors carry the quadrature weight h^{d/2}, so plain dot
// products are L2 inner products; the physical value is vector / h^{d/2}.
// Immutable; copies share the eigenvector storage.
class OneBodyOperator {
 public:
  OneBodyOperator(GridSpec grid, Potential potential, Eigen::VectorXd potential_values,
                  Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors, double shift);

  const GridSpec& grid() const { return grid_; }
  const Potential& potential() const { return potential_; }
  // V on the grid, without the shift.
  const Eigen::VectorXd& potential_values() const { return *potential_values_; }
  // lambda_j - nu.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return *eigenvectors_; }
  double shift() const { return shift_; }
  int num_modes() const { return static_cast<int>(eigenvalues_.size()); }

  // (h - nu) applied to a weighted grid vector.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

  // Stable hash of grid, potential, shift and spectrum.
  std::uint64_t fingerprint() const;

 private:
  GridSpec grid_;
  Potential potential_;
  std::shared_ptr<const Eigen::VectorXd> potential_values_;
  Eigen::VectorXd eigenvalues_;
  std::shared_ptr<const Eigen::MatrixXd> eigenvectors_;
  double shift_;
};

OneBodyOperator build_one_body(const GridSpec& grid, const Potential& potential, int num_eigs,
                               std::size_t cap = kDefaultGridCap);

// Same discretization with an arbitrary potential given on the grid.
OneBodyOperator build_one_body(const GridSpec& grid, const Eigen::VectorXd& potential_values,
                               int num_eigs, std::size_t cap = kDefaultGridCap);

// Returns a copy with eigenvalues lambda_j - nu. Requires nu < lambda_1.
OneBodyOperator shift_potential(const OneBodyOperator& op, double nu);

struct SchattenTrace {
  double p = 0.0;
  double partial_sum = 0.0;    // sum over computed modes of lambda_j^{-p}
  double tail_estimate = 0.0;  // infinite when the fit predicts divergence
  double growth_exponent = 0.0;  // b in lambda_j ~ C j^b, top-quartile fit
  bool likely_divergent = false;
};

// Fits log lambda_j against log j on the top quartile; b p <= 1 + margin is
// reported as divergent because a finite fit cannot resolve the borderline.
inline constexpr double kSchattenMargin = 0.1;
SchattenTrace schatten_trace(const OneBodyOperator& op, double p);

// G_K(x, y) = sum_{j <= K} u_j(x) u_j(y) / lambda_j in physical units.
struct GreenKernel {
  int cutoff = 0;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd diagonal;
};

GreenKernel green_kernel(const OneBodyOperator& op, int K);

// h^d * rho_K on the grid: sum_{j <= K} v_j(x)^2 / lambda_j with weighted v_j.
Eigen::VectorXd weighted_density(const OneBodyOperator& op, int K);

}  // namespace gfl

#endif  // GFL_SPECTRAL_HPP
