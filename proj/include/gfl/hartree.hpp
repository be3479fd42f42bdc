#ifndef GFL_HARTREE_HPP
#define GFL_HARTREE_HPP

#include <vector>

#include <Eigen/Dense>

#include "gfl/interaction.hpp"
#include "gfl/spectral.hpp"

namespace gfl {

// int_{R^d} dk / (exp((|k|^2 + kappa) / T) - 1), no (2 pi)^{-d} factor.
// Closed form for d = 2, quadrature for d = 1.
double rho0_kappa(double T, double kappa, int d);

// Same integral with the grid Laplacian's dispersion
// (4 / h^2) sum_a sin^2(k_a h / 2) over the Brillouin zone (-pi/h, pi/h]^d.
double lattice_rho0_kappa(double T, double kappa, const GridSpec& grid);

struct CountertermOptions {
  double momentum_measure = 1.0;
  bool lattice_density = false;  // use lattice_rho0_kappa instead of rho0_kappa
};

// momentum_measure times the selected rho0 variant.
double reference_density(double T, double kappa, const GridSpec& grid,
                         const CountertermOptions& options);

// lambda w^(0) rho - kappa with rho = reference_density(...).
double chemical_potential(double T, double lambda, double kappa, const PairPotential& w,
                          const CountertermOptions& options = {});

struct RhfOptions {
  double damping = 0.3;
  double tol = 1e-8;
  int max_iter = 500;
  double min_damping = 1e-6;
};

// Quasi-free Bose state of -Laplacian + V_T on the full grid spectrum.
struct RhfState {
  Eigen::VectorXd potential;    // V_T
  Eigen::VectorXd energies;     // epsilon_j, ascending
  Eigen::MatrixXd orbitals;     // weighted eigenvectors, all grid modes
  Eigen::VectorXd occupations;  // 1 / (exp(epsilon_j / T) - 1)
  Eigen::VectorXd density;      // physical rho(x)
  double free_energy = 0.0;     // reduced Hartree functional
  double residual = 0.0;        // sup |map(V_T) - V_T| / (1 + |V|)
  int iterations = 0;
  bool converged = false;
  std::vector<double> accepted_free_energies;
};

// Damped iteration V <- (1 - theta) V + theta (V0 + lambda rho[V] * w - nu)
// started from V0 - nu; theta halves whenever the functional would increase.
RhfState solve_rhf(const GridSpec& grid, const Eigen::VectorXd& V, const PairPotential& w,
                   double T, double lambda, double nu, const RhfOptions& options = {});

// Evaluates the reduced Hartree functional at the Bose state of -Laplacian + U.
RhfState quasi_free_state(const GridSpec& grid, const Eigen::VectorXd& V,
                          const Eigen::VectorXd& U, const PairPotential& w, double T,
                          double lambda, double nu);

// sup |V0 + lambda rho * w - nu - V_T| / (1 + |V0|) for the state's density.
double fixed_point_residual(const RhfState& state, const Eigen::VectorXd& V,
                            const PairPotential& w, double lambda, double nu);

// gamma in the weighted grid basis: sum_j f_j v_j v_j^T.
Eigen::MatrixXd one_body_density(const RhfState& state);

// lambda / 2 iint rho w rho.
double reference_energy(const RhfState& state, const PairPotential& w, double lambda);

struct StabilizationRow {
  double T = 0.0;
  double lambda = 0.0;
  double nu = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  double free_energy = 0.0;
  double E0 = 0.0;
  double delta_inf = 0.0;
  double schatten_distance = 0.0;
};

struct StabilizationReport {
  std::vector<StabilizationRow> rows;
  Eigen::VectorXd proxy_potential;  // V_T at the largest T
  double schatten_p = 2.0;
  int shared_modes = 0;
  double sandwich_min_ratio = 0.0;  // min over V > 1 of (V_proxy - kappa) / V
  double sandwich_max_ratio = 0.0;
  bool sandwich_holds = false;
  bool delta_decreasing = false;      // anchor excluded
  bool schatten_decreasing = false;   // anchor excluded
};

// Solves along the T schedule with lambda = c / T and nu from
// chemical_potential; the largest T is the proxy for V_infinity.
StabilizationReport counterterm_stabilization(const GridSpec& grid, const Potential& trap,
                                              const PairPotential& w,
                                              const std::vector<double>& temperatures,
                                              double kappa, double coupling_c,
                                              const CountertermOptions& counterterm,
                                              const RhfOptions& options, double schatten_p,
                                              int shared_modes);

}  // namespace gfl

#endif  // GFL_HARTREE_HPP
