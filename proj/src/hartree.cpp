#include "gfl/hartree.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gfl/errors.hpp"
#include "gfl/parallel.hpp"

namespace gfl {

namespace {

void check_rho0_args(double T, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  if (!(T > 0.0)) throw DomainError("temperature must be positive");
}

double bose(double energy, double T) { return 1.0 / std::expm1(energy / T); }

}  // namespace

double rho0_kappa(double T, double kappa, int d) {
  check_rho0_args(T, kappa);
  if (d == 2) return std::numbers::pi * T * -std::log1p(-std::exp(-kappa / T));
  if (d != 1) throw ConfigError("rho0_kappa supports d = 1 and d = 2");
  boost::math::quadrature::exp_sinh<double> integrator;
  return 2.0 * integrator.integrate([&](double k) { return bose(k * k + kappa, T); }, 1e-13);
}

double lattice_rho0_kappa(double T, double kappa, const GridSpec& grid) {
  check_rho0_args(T, kappa);
  const double h = grid.spacing();
  const double edge = std::numbers::pi / h;
  const double scale = 4.0 / (h * h);
  auto dispersion = [&](double k) {
    const double s = std::sin(0.5 * k * h);
    return scale * s * s;
  };
  const double tol = 1e-12;
  using boost::math::quadrature::trapezoidal;
  // The integrand is even and periodic, so the trapezoid rule on [0, pi/h]
  // converges geometrically.
  if (grid.dimension == 1) {
    return 2.0 * trapezoidal([&](double k) { return bose(dispersion(k) + kappa, T); }, 0.0, edge,
                             tol, 20);
  }
  auto row = [&](double k1) {
    const double e1 = dispersion(k1) + kappa;
    return trapezoidal([&](double k2) { return bose(e1 + dispersion(k2), T); }, 0.0, edge, tol,
                       20);
  };
  return 4.0 * trapezoidal(row, 0.0, edge, tol, 20);
}

double reference_density(double T, double kappa, const GridSpec& grid,
                         const CountertermOptions& options) {
  const double rho = options.lattice_density ? lattice_rho0_kappa(T, kappa, grid)
                                             : rho0_kappa(T, kappa, grid.dimension);
  return options.momentum_measure * rho;
}

double chemical_potential(double T, double lambda, double kappa, const PairPotential& w,
                          const CountertermOptions& options) {
  if (lambda == 0.0 || w.fourier_at_zero() == 0.0) return -kappa;
  return lambda * w.fourier_at_zero() * reference_density(T, kappa, w.grid(), options) - kappa;
}

RhfState quasi_free_state(const GridSpec& grid, const Eigen::VectorXd& V,
                          const Eigen::VectorXd& U, const PairPotential& w, double T,
                          double lambda, double nu) {
  const int n = static_cast<int>(grid.size());
  OneBodyOperator op = build_one_body(grid, U, n);
  RhfState s;
  s.potential = U;
  s.energies = op.eigenvalues();
  if (!(s.energies[0] > 0.0)) {
    throw DomainError("chemical potential too large: effective gap closed (epsilon_1 = " +
                      std::to_string(s.energies[0]) + ")");
  }
  s.orbitals = op.eigenvectors();
  s.occupations.resize(n);
  double log_sum = 0.0;
  for (int j = 0; j < n; ++j) {
    s.occupations[j] = bose(s.energies[j], T);
    log_sum += std::log(-std::expm1(-s.energies[j] / T));
  }
  const Eigen::VectorXd weighted = s.orbitals.cwiseAbs2() * s.occupations;
  s.density = weighted / grid.cell_volume();
  // For the Bose state of h~ = -Laplacian + U: f e - T s(f) = T log(1 - e^{-e/T}),
  // and -Laplacian + V - nu = h~ - (U - V + nu).
  double value = T * log_sum - (U - V).array().cwiseProduct(weighted.array()).sum() -
                 nu * weighted.sum();
  if (lambda != 0.0) value += 0.5 * lambda * w.lattice_self_pair(weighted.data());
  s.free_energy = value;
  return s;
}

double fixed_point_residual(const RhfState& state, const Eigen::VectorXd& V,
                            const PairPotential& w, double lambda, double nu) {
  const double cell = w.grid().cell_volume();
  Eigen::VectorXd weighted = state.density * cell;
  Eigen::VectorXd conv = Eigen::VectorXd::Zero(V.size());
  if (lambda != 0.0) w.lattice_convolve(weighted.data(), conv.data());
  const Eigen::VectorXd target = V + lambda * conv - Eigen::VectorXd::Constant(V.size(), nu);
  return ((target - state.potential).array().abs() / (1.0 + V.array().abs())).maxCoeff();
}

RhfState solve_rhf(const GridSpec& grid, const Eigen::VectorXd& V, const PairPotential& w,
                   double T, double lambda, double nu, const RhfOptions& options) {
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw ConfigError("hartree.damping must lie in (0, 1]");
  }
  if (!(options.tol > 0.0)) throw ConfigError("hartree.tol must be positive");
  if (V.size() != static_cast<Eigen::Index>(grid.size())) {
    throw UsageError("potential has the wrong number of grid values");
  }
  const Eigen::VectorXd free_potential = V - Eigen::VectorXd::Constant(V.size(), nu);
  RhfState state = quasi_free_state(grid, V, free_potential, w, T, lambda, nu);
  std::vector<double> history{state.free_energy};
  const double cell = grid.cell_volume();
  Eigen::VectorXd conv(V.size());
  for (int it = 1; it <= options.max_iter; ++it) {
    conv.setZero();
    if (lambda != 0.0) {
      const Eigen::VectorXd weighted = state.density * cell;
      w.lattice_convolve(weighted.data(), conv.data());
    }
    const Eigen::VectorXd target = free_potential + lambda * conv;
    state.residual = ((target - state.potential).array().abs() / (1.0 + V.array().abs())).maxCoeff();
    state.iterations = it;
    if (state.residual < options.tol) {
      state.converged = true;
      break;
    }
    double theta = options.damping;
    while (true) {
      const Eigen::VectorXd candidate = (1.0 - theta) * state.potential + theta * target;
      RhfState next = quasi_free_state(grid, V, candidate, w, T, lambda, nu);
      const double slack = 1e-12 * std::max(1.0, std::abs(state.free_energy));
      if (next.free_energy <= state.free_energy + slack || theta < options.min_damping) {
        state = std::move(next);
        history.push_back(state.free_energy);
        break;
      }
      theta *= 0.5;
    }
  }
  state.accepted_free_energies = std::move(history);
  return state;
}

Eigen::MatrixXd one_body_density(const RhfState& state) {
  return state.orbitals * state.occupations.asDiagonal() * state.orbitals.transpose();
}

double reference_energy(const RhfState& state, const PairPotential& w, double lambda) {
  if (lambda == 0.0) return 0.0;
  const Eigen::VectorXd weighted = state.density * w.grid().cell_volume();
  return 0.5 * lambda * w.lattice_self_pair(weighted.data());
}

namespace {

// sum |mu|^p over the eigenvalues of A_1 - A_2 with A_i = V_i diag(1/e_i) V_i^T.
double schatten_distance(const RhfState& a, const RhfState& b, int K, double p) {
  const Eigen::Index n = a.orbitals.rows();
  Eigen::MatrixXd basis(n, 2 * K);
  basis << a.orbitals.leftCols(K), b.orbitals.leftCols(K);
  Eigen::VectorXd weights(2 * K);
  weights << a.energies.head(K).cwiseInverse(), -b.energies.head(K).cwiseInverse();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::MatrixXd r =
      qr.matrixQR().topRows(2 * K).triangularView<Eigen::Upper>().toDenseMatrix();
  const Eigen::MatrixXd core = r * weights.asDiagonal() * r.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (core + core.transpose()),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().abs().pow(p).sum();
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

StabilizationReport counterterm_stabilization(const GridSpec& grid, const Potential& trap,
                                              const PairPotential& w,
                                              const std::vector<double>& temperatures,
                                              double kappa, double coupling_c,
                                              const CountertermOptions& counterterm,
                                              const RhfOptions& options, double schatten_p,
                                              int shared_modes) {
  if (temperatures.size() < 2) throw ConfigError("hartree.temperatures needs at least two points");
  for (std::size_t i = 1; i < temperatures.size(); ++i) {
    if (!(temperatures[i] > temperatures[i - 1])) {
      throw ConfigError("hartree.temperatures must be strictly increasing");
    }
  }
  const auto n = static_cast<int>(grid.size());
  if (shared_modes < 1 || shared_modes > n) throw ConfigError("hartree.shared_modes out of range");
  Eigen::VectorXd V(n);
  for (int i = 0; i < n; ++i) V[i] = trap.at_radius(grid.radius(static_cast<std::size_t>(i)));

  const std::size_t count = temperatures.size();
  std::vector<RhfState> states(count);
  StabilizationReport report;
  report.rows.resize(count);
  report.schatten_p = schatten_p;
  report.shared_modes = shared_modes;
  parallel_for(count, [&](std::size_t i) {
    const double T = temperatures[i];
    auto& row = report.rows[i];
    row.T = T;
    row.lambda = coupling_c / T;
    row.nu = chemical_potential(T, row.lambda, kappa, w, counterterm);
    states[i] = solve_rhf(grid, V, w, T, row.lambda, row.nu, options);
    row.iterations = states[i].iterations;
    row.residual = states[i].residual;
    row.converged = states[i].converged;
    row.free_energy = states[i].free_energy;
    row.E0 = reference_energy(states[i], w, row.lambda);
  });
  const RhfState& proxy = states.back();
  report.proxy_potential = proxy.potential;
  std::vector<double> deltas, distances;
  for (std::size_t i = 0; i < count; ++i) {
    auto& row = report.rows[i];
    row.delta_inf =
        ((states[i].potential - proxy.potential).array().abs() / (1.0 + V.array())).maxCoeff();
    row.schatten_distance = schatten_distance(states[i], proxy, shared_modes, schatten_p);
    if (i + 1 < count) {
      deltas.push_back(row.delta_inf);
      distances.push_back(row.schatten_distance);
    }
  }
  report.delta_decreasing = strictly_decreasing(deltas);
  report.schatten_decreasing = strictly_decreasing(distances);
  report.sandwich_min_ratio = std::numeric_limits<double>::infinity();
  report.sandwich_max_ratio = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (V[i] <= 1.0) continue;
    const double ratio = (proxy.potential[i] - kappa) / V[i];
    report.sandwich_min_ratio = std::min(report.sandwich_min_ratio, ratio);
    report.sandwich_max_ratio = std::max(report.sandwich_max_ratio, ratio);
  }
  report.sandwich_holds = report.sandwich_min_ratio >= 0.5 && report.sandwich_max_ratio <= 1.5;
  return report;
}

}  // namespace gfl
