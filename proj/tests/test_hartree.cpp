#include <doctest.h>

#include <cmath>
#include <vector>

#include "gfl/errors.hpp"
#include "gfl/hartree.hpp"
#include "helpers.hpp"

using namespace gfl;
using gfl::test::pi;

namespace {

// int_R dk / (exp((k^2 + kappa) / T) - 1) = sum_n sqrt(pi T / n) exp(-n kappa / T).
double series_1d(double T, double kappa) {
  double s = 0.0;
  for (int n = 1; n < 100000; ++n) {
    const double term = std::sqrt(pi() * T / n) * std::exp(-n * kappa / T);
    s += term;
    if (term < 1e-17 * s) break;
  }
  return s;
}

struct Model {
  GridSpec grid{1, 6.0, 64};
  Eigen::VectorXd V;
  PairPotential w = PairPotential::gaussian_bump(grid, 1.0, 0.8);
  Model() {
    V.resize(grid.points);
    for (int i = 0; i < grid.points; ++i) V[i] = std::pow(grid.coordinate(i), 2);
  }
};

const Model& model() {
  static const Model m;
  return m;
}

}  // namespace

TEST_SUITE("hartree") {

TEST_CASE("reference density closed forms") {
  for (double T : {1.0, 4.0, 16.0})
    for (double kappa : {0.5, 4.0, 10.0}) {
      CHECK(rho0_kappa(T, kappa, 2) == doctest::Approx(test::radial_rho0(T, kappa)).epsilon(1e-8));
      CHECK(rho0_kappa(T, kappa, 1) == doctest::Approx(series_1d(T, kappa)).epsilon(1e-8));
    }
  CHECK(rho0_kappa(1.0, 1.0, 2) == doctest::Approx(-pi() * std::log1p(-std::exp(-1.0))).epsilon(1e-14));
}

TEST_CASE("reference density is monotone and scales") {
  CHECK(rho0_kappa(4.0, 2.0, 2) > rho0_kappa(4.0, 4.0, 2));
  CHECK(rho0_kappa(8.0, 4.0, 2) > rho0_kappa(4.0, 4.0, 2));
  // k -> sqrt(a) k: rho0(a T, a kappa) = a^{d/2} rho0(T, kappa).
  for (int d : {1, 2}) {
    const double a = 3.0;
    CHECK(rho0_kappa(a * 2.0, a * 1.5, d) == doctest::Approx(std::pow(a, 0.5 * d) * rho0_kappa(2.0, 1.5, d)).epsilon(1e-9));
  }
}

TEST_CASE("lattice reference density approaches the continuum value") {
  const double T = 4.0, kappa = 4.0;
  double previous = 1e300;
  for (int M : {16, 32, 64}) {
    const GridSpec grid{2, 4.5, M};
    const double gap = std::abs(lattice_rho0_kappa(T, kappa, grid) - rho0_kappa(T, kappa, 2));
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous / rho0_kappa(T, kappa, 2) < 0.05);
  // The lattice dispersion lies below k^2, so its Bose factor is larger.
  CHECK(lattice_rho0_kappa(T, kappa, GridSpec{2, 4.5, 16}) > rho0_kappa(T, kappa, 2));
}

TEST_CASE("chemical potential") {
  const GridSpec grid{2, 4.5, 16};
  const auto w = PairPotential::gaussian_bump(grid, 1.0, 1.0);
  CHECK(chemical_potential(4.0, 0.0, 3.0, w) == -3.0);
  const auto zero = PairPotential::gaussian_bump(grid, 0.0, 1.0);
  CHECK(chemical_potential(4.0, 0.5, 3.0, zero) == -3.0);
  const CountertermOptions opt{1.0 / (4.0 * pi() * pi()), true};
  const double expected = 0.25 * w.fourier_at_zero() * opt.momentum_measure * lattice_rho0_kappa(4.0, 3.0, grid) - 3.0;
  CHECK(chemical_potential(4.0, 0.25, 3.0, w, opt) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(reference_density(4.0, 3.0, grid, {}) == doctest::Approx(rho0_kappa(4.0, 3.0, 2)).epsilon(1e-14));
}

TEST_CASE("without interaction the fixed point is the free Bose state") {
  const auto& m = model();
  const double T = 2.0, nu = -1.0;
  const RhfState s = solve_rhf(m.grid, m.V, m.w, T, 0.0, nu);
  CHECK(s.converged);
  CHECK(s.iterations <= 1);
  const auto op = build_one_body(m.grid, m.V, m.grid.points);
  double F = 0.0;
  for (int j = 0; j < m.grid.points; ++j) F += T * std::log(-std::expm1(-(op.eigenvalues()[j] - nu) / T));
  CHECK(s.free_energy == doctest::Approx(F).epsilon(1e-10));
  for (int j = 0; j < m.grid.points; ++j) {
    CHECK(s.energies[j] == doctest::Approx(op.eigenvalues()[j] - nu).epsilon(1e-10));
    CHECK(s.occupations[j] == doctest::Approx(1.0 / std::expm1(s.energies[j] / T)).epsilon(1e-12));
  }
}

TEST_CASE("fixed point: residual, variational minimum, gauge and symmetry") {
  const auto& m = model();
  const double T = 3.0, lambda = 0.4, nu = -0.5;
  const RhfOptions opt{};
  const RhfState s = solve_rhf(m.grid, m.V, m.w, T, lambda, nu, opt);
  REQUIRE(s.converged);
  CHECK(fixed_point_residual(s, m.V, m.w, lambda, nu) < 2.0 * opt.tol);
  for (std::size_t i = 1; i < s.accepted_free_energies.size(); ++i)
    CHECK(s.accepted_free_energies[i] <= s.accepted_free_energies[i - 1] + 1e-12 * std::abs(s.accepted_free_energies[i - 1]));

  // The functional is minimal at the fixed point among Bose states of nearby potentials.
  for (double eps : {-0.05, 0.02, 0.1}) {
    Eigen::VectorXd U = s.potential;
    for (int i = 0; i < m.grid.points; ++i) U[i] += eps * std::cos(0.3 * i);
    CHECK(quasi_free_state(m.grid, m.V, U, m.w, T, lambda, nu).free_energy > s.free_energy);
  }

  // V + c with nu + c is the same problem.
  const RhfState g = solve_rhf(m.grid, (m.V.array() + 0.7).matrix(), m.w, T, lambda, nu + 0.7, opt);
  CHECK(g.free_energy == doctest::Approx(s.free_energy).epsilon(1e-9));
  CHECK((g.density - s.density).cwiseAbs().maxCoeff() < 1e-8 * s.density.cwiseAbs().maxCoeff());

  // Reflection-symmetric trap and kernel give an even density.
  const int M = m.grid.points;
  for (int i = 0; i < M; ++i) CHECK(std::abs(s.density[i] - s.density[M - 1 - i]) < 1e-8 * s.density.maxCoeff());

  const Eigen::MatrixXd gamma = one_body_density(s);
  CHECK((gamma - gamma.transpose()).norm() < 1e-12 * gamma.norm());
  CHECK(gamma.diagonal().sum() == doctest::Approx(s.occupations.sum()).epsilon(1e-10));
}

TEST_CASE("weak coupling is first-order perturbative") {
  const auto& m = model();
  const double T = 2.0, nu = -1.0, lambda = 1e-6;
  const RhfState free = solve_rhf(m.grid, m.V, m.w, T, 0.0, nu);
  const RhfState weak = solve_rhf(m.grid, m.V, m.w, T, lambda, nu);
  const double first_order = reference_energy(free, m.w, lambda);
  CHECK(weak.free_energy - free.free_energy == doctest::Approx(first_order).epsilon(1e-3));
}

TEST_CASE("reference energy") {
  const auto& m = model();
  const RhfState s = solve_rhf(m.grid, m.V, m.w, 2.0, 0.0, -1.0);
  CHECK(reference_energy(s, m.w, 0.0) == 0.0);
  const auto flat = PairPotential::tabulated(m.grid, {0.0, 100.0}, {0.6, 0.6});
  const double mass = s.density.sum() * m.grid.cell_volume();
  CHECK(reference_energy(s, flat, 2.0) == doctest::Approx(0.6 * mass * mass).epsilon(1e-10));
}

TEST_CASE("gap closure is a domain error") {
  const auto& m = model();
  CHECK_THROWS_AS(solve_rhf(m.grid, m.V, m.w, 2.0, 0.0, 5.0), DomainError);
}

TEST_CASE("zero coupling makes the counterterm schedule trivial") {
  const GridSpec grid{2, 4.5, 12};
  const auto w = PairPotential::gaussian_bump(grid, 1.0, 1.0);
  const auto r = counterterm_stabilization(grid, Potential::power(2.0), w, {4.0, 8.0, 16.0}, 4.0, 0.0,
                                           {}, {}, 2.0, 16);
  for (const auto& row : r.rows) {
    CHECK(row.nu == -4.0);
    CHECK(row.delta_inf == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(row.converged);
  }
  CHECK(r.sandwich_holds);
  CHECK(r.sandwich_min_ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(counterterm_stabilization(grid, Potential::power(2.0), w, {8.0, 4.0}, 4.0, 1.0, {}, {}, 2.0, 16),
                  ConfigError);
}

}  // TEST_SUITE
