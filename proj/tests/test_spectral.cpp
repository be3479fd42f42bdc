#include <doctest.h>

#include <cmath>
#include <vector>

#include "gfl/errors.hpp"
#include "gfl/spectral.hpp"
#include "helpers.hpp"

using namespace gfl;
using gfl::test::pi;

TEST_SUITE("spectral") {

TEST_CASE("box spectrum matches the discrete and continuum Dirichlet values") {
  const int M = 512;
  const GridSpec grid{1, pi() / 2.0, M};
  const auto op = build_one_body(grid, Potential::box(), 3);
  for (int n = 1; n <= 3; ++n) {
    const double discrete = test::discrete_box_eigenvalue(n, M, grid.spacing());
    CHECK(op.eigenvalues()[n - 1] == doctest::Approx(discrete).epsilon(1e-11));
    CHECK(std::abs(op.eigenvalues()[n - 1] - n * n) < 1e-3);
  }
  const auto shifted = shift_potential(op, -1.0);
  for (int n = 1; n <= 3; ++n) CHECK(std::abs(shifted.eigenvalues()[n - 1] - (n * n + 1)) < 1e-3);
}

TEST_CASE("harmonic spectra in one and two dimensions") {
  const auto op1 = build_one_body({1, 8.0, 512}, Potential::power(2.0), 3);
  for (int n = 1; n <= 3; ++n) CHECK(std::abs(op1.eigenvalues()[n - 1] - (2 * n - 1)) < 2e-3);

  const auto op2 = build_one_body({2, 6.0, 60}, Potential::power(2.0), 3);
  CHECK(std::abs(op2.eigenvalues()[0] - 2.0) < 1e-2);
  CHECK(std::abs(op2.eigenvalues()[1] - 4.0) < 2e-2);
  CHECK(std::abs(op2.eigenvalues()[2] - op2.eigenvalues()[1]) < 1e-9);
}

TEST_CASE("num_eigs beyond the grid is a configuration error") {
  CHECK_THROWS_AS(build_one_body({1, 1.0, 8}, Potential::box(), 9), ConfigError);
}

TEST_CASE("shift_potential") {
  const auto op = build_one_body({1, 8.0, 256}, Potential::power(2.0), 4);
  const auto same = shift_potential(op, 0.0);
  CHECK((same.eigenvalues() - op.eigenvalues()).norm() == 0.0);
  CHECK((same.eigenvectors() - op.eigenvectors()).norm() == 0.0);

  const auto half = shift_potential(op, 0.5);
  CHECK(half.eigenvalues()[0] == doctest::Approx(op.eigenvalues()[0] - 0.5).epsilon(1e-14));
  CHECK(half.eigenvalues()[1] == doctest::Approx(op.eigenvalues()[1] - 0.5).epsilon(1e-14));
  CHECK(std::abs(half.eigenvalues()[0] - 0.5) < 2e-3);
  CHECK(std::abs(half.eigenvalues()[1] - 2.5) < 2e-3);

  const auto box = build_one_body({1, pi() / 2.0, 64}, Potential::box(), 2);
  CHECK_THROWS_AS(shift_potential(box, box.eigenvalues()[0]), DomainError);
}

TEST_CASE("schatten trace partial sums and divergence flags") {
  // 1D box with unit shift, p = 2, against the closed-form discrete spectrum
  // and the continuum series sum (n^2 + 1)^-2.
  const int M = 512;
  const GridSpec grid{1, pi() / 2.0, M};
  const int J = 64;
  const auto op = shift_potential(build_one_body(grid, Potential::box(), J), -1.0);
  const auto t = schatten_trace(op, 2.0);
  double oracle = 0.0;
  for (int n = 1; n <= J; ++n) {
    oracle += std::pow(test::discrete_box_eigenvalue(n, M, grid.spacing()) + 1.0, -2.0);
  }
  CHECK(t.partial_sum == doctest::Approx(oracle).epsilon(1e-10));
  CHECK_FALSE(t.likely_divergent);
  const double series = pi() / 4.0 / std::tanh(pi()) + pi() * pi() / (4.0 * std::pow(std::sinh(pi()), 2)) - 0.5;
  CHECK(std::abs(t.partial_sum + t.tail_estimate - series) < 1e-5);

  // Harmonic traps: lambda_j ~ j in 1D and ~ j^{1/2} in 2D. Grids are chosen
  // so the fitted modes sit inside the trap and below the lattice cutoff.
  const auto ho = build_one_body({1, 18.0, 2048}, Potential::power(2.0), 100);
  CHECK(schatten_trace(ho, 1.0).likely_divergent);
  CHECK_FALSE(schatten_trace(ho, 2.0).likely_divergent);

  const auto ho2 = build_one_body({2, 7.0, 56}, Potential::power(2.0), 150);
  CHECK(schatten_trace(ho2, 2.0).likely_divergent);
  CHECK_FALSE(schatten_trace(ho2, 3.0).likely_divergent);
}

TEST_CASE("green kernel") {
  const GridSpec grid{1, 8.0, 256};
  const auto op = build_one_body(grid, Potential::power(4.0), 16);
  const double h = grid.cell_volume();

  const auto g1 = green_kernel(op, 1);
  const Eigen::VectorXd u1 = op.eigenvectors().col(0) / std::sqrt(h);
  const Eigen::MatrixXd rank_one = u1 * u1.transpose() / op.eigenvalues()[0];
  CHECK((g1.matrix - rank_one).norm() < 1e-12 * rank_one.norm());

  const auto g = green_kernel(op, 16);
  CHECK((g.matrix - g.matrix.transpose()).norm() < 1e-13 * g.matrix.norm());
  CHECK(g.diagonal.sum() * h == doctest::Approx(op.eigenvalues().cwiseInverse().sum()).epsilon(1e-8));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.matrix, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > -1e-10 * es.eigenvalues().maxCoeff());

  // Shift then green kernel equals the kernel built with lambda_j - nu.
  const double nu = 0.3;
  const auto gs = green_kernel(shift_potential(op, nu), 16);
  Eigen::MatrixXd manual = Eigen::MatrixXd::Zero(grid.points, grid.points);
  for (int j = 0; j < 16; ++j) {
    const Eigen::VectorXd u = op.eigenvectors().col(j) / std::sqrt(h);
    manual += u * u.transpose() / (op.eigenvalues()[j] - nu);
  }
  CHECK((gs.matrix - manual).norm() < 1e-12 * manual.norm());
}

TEST_CASE("2D harmonic density at the origin grows logarithmically") {
  // Closed shells (10, 36, 136 modes: shells 4, 8, 16) so the kernel does not
  // depend on the basis chosen inside a degenerate level.
  const GridSpec grid{2, 9.0, 56};
  const auto op = build_one_body(grid, Potential::power(2.0), 136);
  std::size_t centre = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.radius(i) < grid.radius(centre)) centre = i;
  std::vector<double> rho;
  for (int K : {10, 36, 136}) rho.push_back(green_kernel(op, K).diagonal[static_cast<Eigen::Index>(centre)]);
  const double d1 = rho[1] - rho[0], d2 = rho[2] - rho[1];
  CHECK(d1 > 0.0);
  CHECK(d2 > 0.0);
  CHECK(d2 / d1 > 0.5);
  CHECK(d2 / d1 < 2.0);
}

TEST_CASE("eigenvectors are orthonormal and satisfy the eigen equation") {
  for (const GridSpec& grid : {GridSpec{1, 8.0, 512}, GridSpec{2, 4.5, 40}}) {
    const auto op = shift_potential(build_one_body(grid, Potential::power(2.0), 24), 0.2);
    const Eigen::MatrixXd gram = op.eigenvectors().transpose() * op.eigenvectors();
    CHECK((gram - Eigen::MatrixXd::Identity(24, 24)).cwiseAbs().maxCoeff() < 1e-10);
    for (int j = 0; j < 24; ++j) {
      const Eigen::VectorXd v = op.eigenvectors().col(j);
      const double residual = (op.apply(v) - op.eigenvalues()[j] * v).norm() / op.eigenvalues()[j];
      CHECK(residual < 1e-8);
    }
    for (int j = 1; j < 24; ++j) CHECK(op.eigenvalues()[j] >= op.eigenvalues()[j - 1]);
  }
}

TEST_CASE("grid refinement is second order") {
  std::vector<double> hs;
  std::vector<std::vector<double>> errors(5);
  for (int M : {64, 128, 256, 512}) {
    const GridSpec grid{1, 8.0, M};
    const auto op = build_one_body(grid, Potential::power(2.0), 5);
    hs.push_back(grid.spacing());
    for (int n = 0; n < 5; ++n) errors[n].push_back(std::abs(op.eigenvalues()[n] - (2 * n + 1)));
  }
  for (int n = 0; n < 5; ++n) CHECK(test::loglog_slope(hs, errors[n]) >= 1.8);
}

TEST_CASE("weighted density is h^d times the green diagonal") {
  const GridSpec grid{2, 4.5, 24};
  const auto op = build_one_body(grid, Potential::power(2.0), 12);
  const Eigen::VectorXd w = weighted_density(op, 12);
  const Eigen::VectorXd g = green_kernel(op, 12).diagonal * grid.cell_volume();
  CHECK((w - g).norm() < 1e-12 * g.norm());
}

}  // TEST_SUITE
