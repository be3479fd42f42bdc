#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "gfl/errors.hpp"
#include "gfl/gaussian.hpp"
#include "gfl/interaction.hpp"
#include "helpers.hpp"

using namespace gfl;

namespace {

struct Setup {
  GridSpec grid{1, 6.0, 48};
  OneBodyOperator op = build_one_body(grid, Potential::power(2.0), 8);
  PairPotential w = PairPotential::gaussian_bump(grid, 1.3, 0.7);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

// 1/2 sum_{x,y} h^2 |u(x)|^2 w(x - y) |u(y)|^2 by the O(N^2) double loop.
double brute_force_bare(const Eigen::VectorXcd& u, const PairPotential& w, double h) {
  const int N = static_cast<int>(u.size());
  double s = 0.0;
  for (int x = 0; x < N; ++x)
    for (int y = 0; y < N; ++y) s += std::norm(u[x]) * w.offset_value(x - y) * std::norm(u[y]);
  return 0.5 * h * h * s;
}

FieldSample random_sample(int K, std::uint64_t seed) {
  return sample_gaussian(setup().op, K, 1, seed).sample(0);
}

}  // namespace

TEST_SUITE("interaction") {

TEST_CASE("bare interaction against a direct double sum") {
  const auto& s = setup();
  const double h = s.grid.cell_volume();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const FieldSample f = random_sample(8, seed);
    const Eigen::VectorXcd u = field_on_grid(f, s.op);
    CHECK(bare_interaction(f, s.op, s.w) == doctest::Approx(brute_force_bare(u, s.w, h)).epsilon(1e-10));
  }
  FieldSample zero{Eigen::VectorXcd::Zero(8), 1.0};
  CHECK(bare_interaction(zero, s.op, s.w) == 0.0);
}

TEST_CASE("single-mode renormalized interaction") {
  const auto& s = setup();
  const auto tensor = build_pair_tensor(s.op, s.w, 1);
  const double W = tensor(0, 0, 0, 0);
  const double lam = s.op.eigenvalues()[0];
  for (double a : {0.0, 0.3, 1.7}) {
    FieldSample f{Eigen::VectorXcd::Constant(1, std::complex<double>(a, 0.4 * a)), 1.0};
    const double x = std::norm(f.coefficients[0]);
    CHECK(renormalized_interaction(f, s.op, s.w, 1) ==
          doctest::Approx(0.5 * W * (x - 1.0 / lam) * (x - 1.0 / lam)).epsilon(1e-10));
  }
  FieldSample at_mean{Eigen::VectorXcd::Constant(1, std::sqrt(1.0 / lam)), 1.0};
  CHECK(std::abs(renormalized_interaction(at_mean, s.op, s.w, 1)) < 1e-14 * W);
}

TEST_CASE("exchange and direct terms in the eigenbasis") {
  const auto& s = setup();
  const int K = 6;
  const auto t = build_pair_tensor(s.op, s.w, K);
  const auto& lam = s.op.eigenvalues();
  double exchange = 0.0, direct = 0.0;
  for (int a = 0; a < K; ++a) {
    for (int b = 0; b < K; ++b) {
      exchange += 0.5 * t(a, a, b, b) / (lam[a] * lam[b]);
      direct += 0.5 * t(a, b, b, a) / (lam[a] * lam[b]);
    }
  }
  CHECK(exchange_term(s.op, s.w, K) == doctest::Approx(exchange).epsilon(1e-10));
  CHECK(direct_term(s.op, s.w, K) == doctest::Approx(direct).epsilon(1e-10));
  CHECK(wick_expectation_bare(s.op, s.w, K) == doctest::Approx(direct + exchange).epsilon(1e-10));

  const double W = build_pair_tensor(s.op, s.w, 1)(0, 0, 0, 0);
  CHECK(exchange_term(s.op, s.w, 1) == doctest::Approx(0.5 * W / (lam[0] * lam[0])).epsilon(1e-12));
  CHECK(direct_term(s.op, s.w, 1) == doctest::Approx(exchange_term(s.op, s.w, 1)).epsilon(1e-12));
}

TEST_CASE("mean-field energy") {
  const auto& s = setup();
  const auto shifted = shift_potential(s.op, 0.25);
  FieldSample e1{Eigen::VectorXcd::Zero(8), 1.0};
  e1.coefficients[0] = 1.0;
  // The quadratic part uses the unshifted operator.
  CHECK(mf_energy(e1, shifted, s.w, 0.0) == doctest::Approx(s.op.eigenvalues()[0]).epsilon(1e-12));
  const double W = build_pair_tensor(s.op, s.w, 1)(0, 0, 0, 0);
  CHECK(mf_energy(e1, s.op, s.w, 2.0) == doctest::Approx(s.op.eigenvalues()[0] + W).epsilon(1e-10));
}

TEST_CASE("pair tensor structure") {
  const auto& s = setup();
  const int K = 5;
  const auto t = build_pair_tensor(s.op, s.w, K);

  FieldSample e1{Eigen::VectorXcd::Zero(1), 1.0};
  e1.coefficients[0] = 1.0;
  CHECK(t(0, 0, 0, 0) == doctest::Approx(2.0 * bare_interaction(e1, s.op, s.w)).epsilon(1e-10));

  CHECK(t.max_exchange_asymmetry < 1e-10);
  CHECK(t.max_hermitian_asymmetry < 1e-10);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
          CHECK(t(i, j, k, l) == t(j, i, l, k));
          CHECK(t(i, j, k, l) == t(l, k, j, i));
        }

  // A positive-definite kernel gives a positive semidefinite pair matrix.
  REQUIRE(s.w.positive_definite());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.pair_matrix(), Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > -1e-10 * es.eigenvalues().maxCoeff());

  CHECK_THROWS(build_pair_tensor(build_one_body(s.grid, Potential::power(2.0), 13), s.w, kMaxTensorModes + 1));
}

TEST_CASE("constant kernel gives a product of overlaps") {
  const auto& s = setup();
  const double a = 0.8;
  const auto flat = PairPotential::tabulated(s.grid, {0.0, 100.0}, {a, a});
  const auto t = build_pair_tensor(s.op, flat, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          const double expected = (i == l && j == k) ? a : 0.0;
          CHECK(std::abs(t(i, j, k, l) - expected) < 1e-10);
        }
}

TEST_CASE("positivity and phase invariance") {
  const auto& s = setup();
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const FieldSample f = random_sample(8, seed);
    const double bare = bare_interaction(f, s.op, s.w);
    const double ren = renormalized_interaction(f, s.op, s.w, 8);
    CHECK(bare >= 0.0);
    CHECK(ren >= 0.0);
    FieldSample g = f;
    g.coefficients *= std::polar(1.0, 0.37 * static_cast<double>(seed));
    CHECK(bare_interaction(g, s.op, s.w) == doctest::Approx(bare).epsilon(1e-12));
    CHECK(renormalized_interaction(g, s.op, s.w, 8) == doctest::Approx(ren).epsilon(1e-12));
  }
}

TEST_CASE("batch evaluator agrees with the free functions") {
  const auto& s = setup();
  const Ensemble e = sample_gaussian(s.op, 8, 20, 77);
  const InteractionEvaluator ev(s.op, s.w, 8);
  const auto bare = ev.evaluate(e, EnergyKind::Bare);
  const auto ren = ev.evaluate(e, EnergyKind::Renormalized);
  for (std::size_t i = 0; i < e.size(); ++i) {
    CHECK(bare[i] == doctest::Approx(bare_interaction(e.sample(i), s.op, s.w)).epsilon(1e-12));
    CHECK(ren[i] == doctest::Approx(renormalized_interaction(e.sample(i), s.op, s.w, 8)).epsilon(1e-12));
  }
}

TEST_CASE("FFT convolution matches the direct lattice sum in two dimensions") {
  const GridSpec grid{2, 3.0, 12};
  const auto w = PairPotential::gaussian_bump(grid, 1.0, 0.9);
  const int M = grid.points;
  std::vector<double> f(grid.size()), out(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(0.3 * static_cast<double>(i)) + 0.1;
  w.lattice_convolve(f.data(), out.data());
  double worst = 0.0;
  for (int x0 = 0; x0 < M; ++x0)
    for (int x1 = 0; x1 < M; ++x1) {
      double direct = 0.0;
      for (int y0 = 0; y0 < M; ++y0)
        for (int y1 = 0; y1 < M; ++y1) direct += w.offset_value(x0 - y0, x1 - y1) * f[y0 * M + y1];
      worst = std::max(worst, std::abs(direct - out[x0 * M + x1]));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("grid delta kernel and integrability flags") {
  const GridSpec grid{2, 4.5, 40};
  const auto delta = PairPotential::grid_delta(grid, 2.0);
  CHECK(delta.offset_value(0, 0) * grid.cell_volume() == doctest::Approx(2.0));
  CHECK(delta.offset_value(1, 0) == 0.0);
  const auto bump = PairPotential::gaussian_bump(grid, 1.0, 1.0);
  const auto report = check_integrability(bump, Potential::power(2.0));
  CHECK(report.fourier_condition);
  CHECK(report.potential_condition);
  CHECK_FALSE(check_integrability(delta, Potential::power(2.0)).fourier_condition);
}

}  // TEST_SUITE
