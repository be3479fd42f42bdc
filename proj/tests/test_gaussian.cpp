#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "gfl/binary_io.hpp"
#include "gfl/errors.hpp"
#include "gfl/gaussian.hpp"
#include "gfl/parallel.hpp"
#include "helpers.hpp"

using namespace gfl;

namespace {

const OneBodyOperator& harmonic_1d() {
  static const OneBodyOperator op = build_one_body({1, 8.0, 256}, Potential::power(2.0), 8);
  return op;
}

}  // namespace

TEST_SUITE("gaussian") {

TEST_CASE("second moments of the sampled coefficients") {
  const auto& op = harmonic_1d();
  const std::size_t n = 100000;
  const int K = 4;
  const Ensemble e = sample_gaussian(op, K, n, 11);
  const double rn = std::sqrt(static_cast<double>(n));
  for (int j = 0; j < K; ++j) {
    const double lam = op.eigenvalues()[j];
    double abs2 = 0.0;
    std::complex<double> square = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = e.coefficients(static_cast<Eigen::Index>(i), j);
      abs2 += std::norm(a);
      square += a * a;
    }
    abs2 /= static_cast<double>(n);
    square /= static_cast<double>(n);
    CHECK(std::abs(abs2 - 1.0 / lam) < 4.0 / (lam * rn));
    CHECK(std::abs(square) < 4.0 / (lam * rn));
    for (int k = j + 1; k < K; ++k) {
      std::complex<double> cross = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cross += e.coefficients(static_cast<Eigen::Index>(i), j) *
                 std::conj(e.coefficients(static_cast<Eigen::Index>(i), k));
      }
      cross /= static_cast<double>(n);
      CHECK(std::abs(cross) < 4.0 / (std::sqrt(lam * op.eigenvalues()[k]) * rn));
    }
  }
}

TEST_CASE("fourth moment follows the complex Gaussian kurtosis") {
  const auto& op = harmonic_1d();
  const std::size_t n = 100000;
  const Ensemble e = sample_gaussian(op, 3, n, 5);
  for (int j = 0; j < 3; ++j) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(std::norm(e.coefficients(static_cast<Eigen::Index>(i), j)), 2);
    double m = 0, s = 0;
    for (double v : x) m += v;
    m /= static_cast<double>(n);
    for (double v : x) s += (v - m) * (v - m);
    const double se = std::sqrt(s / static_cast<double>(n - 1) / static_cast<double>(n));
    const double lam = op.eigenvalues()[j];
    CHECK(std::abs(m - 2.0 / (lam * lam)) < 5.0 * se);
  }
}

TEST_CASE("sobolev norms") {
  const auto& op = harmonic_1d();
  const int K = 6;
  const std::size_t n = 50000;
  const Ensemble e = sample_gaussian(op, K, n, 3);
  const FieldSample s = e.sample(17);
  CHECK(sobolev_norm_sq(s, op, 0.0) == doctest::Approx(s.coefficients.squaredNorm()).epsilon(1e-14));

  // lambda_j |alpha_j|^2 is Exp(1) per mode: mean K, variance K.
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += sobolev_norm_sq(e.sample(i), op, 1.0);
  mean /= static_cast<double>(n);
  CHECK(std::abs(mean - K) < 4.0 * std::sqrt(K / static_cast<double>(n)));
}

TEST_CASE("mass stabilizes under cutoff doubling exactly when tr h^-1 converges") {
  // E ||P_K u||^2 = sum_{j <= K} 1/lambda_j. Increments over doublings shrink
  // in the trace-class case and grow otherwise; the Schatten flag must agree.
  struct Model {
    GridSpec grid;
    double s;
  };
  for (const Model& m : {Model{{1, 6.0, 1024}, 4.0}, Model{{2, 6.0, 40}, 2.0}}) {
    // Modes are kept well below the lattice cutoff so the growth fit sees the
    // continuum spectrum.
    const auto op = build_one_body(m.grid, Potential::power(m.s), 128);
    const bool convergent = !schatten_trace(op, 1.0).likely_divergent;
    const std::size_t n = 20000;
    const Ensemble e = sample_gaussian(op, 128, n, 21);
    std::vector<double> means;
    for (int K : {32, 64, 128}) {
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const FieldSample head{e.sample(i).coefficients.head(K), 1.0};
        mass += sobolev_norm_sq(head, op, 0.0);
      }
      means.push_back(mass / static_cast<double>(n));
    }
    const bool shrinking = (means[2] - means[1]) < (means[1] - means[0]);
    CHECK(shrinking == convergent);
  }
}

TEST_CASE("expected mass equals the p = 1 Schatten partial sum") {
  const auto& op = harmonic_1d();
  const int K = 8;
  const std::size_t n = 50000;
  const Ensemble e = sample_gaussian(op, K, n, 8);
  std::vector<double> mass(n);
  for (std::size_t i = 0; i < n; ++i) mass[i] = e.sample(i).coefficients.squaredNorm();
  double m = 0, s = 0;
  for (double v : mass) m += v;
  m /= static_cast<double>(n);
  for (double v : mass) s += (v - m) * (v - m);
  const double se = std::sqrt(s / static_cast<double>(n - 1) / static_cast<double>(n));
  CHECK(std::abs(m - schatten_trace(op, 1.0).partial_sum) < 4.0 * se);
}

TEST_CASE("field synthesis") {
  const auto& op = harmonic_1d();
  const double h = op.grid().cell_volume();
  FieldSample s{Eigen::VectorXcd::Zero(8), 1.0};
  CHECK(field_on_grid(s, op).norm() == 0.0);
  s.coefficients[0] = 1.0;
  const Eigen::VectorXcd u = field_on_grid(s, op);
  CHECK((u.real() - op.eigenvectors().col(0) / std::sqrt(h)).norm() == doctest::Approx(0.0));
  CHECK(u.imag().norm() == 0.0);

  const Ensemble e = sample_gaussian(op, 8, 10, 4);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const FieldSample r = e.sample(i);
    const double grid_mass = field_on_grid(r, op).squaredNorm() * h;
    CHECK(std::abs(grid_mass - r.coefficients.squaredNorm()) < 1e-10 * (1.0 + grid_mass));
  }
}

TEST_CASE("non-positive spectrum is rejected") {
  const auto box = build_one_body({1, 1.0, 32}, Potential::box(), 2);
  // Build a shifted copy through an artificial grid potential below zero.
  Eigen::VectorXd v = Eigen::VectorXd::Constant(32, -100.0);
  const auto negative = build_one_body({1, 1.0, 32}, v, 2);
  CHECK(negative.eigenvalues()[0] < 0.0);
  CHECK_THROWS_AS(sample_gaussian(negative, 2, 10, 1), DomainError);
  CHECK_NOTHROW(sample_gaussian(box, 2, 10, 1));
}

TEST_CASE("ensembles are reproducible, thread-independent and prefix-consistent") {
  const auto& op = harmonic_1d();
  set_thread_count(1);
  const Ensemble a = sample_gaussian(op, 6, 3000, 99);
  set_thread_count(4);
  const Ensemble b = sample_gaussian(op, 6, 3000, 99);
  set_thread_count(1);
  CHECK(a.coefficients == b.coefficients);
  const Ensemble c = sample_gaussian(op, 3, 3000, 99);
  CHECK(a.truncated(3).coefficients == c.coefficients);
  CHECK(a.seed == 99);
  CHECK(a.operator_id == op.fingerprint());
}

TEST_CASE("covariance error scales as n^-1/2") {
  const auto& op = harmonic_1d();
  const int K = 4;
  std::vector<double> ns, errs;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    const Ensemble e = sample_gaussian(op, K, n, 1234);
    const Eigen::MatrixXcd cov = e.coefficients.transpose() * e.coefficients.conjugate() / static_cast<double>(n);
    Eigen::MatrixXcd target = Eigen::MatrixXcd::Zero(K, K);
    for (int j = 0; j < K; ++j) target(j, j) = 1.0 / op.eigenvalues()[j];
    ns.push_back(static_cast<double>(n));
    errs.push_back((cov - target).norm());
  }
  const double slope = test::loglog_slope(ns, errs);
  CHECK(slope > -0.65);
  CHECK(slope < -0.35);
}

TEST_CASE("binary ensemble and matrix dumps round trip") {
  const auto& op = harmonic_1d();
  Ensemble e = sample_gaussian(op, 3, 50, 7);
  e.weights[4] = 0.25;
  const std::string path = "gaussian_roundtrip.ens";
  write_ensemble(path, e);
  const Ensemble r = read_ensemble(path);
  CHECK(r.seed == 7);
  CHECK(r.coefficients == e.coefficients);
  CHECK(r.weights == e.weights);

  Eigen::MatrixXcd m(2, 3);
  m << 1.0, std::complex<double>(0, 2), 3.5, -1e-300, std::complex<double>(1e300, -4), 0.1;
  write_matrix("roundtrip.gflm", m);
  CHECK(read_matrix("roundtrip.gflm") == m);
}

}  // TEST_SUITE
