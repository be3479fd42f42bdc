#include "gfl/gaussian.hpp"

#include <cmath>

#include "gfl/errors.hpp"
#include "gfl/parallel.hpp"
#include "gfl/random.hpp"

namespace gfl {

FieldSample Ensemble::sample(std::size_t i) const {
  return {coefficients.row(static_cast<Eigen::Index>(i)).transpose(),
          weights[static_cast<Eigen::Index>(i)]};
}

Ensemble Ensemble::truncated(int K) const {
  if (K < 1 || K > cutoff()) throw UsageError("truncation cutoff out of range");
  Ensemble out;
  out.operator_id = operator_id;
  out.seed = seed;
  out.coefficients = coefficients.leftCols(K);
  out.weights = weights;
  return out;
}

Ensemble sample_gaussian(const OneBodyOperator& op, int K, std::size_t n, std::uint64_t seed) {
  if (K < 1 || K > op.num_modes()) throw UsageError("cutoff exceeds the computed modes");
  const Eigen::VectorXd lam = op.eigenvalues().head(K);
  if (lam.minCoeff() <= 0.0) throw DomainError("reference operator is not positive");
  Ensemble e;
  e.operator_id = op.fingerprint();
  e.seed = seed;
  e.coefficients.resize(static_cast<Eigen::Index>(n), K);
  e.weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    SampleStream stream(seed, i);
    for (int j = 0; j < K; ++j) {
      e.coefficients(static_cast<Eigen::Index>(i), j) = stream.complex_normal(1.0 / lam[j]);
    }
  });
  return e;
}

double sobolev_norm_sq(const FieldSample& sample, const OneBodyOperator& op, double t) {
  if (sample.cutoff() > op.num_modes()) throw UsageError("sample has more modes than operator");
  double s = 0.0;
  for (int j = 0; j < sample.cutoff(); ++j) {
    s += std::pow(op.eigenvalues()[j], t) * std::norm(sample.coefficients[j]);
  }
  return s;
}

Eigen::VectorXcd field_on_grid(const FieldSample& sample, const OneBodyOperator& op) {
  const int K = sample.cutoff();
  if (K > op.num_modes()) throw UsageError("sample has more modes than operator");
  const auto v = op.eigenvectors().leftCols(K);
  const double scale = 1.0 / std::sqrt(op.grid().cell_volume());
  Eigen::VectorXcd u = v.cast<std::complex<double>>() * sample.coefficients;
  return u * scale;
}

}  // namespace gfl
