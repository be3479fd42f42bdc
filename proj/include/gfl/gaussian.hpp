#ifndef GFL_GAUSSIAN_HPP
#define GFL_GAUSSIAN_HPP

#include <complex>
#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "gfl/spectral.hpp"

namespace gfl {

using ComplexRowMatrix =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Coordinates of P_K u in the eigenbasis of the (shifted) reference operator.
struct FieldSample {
  Eigen::VectorXcd coefficients;
  double weight = 1.0;

  int cutoff() const { return static_cast<int>(coefficients.size()); }
};

// Samples stored as rows of one coefficient matrix. The first K' columns of
// an ensemble drawn at cutoff K equal the ensemble drawn at K' with the same
// seed, so cutoff sequences share their randomness.
struct Ensemble {
  std::uint64_t operator_id = 0;
  std::uint64_t seed = 0;
  ComplexRowMatrix coefficients;  // n x K
  Eigen::VectorXd weights;        // n, all 1 unless reweighted

  int cutoff() const { return static_cast<int>(coefficients.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(coefficients.rows()); }
  FieldSample sample(std::size_t i) const;
  // Same samples restricted to the first K modes.
  Ensemble truncated(int K) const;
};

Ensemble sample_gaussian(const OneBodyOperator& op, int K, std::size_t n, std::uint64_t seed);

// sum_j lambda_j^t |alpha_j|^2.
double sobolev_norm_sq(const FieldSample& sample, const OneBodyOperator& op, double t);

// u(x_i) = sum_j alpha_j u_j(x_i) in physical units.
Eigen::VectorXcd field_on_grid(const FieldSample& sample, const OneBodyOperator& op);

}  // namespace gfl

#endif  // GFL_GAUSSIAN_HPP
