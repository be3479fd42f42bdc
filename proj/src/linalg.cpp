#include "gfl/linalg.hpp"

#include <lapacke.h>

#include <string>
#include <vector>

#include "gfl/errors.hpp"

namespace gfl {

EigenPairs lowest_eigenpairs_tridiagonal(const Eigen::VectorXd& diagonal,
                                         const Eigen::VectorXd& off_diagonal, int count) {
  const lapack_int n = static_cast<lapack_int>(diagonal.size());
  if (count < 1 || count > n) throw ConfigError("requested eigenpair count out of range");
  Eigen::VectorXd d = diagonal;
  Eigen::VectorXd e(n);
  e.setZero();
  e.head(n - 1) = off_diagonal;
  lapack_int found = 0;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  const lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, count, 0.0,
                     &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != count) {
    throw NumericalError("tridiagonal eigensolver failed (info " + std::to_string(info) + ")");
  }
  EigenPairs out{w.head(count), z};
  fix_eigenvector_signs(out.vectors);
  return out;
}

EigenPairs lowest_eigenpairs_symmetric(Eigen::MatrixXd matrix, int count) {
  const lapack_int n = static_cast<lapack_int>(matrix.rows());
  if (count < 1 || count > n) throw ConfigError("requested eigenpair count out of range");
  lapack_int found = 0;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  const char range = count == n ? 'A' : 'I';
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', range, 'L', n, matrix.data(), n, 0.0, 0.0, 1, count,
                     0.0, &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != count) {
    throw NumericalError("symmetric eigensolver failed (info " + std::to_string(info) + ")");
  }
  EigenPairs out{w.head(count), z};
  fix_eigenvector_signs(out.vectors);
  return out;
}

void fix_eigenvector_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      // Relative slack keeps the choice stable against last-bit noise.
      if (std::abs(vectors(i, j)) > best * (1.0 + 1e-9)) {
        best = std::abs(vectors(i, j));
        arg = i;
      }
    }
    if (vectors(arg, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

}  // namespace gfl
