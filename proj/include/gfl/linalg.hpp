#ifndef GFL_LINALG_HPP
#define GFL_LINALG_HPP

#include <Eigen/Dense>

namespace gfl {

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

// Lowest `count` eigenpairs of the symmetric tridiagonal matrix with the given
// diagonal and off-diagonal.
EigenPairs lowest_eigenpairs_tridiagonal(const Eigen::VectorXd& diagonal,
                                         const Eigen::VectorXd& off_diagonal, int count);

// Lowest `count` eigenpairs of a dense symmetric matrix (lower triangle read).
EigenPairs lowest_eigenpairs_symmetric(Eigen::MatrixXd matrix, int count);

// Flips each column so that its largest-magnitude entry (first one on ties)
// is positive.
void fix_eigenvector_signs(Eigen::MatrixXd& vectors);

}  // namespace gfl

#endif  // GFL_LINALG_HPP
