#ifndef GFL_BINARY_IO_HPP
#define GFL_BINARY_IO_HPP

#include <string>

#include <Eigen/Dense>

#include "gfl/gaussian.hpp"

namespace gfl {

// "GFL1" | u32 K | u64 n | u64 seed | n*K (re, im) f64 row-major | n f64 weights.
// All fields little-endian.
void write_ensemble(const std::string& path, const Ensemble& ensemble);
Ensemble read_ensemble(const std::string& path);

// "GFLM" | u32 rows | u32 cols | rows*cols (re, im) f64 row-major.
void write_matrix(const std::string& path, const Eigen::MatrixXcd& matrix);
Eigen::MatrixXcd read_matrix(const std::string& path);

}  // namespace gfl

#endif  // GFL_BINARY_IO_HPP
