#include "gfl/binary_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "gfl/errors.hpp"

namespace gfl {

namespace {

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot open " + path + " for writing");
  }
  void magic(const char (&tag)[5]) { out_.write(tag, 4); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void finish(const std::string& path) {
    out_.flush();
    if (!out_) throw NumericalError("write failed for " + path);
  }

 private:
  void le(std::uint64_t v, int bytes) {
    char buf[8];
    for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
    out_.write(buf, bytes);
  }
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw ConfigError("cannot open " + path);
  }
  void expect_magic(const char (&tag)[5]) {
    char buf[4];
    in_.read(buf, 4);
    if (!in_ || std::memcmp(buf, tag, 4) != 0) throw ConfigError(path_ + ": bad magic");
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }

 private:
  std::uint64_t le(int bytes) {
    unsigned char buf[8];
    in_.read(reinterpret_cast<char*>(buf), bytes);
    if (!in_) throw ConfigError(path_ + ": truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }
  std::ifstream in_;
  std::string path_;
};

}  // namespace

void write_ensemble(const std::string& path, const Ensemble& ensemble) {
  Writer w(path);
  w.magic("GFL1");
  w.u32(static_cast<std::uint32_t>(ensemble.cutoff()));
  w.u64(ensemble.size());
  w.u64(ensemble.seed);
  for (Eigen::Index i = 0; i < ensemble.coefficients.rows(); ++i) {
    for (Eigen::Index j = 0; j < ensemble.coefficients.cols(); ++j) {
      w.f64(ensemble.coefficients(i, j).real());
      w.f64(ensemble.coefficients(i, j).imag());
    }
  }
  for (Eigen::Index i = 0; i < ensemble.weights.size(); ++i) w.f64(ensemble.weights[i]);
  w.finish(path);
}

Ensemble read_ensemble(const std::string& path) {
  Reader r(path);
  r.expect_magic("GFL1");
  const auto K = static_cast<Eigen::Index>(r.u32());
  const auto n = static_cast<Eigen::Index>(r.u64());
  Ensemble e;
  e.seed = r.u64();
  e.coefficients.resize(n, K);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      const double re = r.f64();
      const double im = r.f64();
      e.coefficients(i, j) = {re, im};
    }
  }
  e.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) e.weights[i] = r.f64();
  return e;
}

void write_matrix(const std::string& path, const Eigen::MatrixXcd& matrix) {
  Writer w(path);
  w.magic("GFLM");
  w.u32(static_cast<std::uint32_t>(matrix.rows()));
  w.u32(static_cast<std::uint32_t>(matrix.cols()));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      w.f64(matrix(i, j).real());
      w.f64(matrix(i, j).imag());
    }
  }
  w.finish(path);
}

Eigen::MatrixXcd read_matrix(const std::string& path) {
  Reader r(path);
  r.expect_magic("GFLM");
  const auto rows = static_cast<Eigen::Index>(r.u32());
  const auto cols = static_cast<Eigen::Index>(r.u32());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = r.f64();
      const double im = r.f64();
      m(i, j) = {re, im};
    }
  }
  return m;
}

}  // namespace gfl
