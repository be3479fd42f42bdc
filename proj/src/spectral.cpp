#include "gfl/spectral.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "gfl/errors.hpp"
#include "gfl/linalg.hpp"

namespace gfl {

double GridSpec::cell_volume() const { return std::pow(spacing(), dimension); }

std::size_t GridSpec::size() const {
  const auto m = static_cast<std::size_t>(points);
  return dimension == 1 ? m : m * m;
}

double GridSpec::radius(std::size_t index) const {
  if (dimension == 1) return std::abs(coordinate(static_cast<int>(index)));
  const int ix = static_cast<int>(index / points);
  const int iy = static_cast<int>(index % points);
  return std::hypot(coordinate(ix), coordinate(iy));
}

void GridSpec::validate(std::size_t cap) const {
  if (dimension != 1 && dimension != 2) throw ConfigError("model.d must be 1 or 2");
  if (!(half_width > 0.0)) throw ConfigError("model.L must be positive");
  if (points < 8) throw ConfigError("model.M must be at least 8");
  if (size() > cap) {
    throw ConfigError("model.M: " + std::to_string(size()) + " grid points exceed the cap of " +
                      std::to_string(cap));
  }
}

double Potential::at_radius(double r) const {
  switch (kind) {
    case Kind::Power: return std::pow(r, exponent);
    case Kind::Box: return 0.0;
    case Kind::Tabulated: break;
  }
  throw UsageError("tabulated potential has no closed form");
}

OneBodyOperator::OneBodyOperator(GridSpec grid, Potential potential,
                                 Eigen::VectorXd potential_values, Eigen::VectorXd eigenvalues,
                                 Eigen::MatrixXd eigenvectors, double shift)
    : grid_(grid),
      potential_(potential),
      potential_values_(std::make_shared<const Eigen::VectorXd>(std::move(potential_values))),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::make_shared<const Eigen::MatrixXd>(std::move(eigenvectors))),
      shift_(shift) {}

Eigen::VectorXd OneBodyOperator::apply(const Eigen::VectorXd& v) const {
  const int m = grid_.points;
  const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
  const auto& pot = *potential_values_;
  Eigen::VectorXd out(v.size());
  if (grid_.dimension == 1) {
    for (int i = 0; i < m; ++i) {
      double lap = 2.0 * v[i];
      if (i > 0) lap -= v[i - 1];
      if (i + 1 < m) lap -= v[i + 1];
      out[i] = lap * inv_h2 + (pot[i] - shift_) * v[i];
    }
    return out;
  }
  for (int ix = 0; ix < m; ++ix) {
    for (int iy = 0; iy < m; ++iy) {
      const int i = ix * m + iy;
      double lap = 4.0 * v[i];
      if (ix > 0) lap -= v[i - m];
      if (ix + 1 < m) lap -= v[i + m];
      if (iy > 0) lap -= v[i - 1];
      if (iy + 1 < m) lap -= v[i + 1];
      out[i] = lap * inv_h2 + (pot[i] - shift_) * v[i];
    }
  }
  return out;
}

namespace {

void fnv_mix(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

Eigen::VectorXd sample_potential(const GridSpec& grid, const Potential& potential) {
  Eigen::VectorXd v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = potential.at_radius(grid.radius(i));
  return v;
}

OneBodyOperator diagonalize(const GridSpec& grid, const Potential& potential,
                            Eigen::VectorXd values, int num_eigs, std::size_t cap) {
  grid.validate(cap);
  const auto n = static_cast<int>(grid.size());
  if (num_eigs < 1 || num_eigs > n) {
    throw ConfigError("model.num_eigs must lie in [1, " + std::to_string(n) + "]");
  }
  if (values.size() != n) throw UsageError("potential has the wrong number of grid values");
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  EigenPairs pairs;
  if (grid.dimension == 1) {
    Eigen::VectorXd diag = values.array() + 2.0 * inv_h2;
    Eigen::VectorXd off = Eigen::VectorXd::Constant(n - 1, -inv_h2);
    pairs = lowest_eigenpairs_tridiagonal(diag, off, num_eigs);
  } else {
    const int m = grid.points;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int ix = 0; ix < m; ++ix) {
      for (int iy = 0; iy < m; ++iy) {
        const int i = ix * m + iy;
        a(i, i) = 4.0 * inv_h2 + values[i];
        if (ix + 1 < m) a(i + m, i) = -inv_h2;
        if (iy + 1 < m) a(i + 1, i) = -inv_h2;
      }
    }
    pairs = lowest_eigenpairs_symmetric(std::move(a), num_eigs);
  }
  if (!pairs.values.allFinite()) throw NumericalError("non-finite eigenvalues");
  return OneBodyOperator(grid, potential, std::move(values), std::move(pairs.values),
                         std::move(pairs.vectors), 0.0);
}

}  // namespace

std::uint64_t OneBodyOperator::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv_mix(h, &grid_.dimension, sizeof grid_.dimension);
  fnv_mix(h, &grid_.half_width, sizeof grid_.half_width);
  fnv_mix(h, &grid_.points, sizeof grid_.points);
  const int kind = static_cast<int>(potential_.kind);
  fnv_mix(h, &kind, sizeof kind);
  fnv_mix(h, &potential_.exponent, sizeof potential_.exponent);
  fnv_mix(h, &shift_, sizeof shift_);
  fnv_mix(h, eigenvalues_.data(), sizeof(double) * static_cast<std::size_t>(eigenvalues_.size()));
  return h;
}

OneBodyOperator build_one_body(const GridSpec& grid, const Potential& potential, int num_eigs,
                               std::size_t cap) {
  if (potential.kind == Potential::Kind::Power && !(potential.exponent > 1.0)) {
    throw ConfigError("model.s must exceed 1");
  }
  if (potential.kind == Potential::Kind::Tabulated) {
    throw UsageError("tabulated potentials are built from grid values");
  }
  grid.validate(cap);
  return diagonalize(grid, potential, sample_potential(grid, potential), num_eigs, cap);
}

OneBodyOperator build_one_body(const GridSpec& grid, const Eigen::VectorXd& potential_values,
                               int num_eigs, std::size_t cap) {
  return diagonalize(grid, Potential{Potential::Kind::Tabulated, 0.0}, potential_values, num_eigs,
                     cap);
}

OneBodyOperator shift_potential(const OneBodyOperator& op, double nu) {
  if (!(nu < op.eigenvalues()[0])) {
    throw DomainError("shift " + std::to_string(nu) + " is not below the lowest eigenvalue " +
                      std::to_string(op.eigenvalues()[0]) + ": measure would be undefined");
  }
  if (nu == 0.0) return op;
  Eigen::VectorXd shifted = op.eigenvalues().array() - nu;
  return OneBodyOperator(op.grid(), op.potential(), op.potential_values(), std::move(shifted),
                         op.eigenvectors(), op.shift() + nu);
}

SchattenTrace schatten_trace(const OneBodyOperator& op, double p) {
  if (!(p > 0.0)) throw ConfigError("Schatten exponent must be positive");
  const auto& lam = op.eigenvalues();
  const int J = op.num_modes();
  SchattenTrace out;
  out.p = p;
  for (int j = 0; j < J; ++j) out.partial_sum += std::pow(lam[j], -p);
  const int first = J - std::max(2, J / 4);
  if (first < 0 || lam[first] <= 0.0) {
    out.likely_divergent = true;
    out.tail_estimate = std::numeric_limits<double>::infinity();
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int count = J - first;
  for (int j = first; j < J; ++j) {
    const double x = std::log(j + 1.0);
    const double y = std::log(lam[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double b = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  const double log_c = (sy - b * sx) / count;
  out.growth_exponent = b;
  if (b * p <= 1.0 + kSchattenMargin) {
    out.likely_divergent = true;
    out.tail_estimate = std::numeric_limits<double>::infinity();
  } else {
    // Integral of (C x^b)^{-p} from J + 1/2 to infinity.
    out.tail_estimate = std::exp(-p * log_c) * std::pow(J + 0.5, 1.0 - b * p) / (b * p - 1.0);
  }
  return out;
}

Eigen::VectorXd weighted_density(const OneBodyOperator& op, int K) {
  if (K < 1 || K > op.num_modes()) throw UsageError("cutoff exceeds the computed modes");
  const auto& v = op.eigenvectors();
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(v.rows());
  for (int j = 0; j < K; ++j) rho += v.col(j).cwiseAbs2() / op.eigenvalues()[j];
  return rho;
}

GreenKernel green_kernel(const OneBodyOperator& op, int K) {
  if (K < 1 || K > op.num_modes()) throw UsageError("cutoff exceeds the computed modes");
  const auto v = op.eigenvectors().leftCols(K);
  const Eigen::VectorXd inv = op.eigenvalues().head(K).cwiseInverse();
  GreenKernel g;
  g.cutoff = K;
  g.matrix = (v * inv.asDiagonal() * v.transpose()) / op.grid().cell_volume();
  g.diagonal = g.matrix.diagonal();
  return g;
}

}  // namespace gfl
