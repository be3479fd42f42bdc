#include "gfl/classical_gibbs.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <iostream>

#include "gfl/errors.hpp"
#include "gfl/parallel.hpp"

namespace gfl {

namespace {

int pair_index(int K, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * K - i * (i - 1) / 2 + (j - i);
}

// Feature vector whose outer product is the k-body integrand in the basis of
// ReducedOperator.
void features(const std::complex<double>* alpha, int K, int k, Eigen::VectorXcd& y) {
  if (k == 1) {
    for (int i = 0; i < K; ++i) y[i] = alpha[i];
    return;
  }
  int p = 0;
  for (int i = 0; i < K; ++i) {
    for (int j = i; j < K; ++j) y[p++] = symmetric_pair_norm(i, j) * alpha[i] * alpha[j];
  }
}

}  // namespace

std::vector<std::array<int, 2>> symmetric_pairs(int K) {
  std::vector<std::array<int, 2>> out;
  for (int i = 0; i < K; ++i)
    for (int j = i; j < K; ++j) out.push_back({i, j});
  return out;
}

std::complex<double> ReducedOperator::raw(int i, int j, int k, int l) const {
  if (order != 2) throw UsageError("raw four-index access needs a two-body operator");
  const double norm = symmetric_pair_norm(i, j) * symmetric_pair_norm(k, l);
  return matrix(pair_index(modes, i, j), pair_index(modes, k, l)) / norm;
}

ReducedOperator scaled(const ReducedOperator& op, double factor) {
  return {op.order, op.modes, op.matrix * factor};
}

double effective_sample_size(const Eigen::VectorXd& weights) {
  const double s = weights.sum();
  const double s2 = weights.squaredNorm();
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

Reweighted reweight(const Ensemble& ensemble, EnergyKind energy, const OneBodyOperator& op,
                    const PairPotential& w, double ess_floor, double coupling) {
  if (ensemble.operator_id != 0 && ensemble.operator_id != op.fingerprint()) {
    throw UsageError("ensemble was drawn from a different reference operator");
  }
  InteractionEvaluator ev(op, w, ensemble.cutoff());
  Reweighted r;
  r.energies = ev.evaluate(ensemble, energy);
  r.ensemble = ensemble;
  for (std::size_t i = 0; i < r.energies.size(); ++i) {
    r.ensemble.weights[static_cast<Eigen::Index>(i)] = std::exp(-coupling * r.energies[i]);
  }
  r.ess = effective_sample_size(r.ensemble.weights);
  r.low_confidence = r.ess < ess_floor * static_cast<double>(ensemble.size());
  if (r.low_confidence) {
    std::cerr << "warning: effective sample size " << r.ess << " below "
              << ess_floor * 100.0 << "% of " << ensemble.size() << " samples\n";
  }
  return r;
}

LogPartition estimate_log_zr(const Ensemble& weighted) {
  const std::size_t n = weighted.size();
  if (n < 2) throw UsageError("need at least two samples");
  const auto& w = weighted.weights;
  using Sums = std::array<double, 2>;
  const Sums s = ordered_reduce<Sums>(
      n,
      [&](std::size_t b, std::size_t e) {
        Sums acc{0.0, 0.0};
        for (std::size_t i = b; i < e; ++i) {
          const double x = w[static_cast<Eigen::Index>(i)];
          acc[0] += x;
          acc[1] += x * x;
        }
        return acc;
      },
      [](const Sums& a, const Sums& c) { return Sums{a[0] + c[0], a[1] + c[1]}; }, Sums{0.0, 0.0});
  const double dn = static_cast<double>(n);
  const double mean = s[0] / dn;
  if (!(mean > 0.0)) throw NumericalError("all importance weights vanished");
  const double var = std::max(0.0, (s[1] - dn * mean * mean) / (dn - 1.0));
  return {-std::log(mean), std::sqrt(var / dn) / mean};
}

ReducedMoment reduced_moment(const Ensemble& weighted, int k) {
  if (k != 1 && k != 2) throw UsageError("moments are available for k = 1 and k = 2");
  const int K = weighted.cutoff();
  const int dim = k == 1 ? K : K * (K + 1) / 2;
  const std::size_t n = weighted.size();
  const auto& w = weighted.weights;
  auto row = [&](std::size_t i) { return weighted.coefficients.row(static_cast<Eigen::Index>(i)).data(); };

  struct Acc {
    double weight = 0.0;
    Eigen::MatrixXcd sum;
  };
  const Acc zero{0.0, Eigen::MatrixXcd::Zero(dim, dim)};
  const Acc total = ordered_reduce<Acc>(
      n,
      [&](std::size_t b, std::size_t e) {
        Acc acc = zero;
        Eigen::VectorXcd y(dim);
        for (std::size_t i = b; i < e; ++i) {
          features(row(i), K, k, y);
          const double wi = w[static_cast<Eigen::Index>(i)];
          acc.weight += wi;
          acc.sum.noalias() += wi * y * y.adjoint();
        }
        return acc;
      },
      [](const Acc& a, const Acc& c) { return Acc{a.weight + c.weight, a.sum + c.sum}; }, zero);
  ReducedMoment m;
  m.value = {k, K, total.sum / total.weight};
  const Eigen::MatrixXcd& mean = m.value.matrix;

  const Eigen::MatrixXd spread = ordered_reduce<Eigen::MatrixXd>(
      n,
      [&](std::size_t b, std::size_t e) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXcd y(dim);
        for (std::size_t i = b; i < e; ++i) {
          features(row(i), K, k, y);
          const double wi = w[static_cast<Eigen::Index>(i)];
          acc += (wi * wi) * (y * y.adjoint() - mean).cwiseAbs2();
        }
        return acc;
      },
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) { return Eigen::MatrixXd(a + c); },
      Eigen::MatrixXd::Zero(dim, dim));
  m.standard_error = spread.cwiseSqrt() / total.weight;
  return m;
}

double trace_distance(const ReducedOperator& a, const ReducedOperator& b) {
  if (a.order != b.order || a.matrix.rows() != b.matrix.rows()) {
    throw UsageError("trace distance between operators of different shape");
  }
  const Eigen::MatrixXcd diff = a.matrix - b.matrix;
  const Eigen::MatrixXcd herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

SingleMode single_mode_renormalized(double lambda, double w11) {
  if (!(lambda > 0.0)) throw DomainError("single-mode eigenvalue must be positive");
  const double m = 1.0 / lambda;
  boost::math::quadrature::exp_sinh<double> integrator;
  const double tol = 1e-13;
  auto density = [&](double x) { return lambda * std::exp(-lambda * x); };
  auto weight = [&](double x) { return std::exp(-0.5 * w11 * (x - m) * (x - m)); };
  SingleMode s;
  s.z_r = integrator.integrate([&](double x) { return density(x) * weight(x); }, tol);
  s.first_moment =
      integrator.integrate([&](double x) { return x * density(x) * weight(x); }, tol) / s.z_r;
  s.mean_energy = integrator.integrate(
      [&](double x) { return density(x) * 0.5 * w11 * (x - m) * (x - m); }, tol);
  return s;
}

}  // namespace gfl
