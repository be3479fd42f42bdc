#include "gfl/interaction.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include "gfl/errors.hpp"
#include "gfl/parallel.hpp"

namespace gfl {

namespace detail {

namespace {
// The FFTW planner is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct ConvolutionPlan {
  int dimension;
  int points;
  int padded;
  std::size_t real_size;
  std::size_t complex_size;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> kernel_hat;  // transform of the padded kernel, real by evenness

  ConvolutionPlan(int d, int m) : dimension(d), points(m), padded(2 * m) {
    const std::size_t p = static_cast<std::size_t>(padded);
    const std::size_t half = p / 2 + 1;
    real_size = d == 1 ? p : p * p;
    complex_size = d == 1 ? half : p * half;
    std::vector<double> in(real_size);
    std::vector<std::complex<double>> out(complex_size);
    auto* cin = reinterpret_cast<fftw_complex*>(out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (d == 1) {
      forward = fftw_plan_dft_r2c_1d(padded, in.data(), cin, flags);
      backward = fftw_plan_dft_c2r_1d(padded, cin, in.data(), flags);
    } else {
      forward = fftw_plan_dft_r2c_2d(padded, padded, in.data(), cin, flags);
      backward = fftw_plan_dft_c2r_2d(padded, padded, cin, in.data(), flags);
    }
    if (!forward || !backward) throw NumericalError("FFT planning failed");
  }

  ~ConvolutionPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  ConvolutionPlan(const ConvolutionPlan&) = delete;
  ConvolutionPlan& operator=(const ConvolutionPlan&) = delete;

  // Grid values (M^d, row-major) into the zero-padded (2M)^d box.
  void pad(const double* f, std::vector<double>& buf) const {
    std::fill(buf.begin(), buf.end(), 0.0);
    if (dimension == 1) {
      std::copy(f, f + points, buf.begin());
      return;
    }
    for (int ix = 0; ix < points; ++ix) {
      std::copy(f + static_cast<std::size_t>(ix) * points,
                f + static_cast<std::size_t>(ix + 1) * points,
                buf.begin() + static_cast<std::ptrdiff_t>(ix) * padded);
    }
  }

  void transform(std::vector<double>& in, std::vector<std::complex<double>>& out) const {
    fftw_execute_dft_r2c(forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  }

  // Multiplicity of a half-spectrum entry in the full spectrum.
  double multiplicity(std::size_t index) const {
    const std::size_t half = static_cast<std::size_t>(padded) / 2 + 1;
    const std::size_t last = index % half;
    return (last == 0 || last == half - 1) ? 1.0 : 2.0;
  }
};

}  // namespace detail

namespace {

int mod(int a, int p) { return ((a % p) + p) % p; }

}  // namespace

PairPotential::PairPotential(GridSpec grid, Kind kind, std::vector<double> kernel)
    : grid_(grid), kind_(kind), kernel_(std::move(kernel)) {
  auto plan = std::make_shared<detail::ConvolutionPlan>(grid_.dimension, grid_.points);
  const int m = grid_.points;
  const int p = plan->padded;
  const int width = 2 * m - 1;
  std::vector<double> padded(plan->real_size, 0.0);
  if (grid_.dimension == 1) {
    for (int dx = -(m - 1); dx <= m - 1; ++dx) padded[mod(dx, p)] = kernel_[dx + m - 1];
  } else {
    for (int dx = -(m - 1); dx <= m - 1; ++dx) {
      for (int dy = -(m - 1); dy <= m - 1; ++dy) {
        padded[static_cast<std::size_t>(mod(dx, p)) * p + mod(dy, p)] =
            kernel_[static_cast<std::size_t>(dx + m - 1) * width + (dy + m - 1)];
      }
    }
  }
  std::vector<std::complex<double>> hat(plan->complex_size);
  plan->transform(padded, hat);
  plan->kernel_hat.resize(plan->complex_size);
  fourier_.resize(plan->complex_size);
  for (std::size_t i = 0; i < hat.size(); ++i) {
    plan->kernel_hat[i] = hat[i].real();
    fourier_[i] = hat[i].real() * grid_.cell_volume();
  }
  plan_ = std::move(plan);
}

namespace {

std::vector<double> radial_kernel(const GridSpec& grid, const std::function<double(double)>& w) {
  const int m = grid.points;
  const int width = 2 * m - 1;
  const double h = grid.spacing();
  std::vector<double> k(grid.dimension == 1 ? width : static_cast<std::size_t>(width) * width);
  if (grid.dimension == 1) {
    for (int dx = -(m - 1); dx <= m - 1; ++dx) k[dx + m - 1] = w(std::abs(dx) * h);
  } else {
    for (int dx = -(m - 1); dx <= m - 1; ++dx) {
      for (int dy = -(m - 1); dy <= m - 1; ++dy) {
        k[static_cast<std::size_t>(dx + m - 1) * width + (dy + m - 1)] =
            w(std::sqrt(static_cast<double>(dx * dx + dy * dy)) * h);
      }
    }
  }
  return k;
}

}  // namespace

PairPotential PairPotential::gaussian_bump(const GridSpec& grid, double amplitude, double width) {
  grid.validate(std::numeric_limits<std::size_t>::max());
  if (!(width > 0.0)) throw ConfigError("interaction.sigma must be positive");
  const double inv = 1.0 / (2.0 * width * width);
  return PairPotential(grid, Kind::GaussianBump,
                       radial_kernel(grid, [&](double r) { return amplitude * std::exp(-r * r * inv); }));
}

PairPotential PairPotential::grid_delta(const GridSpec& grid, double strength) {
  grid.validate(std::numeric_limits<std::size_t>::max());
  const double cell = grid.cell_volume();
  return PairPotential(grid, Kind::GridDelta, radial_kernel(grid, [&](double r) {
                         return r == 0.0 ? strength / cell : 0.0;
                       }));
}

PairPotential PairPotential::tabulated(const GridSpec& grid, const std::vector<double>& radii,
                                       const std::vector<double>& values) {
  grid.validate(std::numeric_limits<std::size_t>::max());
  if (radii.size() != values.size() || radii.empty()) {
    throw ConfigError("interaction.file: offsets and values must be nonempty and paired");
  }
  std::vector<std::pair<double, double>> table;
  for (std::size_t i = 0; i < radii.size(); ++i) table.emplace_back(std::abs(radii[i]), values[i]);
  std::sort(table.begin(), table.end());
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].first == table[i - 1].first && table[i].second != table[i - 1].second) {
      throw ConfigError("interaction.file: offset " + std::to_string(table[i].first) +
                        " has conflicting values (w must be even)");
    }
  }
  table.erase(std::unique(table.begin(), table.end()), table.end());
  auto interp = [&](double r) {
    if (r > table.back().first) return 0.0;
    if (r <= table.front().first) return table.front().second;
    auto hi = std::lower_bound(table.begin(), table.end(), std::make_pair(r, -HUGE_VAL));
    auto lo = hi - 1;
    const double t = (r - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
  };
  return PairPotential(grid, Kind::Tabulated, radial_kernel(grid, interp));
}

PairPotential PairPotential::from_file(const GridSpec& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("interaction.file: cannot open " + path);
  std::vector<double> radii, values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    double r = 0.0, v = 0.0;
    if (!(fields >> r >> v)) throw ConfigError("interaction.file: malformed line '" + line + "'");
    radii.push_back(r);
    values.push_back(v);
  }
  return tabulated(grid, radii, values);
}

double PairPotential::offset_value(int dx, int dy) const {
  const int m = grid_.points;
  if (grid_.dimension == 1) return kernel_[static_cast<std::size_t>(dx + m - 1)];
  return kernel_[static_cast<std::size_t>(dx + m - 1) * (2 * m - 1) + (dy + m - 1)];
}


int PairPotential::padded_points() const { return plan_->padded; }

double PairPotential::min_fourier() const {
  return *std::min_element(fourier_.begin(), fourier_.end());
}

double PairPotential::lattice_self_pair(const double* f) const {
  const auto& plan = *plan_;
  std::vector<double> buf(plan.real_size);
  std::vector<std::complex<double>> hat(plan.complex_size);
  plan.pad(f, buf);
  plan.transform(buf, hat);
  double s = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    s += plan.multiplicity(i) * plan.kernel_hat[i] * std::norm(hat[i]);
  }
  return s / static_cast<double>(plan.real_size);
}

void PairPotential::lattice_convolve(const double* f, double* out) const {
  const auto& plan = *plan_;
  std::vector<double> buf(plan.real_size);
  std::vector<std::complex<double>> hat(plan.complex_size);
  plan.pad(f, buf);
  plan.transform(buf, hat);
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= plan.kernel_hat[i];
  fftw_execute_dft_c2r(plan.backward, reinterpret_cast<fftw_complex*>(hat.data()), buf.data());
  const double norm = 1.0 / static_cast<double>(plan.real_size);
  const int m = grid_.points;
  if (grid_.dimension == 1) {
    for (int i = 0; i < m; ++i) out[i] = buf[i] * norm;
    return;
  }
  for (int ix = 0; ix < m; ++ix) {
    for (int iy = 0; iy < m; ++iy) {
      out[static_cast<std::size_t>(ix) * m + iy] =
          buf[static_cast<std::size_t>(ix) * plan.padded + iy] * norm;
    }
  }
}

double PairPotential::lattice_pair(const double* f, const double* g) const {
  std::vector<double> conv(grid_.size());
  lattice_convolve(g, conv.data());
  double s = 0.0;
  for (std::size_t i = 0; i < conv.size(); ++i) s += f[i] * conv[i];
  return s;
}

IntegrabilityReport check_integrability(const PairPotential& w, const Potential& trap) {
  const GridSpec& grid = w.grid();
  const int d = grid.dimension;
  const int m = grid.points;
  const int p = w.padded_points();
  const int half = p / 2 + 1;
  const double h = grid.spacing();
  const double dk = 2.0 * std::numbers::pi / (p * h);
  const double cell_k = std::pow(dk, d);
  const double cell = grid.cell_volume();
  const auto& hat = w.fourier();
  IntegrabilityReport r;
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const int my = static_cast<int>(i % half);
    const int mx = d == 1 ? 0 : static_cast<int>(i / half);
    const int sx = mx <= p / 2 ? mx : mx - p;
    const double k = dk * std::sqrt(static_cast<double>(sx * sx + my * my));
    const double mult = (my == 0 || my == half - 1) ? 1.0 : 2.0;
    const double term = mult * std::abs(hat[i]) * (1.0 + std::sqrt(k)) * cell_k;
    r.fourier_moment += mult * hat[i] * (1.0 + std::sqrt(k)) * cell_k;
    total += term;
    if (std::max(std::abs(sx), my) > p / 4) tail += term;
  }
  r.fourier_tail_fraction = total > 0.0 ? tail / total : 0.0;
  double ptotal = 0.0, ptail = 0.0;
  const double rmax = (m - 1) * h;
  for (int dx = -(m - 1); dx <= m - 1; ++dx) {
    for (int dy = (d == 1 ? 0 : -(m - 1)); dy <= (d == 1 ? 0 : m - 1); ++dy) {
      const double rad = h * std::sqrt(static_cast<double>(dx * dx + dy * dy));
      const double v = trap.kind == Potential::Kind::Power ? std::pow(rad, trap.exponent) : 0.0;
      const double term = std::abs(w.offset_value(dx, dy)) * v * v * cell;
      ptotal += term;
      if (rad > 0.75 * rmax) ptail += term;
    }
  }
  r.potential_moment = ptotal;
  r.potential_tail_fraction = ptotal > 0.0 ? ptail / ptotal : 0.0;
  r.fourier_condition = r.fourier_tail_fraction < 1e-6;
  r.potential_condition = r.potential_tail_fraction < 1e-6;
  return r;
}

InteractionEvaluator::InteractionEvaluator(const OneBodyOperator& op, const PairPotential& w,
                                           int K)
    : w_(w), K_(K) {
  if (K < 1 || K > op.num_modes()) throw UsageError("cutoff exceeds the computed modes");
  if (op.grid().dimension != w.grid().dimension || op.grid().points != w.grid().points ||
      op.grid().half_width != w.grid().half_width) {
    throw UsageError("pair potential and operator live on different grids");
  }
  modes_ = op.eigenvectors().leftCols(K);
  counterterm_ = weighted_density(op, K);
}

void InteractionEvaluator::density(const std::complex<double>* alpha, double* rho) const {
  const Eigen::Map<const Eigen::VectorXcd> a(alpha, K_);
  const Eigen::VectorXd re = modes_ * a.real();
  const Eigen::VectorXd im = modes_ * a.imag();
  for (Eigen::Index i = 0; i < re.size(); ++i) rho[i] = re[i] * re[i] + im[i] * im[i];
}

double InteractionEvaluator::evaluate(const std::complex<double>* alpha, EnergyKind kind) const {
  std::vector<double> rho(static_cast<std::size_t>(modes_.rows()));
  density(alpha, rho.data());
  if (kind == EnergyKind::Renormalized) {
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] -= counterterm_[static_cast<Eigen::Index>(i)];
  }
  return 0.5 * w_.lattice_self_pair(rho.data());
}

std::vector<double> InteractionEvaluator::evaluate(const Ensemble& ensemble,
                                                   EnergyKind kind) const {
  if (ensemble.cutoff() < K_) throw UsageError("ensemble cutoff below evaluator cutoff");
  const std::size_t n = ensemble.size();
  constexpr std::size_t kChunk = 64;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> out(n);
  const Eigen::Index N = modes_.rows();
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const auto count = static_cast<Eigen::Index>(std::min(kChunk, n - begin));
    const auto block = ensemble.coefficients.block(static_cast<Eigen::Index>(begin), 0, count, K_);
    const Eigen::MatrixXd re = modes_ * block.real().transpose();
    const Eigen::MatrixXd im = modes_ * block.imag().transpose();
    std::vector<double> rho(static_cast<std::size_t>(N));
    for (Eigen::Index s = 0; s < count; ++s) {
      for (Eigen::Index i = 0; i < N; ++i) {
        rho[static_cast<std::size_t>(i)] = re(i, s) * re(i, s) + im(i, s) * im(i, s);
        if (kind == EnergyKind::Renormalized) rho[static_cast<std::size_t>(i)] -= counterterm_[i];
      }
      out[begin + static_cast<std::size_t>(s)] = 0.5 * w_.lattice_self_pair(rho.data());
    }
  });
  return out;
}

double bare_interaction(const FieldSample& sample, const OneBodyOperator& op,
                        const PairPotential& w) {
  InteractionEvaluator ev(op, w, sample.cutoff());
  return ev.evaluate(sample.coefficients.data(), EnergyKind::Bare);
}

double renormalized_interaction(const FieldSample& sample, const OneBodyOperator& op,
                                const PairPotential& w, int K) {
  if (sample.cutoff() != K) {
    throw UsageError("sample cutoff " + std::to_string(sample.cutoff()) +
                     " does not match renormalization cutoff " + std::to_string(K));
  }
  InteractionEvaluator ev(op, w, K);
  return ev.evaluate(sample.coefficients.data(), EnergyKind::Renormalized);
}

double exchange_term(const OneBodyOperator& op, const PairPotential& w, int K) {
  if (K < 1 || K > op.num_modes()) throw UsageError("cutoff exceeds the computed modes");
  const auto v = op.eigenvectors().leftCols(K);
  const Eigen::VectorXd inv = op.eigenvalues().head(K).cwiseInverse();
  // Weighted kernel h^d G_K; the h^{2d} of the double integral cancels it.
  const Eigen::MatrixXd g = v * inv.asDiagonal() * v.transpose();
  const int m = op.grid().points;
  const auto n = static_cast<int>(g.rows());
  double s = 0.0;
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const double wv = op.grid().dimension == 1
                            ? w.offset_value(a - b)
                            : w.offset_value(a / m - b / m, a % m - b % m);
      s += g(a, b) * g(a, b) * wv;
    }
  }
  return 0.5 * s;
}

double direct_term(const OneBodyOperator& op, const PairPotential& w, int K) {
  const Eigen::VectorXd rho = weighted_density(op, K);
  return 0.5 * w.lattice_self_pair(rho.data());
}

double wick_expectation_bare(const OneBodyOperator& op, const PairPotential& w, int K) {
  return direct_term(op, w, K) + exchange_term(op, w, K);
}

double mf_energy(const FieldSample& sample, const OneBodyOperator& op, const PairPotential& w,
                 double g) {
  double kinetic = 0.0;
  for (int j = 0; j < sample.cutoff(); ++j) {
    kinetic += (op.eigenvalues()[j] + op.shift()) * std::norm(sample.coefficients[j]);
  }
  if (g == 0.0) return kinetic;
  return kinetic + g * bare_interaction(sample, op, w);
}

Eigen::MatrixXd PairTensor::pair_matrix() const {
  const int K = cutoff;
  Eigen::MatrixXd m(K * K, K * K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) m(i * K + l, j * K + k) = (*this)(i, j, k, l);
  return m;
}

PairTensor build_pair_tensor(const OneBodyOperator& op, const PairPotential& w, int K) {
  if (K < 1 || K > op.num_modes()) throw UsageError("cutoff exceeds the computed modes");
  if (K > kMaxTensorModes) {
    throw ConfigError("model.K = " + std::to_string(K) + " exceeds the dense tensor limit of " +
                      std::to_string(kMaxTensorModes));
  }
  const auto v = op.eigenvectors().leftCols(K);
  const Eigen::Index N = v.rows();
  auto pair_index = [K](int a, int b) { return a <= b ? a * K + b : b * K + a; };
  Eigen::MatrixXd products(N, K * K), convolved(N, K * K);
  for (int a = 0; a < K; ++a) {
    for (int b = a; b < K; ++b) {
      const int c = pair_index(a, b);
      products.col(c) = v.col(a).cwiseProduct(v.col(b));
      w.lattice_convolve(products.col(c).data(), convolved.col(c).data());
    }
  }
  std::vector<double> raw(static_cast<std::size_t>(K) * K * K * K);
  auto at = [K](int i, int j, int k, int l) {
    return ((static_cast<std::size_t>(i) * K + j) * K + k) * K + l;
  };
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l)
          raw[at(i, j, k, l)] = products.col(pair_index(i, l)).dot(convolved.col(pair_index(j, k)));
  PairTensor t;
  t.cutoff = K;
  t.values.resize(raw.size());
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      for (int k = 0; k < K; ++k) {
        for (int l = 0; l < K; ++l) {
          const double x = raw[at(i, j, k, l)];
          const double ex = raw[at(j, i, l, k)];
          const double he = raw[at(l, k, j, i)];
          const double both = raw[at(k, l, i, j)];
          t.max_exchange_asymmetry = std::max(t.max_exchange_asymmetry, std::abs(x - ex));
          t.max_hermitian_asymmetry = std::max(t.max_hermitian_asymmetry, std::abs(x - he));
          t.values[at(i, j, k, l)] = 0.25 * ((x + both) + (ex + he));
        }
      }
    }
  }
  return t;
}

}  // namespace gfl
