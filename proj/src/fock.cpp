#include "gfl/fock.hpp"

#include <cmath>
#include <string>

#include "gfl/errors.hpp"
#include "gfl/linalg.hpp"
#include "gfl/parallel.hpp"

namespace gfl {

namespace {

using Triplet = Eigen::Triplet<double>;

void enumerate(int pos, int remaining, std::vector<std::uint8_t>& occ,
               std::vector<std::uint8_t>& out) {
  const int K = static_cast<int>(occ.size());
  if (pos == K - 1) {
    occ[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(remaining);
    out.insert(out.end(), occ.begin(), occ.end());
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    occ[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(v);
    enumerate(pos + 1, remaining - v, occ, out);
  }
}

Eigen::SparseMatrix<double> assemble(std::size_t dim, std::vector<Triplet>& triplets) {
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

FockBasis::FockBasis(int modes, int max_particles) : modes_(modes), max_particles_(max_particles) {
  if (modes < 1) throw ConfigError("quantum.K must be at least 1");
  if (max_particles < 0 || max_particles > 255) throw ConfigError("quantum.n_max must lie in [0, 255]");
  if (modes * std::log2(max_particles + 1.0) > 63.0) {
    throw ConfigError("quantum.K and quantum.n_max: occupation keys would overflow 64 bits");
  }
  sectors_.resize(static_cast<std::size_t>(max_particles) + 1);
  index_.resize(sectors_.size());
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(modes));
  for (int n = 0; n <= max_particles; ++n) {
    auto& sector = sectors_[static_cast<std::size_t>(n)];
    enumerate(0, n, occ, sector);
    auto& map = index_[static_cast<std::size_t>(n)];
    const std::size_t size = sector.size() / static_cast<std::size_t>(modes);
    map.reserve(size);
    for (std::size_t s = 0; s < size; ++s) map.emplace(key(occupation(n, s)), static_cast<std::uint32_t>(s));
  }
}

std::uint64_t FockBasis::key(const std::uint8_t* occupation) const {
  std::uint64_t k = 0;
  const auto base = static_cast<std::uint64_t>(max_particles_) + 1;
  for (int j = 0; j < modes_; ++j) k = k * base + occupation[j];
  return k;
}

std::size_t FockBasis::dimension() const {
  std::size_t d = 0;
  for (int n = 0; n <= max_particles_; ++n) d += sector_size(n);
  return d;
}

std::optional<std::size_t> FockBasis::index_of(const std::uint8_t* occupation) const {
  int n = 0;
  for (int j = 0; j < modes_; ++j) n += occupation[j];
  if (n > max_particles_) return std::nullopt;
  const auto& map = index_[static_cast<std::size_t>(n)];
  const auto it = map.find(key(occupation));
  if (it == map.end()) return std::nullopt;
  return it->second;
}

FockBasis build_fock(int K, int n_max) { return FockBasis(K, n_max); }

double FockOperator::hermiticity_defect() const {
  double defect = 0.0;
  for (const auto& b : blocks) {
    const Eigen::SparseMatrix<double> d = b - Eigen::SparseMatrix<double>(b.transpose());
    for (Eigen::Index c = 0; c < d.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(d, c); it; ++it)
        defect = std::max(defect, std::abs(it.value()));
  }
  return defect;
}

FockOperator operator+(const FockOperator& a, const FockOperator& b) {
  if (a.blocks.size() != b.blocks.size()) throw UsageError("operators on different Fock bases");
  FockOperator out;
  out.blocks.reserve(a.blocks.size());
  for (std::size_t n = 0; n < a.blocks.size(); ++n) out.blocks.push_back(a.blocks[n] + b.blocks[n]);
  return out;
}

FockOperator operator*(double c, const FockOperator& a) {
  FockOperator out;
  out.blocks.reserve(a.blocks.size());
  for (const auto& b : a.blocks) out.blocks.push_back(c * b);
  return out;
}

FockOperator second_quantize_one_body(const FockBasis& basis, const Eigen::MatrixXd& one_body) {
  const int K = basis.modes();
  if (one_body.rows() != K || one_body.cols() != K) throw UsageError("one-body matrix must be K x K");
  FockOperator op;
  op.blocks.resize(static_cast<std::size_t>(basis.max_particles()) + 1);
  parallel_for(op.blocks.size(), [&](std::size_t sector) {
    const int n = static_cast<int>(sector);
    const std::size_t dim = basis.sector_size(n);
    std::vector<Triplet> triplets;
    std::vector<std::uint8_t> occ(static_cast<std::size_t>(K));
    for (std::size_t s = 0; s < dim; ++s) {
      const std::uint8_t* src = basis.occupation(n, s);
      for (int j = 0; j < K; ++j) {
        if (src[j] == 0) continue;
        for (int i = 0; i < K; ++i) {
          const double a = one_body(i, j);
          if (a == 0.0) continue;
          std::copy(src, src + K, occ.begin());
          double amp = std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(j)]--));
          amp *= std::sqrt(static_cast<double>(++occ[static_cast<std::size_t>(i)]));
          const auto target = basis.index_of(occ.data());
          triplets.emplace_back(static_cast<int>(*target), static_cast<int>(s), a * amp);
        }
      }
    }
    op.blocks[sector] = assemble(dim, triplets);
  });
  return op;
}

FockOperator second_quantize_one_body(const FockBasis& basis, const OneBodyOperator& op, int K) {
  if (K != basis.modes() || K > op.num_modes()) throw UsageError("mode count mismatch");
  const Eigen::VectorXd unshifted = op.eigenvalues().head(K).array() + op.shift();
  return second_quantize_one_body(basis, Eigen::MatrixXd(unshifted.asDiagonal()));
}

FockOperator second_quantize_pair(const FockBasis& basis, const PairTensor& tensor) {
  const int K = basis.modes();
  if (tensor.cutoff != K) throw UsageError("pair tensor cutoff differs from the Fock mode count");
  FockOperator op;
  op.blocks.resize(static_cast<std::size_t>(basis.max_particles()) + 1);
  parallel_for(op.blocks.size(), [&](std::size_t sector) {
    const int n = static_cast<int>(sector);
    const std::size_t dim = basis.sector_size(n);
    std::vector<Triplet> triplets;
    if (n >= 2) {
      std::vector<std::uint8_t> occ(static_cast<std::size_t>(K));
      auto at = [&](int m) -> std::uint8_t& { return occ[static_cast<std::size_t>(m)]; };
      for (std::size_t s = 0; s < dim; ++s) {
        const std::uint8_t* src = basis.occupation(n, s);
        std::copy(src, src + K, occ.begin());
        for (int l = 0; l < K; ++l) {
          if (at(l) == 0) continue;
          const double a1 = std::sqrt(static_cast<double>(at(l)--));
          for (int k = 0; k < K; ++k) {
            if (at(k) == 0) continue;
            const double a2 = a1 * std::sqrt(static_cast<double>(at(k)--));
            for (int j = 0; j < K; ++j) {
              const double a3 = a2 * std::sqrt(static_cast<double>(++at(j)));
              for (int i = 0; i < K; ++i) {
                const double w = tensor(i, j, k, l);
                if (w != 0.0) {
                  const double a4 = a3 * std::sqrt(static_cast<double>(at(i) + 1));
                  ++at(i);
                  const auto target = basis.index_of(occ.data());
                  --at(i);
                  triplets.emplace_back(static_cast<int>(*target), static_cast<int>(s),
                                        0.5 * w * a4);
                }
              }
              --at(j);
            }
            ++at(k);
          }
          ++at(l);
        }
      }
    }
    op.blocks[sector] = assemble(dim, triplets);
  });
  return op;
}

FockOperator number_operator(const FockBasis& basis) {
  return second_quantize_one_body(basis, Eigen::MatrixXd::Identity(basis.modes(), basis.modes()));
}

double FockState::trace() const {
  double t = 0.0;
  for (const auto& b : blocks) t += b.populations.sum();
  return t;
}

double FockState::min_population() const {
  double m = 0.0;
  for (const auto& b : blocks)
    if (b.populations.size() > 0) m = std::min(m, b.populations.minCoeff());
  return m;
}

Eigen::MatrixXcd FockState::block_matrix(int n) const {
  const auto& b = blocks[static_cast<std::size_t>(n)];
  if (b.occupation_basis()) {
    return b.populations.cast<std::complex<double>>().asDiagonal();
  }
  return b.basis * b.populations.cast<std::complex<double>>().asDiagonal() * b.basis.adjoint();
}

FockState FockState::from_matrices(const std::vector<Eigen::MatrixXcd>& matrices) {
  FockState state;
  for (const auto& m : matrices) {
    const Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
    if (es.info() != Eigen::Success) throw NumericalError("state block diagonalization failed");
    state.blocks.push_back({es.eigenvalues(), es.eigenvectors()});
  }
  return state;
}

GibbsResult gibbs_state(const FockOperator& H, const FockBasis& basis, double T, double nu,
                        double E0, double saturation) {
  if (!(T > 0.0)) throw DomainError("temperature must be positive");
  const std::size_t sectors = static_cast<std::size_t>(basis.max_particles()) + 1;
  if (H.blocks.size() != sectors) throw UsageError("operator and basis disagree on sectors");
  std::vector<Eigen::VectorXd> energies(sectors);
  GibbsResult r;
  r.state.blocks.resize(sectors);
  parallel_for(sectors, [&](std::size_t sector) {
    const auto& block = H.blocks[sector];
    const double shift = nu * static_cast<double>(sector);
    bool diagonal = true;
    for (Eigen::Index c = 0; c < block.outerSize() && diagonal; ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(block, c); it; ++it)
        if (it.row() != it.col() && it.value() != 0.0) {
          diagonal = false;
          break;
        }
    if (diagonal) {
      energies[sector] = Eigen::VectorXd(block.diagonal()).array() - shift;
      return;
    }
    if (static_cast<std::size_t>(block.rows()) > kMaxDenseSector) {
      throw ConfigError("quantum.n_max: sector " + std::to_string(sector) + " has dimension " +
                        std::to_string(block.rows()) + ", above the dense limit");
    }
    const Eigen::MatrixXd dense = Eigen::MatrixXd(block);
    EigenPairs pairs = lowest_eigenpairs_symmetric(0.5 * (dense + dense.transpose()),
                                                   static_cast<int>(dense.rows()));
    energies[sector] = pairs.values.array() - shift;
    r.state.blocks[sector].basis = pairs.vectors.cast<std::complex<double>>();
  });
  double emin = std::numeric_limits<double>::infinity();
  for (const auto& e : energies)
    if (e.size() > 0) emin = std::min(emin, e.minCoeff());
  double z = 0.0;
  for (std::size_t n = 0; n < sectors; ++n) {
    auto& pop = r.state.blocks[n].populations;
    pop = (-(energies[n].array() - emin) / T).exp();
    for (Eigen::Index i = 0; i < pop.size(); ++i) z += pop[i];
  }
  for (std::size_t n = 0; n < sectors; ++n) {
    auto& pop = r.state.blocks[n].populations;
    pop /= z;
    const double mass = pop.sum();
    r.mean_number += static_cast<double>(n) * mass;
    if (n + 1 == sectors) r.top_sector_fraction = mass;
  }
  r.free_energy = (emin - T * std::log(z)) + E0;
  r.log_partition = -r.free_energy / T;
  r.ground_energy = emin + E0;
  r.cutoff_unsafe = r.top_sector_fraction > saturation;
  return r;
}

ReducedOperator reduced_density(const FockState& state, const FockBasis& basis, int k) {
  if (k != 1 && k != 2) throw UsageError("reduced densities are available for k = 1 and k = 2");
  const int K = basis.modes();
  const std::size_t K2 = static_cast<std::size_t>(K) * K;
  std::vector<std::complex<double>> raw(k == 1 ? K2 : K2 * K2, 0.0);
  auto r1 = [&](int i, int j) -> std::complex<double>& { return raw[static_cast<std::size_t>(i) * K + j]; };
  auto r2 = [&](int i, int j, int a, int b) -> std::complex<double>& {
    return raw[((static_cast<std::size_t>(i) * K + j) * K + a) * K + b];
  };
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(K));
  auto at = [&](int m) -> std::uint8_t& { return occ[static_cast<std::size_t>(m)]; };
  for (int n = 0; n <= basis.max_particles(); ++n) {
    const auto& block = state.blocks[static_cast<std::size_t>(n)];
    const std::size_t dim = basis.sector_size(n);
    if (block.occupation_basis()) {
      for (std::size_t s = 0; s < dim; ++s) {
        const double p = block.populations[static_cast<Eigen::Index>(s)];
        if (p == 0.0) continue;
        const std::uint8_t* o = basis.occupation(n, s);
        for (int i = 0; i < K; ++i) {
          if (k == 1) {
            r1(i, i) += p * o[i];
            continue;
          }
          r2(i, i, i, i) += p * o[i] * (o[i] - 1.0);
          for (int j = 0; j < K; ++j) {
            if (j == i) continue;
            r2(i, j, i, j) += p * o[i] * o[j];
            r2(i, j, j, i) += p * o[i] * o[j];
          }
        }
      }
      continue;
    }
    const Eigen::MatrixXcd gamma = state.block_matrix(n);
    for (std::size_t s = 0; s < dim; ++s) {
      const std::uint8_t* src = basis.occupation(n, s);
      std::copy(src, src + K, occ.begin());
      const auto col = static_cast<Eigen::Index>(s);
      for (int i = 0; i < K; ++i) {
        if (at(i) == 0) continue;
        const double a1 = std::sqrt(static_cast<double>(at(i)--));
        if (k == 1) {
          for (int j = 0; j < K; ++j) {
            const double amp = a1 * std::sqrt(static_cast<double>(++at(j)));
            const auto target = static_cast<Eigen::Index>(*basis.index_of(occ.data()));
            --at(j);
            r1(i, j) += gamma(col, target) * amp;
          }
        } else {
          for (int j = 0; j < K; ++j) {
            if (at(j) == 0) continue;
            const double a2 = a1 * std::sqrt(static_cast<double>(at(j)--));
            for (int l = 0; l < K; ++l) {
              const double a3 = a2 * std::sqrt(static_cast<double>(++at(l)));
              for (int a = 0; a < K; ++a) {
                const double amp = a3 * std::sqrt(static_cast<double>(++at(a)));
                const auto target = static_cast<Eigen::Index>(*basis.index_of(occ.data()));
                --at(a);
                r2(i, j, a, l) += gamma(col, target) * amp;
              }
              --at(l);
            }
            ++at(j);
          }
        }
        ++at(i);
      }
    }
  }
  ReducedOperator out;
  out.order = k;
  out.modes = K;
  if (k == 1) {
    out.matrix.resize(K, K);
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) out.matrix(i, j) = r1(i, j);
    return out;
  }
  const auto pairs = symmetric_pairs(K);
  const auto dim = static_cast<Eigen::Index>(pairs.size());
  out.matrix.resize(dim, dim);
  for (Eigen::Index p = 0; p < dim; ++p) {
    for (Eigen::Index q = 0; q < dim; ++q) {
      const auto [i, j] = pairs[static_cast<std::size_t>(p)];
      const auto [a, b] = pairs[static_cast<std::size_t>(q)];
      out.matrix(p, q) = symmetric_pair_norm(i, j) * symmetric_pair_norm(a, b) * r2(i, j, a, b);
    }
  }
  return out;
}

CoherentState coherent_state(const Eigen::VectorXcd& v, const FockBasis& basis) {
  const int K = basis.modes();
  if (v.size() != K) throw UsageError("coherent amplitude must have K components");
  CoherentState c;
  std::vector<Eigen::VectorXcd> components;
  double total = 0.0;
  for (int n = 0; n <= basis.max_particles(); ++n) {
    const std::size_t dim = basis.sector_size(n);
    Eigen::VectorXcd comp(static_cast<Eigen::Index>(dim));
    for (std::size_t s = 0; s < dim; ++s) {
      const std::uint8_t* o = basis.occupation(n, s);
      std::complex<double> a = 1.0;
      for (int j = 0; j < K; ++j) {
        for (int m = 1; m <= o[j]; ++m) a *= v[j] / std::sqrt(static_cast<double>(m));
      }
      comp[static_cast<Eigen::Index>(s)] = a;
    }
    total += comp.squaredNorm();
    components.push_back(std::move(comp));
  }
  for (auto& comp : components) {
    FockBlock block;
    const double mass = comp.squaredNorm();
    block.populations = Eigen::VectorXd::Constant(1, mass / total);
    block.basis = mass > 0.0 ? Eigen::MatrixXcd(comp / std::sqrt(mass))
                             : Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(comp.size(), 1));
    c.state.blocks.push_back(std::move(block));
  }
  const double v2 = v.squaredNorm();
  double term = std::exp(-v2);
  for (int n = 0; n <= basis.max_particles(); ++n) {
    c.captured_norm_sq += term;
    term *= v2 / (n + 1.0);
  }
  c.truncation_warning = v2 > 0.5 * basis.max_particles();
  return c;
}

double free_energy_functional(const FockState& state, const FockOperator& H,
                              const FockBasis& basis, double T, double nu, double E0) {
  double energy = 0.0;
  double entropy = 0.0;
  for (int n = 0; n <= basis.max_particles(); ++n) {
    const auto& block = state.blocks[static_cast<std::size_t>(n)];
    const auto& h = H.blocks[static_cast<std::size_t>(n)];
    if (block.occupation_basis()) {
      energy += block.populations.dot(Eigen::VectorXd(h.diagonal()));
    } else {
      for (Eigen::Index m = 0; m < block.basis.cols(); ++m) {
        const Eigen::VectorXcd psi = block.basis.col(m);
        const Eigen::VectorXd re = psi.real();
        const Eigen::VectorXd im = psi.imag();
        const double expect = re.dot(h * re) + im.dot(h * im);
        energy += block.populations[m] * expect;
      }
    }
    const double mass = block.populations.sum();
    energy += (E0 - nu * n) * mass;
    for (Eigen::Index m = 0; m < block.populations.size(); ++m) {
      const double p = block.populations[m];
      if (p > 0.0) entropy += p * std::log(p);
    }
  }
  return energy + T * entropy;
}

FockOperator hamiltonian(const QuantumModel& model, const FockBasis& basis) {
  if (model.energies.size() != basis.modes()) throw UsageError("model mode count mismatch");
  FockOperator h = second_quantize_one_body(basis, Eigen::MatrixXd(model.energies.asDiagonal()));
  if (model.tensor && model.coupling != 0.0) {
    h = h + model.coupling * second_quantize_pair(basis, *model.tensor);
  }
  return h;
}

CutoffAudit cutoff_audit(const QuantumModel& model, const std::vector<int>& schedule, double T,
                         double nu, std::optional<double> tol) {
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] <= schedule[i - 1]) throw ConfigError("quantum.audit schedule must increase");
  }
  const double threshold = tol.value_or(1e-6 * T);
  CutoffAudit audit;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const FockBasis basis(static_cast<int>(model.energies.size()), schedule[i]);
    const GibbsResult g = gibbs_state(hamiltonian(model, basis), basis, T, nu);
    CutoffAuditRow row{schedule[i], g.free_energy, g.mean_number, g.top_sector_fraction, 0.0};
    if (i > 0) {
      row.delta_free_energy = row.free_energy - audit.rows.back().free_energy;
      if (!audit.converged && std::abs(row.delta_free_energy) < threshold) {
        audit.converged = true;
        audit.converged_at = schedule[i];
      }
    }
    audit.rows.push_back(row);
  }
  return audit;
}

}  // namespace gfl
