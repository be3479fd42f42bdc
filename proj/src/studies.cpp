#include "gfl/studies.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "gfl/binary_io.hpp"
#include "gfl/errors.hpp"
#include "gfl/gaussian.hpp"
#include "gfl/parallel.hpp"

namespace gfl {

namespace {

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

// T sum_j log(1 - exp(-(lambda_j - nu)/T)) for eigenvalues already shifted.
double free_bose_free_energy(const Eigen::VectorXd& shifted, double T) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < shifted.size(); ++j) s += std::log(-std::expm1(-shifted[j] / T));
  return T * s;
}

Document schatten_document(const SchattenTrace& t) {
  Document d = Document::object();
  d["p"] = t.p;
  d["partial_sum"] = t.partial_sum;
  d["tail_estimate"] = t.tail_estimate;
  d["growth_exponent"] = t.growth_exponent;
  d["likely_divergent"] = t.likely_divergent;
  return d;
}

Document mean_document(const SampleMean& m) {
  return Document{{"mean", m.mean}, {"stderr", m.standard_error}};
}

std::string output_path(const RunConfig& c, const std::string& suffix) {
  std::filesystem::create_directories(c.output.dir);
  return (std::filesystem::path(c.output.dir) / (c.output.stem + suffix)).string();
}

}  // namespace

Document config_document(const RunConfig& c) {
  Document d = Document::object();
  d["model"] = {{"dimension", c.model.dimension},   {"potential", c.model.potential},
                {"exponent", c.model.exponent},     {"half_width", c.model.half_width},
                {"points", c.model.points},         {"modes", c.model.modes},
                {"nu", c.model.nu}};
  d["interaction"] = {{"kind", c.interaction.kind},           {"amplitude", c.interaction.amplitude},
                      {"width", c.interaction.width},         {"strength", c.interaction.strength},
                      {"file", c.interaction.file},           {"renormalized", c.interaction.renormalized}};
  d["classical"] = {{"samples", c.classical.samples}, {"seed", c.classical.seed},
                    {"ess_floor", c.classical.ess_floor}};
  d["quantum"] = {{"max_particles", c.quantum.max_particles},
                  {"temperatures", c.quantum.temperatures},
                  {"coupling_c", c.quantum.coupling_c},
                  {"audit_schedule", c.quantum.audit_schedule}};
  d["hartree"] = {{"kappa", c.hartree.kappa},
                  {"coupling_c", c.hartree.coupling_c},
                  {"temperatures", c.hartree.temperatures},
                  {"points", c.hartree.grid(c.model).points},
                  {"damping", c.hartree.rhf.damping},
                  {"tol", c.hartree.rhf.tol},
                  {"max_iter", c.hartree.rhf.max_iter},
                  {"momentum_measure", c.hartree.counterterm.momentum_measure},
                  {"lattice_density", c.hartree.counterterm.lattice_density},
                  {"schatten_p", c.hartree.schatten_p},
                  {"shared_modes", c.hartree.shared_modes},
                  {"relative_modes", c.hartree.relative_modes}};
  d["study"] = {{"cutoffs", c.study.cutoffs},
                {"cauchy_cutoffs", c.study.cauchy_cutoffs},
                {"wick_cutoffs", c.study.wick_cutoffs},
                {"wick_samples", c.study.wick_samples},
                {"cauchy_samples", c.study.cauchy_samples},
                {"stall_threshold", c.study.stall_threshold}};
  return d;
}

SampleMean sample_mean(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) throw UsageError("need at least two values");
  double s = 0.0;
  for (double v : values) s += v;
  const double mean = s / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))};
}

std::vector<WickRow> wick_checks(const OneBodyOperator& op, const PairPotential& w,
                                 const std::vector<int>& cutoffs, std::size_t n,
                                 std::uint64_t seed) {
  if (cutoffs.empty()) return {};
  const int kmax = *std::max_element(cutoffs.begin(), cutoffs.end());
  const Ensemble ensemble = sample_gaussian(op, kmax, n, seed);
  std::vector<WickRow> rows;
  for (int K : cutoffs) {
    const InteractionEvaluator ev(op, w, K);
    WickRow r;
    r.K = K;
    r.bare = sample_mean(ev.evaluate(ensemble, EnergyKind::Bare));
    r.renormalized = sample_mean(ev.evaluate(ensemble, EnergyKind::Renormalized));
    r.renormalized_exact = exchange_term(op, w, K);
    r.bare_exact = direct_term(op, w, K) + r.renormalized_exact;
    r.bare_z = std::abs(r.bare.mean - r.bare_exact) / r.bare.standard_error;
    r.renormalized_z =
        std::abs(r.renormalized.mean - r.renormalized_exact) / r.renormalized.standard_error;
    rows.push_back(r);
  }
  return rows;
}

std::vector<CutoffRow> cutoff_sequence(const OneBodyOperator& op, const PairPotential& w,
                                       const std::vector<int>& cutoffs) {
  std::vector<CutoffRow> rows(cutoffs.size());
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    rows[i].K = cutoffs[i];
    rows[i].direct = direct_term(op, w, cutoffs[i]);
    rows[i].exchange = exchange_term(op, w, cutoffs[i]);
    if (i > 0) {
      rows[i].direct_increment = rows[i].direct - rows[i - 1].direct;
      rows[i].exchange_increment = rows[i].exchange - rows[i - 1].exchange;
    }
  }
  return rows;
}

std::vector<CauchyRow> cauchy_diagnostic(const OneBodyOperator& op, const PairPotential& w,
                                         const std::vector<int>& cutoffs, std::size_t n,
                                         std::uint64_t seed) {
  if (cutoffs.empty()) return {};
  std::set<int> needed;
  for (int K : cutoffs) {
    needed.insert(K);
    needed.insert(2 * K);
  }
  const Ensemble ensemble = sample_gaussian(op, *needed.rbegin(), n, seed);
  std::map<int, std::vector<double>> bare, renormalized;
  for (int K : needed) {
    const InteractionEvaluator ev(op, w, K);
    bare[K] = ev.evaluate(ensemble, EnergyKind::Bare);
    renormalized[K] = ev.evaluate(ensemble, EnergyKind::Renormalized);
  }
  std::vector<CauchyRow> rows;
  std::vector<double> previous;
  for (int K : cutoffs) {
    std::vector<double> r(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = std::abs(renormalized[2 * K][i] - renormalized[K][i]);
      b[i] = std::abs(bare[2 * K][i] - bare[K][i]);
    }
    CauchyRow row;
    row.K = K;
    row.renormalized = sample_mean(r);
    row.bare = sample_mean(b);
    if (!previous.empty()) {
      std::vector<double> drop(n);
      for (std::size_t i = 0; i < n; ++i) drop[i] = previous[i] - r[i];
      row.renormalized_decrease = sample_mean(drop);
    }
    previous = std::move(r);
    rows.push_back(row);
  }
  return rows;
}

Study1dReport run_study_1d(const RunConfig& c) {
  validate(c, Purpose::Study1d);
  const GridSpec grid = c.model.grid();
  const int K = c.model.modes;
  const OneBodyOperator full = build_one_body(grid, c.model.trap(), static_cast<int>(grid.size()));
  Study1dReport rep;
  rep.trace = schatten_trace(full, 1.0);
  if (rep.trace.likely_divergent) {
    throw ConfigError("model.exponent: the one-body operator is not trace class, study-1d needs s > 2");
  }
  const OneBodyOperator op = shift_potential(full, c.model.nu);
  const PairPotential w = c.interaction.build(grid);
  rep.eigenvalues = op.eigenvalues().head(K);
  rep.modes = K;
  rep.max_particles = c.quantum.max_particles;
  rep.coupling_c = c.quantum.coupling_c;
  rep.nu = c.model.nu;
  rep.samples = c.classical.samples;
  rep.seed = c.classical.seed;

  // Classical side: one ensemble, independent of T.
  Ensemble ensemble = sample_gaussian(op, K, c.classical.samples, c.classical.seed);
  if (c.quantum.coupling_c > 0.0) {
    Reweighted r = reweight(ensemble, EnergyKind::Bare, op, w, c.classical.ess_floor,
                            c.quantum.coupling_c);
    rep.ess = r.ess;
    rep.low_confidence = r.low_confidence;
    ensemble = std::move(r.ensemble);
    rep.log_zr = estimate_log_zr(ensemble);
  } else {
    rep.ess = static_cast<double>(ensemble.size());
    rep.log_zr = {0.0, 0.0};
  }
  rep.moment1 = reduced_moment(ensemble, 1);
  rep.moment2 = reduced_moment(ensemble, 2);

  // Quantum side, quantized in the unshifted eigenbasis with -nu N applied
  // by the Gibbs state.
  const FockBasis basis(K, c.quantum.max_particles);
  const PairTensor tensor = build_pair_tensor(full, w, K);
  const FockOperator kinetic = second_quantize_one_body(basis, full, K);
  const FockOperator pair = second_quantize_pair(basis, tensor);
  const Eigen::VectorXd energies = full.eigenvalues().head(K);

  rep.rows.resize(c.quantum.temperatures.size());
  parallel_for(rep.rows.size(), [&](std::size_t i) {
    Study1dRow& row = rep.rows[i];
    const double T = c.quantum.temperatures[i];
    row.T = T;
    row.lambda = c.quantum.coupling_c / T;
    const GibbsResult g = gibbs_state(kinetic + row.lambda * pair, basis, T, c.model.nu);
    const GibbsResult g0 = gibbs_state(kinetic, basis, T, c.model.nu);
    row.free_energy = g.free_energy;
    row.free_energy_free = free_bose_free_energy(rep.eigenvalues, T);
    row.free_energy_free_truncated = g0.free_energy;
    row.discrepancy = std::abs((row.free_energy - row.free_energy_free) / T - rep.log_zr.value);
    row.discrepancy_truncated =
        std::abs((row.free_energy - row.free_energy_free_truncated) / T - rep.log_zr.value);
    const ReducedOperator q1 = scaled(reduced_density(g.state, basis, 1), classical_comparison_factor(1, T));
    const ReducedOperator q2 = scaled(reduced_density(g.state, basis, 2), classical_comparison_factor(2, T));
    row.delta1 = trace_distance(q1, rep.moment1.value);
    row.delta2 = trace_distance(q2, rep.moment2.value);
    row.mean_number = g.mean_number;
    row.top_sector_fraction = g.top_sector_fraction;
    row.cutoff_unsafe = g.cutoff_unsafe || g0.cutoff_unsafe;
    QuantumModel model{energies, tensor, row.lambda};
    row.audit = cutoff_audit(model, c.quantum.audit_schedule, T, c.model.nu);
  });

  std::vector<double> disc, d1, d2;
  for (const auto& r : rep.rows) {
    disc.push_back(r.discrepancy);
    d1.push_back(r.delta1);
    d2.push_back(r.delta2);
  }
  rep.discrepancy_decreasing = strictly_decreasing(disc);
  rep.delta1_decreasing = strictly_decreasing(d1);
  rep.delta2_decreasing = strictly_decreasing(d2);
  rep.final_threshold = std::max(0.05, 5.0 * rep.log_zr.standard_error);
  rep.final_ok = !disc.empty() && disc.back() < rep.final_threshold;
  return rep;
}

Study2dReport run_study_2d_classical(const RunConfig& c) {
  validate(c, Purpose::Study2d);
  const GridSpec grid = c.model.grid();
  const auto& s = c.study;
  int kmax = c.model.modes;
  for (int K : s.cutoffs) kmax = std::max(kmax, K);
  for (int K : s.wick_cutoffs) kmax = std::max(kmax, K);
  for (int K : s.cauchy_cutoffs) kmax = std::max(kmax, 2 * K);
  const int computed = std::min<int>(static_cast<int>(grid.size()), std::max(kmax, 256));
  const OneBodyOperator full = build_one_body(grid, c.model.trap(), computed);
  const OneBodyOperator op = shift_potential(full, c.model.nu);
  const PairPotential w = c.interaction.build(grid);
  const EnergyKind kind = c.interaction.renormalized ? EnergyKind::Renormalized : EnergyKind::Bare;

  Study2dReport rep;
  rep.eigenvalues = op.eigenvalues().head(kmax);
  rep.trace_p1 = schatten_trace(op, 1.0);
  rep.trace_p2 = schatten_trace(op, 2.0);
  rep.integrability = check_integrability(w, c.model.trap());

  rep.cutoffs = cutoff_sequence(op, w, s.cutoffs);
  rep.direct_diverging = rep.cutoffs.size() > 1;
  rep.exchange_increments_shrinking = rep.cutoffs.size() > 2;
  for (std::size_t i = 1; i < rep.cutoffs.size(); ++i) {
    const auto& r = rep.cutoffs[i];
    if (!(r.direct_increment > s.stall_threshold * std::abs(r.direct))) rep.direct_diverging = false;
    if (i > 1 && !(std::abs(r.exchange_increment) < std::abs(rep.cutoffs[i - 1].exchange_increment))) {
      rep.exchange_increments_shrinking = false;
    }
  }

  rep.wick = wick_checks(op, w, s.wick_cutoffs, s.wick_samples, stream_seed(c.classical.seed, 0));
  rep.cauchy = cauchy_diagnostic(op, w, s.cauchy_cutoffs, s.cauchy_samples,
                                 stream_seed(c.classical.seed, 1));
  rep.cauchy_decreasing = rep.cauchy.size() > 1;
  for (std::size_t i = 1; i < rep.cauchy.size(); ++i) {
    const auto& d = rep.cauchy[i].renormalized_decrease;
    if (!(d.mean > 2.0 * d.standard_error)) rep.cauchy_decreasing = false;
  }

  const int klog = *std::max_element(s.cutoffs.begin(), s.cutoffs.end());
  const Ensemble ensemble =
      sample_gaussian(op, klog, c.classical.samples, stream_seed(c.classical.seed, 2));
  for (int K : s.cutoffs) {
    const Reweighted r = reweight(ensemble.truncated(K), kind, op, w, c.classical.ess_floor);
    rep.log_zr.push_back({K, estimate_log_zr(r.ensemble), r.ess});
  }

  const GridSpec hgrid = c.hartree.grid(c.model);
  const PairPotential hw = c.interaction.build(hgrid);
  const auto& h = c.hartree;
  rep.hartree = counterterm_stabilization(hgrid, c.model.trap(), hw, h.temperatures, h.kappa,
                                          h.coupling_c, h.counterterm, h.rhf, h.schatten_p,
                                          h.shared_modes);

  // Classical relative one-body difference on the reference operator
  // -Laplacian + V_proxy, without a further shift.
  const OneBodyOperator reference = build_one_body(hgrid, rep.hartree.proxy_potential, h.relative_modes);
  const Ensemble rel = sample_gaussian(reference, h.relative_modes, s.wick_samples,
                                       stream_seed(c.classical.seed, 3));
  const Reweighted r = reweight(rel, kind, reference, hw, c.classical.ess_floor);
  const ReducedMoment interacting = reduced_moment(r.ensemble, 1);
  ReducedOperator free{1, h.relative_modes,
                       reference.eigenvalues().cwiseInverse().cast<std::complex<double>>().asDiagonal()};
  rep.relative.modes = h.relative_modes;
  rep.relative.trace_norm = trace_distance(interacting.value, free);
  rep.relative.max_standard_error = interacting.standard_error.maxCoeff();
  rep.relative.ess = r.ess;
  rep.relative.low_confidence = r.low_confidence;
  return rep;
}

RunOutput to_output(const StabilizationReport& rep) {
  RunOutput out;
  Document rows = Document::array();
  out.table.columns = {"T", "lambda", "nu", "iterations", "residual", "F_rH", "E0", "delta_inf",
                       "schatten_p_dist"};
  for (const auto& r : rep.rows) {
    rows.push_back({{"T", r.T},
                    {"lambda", r.lambda},
                    {"nu", r.nu},
                    {"iterations", r.iterations},
                    {"residual", r.residual},
                    {"converged", r.converged},
                    {"F_rH", r.free_energy},
                    {"E0", r.E0},
                    {"delta_inf", r.delta_inf},
                    {"schatten_p_dist", r.schatten_distance}});
    out.table.rows.push_back({r.T, r.lambda, r.nu, static_cast<double>(r.iterations), r.residual,
                              r.free_energy, r.E0, r.delta_inf, r.schatten_distance});
    if (!r.converged) out.issues.push_back("rHF not converged at T = " + std::to_string(r.T));
  }
  Document& d = out.document;
  d["rows"] = rows;
  d["schatten_p"] = rep.schatten_p;
  d["shared_modes"] = rep.shared_modes;
  d["delta_decreasing"] = rep.delta_decreasing;
  d["schatten_decreasing"] = rep.schatten_decreasing;
  d["sandwich"] = {{"min_ratio", rep.sandwich_min_ratio},
                   {"max_ratio", rep.sandwich_max_ratio},
                   {"holds", rep.sandwich_holds}};
  return out;
}

RunOutput to_output(const Study1dReport& rep) {
  RunOutput out;
  Document& d = out.document;
  d["study"] = "1d";
  d["modes"] = rep.modes;
  d["max_particles"] = rep.max_particles;
  d["coupling_c"] = rep.coupling_c;
  d["nu"] = rep.nu;
  d["eigenvalues"] = to_document(rep.eigenvalues);
  d["schatten_p1"] = schatten_document(rep.trace);
  d["classical"] = {{"samples", rep.samples},
                    {"seed", rep.seed},
                    {"log_zr", rep.log_zr.value},
                    {"stderr", rep.log_zr.standard_error},
                    {"ess", rep.ess},
                    {"low_confidence", rep.low_confidence},
                    {"moments", {{"k1", to_document(rep.moment1.value.matrix)},
                                 {"k2", to_document(rep.moment2.value.matrix)}}}};
  Document rows = Document::array();
  out.table.columns = {"T", "lambda", "F_lambda", "F0", "F0_truncated", "log_zr", "log_zr_stderr",
                       "discrepancy", "discrepancy_truncated", "delta1", "delta2", "mean_number",
                       "top_sector_fraction", "cutoff_unsafe"};
  for (const auto& r : rep.rows) {
    Document audit = Document::array();
    for (const auto& a : r.audit.rows) {
      audit.push_back({{"max_particles", a.max_particles},
                       {"free_energy", a.free_energy},
                       {"mean_number", a.mean_number},
                       {"top_sector_fraction", a.top_sector_fraction},
                       {"delta_free_energy", a.delta_free_energy}});
    }
    rows.push_back({{"T", r.T},
                    {"lambda", r.lambda},
                    {"F_lambda", r.free_energy},
                    {"F0", r.free_energy_free},
                    {"F0_truncated", r.free_energy_free_truncated},
                    {"discrepancy", r.discrepancy},
                    {"discrepancy_truncated", r.discrepancy_truncated},
                    {"delta1", r.delta1},
                    {"delta2", r.delta2},
                    {"mean_number", r.mean_number},
                    {"top_sector_fraction", r.top_sector_fraction},
                    {"cutoff_unsafe", r.cutoff_unsafe},
                    {"audit", {{"converged", r.audit.converged},
                               {"converged_at", r.audit.converged_at},
                               {"rows", audit}}}});
    out.table.rows.push_back({r.T, r.lambda, r.free_energy, r.free_energy_free,
                              r.free_energy_free_truncated, rep.log_zr.value,
                              rep.log_zr.standard_error, r.discrepancy, r.discrepancy_truncated,
                              r.delta1, r.delta2, r.mean_number, r.top_sector_fraction,
                              r.cutoff_unsafe ? 1.0 : 0.0});
    if (r.cutoff_unsafe) out.issues.push_back("cutoff-unsafe Gibbs state at T = " + std::to_string(r.T));
    if (!r.audit.converged) out.issues.push_back("cutoff audit not converged at T = " + std::to_string(r.T));
  }
  if (rep.low_confidence) out.issues.push_back("low effective sample size");
  d["rows"] = rows;
  d["trends"] = {{"discrepancy_decreasing", rep.discrepancy_decreasing},
                 {"delta1_decreasing", rep.delta1_decreasing},
                 {"delta2_decreasing", rep.delta2_decreasing},
                 {"final_threshold", rep.final_threshold},
                 {"final_ok", rep.final_ok}};
  return out;
}

RunOutput to_output(const Study2dReport& rep) {
  RunOutput out;
  Document& d = out.document;
  d["study"] = "2d-classical";
  d["eigenvalues"] = to_document(rep.eigenvalues);
  d["schatten_p1"] = schatten_document(rep.trace_p1);
  d["schatten_p2"] = schatten_document(rep.trace_p2);
  const auto& ig = rep.integrability;
  d["integrability"] = {{"fourier_moment", ig.fourier_moment},
                        {"fourier_tail_fraction", ig.fourier_tail_fraction},
                        {"potential_moment", ig.potential_moment},
                        {"potential_tail_fraction", ig.potential_tail_fraction},
                        {"fourier_condition", ig.fourier_condition},
                        {"potential_condition", ig.potential_condition}};
  Document cut = Document::array();
  for (const auto& r : rep.cutoffs) {
    cut.push_back({{"K", r.K},
                   {"direct", r.direct},
                   {"exchange", r.exchange},
                   {"direct_increment", r.direct_increment},
                   {"exchange_increment", r.exchange_increment}});
  }
  d["cutoffs"] = cut;
  d["direct_diverging"] = rep.direct_diverging;
  d["exchange_increments_shrinking"] = rep.exchange_increments_shrinking;
  Document wick = Document::array();
  for (const auto& r : rep.wick) {
    wick.push_back({{"K", r.K},
                    {"bare", mean_document(r.bare)},
                    {"bare_exact", r.bare_exact},
                    {"bare_z", r.bare_z},
                    {"renormalized", mean_document(r.renormalized)},
                    {"renormalized_exact", r.renormalized_exact},
                    {"renormalized_z", r.renormalized_z}});
  }
  d["wick"] = wick;
  Document cauchy = Document::array();
  for (const auto& r : rep.cauchy) {
    cauchy.push_back({{"K", r.K},
                      {"renormalized", mean_document(r.renormalized)},
                      {"bare", mean_document(r.bare)},
                      {"renormalized_decrease", mean_document(r.renormalized_decrease)}});
  }
  d["cauchy"] = cauchy;
  d["cauchy_decreasing"] = rep.cauchy_decreasing;
  Document logz = Document::array();
  for (const auto& r : rep.log_zr) {
    logz.push_back({{"K", r.K}, {"log_zr", r.log_zr.value}, {"stderr", r.log_zr.standard_error}, {"ess", r.ess}});
  }
  d["log_zr"] = logz;
  RunOutput h = to_output(rep.hartree);
  d["hartree"] = h.document;
  out.issues = h.issues;
  d["relative_one_body"] = {{"modes", rep.relative.modes},
                            {"trace_norm", rep.relative.trace_norm},
                            {"max_stderr", rep.relative.max_standard_error},
                            {"ess", rep.relative.ess},
                            {"low_confidence", rep.relative.low_confidence},
                            {"quantum_side_validated", false}};
  if (rep.relative.low_confidence) out.issues.push_back("low effective sample size (relative one-body)");

  out.table.columns = {"K", "direct", "exchange", "direct_increment", "exchange_increment",
                       "log_zr", "log_zr_stderr", "ess"};
  for (std::size_t i = 0; i < rep.cutoffs.size(); ++i) {
    const auto& r = rep.cutoffs[i];
    const auto& z = rep.log_zr[i];
    out.table.rows.push_back({static_cast<double>(r.K), r.direct, r.exchange, r.direct_increment,
                              r.exchange_increment, z.log_zr.value, z.log_zr.standard_error, z.ess});
  }
  return out;
}

RunOutput run_single(const RunConfig& c, Purpose which) {
  validate(c, which);
  RunOutput out;
  Document& d = out.document;
  d["config"] = config_document(c);
  const GridSpec grid = c.model.grid();
  const int K = c.model.modes;

  if (which == Purpose::Hartree) {
    const GridSpec hgrid = c.hartree.grid(c.model);
    const PairPotential w = c.interaction.build(hgrid);
    const auto& h = c.hartree;
    RunOutput r = to_output(counterterm_stabilization(hgrid, c.model.trap(), w, h.temperatures,
                                                      h.kappa, h.coupling_c, h.counterterm, h.rhf,
                                                      h.schatten_p, h.shared_modes));
    Document rho = Document::array();
    for (double T : h.temperatures) {
      rho.push_back({{"T", T},
                     {"rho0_kappa", reference_density(T, h.kappa, hgrid, h.counterterm)},
                     {"nu", chemical_potential(T, h.coupling_c / T, h.kappa, w, h.counterterm)}});
    }
    d["command"] = "hartree";
    d["counterterm"] = rho;
    d["stabilization"] = r.document;
    out.table = r.table;
    out.issues = r.issues;
    return out;
  }

  const OneBodyOperator full = build_one_body(grid, c.model.trap(), K);
  const OneBodyOperator op = shift_potential(full, c.model.nu);
  switch (which) {
    case Purpose::Spectrum: {
      d["command"] = "spectrum";
      d["eigenvalues"] = to_document(full.eigenvalues());
      d["shifted_eigenvalues"] = to_document(op.eigenvalues());
      d["schatten_p1"] = schatten_document(schatten_trace(op, 1.0));
      d["schatten_p2"] = schatten_document(schatten_trace(op, 2.0));
      d["green_trace"] = green_kernel(op, K).diagonal.sum() * grid.cell_volume();
      out.table.columns = {"j", "lambda", "lambda_shifted"};
      for (int j = 0; j < K; ++j) {
        out.table.rows.push_back({static_cast<double>(j + 1), full.eigenvalues()[j], op.eigenvalues()[j]});
      }
      return out;
    }
    case Purpose::Sample: {
      const Ensemble e = sample_gaussian(op, K, c.classical.samples, c.classical.seed);
      const std::string path = output_path(c, ".ens");
      write_ensemble(path, e);
      d["command"] = "sample-gaussian";
      d["ensemble"] = std::filesystem::path(path).filename().string();
      d["operator_id"] = e.operator_id;
      out.table.columns = {"j", "lambda", "mean_abs2", "stderr", "expected"};
      Document modes = Document::array();
      for (int j = 0; j < K; ++j) {
        std::vector<double> a(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) a[i] = std::norm(e.coefficients(static_cast<Eigen::Index>(i), j));
        const SampleMean m = sample_mean(a);
        const double expected = 1.0 / op.eigenvalues()[j];
        modes.push_back({{"j", j + 1}, {"mean_abs2", m.mean}, {"stderr", m.standard_error}, {"expected", expected}});
        out.table.rows.push_back({static_cast<double>(j + 1), op.eigenvalues()[j], m.mean, m.standard_error, expected});
      }
      d["modes"] = modes;
      return out;
    }
    case Purpose::Classical: {
      const PairPotential w = c.interaction.build(grid);
      const EnergyKind kind = c.interaction.renormalized ? EnergyKind::Renormalized : EnergyKind::Bare;
      const Ensemble e = sample_gaussian(op, K, c.classical.samples, c.classical.seed);
      const Reweighted r = reweight(e, kind, op, w, c.classical.ess_floor);
      const LogPartition z = estimate_log_zr(r.ensemble);
      const ReducedMoment m1 = reduced_moment(r.ensemble, 1);
      const ReducedMoment m2 = reduced_moment(r.ensemble, 2);
      write_matrix(output_path(c, ".k1.gflm"), m1.value.matrix);
      write_matrix(output_path(c, ".k2.gflm"), m2.value.matrix);
      d["command"] = "classical-gibbs";
      d["log_zr"] = z.value;
      d["stderr"] = z.standard_error;
      d["ess"] = r.ess;
      d["low_confidence"] = r.low_confidence;
      d["moments"] = {{"k1", to_document(m1.value.matrix)}, {"k2", to_document(m2.value.matrix)}};
      if (r.low_confidence) out.issues.push_back("low effective sample size");
      out.table.columns = {"j", "lambda", "moment_k1_diagonal", "stderr"};
      for (int j = 0; j < K; ++j) {
        out.table.rows.push_back({static_cast<double>(j + 1), op.eigenvalues()[j],
                                  m1.value.matrix(j, j).real(), m1.standard_error(j, j)});
      }
      return out;
    }
    case Purpose::Quantum: {
      const PairPotential w = c.interaction.build(grid);
      const FockBasis basis(K, c.quantum.max_particles);
      const FockOperator kinetic = second_quantize_one_body(basis, full, K);
      const FockOperator pair = second_quantize_pair(basis, build_pair_tensor(full, w, K));
      d["command"] = "quantum-gibbs";
      d["fock_dimension"] = basis.dimension();
      Document rows = Document::array();
      out.table.columns = {"T", "lambda", "F_lambda", "mean_number", "top_sector_fraction", "cutoff_unsafe"};
      for (std::size_t i = 0; i < c.quantum.temperatures.size(); ++i) {
        const double T = c.quantum.temperatures[i];
        const double lambda = c.quantum.coupling_c / T;
        const GibbsResult g = gibbs_state(kinetic + lambda * pair, basis, T, c.model.nu);
        const ReducedOperator g1 = reduced_density(g.state, basis, 1);
        write_matrix(output_path(c, ".T" + std::to_string(i) + ".k1.gflm"), g1.matrix);
        rows.push_back({{"T", T},
                        {"lambda", lambda},
                        {"F_lambda", g.free_energy},
                        {"log_partition", g.log_partition},
                        {"ground_energy", g.ground_energy},
                        {"mean_number", g.mean_number},
                        {"top_sector_fraction", g.top_sector_fraction},
                        {"cutoff_unsafe", g.cutoff_unsafe},
                        {"gamma1", to_document(g1.matrix)}});
        out.table.rows.push_back({T, lambda, g.free_energy, g.mean_number, g.top_sector_fraction,
                                  g.cutoff_unsafe ? 1.0 : 0.0});
        if (g.cutoff_unsafe) out.issues.push_back("cutoff-unsafe Gibbs state at T = " + std::to_string(T));
      }
      d["rows"] = rows;
      return out;
    }
    default:
      throw UsageError("run_single handles spectrum, sample, classical, quantum and hartree");
  }
}

}  // namespace gfl
