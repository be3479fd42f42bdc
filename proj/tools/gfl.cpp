// gfl: command-line runner for the spectral, classical, quantum and Hartree
// computations. Exit codes: 0 success, 2 configuration error, 3 numerical
// failure (including cutoff-unsafe or nonconverged results under --strict).

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "gfl/config.hpp"
#include "gfl/errors.hpp"
#include "gfl/parallel.hpp"
#include "gfl/report.hpp"
#include "gfl/studies.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  int threads = 1;
  bool strict = false;
};

struct Command {
  const char* name;
  const char* help;
  gfl::Purpose purpose;
};

constexpr Command kCommands[] = {
    {"spectrum", "eigenvalues, Schatten traces and Green kernel trace", gfl::Purpose::Spectrum},
    {"sample-gaussian", "draw a Gaussian ensemble and dump it in GFL1 format", gfl::Purpose::Sample},
    {"classical-gibbs", "reweighted ensemble: -log z_r, ESS and reduced moments", gfl::Purpose::Classical},
    {"quantum-gibbs", "grand-canonical Gibbs states on the truncated Fock space", gfl::Purpose::Quantum},
    {"hartree", "counterterm stabilization table along the T schedule", gfl::Purpose::Hartree},
    {"study-1d", "1D mean-field limit: free energies and reduced densities vs T", gfl::Purpose::Study1d},
    {"study-2d-classical", "2D renormalization: direct/exchange, Wick, Cauchy, Hartree", gfl::Purpose::Study2d},
};

bool is_2d(gfl::Purpose p) { return p == gfl::Purpose::Study2d || p == gfl::Purpose::Hartree; }

int run(const Command& cmd, const Options& opt, int argc, char** argv) {
  gfl::RunConfig config = is_2d(cmd.purpose) ? gfl::RunConfig::defaults_2d() : gfl::RunConfig::defaults_1d();
  if (!opt.config_path.empty()) config = gfl::load_config(opt.config_path, config);
  if (opt.seed) config.classical.seed = *opt.seed;
  if (opt.out) config.output.dir = *opt.out;
  if (opt.format) config.output.format = *opt.format;
  config.output.stem = cmd.name;
  gfl::set_thread_count(opt.threads);

  gfl::RunOutput result;
  switch (cmd.purpose) {
    case gfl::Purpose::Study1d:
      result = gfl::to_output(gfl::run_study_1d(config));
      break;
    case gfl::Purpose::Study2d:
      result = gfl::to_output(gfl::run_study_2d_classical(config));
      break;
    default:
      result = gfl::run_single(config, cmd.purpose);
  }
  gfl::Document doc = gfl::Document::object();
  doc["command"] = cmd.name;
  doc["config"] = gfl::config_document(config);
  for (auto it = result.document.begin(); it != result.document.end(); ++it) {
    if (it.key() != "command" && it.key() != "config") doc[it.key()] = it.value();
  }
  doc["issues"] = result.issues;

  std::string invocation;
  for (int i = 0; i < argc; ++i) invocation += (i ? " " : "") + std::string(argv[i]);
  gfl::Document meta = {{"invocation", invocation}, {"threads", opt.threads}, {"strict", opt.strict}};
  const std::string path = gfl::write_result(config.output.dir, config.output.stem,
                                             config.output.format, doc, result.table, meta);
  std::cout << path << '\n';
  for (const auto& issue : result.issues) std::cerr << "warning: " << issue << '\n';
  if (opt.strict && !result.issues.empty()) {
    std::cerr << "error: --strict and " << result.issues.size() << " issue(s) reported\n";
    return kExitNumerical;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical and quantum Bose gas Gibbs state laboratory"};
  app.require_subcommand(1);
  Options opt;
  const Command* selected = nullptr;
  for (const Command& cmd : kCommands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", opt.config_path, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "override classical.seed");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--strict", opt.strict, "exit 3 on cutoff-unsafe, low-confidence or nonconverged results");
    sub->callback([&selected, &cmd] { selected = &cmd; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  try {
    return run(*selected, opt, argc, argv);
  } catch (const gfl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gfl::DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const gfl::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
