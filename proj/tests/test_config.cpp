#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gfl/config.hpp"
#include "gfl/errors.hpp"
#include "gfl/parallel.hpp"
#include "gfl/report.hpp"
#include "gfl/studies.hpp"

using namespace gfl;

namespace {

std::string write_ini(const std::string& name, const std::string& body) {
  const auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream(path) << body;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const RunConfig& c, Purpose p) {
  try {
    validate(c, p);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("INI overlay") {
  const auto path = write_ini("gfl_overlay.ini",
                              "[model]\nexponent = 4\npoints = 128\n"
                              "[quantum]\ntemperatures = 1, 2.5, 7\n"
                              "[hartree]\nmomentum_measure = 2pi\nlattice_density = false\n");
  const RunConfig c = load_config(path, RunConfig::defaults_1d());
  CHECK(c.model.exponent == 4.0);
  CHECK(c.model.points == 128);
  CHECK(c.quantum.temperatures == std::vector<double>{1.0, 2.5, 7.0});
  CHECK(c.hartree.counterterm.momentum_measure == doctest::Approx(1.0 / (4.0 * M_PI * M_PI)));
  CHECK_FALSE(c.hartree.counterterm.lattice_density);
  CHECK(c.model.half_width == RunConfig::defaults_1d().model.half_width);
}

TEST_CASE("parse errors name the offending key") {
  const auto unknown = write_ini("gfl_unknown.ini", "[model]\nexponet = 4\n");
  CHECK_THROWS_WITH_AS(load_config(unknown, RunConfig::defaults_1d()), doctest::Contains("model.exponet"), ConfigError);
  const auto bad = write_ini("gfl_bad.ini", "[classical]\nsamples = many\n");
  CHECK_THROWS_WITH_AS(load_config(bad, RunConfig::defaults_1d()), doctest::Contains("classical.samples"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/gfl.ini", RunConfig::defaults_1d()), ConfigError);
}

TEST_CASE("validation collects every problem") {
  RunConfig c = RunConfig::defaults_2d();
  c.interaction.kind = "grid_delta";
  c.interaction.renormalized = true;
  c.model.modes = 13;
  c.quantum.temperatures = {4.0, 2.0};
  const std::string msg = config_error(c, Purpose::Quantum);
  CHECK(msg.find("interaction.renormalized") != std::string::npos);
  CHECK(msg.find("model.modes") != std::string::npos);
  CHECK(msg.find("quantum.temperatures") != std::string::npos);

  CHECK(config_error(RunConfig::defaults_1d(), Purpose::Study1d).empty());
  CHECK(config_error(RunConfig::defaults_2d(), Purpose::Study2d).empty());
  CHECK(config_error(RunConfig::defaults_2d(), Purpose::Study1d).find("model.dimension") != std::string::npos);
  RunConfig q = RunConfig::defaults_1d();
  q.quantum.max_particles = 300;
  CHECK(config_error(q, Purpose::Quantum).find("quantum.max_particles") != std::string::npos);
}

TEST_CASE("JSON and CSV serialization") {
  Document d = Document::object();
  d["b"] = 0.1;
  d["a"] = std::vector<double>{1.0, 2.5};
  d["nan"] = std::nan("");
  const std::string json = dump_json(d);
  CHECK(json.find("\"b\"") < json.find("\"a\""));
  CHECK(json.find("0.10000000000000001") != std::string::npos);
  CHECK(json.find("null") != std::string::npos);
  CHECK(Document::parse(json)["a"][1] == 2.5);

  const Table t{{"T", "value"}, {{2.0, 0.5}, {4.0, 1.0 / 3.0}}};
  const std::string csv = dump_csv(t);
  CHECK(csv.rfind("T,value\n", 0) == 0);
  CHECK(csv.find("0.33333333333333331") != std::string::npos);

  Eigen::MatrixXcd m(1, 2);
  m << std::complex<double>(1, 2), 3.0;
  const Document md = to_document(m);
  CHECK(md["re"][0][0] == 1.0);
  CHECK(md["im"][0][0] == 2.0);
}

TEST_CASE("single runs serialize identically across thread counts") {
  RunConfig c = RunConfig::defaults_1d();
  c.model.points = 128;
  c.classical.samples = 4000;
  const auto dir = (std::filesystem::temp_directory_path() / "gfl_det").string();
  c.output.dir = dir;
  std::string first;
  for (int threads : {1, 3}) {
    set_thread_count(threads);
    const RunOutput out = run_single(c, Purpose::Classical);
    const std::string text = dump_json(out.document);
    if (first.empty()) first = text;
    CHECK(text == first);
  }
  set_thread_count(1);
}

TEST_CASE("write_result layout") {
  const auto dir = (std::filesystem::temp_directory_path() / "gfl_layout").string();
  Document d = {{"x", 1.0}};
  const std::string path = write_result(dir, "unit", "json", d, Table{{"x"}, {{1.0}}}, Document{{"note", "t"}});
  const Document back = Document::parse(slurp(path));
  CHECK(back.begin().key() == "gfl_schema");
  CHECK(back["gfl_schema"] == kSchemaVersion);
  CHECK(std::filesystem::exists(dir + "/unit.meta.json"));
  const std::string csv = write_result(dir, "unit", "csv", d, Table{{"x"}, {{1.0}}}, Document{});
  CHECK(slurp(csv) == "x\n1\n");
}

}  // TEST_SUITE
