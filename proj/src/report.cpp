#include "gfl/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gfl/errors.hpp"

namespace gfl {

namespace {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void dump(const Document& d, std::ostringstream& out, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (d.type()) {
    case Document::value_t::object: {
      if (d.empty()) {
        out << "{}";
        return;
      }
      out << '{' << nl;
      bool first = true;
      for (auto it = d.begin(); it != d.end(); ++it) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad << Document(it.key()).dump() << (indent > 0 ? ": " : ":");
        dump(it.value(), out, indent, depth + 1);
      }
      out << nl << close_pad << '}';
      return;
    }
    case Document::value_t::array: {
      if (d.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : d) flat = flat && !e.is_structured();
      out << '[';
      bool first = true;
      for (const auto& e : d) {
        if (!first) out << (flat ? ", " : ",");
        first = false;
        if (!flat) out << nl << pad;
        dump(e, out, indent, depth + 1);
      }
      if (!flat) out << nl << close_pad;
      out << ']';
      return;
    }
    case Document::value_t::number_float:
      out << format_double(d.get<double>());
      return;
    default:
      out << d.dump();
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("output.dir: cannot write " + path.string());
  f << text;
}

}  // namespace

std::string dump_json(const Document& doc, int indent) {
  std::ostringstream out;
  dump(doc, out, indent, 0);
  out << '\n';
  return out.str();
}

std::string dump_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << (std::isfinite(row[i]) ? format_double(row[i]) : "nan");
    }
    out << '\n';
  }
  return out.str();
}

Document to_document(const Eigen::VectorXd& v) {
  Document a = Document::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Document to_document(const Eigen::MatrixXd& m) {
  Document a = Document::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_document(Eigen::VectorXd(m.row(i).transpose())));
  return a;
}

Document to_document(const Eigen::MatrixXcd& m) {
  Document d = Document::object();
  d["re"] = to_document(Eigen::MatrixXd(m.real()));
  d["im"] = to_document(Eigen::MatrixXd(m.imag()));
  return d;
}

std::string write_result(const std::string& dir, const std::string& stem, const std::string& format,
                         const Document& doc, const Table& table, const Document& meta) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("output.dir: cannot create " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  std::filesystem::path main;
  if (format == "csv") {
    main = base / (stem + ".csv");
    write_file(main, dump_csv(table));
  } else if (format == "json") {
    main = base / (stem + ".json");
    Document full = Document::object();
    full["gfl_schema"] = kSchemaVersion;
    for (auto it = doc.begin(); it != doc.end(); ++it) full[it.key()] = it.value();
    write_file(main, dump_json(full));
  } else {
    throw ConfigError("output.format must be json or csv");
  }
  Document m = Document::object();
  m["gfl_schema"] = kSchemaVersion;
  m["created_utc"] = utc_timestamp();
  m["result"] = main.filename().string();
  for (auto it = meta.begin(); it != meta.end(); ++it) m[it.key()] = it.value();
  write_file(base / (stem + ".meta.json"), dump_json(m));
  return main.string();
}

}  // namespace gfl
