#ifndef GFL_REPORT_HPP
#define GFL_REPORT_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace gfl {

inline constexpr int kSchemaVersion = 1;

// Insertion-ordered so that identical runs serialize identically.
using Document = nlohmann::ordered_json;

// Plot-ready table: one row per schedule point.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Doubles as %.17g, non-finite values as null, keys in insertion order.
std::string dump_json(const Document& doc, int indent = 2);
std::string dump_csv(const Table& table);

Document to_document(const Eigen::VectorXd& v);
Document to_document(const Eigen::MatrixXd& m);
// Complex matrices as {"re": [[...]], "im": [[...]]}.
Document to_document(const Eigen::MatrixXcd& m);

// Writes <dir>/<stem>.json or <dir>/<stem>.csv, plus <dir>/<stem>.meta.json
// holding the timestamp and invocation details, which are kept out of the
// main document so that reruns are byte-identical.
std::string write_result(const std::string& dir, const std::string& stem, const std::string& format,
                         const Document& doc, const Table& table, const Document& meta);

}  // namespace gfl

#endif  // GFL_REPORT_HPP
