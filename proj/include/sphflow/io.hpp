#pragma once

// Report JSON and CSV emission. Files are written to a sibling temp file and
// renamed into place, so readers never see a partial file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sphflow/identities.hpp"

namespace sphflow {

inline constexpr int kReportSchemaVersion = 1;

inline nlohmann::ordered_json to_json(const ResidualReport& r)
{
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["L"] = r.L;
  j["l_max_data"] = r.l_max_data;
  j["sup_residual"] = r.sup_residual;
  j["rel_residual"] = r.rel_residual;
  j["passed"] = r.passed;
  j["tolerance"] = r.tolerance;
  return j;
}

inline nlohmann::ordered_json report_document(const std::string& command, const std::vector<ResidualReport>& reports)
{
  nlohmann::ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = command;
  bool all = true;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    all = all && r.passed;
  }
  doc["all_passed"] = all;
  doc["reports"] = std::move(arr);
  return doc;
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content)
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// 17 significant digits; NaN and infinities as nan / inf / -inf.
inline std::string format_double(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Minimal CSV table: a header and rows of doubles.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string str() const
  {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& row : rows) {
      if (row.size() != header.size()) throw std::logic_error("CsvTable: row width does not match header");
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
      os << '\n';
    }
    return os.str();
  }
};

/// t, J_<alpha>..., dJ_<alpha>_formula...
inline CsvTable j_table_csv(const JTable& table)
{
  CsvTable csv;
  csv.header.push_back("t");
  for (double a : table.alphas) csv.header.push_back("J_" + alpha_label(a));
  for (double a : table.alphas) csv.header.push_back("dJ_" + alpha_label(a) + "_formula");
  for (const auto& row : table.rows) {
    std::vector<double> r{row.t};
    r.insert(r.end(), row.j.begin(), row.j.end());
    r.insert(r.end(), row.formula.begin(), row.formula.end());
    csv.rows.push_back(std::move(r));
  }
  return csv;
}

}  // namespace sphflow
