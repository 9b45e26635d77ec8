#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "catdvp/cli/config.hpp"
#include "catdvp/thermal.hpp"

namespace catdvp::cli {

/// Bumped on any change to the results or metadata layout.
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// "%.17g": enough digits to round-trip any double.
std::string format_double(double x);

std::vector<std::string> result_columns(bool with_oracle);

/// Streams results as CSV: header first, then one row per record.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, bool with_oracle);
  void write(const ThermalRecord& rec);
  /// Trailing marker for a run that stopped early.
  void mark_truncated(const std::string& error);

 private:
  std::ostream& out_;
  bool with_oracle_;
};

nlohmann::json results_json(const RunResult& result, bool with_oracle);

/// Resolved config, versions, wall times and the outcome of one job.
nlohmann::json metadata_json(const RunConfig& cfg, Index bond, const RunResult& result, double wall_seconds,
                             const std::string& results_file);

/// A results table read back from CSV or JSON.
struct ResultsTable {
  std::string source;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool truncated = false;

  /// Column index, or -1.
  int column(const std::string& name) const;
};

ResultsTable read_results(const std::string& path);
ResultsTable parse_results_csv(const std::string& text, const std::string& source);
ResultsTable parse_results_json(const std::string& text, const std::string& source);

}  // namespace catdvp::cli
