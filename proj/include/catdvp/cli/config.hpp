#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "catdvp/errors.hpp"
#include "catdvp/thermal.hpp"

namespace catdvp::cli {

enum class OutputFormat { Csv, Json };

/// A simulation plan plus where and how to write its results.
struct RunConfig {
  SimulationPlan plan;
  /// Bond dimensions to run as independent jobs. Empty: one job at
  /// plan.sweep.truncation.max_bond.
  std::vector<Index> bond_scan;
  std::string out_dir = ".";
  std::string name = "run";
  OutputFormat format = OutputFormat::Csv;
  std::string source;  // config path, for the metadata

  std::vector<Index> bond_dims() const;
};

struct Diagnostic {
  std::string field;  // "section.key", empty for file-level problems
  int line = 0;       // 1-based, 0 if unknown
  std::string message;
};

/// Schema violations; what() lists every diagnostic, one per line.
struct ConfigError : ValidationError {
  ConfigError(const std::string& source, std::vector<Diagnostic> diagnostics);
  std::vector<Diagnostic> diagnostics;
};

/// Returns the value of an environment variable, if set.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

/// Every accepted "section.key".
const std::vector<std::string>& config_keys();

/// Name of the variable that overrides `field`: CATDVP_<SECTION>_<KEY>.
std::string env_var_name(const std::string& field);

/// Parses and validates an INI config. Environment overrides win over the
/// file. Throws ConfigError with every problem found.
RunConfig parse_config(std::istream& in, const std::string& source, const EnvLookup& env = process_env);
RunConfig load_config(const std::string& path, const EnvLookup& env = process_env);

std::string to_string(OutputFormat f);
std::string to_string(ModelKind k);
std::string to_string(CliffordSearch s);
std::string to_string(DisentangleCost c);
std::string to_string(SweepDirection d);

}  // namespace catdvp::cli
