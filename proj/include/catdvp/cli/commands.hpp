#pragma once

#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "catdvp/cli/config.hpp"
#include "catdvp/cli/results_io.hpp"

namespace catdvp::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,         // any other engine or internal error
  kExitValidation = 2,      // config schema/range errors, malformed inputs, grid mismatch
  kExitConvergence = 3,     // Krylov did not converge
  kExitIo = 4,              // a file could not be read or written
  kExitSelftestFailed = 5,  // selftest found a failing check
};

/// Exit code for a caught exception.
int exit_code_for(std::exception_ptr e);

struct RunOptions {
  std::string config_path;
  std::optional<std::string> out_dir;       // overrides output.dir
  std::optional<OutputFormat> format;       // overrides output.format
  unsigned threads = 0;                     // D-scan jobs in parallel; 0 = hardware concurrency
};

/// Runs every job of the config and writes <name>[_D<d>].{csv,json} plus a
/// <stem>.meta.json sidecar per job. Validation happens before any file is
/// created. Jobs that stop on an engine error keep their partial results.
int cmd_run(const RunOptions& opt, std::ostream& log, std::ostream& err);

struct CompareRow {
  double beta = 0.0;
  double err_a = 0.0, err_b = 0.0, err_ratio = 0.0;
  double entropy_a = 0.0, entropy_b = 0.0, entropy_diff = 0.0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  std::size_t a_not_worse = 0;  // grid points with err_a <= err_b
  double fraction() const { return rows.empty() ? 1.0 : static_cast<double>(a_not_worse) / rows.size(); }
};

/// Both tables need an energy_rel_err column and the same beta grid
/// (to 1e-9); otherwise GridMismatchError / ValidationError.
CompareReport compare_results(const ResultsTable& a, const ResultsTable& b);
void write_compare_csv(std::ostream& out, const CompareReport& report);

int cmd_compare(const std::string& a, const std::string& b, const std::optional<std::string>& out_path,
                std::ostream& out, std::ostream& err);

/// Writes the 720-entry catalog text to out_path, or to `out` if none.
int cmd_enumerate_cliffords(const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err);

}  // namespace catdvp::cli
