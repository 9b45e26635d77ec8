#include "catdvp/cli/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "catdvp/clifford.hpp"

namespace catdvp::cli {

namespace fs = std::filesystem;

int exit_code_for(std::exception_ptr e) {
  if (!e) return kExitOk;
  try {
    std::rethrow_exception(e);
  } catch (const ValidationError&) {
    return kExitValidation;
  } catch (const ParseError&) {
    return kExitValidation;
  } catch (const GridMismatchError&) {
    return kExitValidation;
  } catch (const ConvergenceError&) {
    return kExitConvergence;
  } catch (const IoError&) {
    return kExitIo;
  } catch (const fs::filesystem_error&) {
    return kExitIo;
  } catch (...) {
    return kExitFailure;
  }
}

namespace {

struct Job {
  Index bond = 0;
  std::string stem;
};

std::ofstream open_for_write(const fs::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

// Runs one bond dimension; returns its exit code.
int run_job(const RunConfig& cfg, const Job& job, const TwoSiteCliffordCatalog* catalog, std::ostream& log,
            std::ostream& err, std::mutex& io) {
  const auto t0 = std::chrono::steady_clock::now();
  SimulationPlan plan = cfg.plan;
  plan.sweep.truncation.max_bond = job.bond;
  const fs::path dir(cfg.out_dir);
  const fs::path results = dir / (job.stem + (cfg.format == OutputFormat::Csv ? ".csv" : ".json"));
  const fs::path meta = dir / (job.stem + ".meta.json");

  RunResult result;
  {
    std::ofstream out = open_for_write(results);
    if (cfg.format == OutputFormat::Csv) {
      CsvWriter csv(out, plan.oracle_compare);
      result = run(plan, [&](const ThermalRecord& r) { csv.write(r); }, catalog);
      if (result.truncated) csv.mark_truncated(result.error);
    } else {
      result = run(plan, {}, catalog);
      out << results_json(result, plan.oracle_compare).dump(2) << '\n';
    }
    if (!out) throw IoError("write failed for " + results.string());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    std::ofstream m = open_for_write(meta);
    m << metadata_json(cfg, job.bond, result, wall, results.filename().string()).dump(2) << '\n';
    if (!m) throw IoError("write failed for " + meta.string());
  }

  std::lock_guard<std::mutex> lock(io);
  if (result.truncated) {
    err << "D=" << job.bond << ": stopped at beta=" << (result.records.empty() ? 0.0 : result.records.back().beta)
        << ": " << result.error << " (partial results in " << results.string() << ")\n";
    return exit_code_for(result.failure);
  }
  log << "D=" << job.bond << ": " << result.records.size() << " records, " << wall << " s -> " << results.string()
      << '\n';
  return kExitOk;
}

}  // namespace

int cmd_run(const RunOptions& opt, std::ostream& log, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(opt.config_path);
    if (opt.out_dir) cfg.out_dir = *opt.out_dir;
    if (opt.format) cfg.format = *opt.format;
    fs::create_directories(cfg.out_dir);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return exit_code_for(std::current_exception());
  }

  std::vector<Job> jobs;
  for (Index d : cfg.bond_dims())
    jobs.push_back({d, cfg.bond_scan.empty() ? cfg.name : cfg.name + "_D" + std::to_string(d)});
  const TwoSiteCliffordCatalog* catalog =
      cfg.plan.sweep.clifford_enabled ? &TwoSiteCliffordCatalog::standard() : nullptr;

  unsigned threads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));

  std::vector<int> codes(jobs.size(), kExitOk);
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        codes[i] = run_job(cfg, jobs[i], catalog, log, err, io);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io);
        err << "D=" << jobs[i].bond << ": " << e.what() << '\n';
        codes[i] = exit_code_for(std::current_exception());
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (int c : codes)
    if (c != kExitOk) return c;
  return kExitOk;
}

CompareReport compare_results(const ResultsTable& a, const ResultsTable& b) {
  for (const ResultsTable* t : {&a, &b}) {
    for (const char* col : {"beta", "center_entropy", "energy_rel_err"})
      if (t->column(col) < 0)
        throw ValidationError(t->source + ": missing column '" + col + "' (run with oracle_compare = true)");
  }
  if (a.rows.size() != b.rows.size())
    throw GridMismatchError("beta grids differ: " + a.source + " has " + std::to_string(a.rows.size()) +
                            " points, " + b.source + " has " + std::to_string(b.rows.size()));
  const int ba = a.column("beta"), bb = b.column("beta");
  const int ea = a.column("energy_rel_err"), eb = b.column("energy_rel_err");
  const int sa = a.column("center_entropy"), sb = b.column("center_entropy");

  CompareReport report;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& ra = a.rows[i];
    const auto& rb = b.rows[i];
    if (std::abs(ra[ba] - rb[bb]) > 1e-9 * std::max(1.0, std::abs(ra[ba])))
      throw GridMismatchError("beta grids differ at row " + std::to_string(i + 1) + ": " + std::to_string(ra[ba]) +
                              " vs " + std::to_string(rb[bb]));
    CompareRow row;
    row.beta = ra[ba];
    row.err_a = ra[ea];
    row.err_b = rb[eb];
    if (row.err_b != 0.0)
      row.err_ratio = row.err_a / row.err_b;
    else
      row.err_ratio = row.err_a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    row.entropy_a = ra[sa];
    row.entropy_b = rb[sb];
    row.entropy_diff = row.entropy_a - row.entropy_b;
    if (row.err_a <= row.err_b) ++report.a_not_worse;
    report.rows.push_back(row);
  }
  return report;
}

void write_compare_csv(std::ostream& out, const CompareReport& report) {
  out << "beta,err_a,err_b,err_ratio,entropy_a,entropy_b,entropy_diff\n";
  for (const auto& r : report.rows)
    out << format_double(r.beta) << ',' << format_double(r.err_a) << ',' << format_double(r.err_b) << ','
        << format_double(r.err_ratio) << ',' << format_double(r.entropy_a) << ',' << format_double(r.entropy_b)
        << ',' << format_double(r.entropy_diff) << '\n';
}

int cmd_compare(const std::string& a, const std::string& b, const std::optional<std::string>& out_path,
                std::ostream& out, std::ostream& err) {
  try {
    const CompareReport report = compare_results(read_results(a), read_results(b));
    if (out_path) {
      std::ofstream f = open_for_write(*out_path);
      write_compare_csv(f, report);
      if (!f) throw IoError("write failed for " + *out_path);
    } else {
      write_compare_csv(out, report);
    }
    out << "fraction_a_le_b," << format_double(report.fraction()) << " (" << report.a_not_worse << "/"
        << report.rows.size() << " grid points with err_a <= err_b)\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return exit_code_for(std::current_exception());
  }
}

int cmd_enumerate_cliffords(const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err) {
  try {
    const std::string text = TwoSiteCliffordCatalog::standard().export_text();
    if (!out_path) {
      out << text;
      return kExitOk;
    }
    std::ofstream f = open_for_write(*out_path);
    f << text;
    if (!f) throw IoError("write failed for " + *out_path);
    return kExitOk;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return exit_code_for(std::current_exception());
  }
}

}  // namespace catdvp::cli
