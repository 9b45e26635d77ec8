#include "catdvp/cli/results_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Core>
#include <boost/algorithm/string.hpp>
#include <boost/version.hpp>

namespace catdvp::cli {

namespace {

using nlohmann::json;

std::vector<double> row_of(const ThermalRecord& rec, bool with_oracle) {
  std::vector<double> row = {rec.beta, rec.energy, rec.center_entropy, rec.max_discarded_weight, rec.log_norm};
  if (with_oracle) {
    row.push_back(rec.energy_rel_err.value_or(std::numeric_limits<double>::quiet_NaN()));
    row.push_back(rec.abs_err_flag ? 1.0 : 0.0);
  }
  return row;
}

double parse_number(const std::string& field, const std::string& source, std::size_t line) {
  const std::string s = boost::algorithm::trim_copy(field);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ParseError(source + ":" + std::to_string(line) + ": '" + s + "' is not a number");
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> result_columns(bool with_oracle) {
  std::vector<std::string> c = {"beta", "energy", "center_entropy", "max_discarded_weight", "log_norm"};
  if (with_oracle) {
    c.push_back("energy_rel_err");
    c.push_back("abs_err_flag");
  }
  return c;
}

CsvWriter::CsvWriter(std::ostream& out, bool with_oracle) : out_(out), with_oracle_(with_oracle) {
  out_ << boost::algorithm::join(result_columns(with_oracle_), ",") << '\n';
  out_.flush();
}

void CsvWriter::write(const ThermalRecord& rec) {
  const auto row = row_of(rec, with_oracle_);
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out_ << ',';
    if (with_oracle_ && i + 1 == row.size())
      out_ << (rec.abs_err_flag ? 1 : 0);
    else
      out_ << format_double(row[i]);
  }
  out_ << '\n';
  out_.flush();
}

void CsvWriter::mark_truncated(const std::string& error) {
  std::string msg = error;
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  out_ << "# truncated: " << msg << '\n';
  out_.flush();
}

json results_json(const RunResult& result, bool with_oracle) {
  json rows = json::array();
  for (const auto& rec : result.records) {
    json row = json::array();
    for (double v : row_of(rec, with_oracle)) {
      if (std::isfinite(v))
        row.push_back(v);
      else
        row.push_back(nullptr);
    }
    rows.push_back(std::move(row));
  }
  json out = {{"schema_version", kSchemaVersion},
              {"columns", result_columns(with_oracle)},
              {"rows", std::move(rows)},
              {"truncated", result.truncated}};
  if (result.truncated) out["error"] = result.error;
  return out;
}

json metadata_json(const RunConfig& cfg, Index bond, const RunResult& result, double wall_seconds,
                   const std::string& results_file) {
  const SimulationPlan& p = cfg.plan;
  const SweepConfig& s = p.sweep;
  double sweep_seconds = 0.0;
  std::size_t cliffords = 0;
  for (const auto& r : result.records) {
    sweep_seconds += r.wall_time;
    cliffords += r.cliffords_applied;
  }
  json meta = {
      {"schema_version", kSchemaVersion},
      {"tool", {{"name", "catdvp"}, {"version", kToolVersion}}},
      {"libraries",
       {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", BOOST_LIB_VERSION}}},
      {"compiler", __VERSION__},
      {"config_file", cfg.source},
      {"config",
       {{"model",
         {{"kind", to_string(p.model.kind)},
          {"n", p.model.n},
          {"lx", p.model.lx},
          {"ly", p.model.ly},
          {"j1", p.model.j1},
          {"j2", p.model.j2}}},
        {"sweep",
         {{"delta_beta", s.delta_beta},
          {"max_bond", bond},
          {"rel_cutoff", s.truncation.rel_cutoff},
          {"krylov_max_dim", s.krylov_max_dim},
          {"krylov_tol", s.krylov_tol},
          {"clifford", s.clifford_enabled},
          {"clifford_search", to_string(s.clifford_search)},
          {"cost", to_string(s.cost)},
          {"direction", to_string(s.direction)}}},
        {"run",
         {{"beta_max", p.beta_max},
          {"measure_every", p.measure_every},
          {"oracle_compare", p.oracle_compare},
          {"seed", p.seed},
          {"bond_scan", cfg.bond_scan}}},
        {"output", {{"dir", cfg.out_dir}, {"name", cfg.name}, {"format", to_string(cfg.format)}}}}},
      {"results_file", results_file},
      {"records", result.records.size()},
      {"cliffords_applied", cliffords},
      {"truncated", result.truncated},
      {"wall_time_seconds", wall_seconds},
      {"sweep_time_seconds", sweep_seconds},
  };
  if (result.truncated) meta["error"] = result.error;
  return meta;
}

int ResultsTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

ResultsTable parse_results_csv(const std::string& text, const std::string& source) {
  ResultsTable t;
  t.source = source;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (boost::algorithm::starts_with(line, "# truncated")) t.truncated = true;
      continue;
    }
    std::vector<std::string> fields;
    boost::algorithm::split(fields, line, boost::algorithm::is_any_of(","));
    if (t.columns.empty()) {
      for (auto& f : fields) t.columns.push_back(boost::algorithm::trim_copy(f));
      continue;
    }
    if (fields.size() != t.columns.size())
      throw ParseError(source + ":" + std::to_string(n) + ": expected " + std::to_string(t.columns.size()) +
                       " fields, found " + std::to_string(fields.size()));
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_number(f, source, n));
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw ParseError(source + ": no header line");
  return t;
}

ResultsTable parse_results_json(const std::string& text, const std::string& source) {
  ResultsTable t;
  t.source = source;
  try {
    const json j = json::parse(text);
    t.columns = j.at("columns").get<std::vector<std::string>>();
    t.truncated = j.value("truncated", false);
    for (const auto& r : j.at("rows")) {
      if (r.size() != t.columns.size()) throw ParseError(source + ": row length differs from the column count");
      std::vector<double> row;
      for (const auto& v : r) row.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
      t.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
  return t;
}

ResultsTable read_results(const std::string& path) {
  const std::string text = slurp(path);
  if (boost::algorithm::ends_with(path, ".json")) return parse_results_json(text, path);
  return parse_results_csv(text, path);
}

}  // namespace catdvp::cli
