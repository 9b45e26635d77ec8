#include "catdvp/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace catdvp::cli {

namespace {

namespace pt = boost::property_tree;

const std::vector<std::string> kKeys = {
    "model.kind",         "model.n",          "model.lx",           "model.ly",
    "model.j1",           "model.j2",         "sweep.delta_beta",   "sweep.max_bond",
    "sweep.rel_cutoff",   "sweep.krylov_max_dim", "sweep.krylov_tol", "sweep.clifford",
    "sweep.clifford_search", "sweep.cost",    "sweep.direction",    "run.beta_max",
    "run.measure_every",  "run.oracle_compare", "run.seed",         "run.bond_scan",
    "output.dir",         "output.name",      "output.format",
};

std::string format_diagnostics(const std::string& source, const std::vector<Diagnostic>& diags) {
  std::ostringstream os;
  os << source << ": invalid configuration";
  for (const auto& d : diags) {
    os << "\n  " << source;
    if (d.line > 0) os << ':' << d.line;
    os << ": ";
    if (!d.field.empty()) os << d.field << ": ";
    os << d.message;
  }
  return os.str();
}

// Maps "section.key" to the line it was written on. Also reports unknown
// sections and keys; syntax errors are left to the ini parser.
std::map<std::string, int> index_lines(const std::string& text, std::vector<Diagnostic>& diags) {
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string raw, section;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    std::string line = boost::algorithm::trim_copy(raw);
    if (line.empty() || line[0] == ';' || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = boost::algorithm::trim_copy(line.substr(1, line.size() - 2));
      if (section != "model" && section != "sweep" && section != "run" && section != "output")
        diags.push_back({section, n, "unknown section"});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string field = section + "." + boost::algorithm::trim_copy(line.substr(0, eq));
    if (std::find(kKeys.begin(), kKeys.end(), field) == kKeys.end()) {
      if (section.empty())
        diags.push_back({field.substr(1), n, "key outside any section"});
      else
        diags.push_back({field, n, "unknown key"});
      continue;
    }
    lines[field] = n;
  }
  return lines;
}

// Field lookup with overrides; records a diagnostic for values that fail to parse.
class Reader {
 public:
  Reader(const pt::ptree& tree, std::map<std::string, int> lines, const EnvLookup& env, std::vector<Diagnostic>& diags)
      : tree_(tree), lines_(std::move(lines)), env_(env), diags_(diags) {}

  std::optional<std::string> raw(const std::string& field) {
    if (env_) {
      const std::string var = env_var_name(field);
      if (auto v = env_(var)) {
        origin_[field] = var;
        return boost::algorithm::trim_copy(*v);
      }
    }
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(field, '.')))
      return boost::algorithm::trim_copy(*v);
    return std::nullopt;
  }

  template <class T>
  void get(const std::string& field, T& out) {
    auto v = raw(field);
    if (!v) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        const std::string s = boost::algorithm::to_lower_copy(*v);
        if (s == "true" || s == "yes" || s == "1" || s == "on")
          out = true;
        else if (s == "false" || s == "no" || s == "0" || s == "off")
          out = false;
        else
          throw boost::bad_lexical_cast();
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!v->empty() && v->front() == '-') throw boost::bad_lexical_cast();
        out = boost::lexical_cast<T>(*v);
      } else {
        out = boost::lexical_cast<T>(*v);
      }
    } catch (const boost::bad_lexical_cast&) {
      fail(field, "cannot parse '" + *v + "' as " + type_name<T>());
    }
  }

  template <class E>
  void get_enum(const std::string& field, E& out, const std::vector<std::pair<std::string, E>>& names) {
    auto v = raw(field);
    if (!v) return;
    const std::string s = boost::algorithm::to_lower_copy(*v);
    for (const auto& [name, value] : names)
      if (s == name) {
        out = value;
        return;
      }
    std::string allowed;
    for (const auto& [name, value] : names) allowed += (allowed.empty() ? "" : ", ") + name;
    fail(field, "'" + *v + "' is not one of: " + allowed);
  }

  void fail(const std::string& field, const std::string& message) {
    auto o = origin_.find(field);
    if (o != origin_.end()) {
      diags_.push_back({field, 0, message + " (from " + o->second + ")"});
      return;
    }
    auto it = lines_.find(field);
    diags_.push_back({field, it == lines_.end() ? 0 : it->second, message});
  }

 private:
  template <class T>
  static std::string type_name() {
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else return "text";
  }

  const pt::ptree& tree_;
  std::map<std::string, int> lines_;
  const EnvLookup& env_;
  std::vector<Diagnostic>& diags_;
  std::map<std::string, std::string> origin_;
};

}  // namespace

std::vector<Index> RunConfig::bond_dims() const {
  if (bond_scan.empty()) return {plan.sweep.truncation.max_bond};
  return bond_scan;
}

ConfigError::ConfigError(const std::string& source, std::vector<Diagnostic> d)
    : ValidationError(format_diagnostics(source, d)), diagnostics(std::move(d)) {}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

const std::vector<std::string>& config_keys() { return kKeys; }

std::string env_var_name(const std::string& field) {
  std::string s = "CATDVP_" + field;
  for (char& c : s) c = c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

RunConfig parse_config(std::istream& in, const std::string& source, const EnvLookup& env) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<Diagnostic> diags;

  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    diags.push_back({"", static_cast<int>(e.line()), e.message()});
    throw ConfigError(source, diags);
  }
  auto lines = index_lines(text, diags);

  RunConfig cfg;
  cfg.source = source;
  SimulationPlan& plan = cfg.plan;
  SweepConfig& sw = plan.sweep;
  Reader r(tree, std::move(lines), env, diags);

  r.get_enum<ModelKind>("model.kind", plan.model.kind, {{"chain", ModelKind::Chain1D}, {"rect", ModelKind::Rect2D}});
  r.get("model.n", plan.model.n);
  r.get("model.lx", plan.model.lx);
  r.get("model.ly", plan.model.ly);
  r.get("model.j1", plan.model.j1);
  r.get("model.j2", plan.model.j2);

  r.get("sweep.delta_beta", sw.delta_beta);
  r.get("sweep.max_bond", sw.truncation.max_bond);
  r.get("sweep.rel_cutoff", sw.truncation.rel_cutoff);
  r.get("sweep.krylov_max_dim", sw.krylov_max_dim);
  r.get("sweep.krylov_tol", sw.krylov_tol);
  r.get("sweep.clifford", sw.clifford_enabled);
  r.get_enum<CliffordSearch>("sweep.clifford_search", sw.clifford_search,
                             {{"exhaustive", CliffordSearch::Exhaustive720},
                              {"local_class", CliffordSearch::LocalClassReduced}});
  r.get_enum<DisentangleCost>("sweep.cost", sw.cost,
                              {{"entropy", DisentangleCost::Entropy},
                               {"truncation_weight", DisentangleCost::TruncationWeight}});
  r.get_enum<SweepDirection>("sweep.direction", sw.direction,
                             {{"left_to_right", SweepDirection::LeftToRight},
                              {"symmetric", SweepDirection::Symmetric}});

  r.get("run.beta_max", plan.beta_max);
  r.get("run.measure_every", plan.measure_every);
  r.get("run.oracle_compare", plan.oracle_compare);
  r.get("run.seed", plan.seed);
  if (auto scan = r.raw("run.bond_scan")) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, *scan, boost::algorithm::is_any_of(", "), boost::algorithm::token_compress_on);
    for (const auto& p : parts) {
      if (p.empty()) continue;
      try {
        const Index d = boost::lexical_cast<Index>(p);
        if (d < 1) throw boost::bad_lexical_cast();
        cfg.bond_scan.push_back(d);
      } catch (const boost::bad_lexical_cast&) {
        r.fail("run.bond_scan", "'" + p + "' is not a positive integer");
      }
    }
  }

  if (auto v = r.raw("output.dir")) cfg.out_dir = *v;
  if (auto v = r.raw("output.name")) cfg.name = *v;
  r.get_enum<OutputFormat>("output.format", cfg.format, {{"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}});

  // Range checks, one diagnostic per field.
  const ModelSpec& m = plan.model;
  if (m.kind == ModelKind::Chain1D && m.n < 2) r.fail("model.n", "chain needs at least 2 sites");
  if (m.kind == ModelKind::Rect2D && m.lx < 2) r.fail("model.lx", "must be at least 2");
  if (m.kind == ModelKind::Rect2D && m.ly < 2) r.fail("model.ly", "must be at least 2");
  if (!std::isfinite(m.j1)) r.fail("model.j1", "must be finite");
  if (!std::isfinite(m.j2)) r.fail("model.j2", "must be finite");
  if (!(sw.delta_beta > 0.0) || !std::isfinite(sw.delta_beta)) r.fail("sweep.delta_beta", "must be positive");
  if (sw.truncation.max_bond < 1) r.fail("sweep.max_bond", "must be at least 1");
  if (!(sw.truncation.rel_cutoff >= 0.0 && sw.truncation.rel_cutoff < 1.0))
    r.fail("sweep.rel_cutoff", "must lie in [0, 1)");
  if (sw.krylov_max_dim < 2) r.fail("sweep.krylov_max_dim", "must be at least 2");
  if (!(sw.krylov_tol > 0.0)) r.fail("sweep.krylov_tol", "must be positive");
  if (!(plan.beta_max > 0.0) || !std::isfinite(plan.beta_max))
    r.fail("run.beta_max", "must be positive");
  else if (sw.delta_beta > 0.0) {
    const double steps = std::round(plan.beta_max / sw.delta_beta);
    if (std::abs(steps * sw.delta_beta - plan.beta_max) > 1e-9 * std::max(1.0, plan.beta_max))
      r.fail("run.beta_max", "must be a whole number of delta_beta steps");
  }
  if (plan.measure_every < 1) r.fail("run.measure_every", "must be at least 1");
  if (plan.oracle_compare && m.n_physical() > kDenseSpectrumCap)
    r.fail("run.oracle_compare", "exact diagonalization is limited to " + std::to_string(kDenseSpectrumCap) +
                                     " physical sites");
  if (cfg.name.empty() || cfg.name.find('/') != std::string::npos)
    r.fail("output.name", "must be a nonempty file stem without '/'");
  if (cfg.out_dir.empty()) r.fail("output.dir", "must not be empty");

  if (diags.empty()) {
    try {
      plan.validate();
    } catch (const ValidationError& e) {
      diags.push_back({"", 0, e.what()});
    }
  }
  if (!diags.empty()) throw ConfigError(source, diags);
  return cfg;
}

RunConfig load_config(const std::string& path, const EnvLookup& env) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  return parse_config(in, path, env);
}

std::string to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }
std::string to_string(ModelKind k) { return k == ModelKind::Chain1D ? "chain" : "rect"; }
std::string to_string(CliffordSearch s) {
  return s == CliffordSearch::Exhaustive720 ? "exhaustive" : "local_class";
}
std::string to_string(DisentangleCost c) { return c == DisentangleCost::Entropy ? "entropy" : "truncation_weight"; }
std::string to_string(SweepDirection d) {
  return d == SweepDirection::LeftToRight ? "left_to_right" : "symmetric";
}

}  // namespace catdvp::cli
