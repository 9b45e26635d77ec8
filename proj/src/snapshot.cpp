#include <json.hpp>

#include "catdvp/errors.hpp"
#include "catdvp/mps.hpp"

namespace catdvp {

namespace {

constexpr const char* kFormatTag = "catdvp-mps";
constexpr int kFormatVersion = 1;

}  // namespace

std::string save_snapshot(const MpsState& state) {
  nlohmann::json j;
  j["format"] = kFormatTag;
  j["version"] = kFormatVersion;
  j["n_sites"] = state.size();
  j["log_norm"] = state.log_norm();
  j["center"] = state.center() ? nlohmann::json(*state.center()) : nlohmann::json(nullptr);

  auto& roles = j["roles"] = nlohmann::json::array();
  for (std::size_t k = 0; k < state.size(); ++k)
    roles.push_back(state.role(k) == SiteRole::Physical ? "physical" : "ancilla");

  auto& spectra = j["spectra"] = nlohmann::json::array();
  for (std::size_t b = 0; b <= state.size(); ++b) {
    const auto& s = state.spectrum(b);
    if (!s) {
      spectra.push_back(nullptr);
      continue;
    }
    spectra.push_back(std::vector<double>(s->data(), s->data() + s->size()));
  }

  auto& tensors = j["tensors"] = nlohmann::json::array();
  for (std::size_t k = 0; k < state.size(); ++k) {
    const SiteTensor& t = state.tensor(k);
    nlohmann::json entry;
    entry["shape"] = {t.left_dim(), 2, t.right_dim()};
    std::vector<double> re, im;
    // (left, phys, right) row-major
    for (Index a = 0; a < t.left_dim(); ++a)
      for (int s = 0; s < 2; ++s)
        for (Index b = 0; b < t.right_dim(); ++b) {
          re.push_back(t[s](a, b).real());
          im.push_back(t[s](a, b).imag());
        }
    entry["re"] = std::move(re);
    entry["im"] = std::move(im);
    tensors.push_back(std::move(entry));
  }
  return j.dump(1);
}

MpsState load_snapshot(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != kFormatTag) throw ParseError("snapshot: unknown format tag");
    if (j.at("version").get<int>() != kFormatVersion) throw ParseError("snapshot: unsupported version");
    const auto n = j.at("n_sites").get<std::size_t>();
    const auto& jt = j.at("tensors");
    const auto& jr = j.at("roles");
    if (jt.size() != n || jr.size() != n) throw ParseError("snapshot: site count mismatch");

    std::vector<SiteTensor> tensors;
    std::vector<SiteRole> roles;
    for (std::size_t k = 0; k < n; ++k) {
      const auto shape = jt[k].at("shape").get<std::vector<Index>>();
      if (shape.size() != 3 || shape[1] != 2) throw ParseError("snapshot: bad tensor shape at site " + std::to_string(k));
      const auto re = jt[k].at("re").get<std::vector<double>>();
      const auto im = jt[k].at("im").get<std::vector<double>>();
      const std::size_t count = static_cast<std::size_t>(shape[0] * 2 * shape[2]);
      if (re.size() != count || im.size() != count) throw ParseError("snapshot: entry count mismatch");
      SiteTensor t{Eigen::MatrixXcd(shape[0], 2 * shape[2])};
      std::size_t i = 0;
      for (Index a = 0; a < shape[0]; ++a)
        for (int s = 0; s < 2; ++s)
          for (Index b = 0; b < shape[2]; ++b, ++i) t[s](a, b) = Complex(re[i], im[i]);
      tensors.push_back(std::move(t));
      const auto role = jr[k].get<std::string>();
      if (role == "physical")
        roles.push_back(SiteRole::Physical);
      else if (role == "ancilla")
        roles.push_back(SiteRole::Ancilla);
      else
        throw ParseError("snapshot: unknown role '" + role + "'");
    }

    MpsState state(std::move(tensors), std::move(roles));
    state.set_log_norm(j.at("log_norm").get<double>());
    if (!j.at("center").is_null()) state.set_center(j.at("center").get<std::size_t>());
    const auto& js = j.at("spectra");
    if (js.size() != n + 1) throw ParseError("snapshot: spectra count mismatch");
    for (std::size_t b = 0; b <= n; ++b) {
      if (js[b].is_null()) continue;
      const auto v = js[b].get<std::vector<double>>();
      state.set_spectrum(b, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size())));
    }
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("snapshot: ") + e.what());
  }
}

}  // namespace catdvp
