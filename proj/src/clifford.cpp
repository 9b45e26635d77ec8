#include "catdvp/clifford.hpp"

#include <map>
#include <mutex>
#include <sstream>

#include "catdvp/errors.hpp"

namespace catdvp {

namespace {

std::uint8_t word_code(const PauliString& p, std::size_t k) {
  return static_cast<std::uint8_t>(static_cast<std::uint8_t>(p[k]) |
                                   (static_cast<std::uint8_t>(p[k + 1]) << 2));
}

PauliString two_site_from_code(std::uint8_t code) {
  PauliString p(2);
  p.set(0, static_cast<Pauli>(code & 3u));
  p.set(1, static_cast<Pauli>((code >> 2) & 3u));
  return p;
}

bool anticommute_codes(std::uint8_t a, std::uint8_t b) {
  return !commutes(two_site_from_code(a), two_site_from_code(b));
}

void require_two_site(const CliffordTableau& t, const char* op) {
  if (t.n_sites() != 2) throw SizeError(std::string(op) + ": expected a two-site tableau");
}

}  // namespace

CliffordTableau::CliffordTableau(std::vector<PauliString> x_images, std::vector<PauliString> z_images)
    : x_images_(std::move(x_images)), z_images_(std::move(z_images)) {
  const std::size_t n = x_images_.size();
  if (n == 0 || z_images_.size() != n) throw SizeError("CliffordTableau: need n x-images and n z-images");
  for (std::size_t k = 0; k < n; ++k) {
    if (x_images_[k].n_sites() != n || z_images_[k].n_sites() != n)
      throw SizeError("CliffordTableau: image length differs from n_sites");
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (commutes(x_images_[a], z_images_[a]))
      throw Error("CliffordTableau: images of X and Z commute on site " + std::to_string(a));
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!commutes(x_images_[a], x_images_[b]) || !commutes(x_images_[a], z_images_[b]) ||
          !commutes(z_images_[a], x_images_[b]) || !commutes(z_images_[a], z_images_[b]))
        throw Error("CliffordTableau: images on different sites anticommute");
    }
  }
}

CliffordTableau::CliffordTableau(Unchecked, std::vector<PauliString> x_images, std::vector<PauliString> z_images)
    : x_images_(std::move(x_images)), z_images_(std::move(z_images)) {}

CliffordTableau CliffordTableau::identity(std::size_t n) {
  std::vector<PauliString> xs, zs;
  for (std::size_t k = 0; k < n; ++k) {
    xs.push_back(PauliString::single(n, k, Pauli::X));
    zs.push_back(PauliString::single(n, k, Pauli::Z));
  }
  return CliffordTableau(Unchecked{}, std::move(xs), std::move(zs));
}

CliffordTableau CliffordTableau::hadamard(std::size_t n, std::size_t site) {
  auto t = identity(n);
  t.x_images_.at(site) = PauliString::single(n, site, Pauli::Z);
  t.z_images_.at(site) = PauliString::single(n, site, Pauli::X);
  return t;
}

CliffordTableau CliffordTableau::phase_s(std::size_t n, std::size_t site) {
  auto t = identity(n);
  t.x_images_.at(site) = PauliString::single(n, site, Pauli::Y);
  return t;
}

CliffordTableau CliffordTableau::cnot(std::size_t n, std::size_t control, std::size_t target) {
  if (control == target || control >= n || target >= n) throw RangeError("cnot: invalid sites");
  auto t = identity(n);
  t.x_images_[control].set(target, Pauli::X);
  t.z_images_[target].set(control, Pauli::Z);
  return t;
}

CliffordTableau CliffordTableau::swap(std::size_t n, std::size_t a, std::size_t b) {
  if (a == b || a >= n || b >= n) throw RangeError("swap: invalid sites");
  auto t = identity(n);
  std::swap(t.x_images_[a], t.x_images_[b]);
  std::swap(t.z_images_[a], t.z_images_[b]);
  return t;
}

bool CliffordTableau::is_identity() const { return *this == identity(n_sites()); }

std::string CliffordTableau::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < n_sites(); ++k) {
    if (k) out += ' ';
    out += x_images_[k].to_string() + ' ' + z_images_[k].to_string();
  }
  return out;
}

CliffordTableau CliffordTableau::parse(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  if (tokens.empty() || tokens.size() % 4 != 0)
    throw ParseError("tableau line needs 4 tokens per site: '" + std::string(line) + "'");
  std::vector<PauliString> xs, zs;
  for (std::size_t i = 0; i < tokens.size(); i += 4) {
    xs.push_back(PauliString::parse(tokens[i] + ' ' + tokens[i + 1]));
    zs.push_back(PauliString::parse(tokens[i + 2] + ' ' + tokens[i + 3]));
  }
  try {
    return CliffordTableau(std::move(xs), std::move(zs));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid tableau: ") + e.what());
  }
}

bool satisfies_symplectic_conditions(const CliffordTableau& t) {
  const Eigen::Index n = static_cast<Eigen::Index>(t.n_sites());
  // Column j < n: image of X_j; column n + j: image of Z_j. Rows: x bits then z bits.
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& xi = t.x_image(static_cast<std::size_t>(j));
    const auto& zi = t.z_image(static_cast<std::size_t>(j));
    for (Eigen::Index r = 0; r < n; ++r) {
      m(r, j) = xi.x(static_cast<std::size_t>(r));
      m(n + r, j) = xi.z(static_cast<std::size_t>(r));
      m(r, n + j) = zi.x(static_cast<std::size_t>(r));
      m(n + r, n + j) = zi.z(static_cast<std::size_t>(r));
    }
  }
  Eigen::MatrixXi omega = Eigen::MatrixXi::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n).setIdentity();
  omega.bottomLeftCorner(n, n).setIdentity();
  Eigen::MatrixXi form = m.transpose() * omega * m;
  form = form.unaryExpr([](int v) { return v & 1; });
  return form == omega;
}

PauliString conjugate(const CliffordTableau& t, const PauliString& p) {
  if (t.n_sites() != p.n_sites())
    throw SizeError("conjugate: tableau on " + std::to_string(t.n_sites()) + " sites, string on " +
                    std::to_string(p.n_sites()));
  // p = sign * prod_k i^{x z} X^x Z^z, mapped generator by generator.
  PauliString acc(p.n_sites());
  int power = p.sign() < 0 ? 2 : 0;
  for (std::size_t k = 0; k < p.n_sites(); ++k) {
    const bool xk = p.x(k), zk = p.z(k);
    if (xk) {
      auto r = multiply(acc, t.x_image(k));
      power += r.i_power;
      acc = std::move(r.product);
    }
    if (zk) {
      auto r = multiply(acc, t.z_image(k));
      power += r.i_power;
      acc = std::move(r.product);
    }
    if (xk && zk) power += 1;
  }
  power %= 4;
  if (power % 2 != 0) throw InternalError("conjugate: non-Hermitian image, tableau is not a valid Clifford");
  acc.set_sign(power == 0 ? +1 : -1);
  return acc;
}

LocalConjugationTable::LocalConjugationTable(const CliffordTableau& two_site) {
  require_two_site(two_site, "LocalConjugationTable");
  for (std::uint8_t code = 0; code < 16; ++code) {
    const PauliString img = conjugate(two_site, two_site_from_code(code));
    image_[code] = word_code(img, 0);
    sign_[code] = img.sign();
  }
}

int LocalConjugationTable::apply(PauliString& p, std::size_t k) const {
  if (k + 1 >= p.n_sites()) throw RangeError("local conjugation position out of range");
  const std::uint8_t code = word_code(p, k);
  const std::uint8_t img = image_[code];
  p.set(k, static_cast<Pauli>(img & 3u));
  p.set(k + 1, static_cast<Pauli>((img >> 2) & 3u));
  return sign_[code];
}

WeightedPauliSum conjugate_sum(const CliffordTableau& t, const WeightedPauliSum& h) {
  WeightedPauliSum out(h.n_sites());
  for (const auto& term : h) out.add(term.coefficient, conjugate(t, term.string));
  if (out.size() != h.size()) throw InternalError("conjugate_sum changed the term count");
  return out;
}

WeightedPauliSum conjugate_sum(const CliffordTableau& two_site, std::size_t k, const WeightedPauliSum& h) {
  return conjugate_sum(LocalConjugationTable(two_site), k, h);
}

WeightedPauliSum conjugate_sum(const LocalConjugationTable& table, std::size_t k, const WeightedPauliSum& h,
                               std::vector<std::size_t>* changed) {
  if (k + 1 >= h.n_sites())
    throw RangeError("conjugate_sum: position " + std::to_string(k) + " out of range for " +
                     std::to_string(h.n_sites()) + " sites");
  if (changed) changed->clear();
  WeightedPauliSum out(h.n_sites());
  for (std::size_t i = 0; i < h.size(); ++i) {
    PauliString s = h[i].string;
    const std::uint8_t before = word_code(s, k);
    const int sign = table.apply(s, k);
    if (changed && word_code(s, k) != before) changed->push_back(i);
    out.add(sign * h[i].coefficient, std::move(s));
  }
  if (out.size() != h.size()) throw InternalError("conjugate_sum changed the term count");
  return out;
}

CliffordTableau compose(const CliffordTableau& outer, const CliffordTableau& inner) {
  if (outer.n_sites() != inner.n_sites()) throw SizeError("compose: tableau sizes differ");
  std::vector<PauliString> xs, zs;
  for (std::size_t k = 0; k < inner.n_sites(); ++k) {
    xs.push_back(conjugate(outer, inner.x_image(k)));
    zs.push_back(conjugate(outer, inner.z_image(k)));
  }
  return CliffordTableau(CliffordTableau::Unchecked{}, std::move(xs), std::move(zs));
}

CliffordTableau compose_local(const CliffordTableau& two_site, std::size_t k, const CliffordTableau& inner) {
  require_two_site(two_site, "compose_local");
  if (k + 1 >= inner.n_sites()) throw RangeError("compose_local: position out of range");
  const LocalConjugationTable table(two_site);
  auto map_image = [&](const PauliString& img) {
    PauliString out = img;
    const int sign = table.apply(out, k);
    out.set_sign(sign * img.sign());
    return out;
  };
  std::vector<PauliString> xs, zs;
  for (std::size_t j = 0; j < inner.n_sites(); ++j) {
    xs.push_back(map_image(inner.x_images_[j]));
    zs.push_back(map_image(inner.z_images_[j]));
  }
  return CliffordTableau(CliffordTableau::Unchecked{}, std::move(xs), std::move(zs));
}

CliffordTableau embed(const CliffordTableau& two_site, std::size_t k, std::size_t n_sites) {
  return compose_local(two_site, k, CliffordTableau::identity(n_sites));
}

CliffordTableau inverse(const CliffordTableau& t) {
  const std::size_t n = t.n_sites();
  // The preimage Q of a generator G has x_m(Q) = <G, Z'_m>, z_m(Q) = <G, X'_m>,
  // because conjugation preserves the symplectic form.
  auto preimage = [&](const PauliString& g) {
    PauliString q(n);
    for (std::size_t m = 0; m < n; ++m)
      q.set(m, make_pauli(!commutes(g, t.z_image(m)), !commutes(g, t.x_image(m))));
    const PauliString image = conjugate(t, q);
    if (image.letters() != g.letters()) throw InternalError("inverse: tableau is not symplectic");
    q.set_sign(image.sign() * g.sign());
    return q;
  };
  std::vector<PauliString> xs, zs;
  for (std::size_t k = 0; k < n; ++k) {
    xs.push_back(preimage(PauliString::single(n, k, Pauli::X)));
    zs.push_back(preimage(PauliString::single(n, k, Pauli::Z)));
  }
  return CliffordTableau(CliffordTableau::Unchecked{}, std::move(xs), std::move(zs));
}

Eigen::Matrix4cd local_unitary(const CliffordTableau& two_site) {
  require_two_site(two_site, "local_unitary");
  const Eigen::Matrix4cd x1 = dense_matrix(two_site.x_image(0));
  const Eigen::Matrix4cd x2 = dense_matrix(two_site.x_image(1));
  const Eigen::Matrix4cd z1 = dense_matrix(two_site.z_image(0));
  const Eigen::Matrix4cd z2 = dense_matrix(two_site.z_image(1));
  const Eigen::Matrix4cd id = Eigen::Matrix4cd::Identity();
  // U|00> is the common +1 eigenvector of the images of Z1 and Z2.
  const Eigen::Matrix4cd projector = 0.25 * (id + z1) * (id + z2);
  Eigen::Index pivot = 0;
  projector.diagonal().real().maxCoeff(&pivot);
  const Eigen::Vector4cd ground = projector.col(pivot) / std::sqrt(projector(pivot, pivot).real());

  Eigen::Matrix4cd u;
  u.col(0) = ground;
  u.col(1) = x2 * ground;
  u.col(2) = x1 * ground;
  u.col(3) = x1 * x2 * ground;

  std::complex<double> phase = 1.0;
  for (Eigen::Index r = 0; r < 4; ++r) {
    if (std::abs(u(r, 0)) > 1e-12) {
      phase = std::conj(u(r, 0)) / std::abs(u(r, 0));
      break;
    }
  }
  u *= phase;
  // Snap round-off so that permutation-like gates are exact.
  u = u.unaryExpr([](std::complex<double> v) {
    auto snap = [](double a) {
      if (std::abs(a) < 1e-14) return 0.0;
      if (std::abs(std::abs(a) - 1.0) < 1e-14) return a > 0 ? 1.0 : -1.0;
      if (std::abs(std::abs(a) - M_SQRT1_2) < 1e-14) return a > 0 ? M_SQRT1_2 : -M_SQRT1_2;
      if (std::abs(std::abs(a) - 0.5) < 1e-14) return a > 0 ? 0.5 : -0.5;
      return a;
    };
    return std::complex<double>(snap(v.real()), snap(v.imag()));
  });
  return u;
}

TwoSiteCliffordCatalog::TwoSiteCliffordCatalog(std::vector<CliffordTableau> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    require_two_site(e, "TwoSiteCliffordCatalog");
    unitaries_.push_back(local_unitary(e));
    tables_.emplace_back(e);
  }
  compute_local_classes();
}

void TwoSiteCliffordCatalog::compute_local_classes() {
  using Key = std::array<std::uint8_t, 4>;
  auto key_of = [](const CliffordTableau& t) {
    return Key{word_code(t.x_image(0), 0), word_code(t.z_image(0), 0), word_code(t.x_image(1), 0),
               word_code(t.z_image(1), 0)};
  };
  std::map<Key, std::size_t> index;
  for (std::size_t i = 0; i < entries_.size(); ++i) index.emplace(key_of(entries_[i]), i);

  // Single-site symplectic maps as (image of X, image of Z) letter codes.
  static constexpr std::array<std::array<std::uint8_t, 2>, 6> local_maps = {{
      {1, 2}, {1, 3}, {2, 1}, {2, 3}, {3, 1}, {3, 2},
  }};
  auto map_letter = [](std::uint8_t letter, const std::array<std::uint8_t, 2>& m) {
    std::uint8_t out = 0;
    if (letter & 1u) out ^= m[0];
    if (letter & 2u) out ^= m[1];
    return out;
  };

  std::vector<std::size_t> rep(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Key k = key_of(entries_[i]);
    std::size_t lowest = i;
    for (const auto& a : local_maps) {
      for (const auto& b : local_maps) {
        Key mapped{};
        for (std::size_t g = 0; g < 4; ++g) {
          mapped[g] = static_cast<std::uint8_t>(map_letter(k[g] & 3u, a) | (map_letter((k[g] >> 2) & 3u, b) << 2));
        }
        auto it = index.find(mapped);
        if (it == index.end()) return;  // not closed under local Cliffords
        lowest = std::min(lowest, it->second);
      }
    }
    rep[i] = lowest;
  }
  representative_ = std::move(rep);
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (representative_[i] == i) representatives_.push_back(i);
}

const TwoSiteCliffordCatalog& TwoSiteCliffordCatalog::standard() {
  static const TwoSiteCliffordCatalog catalog = enumerate_two_site_cliffords();
  return catalog;
}

std::string TwoSiteCliffordCatalog::export_text() const {
  std::string out;
  for (const auto& e : entries_) out += e.to_string() + '\n';
  return out;
}

TwoSiteCliffordCatalog TwoSiteCliffordCatalog::parse_text(const std::string& text) {
  std::istringstream in(text);
  std::vector<CliffordTableau> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    entries.push_back(CliffordTableau::parse(line));
  }
  return TwoSiteCliffordCatalog(std::move(entries));
}

TwoSiteCliffordCatalog enumerate_two_site_cliffords() {
  std::vector<CliffordTableau> entries;
  for (std::uint8_t x1 = 1; x1 < 16; ++x1) {
    for (std::uint8_t z1 = 1; z1 < 16; ++z1) {
      if (!anticommute_codes(x1, z1)) continue;
      for (std::uint8_t x2 = 1; x2 < 16; ++x2) {
        if (anticommute_codes(x2, x1) || anticommute_codes(x2, z1)) continue;
        for (std::uint8_t z2 = 1; z2 < 16; ++z2) {
          if (anticommute_codes(z2, x1) || anticommute_codes(z2, z1) || !anticommute_codes(z2, x2)) continue;
          entries.emplace_back(std::vector<PauliString>{two_site_from_code(x1), two_site_from_code(x2)},
                               std::vector<PauliString>{two_site_from_code(z1), two_site_from_code(z2)});
        }
      }
    }
  }
  return TwoSiteCliffordCatalog(std::move(entries));
}

}  // namespace catdvp
