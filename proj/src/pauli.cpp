#include "catdvp/pauli.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "catdvp/errors.hpp"

namespace catdvp {

namespace {

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

void require_same_length(const PauliString& p, const PauliString& q, const char* op) {
  if (p.n_sites() != q.n_sites()) {
    throw SizeError(std::string(op) + ": Pauli strings of length " + std::to_string(p.n_sites()) +
                    " and " + std::to_string(q.n_sites()));
  }
}

int popcount_and(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  int total = 0;
  for (std::size_t w = 0; w < a.size(); ++w) total += std::popcount(a[w] & b[w]);
  return total;
}

}  // namespace

char pauli_letter(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

PauliString::PauliString(std::size_t n_sites)
    : n_sites_(n_sites), x_(word_count(n_sites), 0), z_(word_count(n_sites), 0) {
  if (n_sites == 0) throw SizeError("PauliString: n_sites must be positive");
}

PauliString PauliString::from_letters(std::string_view letters, int sign) {
  PauliString p(letters.size());
  for (std::size_t k = 0; k < letters.size(); ++k) {
    switch (letters[k]) {
      case 'I': break;
      case 'X': p.set(k, Pauli::X); break;
      case 'Y': p.set(k, Pauli::Y); break;
      case 'Z': p.set(k, Pauli::Z); break;
      default:
        throw ParseError(std::string("invalid Pauli letter '") + letters[k] + "'");
    }
  }
  p.set_sign(sign);
  return p;
}

PauliString PauliString::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string sign_token, letters, extra;
  if (!(in >> sign_token >> letters) || (in >> extra)) {
    throw ParseError("expected '<+1|-1> <letters>', got '" + std::string(text) + "'");
  }
  int sign = 0;
  if (sign_token == "+1") {
    sign = +1;
  } else if (sign_token == "-1") {
    sign = -1;
  } else {
    throw ParseError("invalid sign token '" + sign_token + "'");
  }
  return from_letters(letters, sign);
}

PauliString PauliString::single(std::size_t n_sites, std::size_t site, Pauli p) {
  PauliString s(n_sites);
  s.set(site, p);
  return s;
}

void PauliString::set_sign(int sign) {
  if (sign != 1 && sign != -1) throw Error("PauliString sign must be +1 or -1");
  negative_ = sign < 0;
}

PauliString PauliString::negated() const {
  PauliString p = *this;
  p.negative_ = !negative_;
  return p;
}

Pauli PauliString::operator[](std::size_t site) const { return make_pauli(x(site), z(site)); }

void PauliString::set(std::size_t site, Pauli p) {
  if (site >= n_sites_) throw RangeError("PauliString::set: site out of range");
  const std::uint64_t bit = std::uint64_t{1} << (site % 64);
  auto assign = [&](std::uint64_t& word, bool on) { word = on ? (word | bit) : (word & ~bit); };
  assign(x_[site / 64], x_bit(p));
  assign(z_[site / 64], z_bit(p));
}

bool PauliString::x(std::size_t site) const {
  if (site >= n_sites_) throw RangeError("PauliString: site out of range");
  return ((x_[site / 64] >> (site % 64)) & 1u) != 0;
}

bool PauliString::z(std::size_t site) const {
  if (site >= n_sites_) throw RangeError("PauliString: site out of range");
  return ((z_[site / 64] >> (site % 64)) & 1u) != 0;
}

bool PauliString::is_identity() const {
  for (std::size_t w = 0; w < x_.size(); ++w)
    if ((x_[w] | z_[w]) != 0) return false;
  return true;
}

std::size_t PauliString::weight() const {
  std::size_t total = 0;
  for (std::size_t w = 0; w < x_.size(); ++w) total += std::popcount(x_[w] | z_[w]);
  return total;
}

std::optional<std::size_t> PauliString::first_support() const {
  for (std::size_t w = 0; w < x_.size(); ++w) {
    const std::uint64_t any = x_[w] | z_[w];
    if (any != 0) return w * 64 + std::countr_zero(any);
  }
  return std::nullopt;
}

std::optional<std::size_t> PauliString::last_support() const {
  for (std::size_t w = x_.size(); w-- > 0;) {
    const std::uint64_t any = x_[w] | z_[w];
    if (any != 0) return w * 64 + 63 - std::countl_zero(any);
  }
  return std::nullopt;
}

std::size_t PauliString::y_count() const {
  return static_cast<std::size_t>(popcount_and(x_, z_));
}

std::string PauliString::letters() const {
  std::string out(n_sites_, 'I');
  for (std::size_t k = 0; k < n_sites_; ++k) out[k] = pauli_letter((*this)[k]);
  return out;
}

std::string PauliString::to_string() const {
  return (negative_ ? "-1 " : "+1 ") + letters();
}

std::uint64_t PauliString::x_basis_mask() const {
  if (n_sites_ > 63) throw CapExceededError("basis masks need at most 63 sites");
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k < n_sites_; ++k)
    if (x(k)) mask |= std::uint64_t{1} << (n_sites_ - 1 - k);
  return mask;
}

std::uint64_t PauliString::z_basis_mask() const {
  if (n_sites_ > 63) throw CapExceededError("basis masks need at most 63 sites");
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k < n_sites_; ++k)
    if (z(k)) mask |= std::uint64_t{1} << (n_sites_ - 1 - k);
  return mask;
}

std::complex<double> PauliProduct::phase() const {
  static constexpr std::complex<double> powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return powers[i_power & 3];
}

PauliProduct multiply(const PauliString& p, const PauliString& q) {
  require_same_length(p, q, "multiply");
  // With W(x,z) = i^{xz} X^x Z^z per site:
  // W(x1,z1) W(x2,z2) = i^{x1 z1 + x2 z2 + 2 z1 x2 - x3 z3} W(x3,z3).
  PauliString product(p.n_sites());
  auto px = p.x_words(), pz = p.z_words(), qx = q.x_words(), qz = q.z_words();
  int power = popcount_and(px, pz) + popcount_and(qx, qz) + 2 * popcount_and(pz, qx);
  for (std::size_t k = 0; k < p.n_sites(); ++k) {
    product.set(k, static_cast<Pauli>(static_cast<std::uint8_t>(p[k]) ^ static_cast<std::uint8_t>(q[k])));
  }
  power -= popcount_and(product.x_words(), product.z_words());
  if (p.sign() < 0) power += 2;
  if (q.sign() < 0) power += 2;
  return {((power % 4) + 4) % 4, std::move(product)};
}

bool commutes(const PauliString& p, const PauliString& q) {
  require_same_length(p, q, "commutes");
  const int form = popcount_and(p.x_words(), q.z_words()) + popcount_and(p.z_words(), q.x_words());
  return form % 2 == 0;
}

BasisImage apply_to_basis(const PauliString& p, std::uint64_t index) {
  const std::uint64_t xm = p.x_basis_mask();
  const std::uint64_t zm = p.z_basis_mask();
  int power = std::popcount(xm & zm) + 2 * std::popcount(zm & index);
  if (p.sign() < 0) power += 2;
  static constexpr std::complex<double> powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return {powers[power & 3], index ^ xm};
}

Eigen::MatrixXcd dense_matrix(const PauliString& p, std::size_t cap) {
  if (p.n_sites() > cap) {
    throw CapExceededError("dense_matrix: " + std::to_string(p.n_sites()) +
                           " sites exceeds the dense cap of " + std::to_string(cap));
  }
  const std::uint64_t dim = std::uint64_t{1} << p.n_sites();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t col = 0; col < dim; ++col) {
    const BasisImage img = apply_to_basis(p, col);
    m(static_cast<Eigen::Index>(img.index), static_cast<Eigen::Index>(col)) = img.amplitude;
  }
  return m;
}

WeightedPauliSum::WeightedPauliSum(std::size_t n_sites) : n_sites_(n_sites) {
  if (n_sites == 0) throw SizeError("WeightedPauliSum: n_sites must be positive");
}

void WeightedPauliSum::add(double coefficient, PauliString string) {
  if (string.n_sites() != n_sites_) {
    throw SizeError("WeightedPauliSum::add: string of length " + std::to_string(string.n_sites()) +
                    " in a sum over " + std::to_string(n_sites_) + " sites");
  }
  if (!std::isfinite(coefficient)) throw NumericalConsistencyError("non-finite Pauli coefficient");
  // Strings are stored with sign +1; the sign lives in the coefficient.
  if (string.sign() < 0) {
    coefficient = -coefficient;
    string.set_sign(+1);
  }
  terms_.push_back({coefficient, std::move(string)});
}

void WeightedPauliSum::replace(std::size_t i, PauliTerm term) {
  if (i >= terms_.size()) throw RangeError("WeightedPauliSum::replace: term index out of range");
  if (term.string.n_sites() != n_sites_) throw SizeError("WeightedPauliSum::replace: length mismatch");
  if (!std::isfinite(term.coefficient)) throw NumericalConsistencyError("non-finite Pauli coefficient");
  if (term.string.sign() < 0) {
    term.coefficient = -term.coefficient;
    term.string.set_sign(+1);
  }
  terms_[i] = std::move(term);
}

WeightedPauliSum WeightedPauliSum::merged_duplicates() const {
  WeightedPauliSum out(n_sites_);
  std::map<std::string, std::size_t> position;
  std::vector<double> coefficients;
  std::vector<PauliString> strings;
  for (const auto& t : terms_) {
    auto [it, inserted] = position.try_emplace(t.string.letters(), strings.size());
    if (inserted) {
      strings.push_back(t.string);
      coefficients.push_back(t.coefficient);
    } else {
      coefficients[it->second] += t.coefficient;
    }
  }
  for (std::size_t i = 0; i < strings.size(); ++i) out.add(coefficients[i], strings[i]);
  return out;
}

double WeightedPauliSum::coefficient_l1_norm() const {
  double total = 0.0;
  for (const auto& t : terms_) total += std::abs(t.coefficient);
  return total;
}

std::string WeightedPauliSum::to_string() const {
  std::ostringstream out;
  out.precision(17);
  for (const auto& t : terms_) out << t.coefficient << ' ' << t.string.to_string() << '\n';
  return out.str();
}

WeightedPauliSum embed_on_physical_sites(const WeightedPauliSum& sum, std::size_t n_physical) {
  if (sum.n_sites() != n_physical) {
    throw SizeError("embed_on_physical_sites: sum has " + std::to_string(sum.n_sites()) +
                    " sites, expected " + std::to_string(n_physical));
  }
  WeightedPauliSum out(2 * n_physical);
  for (const auto& t : sum) {
    PauliString embedded(2 * n_physical);
    for (std::size_t j = 0; j < n_physical; ++j) embedded.set(2 * j, t.string[j]);
    embedded.set_sign(t.string.sign());
    out.add(t.coefficient, std::move(embedded));
  }
  return out;
}

}  // namespace catdvp
