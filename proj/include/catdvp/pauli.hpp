#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace catdvp {

/// Single-site Pauli letter. Bit 0 carries the X component, bit 1 the Z
/// component, so (x, z) = (0,0) I, (1,0) X, (1,1) Y, (0,1) Z.
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

constexpr bool x_bit(Pauli p) { return (static_cast<std::uint8_t>(p) & 1u) != 0; }
constexpr bool z_bit(Pauli p) { return (static_cast<std::uint8_t>(p) & 2u) != 0; }
constexpr Pauli make_pauli(bool x, bool z) {
  return static_cast<Pauli>((x ? 1u : 0u) | (z ? 2u : 0u));
}
char pauli_letter(Pauli p);

/// Single-site action W|s> = site_amplitude(W, s) |s ^ x_bit(W)>.
inline std::complex<double> site_amplitude(Pauli p, int s) {
  switch (p) {
    case Pauli::I:
    case Pauli::X: return 1.0;
    case Pauli::Z: return s ? -1.0 : 1.0;
    case Pauli::Y: return s ? std::complex<double>(0, -1) : std::complex<double>(0, 1);
  }
  return 0.0;
}

/// Default refusal threshold for dense matrix constructions of Pauli strings.
inline constexpr std::size_t kDensePauliCap = 14;

/// Signed tensor product of single-site Pauli matrices in binary symplectic
/// form. The sign is restricted to +1 / -1, so every value is Hermitian; the
/// Y letter carries its conventional factor (Y = i X Z) internally.
///
/// Site k of the string is the k-th tensor factor (0-based in this API). In
/// dense matrices and basis indices site 0 is the most significant bit and
/// bit value 0 is spin up, i.e. the +1 eigenstate of Z.
class PauliString {
 public:
  /// Identity string with sign +1.
  explicit PauliString(std::size_t n_sites);

  /// Builds from a letter word such as "XIZY".
  static PauliString from_letters(std::string_view letters, int sign = +1);

  /// Parses the textual form "+1 XIZI" / "-1 XIZI".
  static PauliString parse(std::string_view text);

  /// Identity string with a single letter at `site`.
  static PauliString single(std::size_t n_sites, std::size_t site, Pauli p);

  std::size_t n_sites() const { return n_sites_; }
  int sign() const { return negative_ ? -1 : +1; }
  void set_sign(int sign);
  PauliString negated() const;

  Pauli operator[](std::size_t site) const;
  void set(std::size_t site, Pauli p);
  bool x(std::size_t site) const;
  bool z(std::size_t site) const;

  std::span<const std::uint64_t> x_words() const { return x_; }
  std::span<const std::uint64_t> z_words() const { return z_; }

  /// True when every letter is I (the sign is ignored).
  bool is_identity() const;
  std::size_t weight() const;
  /// Lowest / highest site carrying a non-identity letter.
  std::optional<std::size_t> first_support() const;
  std::optional<std::size_t> last_support() const;

  /// Number of Y letters; the dense matrix is real iff this is even.
  std::size_t y_count() const;

  /// Letters only, e.g. "XIZI".
  std::string letters() const;
  /// Sign token plus letters, e.g. "+1 XIZI". Round-trips through parse().
  std::string to_string() const;

  /// Masks of x and z bits in dense basis-index layout (site 0 = MSB).
  /// Requires n_sites <= 63.
  std::uint64_t x_basis_mask() const;
  std::uint64_t z_basis_mask() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::size_t n_sites_;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
  bool negative_ = false;
};

/// Result of multiplying two Pauli strings: p * q = i^i_power * product,
/// where product always carries sign +1.
struct PauliProduct {
  int i_power = 0;  // in [0, 4)
  PauliString product;
  std::complex<double> phase() const;
};

PauliProduct multiply(const PauliString& p, const PauliString& q);

/// True iff the symplectic product of p and q is even.
bool commutes(const PauliString& p, const PauliString& q);

/// Dense 2^n x 2^n matrix. Refuses strings longer than `cap` sites.
Eigen::MatrixXcd dense_matrix(const PauliString& p, std::size_t cap = kDensePauliCap);

/// Action on a computational basis state: p |index> = amplitude |image>.
struct BasisImage {
  std::complex<double> amplitude;
  std::uint64_t index;
};
BasisImage apply_to_basis(const PauliString& p, std::uint64_t index);

struct PauliTerm {
  double coefficient;
  PauliString string;
};

/// Real-weighted sum of Pauli strings on a fixed number of sites. Terms keep
/// their insertion order; duplicates are only merged on explicit request.
class WeightedPauliSum {
 public:
  explicit WeightedPauliSum(std::size_t n_sites);

  void add(double coefficient, PauliString string);

  std::size_t n_sites() const { return n_sites_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const PauliTerm& operator[](std::size_t i) const { return terms_[i]; }
  std::span<const PauliTerm> terms() const { return terms_; }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  /// Replaces term i; the new string must have the same length.
  void replace(std::size_t i, PauliTerm term);

  /// Sum with identical letter words combined (sign folded into the
  /// coefficient); order of first appearance is kept.
  WeightedPauliSum merged_duplicates() const;

  double coefficient_l1_norm() const;

  /// One "coefficient +1 LETTERS" line per term.
  std::string to_string() const;

 private:
  std::size_t n_sites_;
  std::vector<PauliTerm> terms_;
};

/// Places physical site j (0-based) at chain position 2j of a chain of
/// 2 * n_physical sites, with identity on every ancilla position 2j + 1.
/// In 1-based terms: physical site j maps to 2j - 1, ancillas sit on even
/// positions.
WeightedPauliSum embed_on_physical_sites(const WeightedPauliSum& sum, std::size_t n_physical);

}  // namespace catdvp
