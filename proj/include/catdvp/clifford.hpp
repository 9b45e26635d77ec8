#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catdvp/pauli.hpp"

namespace catdvp {

/// Clifford unitary C stored as the images C X_k C^dagger and C Z_k C^dagger
/// of the single-site generators.
class CliffordTableau {
 public:
  /// Validates lengths and the commutation relations of the images.
  CliffordTableau(std::vector<PauliString> x_images, std::vector<PauliString> z_images);

  static CliffordTableau identity(std::size_t n_sites);
  static CliffordTableau hadamard(std::size_t n_sites, std::size_t site);
  static CliffordTableau phase_s(std::size_t n_sites, std::size_t site);
  static CliffordTableau cnot(std::size_t n_sites, std::size_t control, std::size_t target);
  static CliffordTableau swap(std::size_t n_sites, std::size_t a, std::size_t b);

  std::size_t n_sites() const { return x_images_.size(); }
  const PauliString& x_image(std::size_t site) const { return x_images_.at(site); }
  const PauliString& z_image(std::size_t site) const { return z_images_.at(site); }
  bool is_identity() const;

  /// "+1 XI +1 ZI +1 IX +1 IZ": images of X1, Z1, X2, Z2, ... in Pauli text form.
  std::string to_string() const;
  static CliffordTableau parse(std::string_view line);

  friend bool operator==(const CliffordTableau&, const CliffordTableau&) = default;

 private:
  struct Unchecked {};
  CliffordTableau(Unchecked, std::vector<PauliString> x_images, std::vector<PauliString> z_images);

  friend CliffordTableau compose(const CliffordTableau&, const CliffordTableau&);
  friend CliffordTableau compose_local(const CliffordTableau&, std::size_t, const CliffordTableau&);
  friend CliffordTableau inverse(const CliffordTableau&);

  std::vector<PauliString> x_images_;
  std::vector<PauliString> z_images_;
};

/// Checks M^T Omega M = Omega over GF(2) for the symplectic matrix of the
/// images. Deliberately shares no code with the constructor checks.
bool satisfies_symplectic_conditions(const CliffordTableau& t);

/// C p C^dagger.
PauliString conjugate(const CliffordTableau& t, const PauliString& p);

/// Conjugation by a two-site tableau, precomputed for all 16 local words.
/// Word code is letter(site k) | letter(site k+1) << 2.
class LocalConjugationTable {
 public:
  explicit LocalConjugationTable(const CliffordTableau& two_site);

  std::uint8_t image(std::uint8_t code) const { return image_[code]; }
  int sign(std::uint8_t code) const { return sign_[code]; }

  /// Conjugates the (k, k+1) restriction of p in place and returns the sign
  /// picked up; the string's own sign is left untouched.
  int apply(PauliString& p, std::size_t k) const;

 private:
  std::array<std::uint8_t, 16> image_{};
  std::array<int, 16> sign_{};
};

/// Conjugates every term; signs are folded into the coefficients.
WeightedPauliSum conjugate_sum(const CliffordTableau& t, const WeightedPauliSum& h);

/// Conjugates by a two-site tableau acting on chain positions (k, k+1)
/// (0-based) with identity elsewhere. Term count and order are preserved.
WeightedPauliSum conjugate_sum(const CliffordTableau& two_site, std::size_t k, const WeightedPauliSum& h);
/// Same, via a precomputed table. `changed`, when given, receives the
/// indices of terms whose (k, k+1) restriction changed.
WeightedPauliSum conjugate_sum(const LocalConjugationTable& table, std::size_t k, const WeightedPauliSum& h,
                               std::vector<std::size_t>* changed = nullptr);

/// conjugate(compose(a, b), p) == conjugate(a, conjugate(b, p)).
CliffordTableau compose(const CliffordTableau& outer, const CliffordTableau& inner);

/// compose(embed(two_site at k), inner) without materializing the embedding.
CliffordTableau compose_local(const CliffordTableau& two_site, std::size_t k, const CliffordTableau& inner);

/// Two-site tableau placed on positions (k, k+1) of an n-site chain.
CliffordTableau embed(const CliffordTableau& two_site, std::size_t k, std::size_t n_sites);

CliffordTableau inverse(const CliffordTableau& t);

/// 4x4 unitary U with U P U^dagger = conjugate(t, P) for all two-site P.
/// Basis index is 2 * s_k + s_{k+1} (site k slow). The global phase is fixed
/// so the first nonzero entry of column 0 is real positive.
Eigen::Matrix4cd local_unitary(const CliffordTableau& two_site);

/// Two-site Clifford tableaus with +1 signs, one per symplectic class.
class TwoSiteCliffordCatalog {
 public:
  /// Arbitrary list of two-site tableaus (e.g. a restricted search space).
  explicit TwoSiteCliffordCatalog(std::vector<CliffordTableau> entries);

  /// The shared 720-entry catalog, built on first use.
  static const TwoSiteCliffordCatalog& standard();

  std::size_t size() const { return entries_.size(); }
  const CliffordTableau& operator[](std::size_t i) const { return entries_.at(i); }
  const Eigen::Matrix4cd& unitary(std::size_t i) const { return unitaries_.at(i); }
  const LocalConjugationTable& table(std::size_t i) const { return tables_.at(i); }

  /// Entries related by single-site Cliffords on either site (C -> (A⊗B) C)
  /// share a class. Class representative = lowest index in the class.
  /// Available only when the catalog is closed under that action.
  bool has_local_classes() const { return !representative_.empty(); }
  std::size_t class_representative(std::size_t i) const { return representative_.at(i); }
  const std::vector<std::size_t>& representatives() const { return representatives_; }

  /// One tableau per line, images of X1, Z1, X2, Z2.
  std::string export_text() const;
  static TwoSiteCliffordCatalog parse_text(const std::string& text);

 private:
  void compute_local_classes();

  std::vector<CliffordTableau> entries_;
  std::vector<Eigen::Matrix4cd> unitaries_;
  std::vector<LocalConjugationTable> tables_;
  std::vector<std::size_t> representative_;
  std::vector<std::size_t> representatives_;
};

/// All sign-positive two-site tableaus in lexicographic order of the word
/// codes of (X1', Z1', X2', Z2'). Entry 0 is the identity.
TwoSiteCliffordCatalog enumerate_two_site_cliffords();

}  // namespace catdvp
