#include <doctest.h>

#include <random>

#include "catdvp/errors.hpp"
#include "catdvp/pauli.hpp"
#include "dense_oracle.hpp"

using namespace catdvp;
using oracle::cd;

namespace {

PauliString P(const char* letters, int sign = +1) { return PauliString::from_letters(letters, sign); }

std::vector<PauliString> all_strings(std::size_t n) {
  std::vector<PauliString> out;
  const std::size_t count = std::size_t{1} << (2 * n);
  for (std::size_t code = 0; code < count; ++code) {
    PauliString p(n);
    for (std::size_t k = 0; k < n; ++k) p.set(k, static_cast<Pauli>((code >> (2 * k)) & 3u));
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_CASE("multiply: textbook identities") {
  auto xz = multiply(P("X"), P("Z"));
  CHECK(xz.phase() == cd(0, -1));
  CHECK(xz.product == P("Y"));

  for (const char* s : {"X", "Y", "Z", "I"}) {
    auto pp = multiply(P(s), P(s));
    CHECK(pp.i_power == 0);
    CHECK(pp.product.is_identity());
  }

  // (X⊗Z)(Z⊗Z): oracle is 4x4 dense multiplication.
  auto r = multiply(P("XZ"), P("ZZ"));
  CHECK(r.phase() == cd(0, -1));
  CHECK(r.product == P("YI"));
  Eigen::MatrixXcd lhs = oracle::kron_pauli(P("XZ")) * oracle::kron_pauli(P("ZZ"));
  CHECK((lhs - cd(0, -1) * oracle::kron_pauli(P("YI"))).norm() < 1e-14);
}

TEST_CASE("multiply: size mismatch") {
  CHECK_THROWS_AS(multiply(P("X"), P("XZ")), SizeError);
  CHECK_THROWS_AS(commutes(P("X"), P("XZ")), SizeError);
}

TEST_CASE("multiply agrees with dense products: exhaustive two sites, signed") {
  for (const auto& a : all_strings(2)) {
    for (const auto& b : all_strings(2)) {
      for (int sa : {1, -1}) {
        for (int sb : {1, -1}) {
          PauliString p = a, q = b;
          p.set_sign(sa);
          q.set_sign(sb);
          auto r = multiply(p, q);
          CHECK(r.product.sign() == 1);
          Eigen::MatrixXcd want = oracle::kron_pauli(p) * oracle::kron_pauli(q);
          CHECK((want - r.phase() * oracle::kron_pauli(r.product)).norm() < 1e-14);
        }
      }
    }
  }
}

TEST_CASE("group law: associativity with phase bookkeeping, random n <= 4") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 4;
    auto a = oracle::random_pauli(n, rng), b = oracle::random_pauli(n, rng), c = oracle::random_pauli(n, rng);
    auto ab = multiply(a, b);
    auto ab_c = multiply(ab.product, c);
    auto bc = multiply(b, c);
    auto a_bc = multiply(a, bc.product);
    CHECK(ab_c.product == a_bc.product);
    CHECK((ab.i_power + ab_c.i_power) % 4 == (bc.i_power + a_bc.i_power) % 4);
    Eigen::MatrixXcd dense = oracle::kron_pauli(a) * oracle::kron_pauli(b) * oracle::kron_pauli(c);
    CHECK((dense - ab.phase() * ab_c.phase() * oracle::kron_pauli(ab_c.product)).norm() < 1e-12);
  }
}

TEST_CASE("commutes: examples and exhaustive dense agreement") {
  CHECK(commutes(P("X"), P("X")));
  CHECK_FALSE(commutes(P("X"), P("Z")));
  CHECK(commutes(P("XX"), P("ZZ")));
  for (const auto& a : all_strings(2)) {
    for (const auto& b : all_strings(2)) {
      Eigen::MatrixXcd pa = oracle::kron_pauli(a), pb = oracle::kron_pauli(b);
      const bool dense_commute = (pa * pb - pb * pa).norm() < 1e-12;
      CHECK(commutes(a, b) == dense_commute);
    }
  }
}

TEST_CASE("dense_matrix: examples, Hermiticity, Kronecker agreement") {
  Eigen::Matrix2cd z;
  z << 1, 0, 0, -1;
  CHECK(dense_matrix(P("Z")).isApprox(Eigen::MatrixXcd(z)));
  Eigen::Matrix2cd y;
  y << 0, cd(0, -1), cd(0, 1), 0;
  CHECK((dense_matrix(P("Y")) - Eigen::MatrixXcd(y)).norm() == 0.0);
  CHECK((dense_matrix(P("XX", -1)) + dense_matrix(P("XX"))).norm() == 0.0);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = oracle::random_pauli(1 + trial % 5, rng);
    Eigen::MatrixXcd m = dense_matrix(p);
    CHECK((m - m.adjoint()).norm() == 0.0);
    CHECK((m - oracle::kron_pauli(p)).norm() < 1e-14);
  }
}

TEST_CASE("dense_matrix refuses beyond the cap") {
  CHECK_THROWS_AS(dense_matrix(PauliString(15)), CapExceededError);
  CHECK_THROWS_AS(dense_matrix(PauliString(5), 4), CapExceededError);
  CHECK_NOTHROW(dense_matrix(PauliString(4), 4));
}

TEST_CASE("textual form round-trips and rejects garbage") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = oracle::random_pauli(1 + trial % 9, rng);
    const std::string text = p.to_string();
    CHECK(PauliString::parse(text) == p);
    CHECK(PauliString::parse(text).to_string() == text);
  }
  CHECK(P("XIZI", -1).to_string() == "-1 XIZI");
  CHECK_THROWS_AS(PauliString::parse("XIZI"), ParseError);
  CHECK_THROWS_AS(PauliString::parse("+2 XI"), ParseError);
  CHECK_THROWS_AS(PauliString::parse("+1 XQ"), ParseError);
  CHECK_THROWS_AS(PauliString::parse("+1 XI ZZ"), ParseError);
}

TEST_CASE("support queries across word boundaries") {
  PauliString p(130);
  CHECK_FALSE(p.first_support().has_value());
  p.set(70, Pauli::Y);
  p.set(129, Pauli::X);
  CHECK(*p.first_support() == 70);
  CHECK(*p.last_support() == 129);
  CHECK(p.weight() == 2);
  CHECK(p.y_count() == 1);
}

TEST_CASE("embed_on_physical_sites") {
  WeightedPauliSum h(2);
  h.add(0.25, P("ZZ"));
  auto e = embed_on_physical_sites(h, 2);
  REQUIRE(e.size() == 1);
  CHECK(e.n_sites() == 4);
  CHECK(e[0].coefficient == 0.25);
  CHECK(e[0].string == P("ZIZI"));

  WeightedPauliSum id(3);
  id.add(1.0, PauliString(3));
  CHECK(embed_on_physical_sites(id, 3)[0].string == PauliString(6));

  // XX on physical sites (2,3), 1-based, lands on chain positions 3 and 5.
  WeightedPauliSum xx(3);
  xx.add(0.25, P("IXX"));
  auto ex = embed_on_physical_sites(xx, 3);
  CHECK(ex[0].string.letters() == "IIXIXI");

  CHECK_THROWS_AS(embed_on_physical_sites(xx, 2), SizeError);
}

TEST_CASE("embedding equals the dense operator tensored with ancilla identities (N <= 3)") {
  std::mt19937_64 rng(5);
  for (std::size_t n = 1; n <= 3; ++n) {
    WeightedPauliSum h(n);
    for (int t = 0; t < 4; ++t) h.add(0.3 * (t + 1), oracle::random_pauli(n, rng));
    auto e = embed_on_physical_sites(h, n);
    // Dense oracle: interleave by building each embedded string from kron(letter, I).
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(Eigen::Index{1} << (2 * n), Eigen::Index{1} << (2 * n));
    for (const auto& t : h) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
      for (char c : t.string.letters()) m = oracle::kron(oracle::kron(m, oracle::single_site(c)), Eigen::Matrix2cd::Identity());
      want += t.coefficient * t.string.sign() * m;
    }
    CHECK((oracle::kron_sum(e) - want).norm() < 1e-12);
  }
}

TEST_CASE("WeightedPauliSum: validation, sign folding, explicit merging") {
  WeightedPauliSum h(2);
  CHECK_THROWS_AS(h.add(1.0, P("X")), SizeError);
  CHECK_THROWS_AS(h.add(std::nan(""), P("XX")), NumericalConsistencyError);
  h.add(1.0, P("XX", -1));
  CHECK(h[0].coefficient == -1.0);
  CHECK(h[0].string.sign() == 1);
  h.add(0.5, P("ZZ"));
  h.add(2.0, P("XX"));
  CHECK(h.size() == 3);
  auto merged = h.merged_duplicates();
  REQUIRE(merged.size() == 2);
  CHECK(merged[0].coefficient == 1.0);
  CHECK(merged[1].string == P("ZZ"));
}
