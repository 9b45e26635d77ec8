#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "catdvp/clifford.hpp"
#include "catdvp/errors.hpp"
#include "dense_oracle.hpp"

using namespace catdvp;
using oracle::cd;

namespace {

PauliString P(const char* letters, int sign = +1) { return PauliString::from_letters(letters, sign); }

std::vector<PauliString> two_site_words() {
  std::vector<PauliString> out;
  for (int code = 0; code < 16; ++code) {
    PauliString p(2);
    p.set(0, static_cast<Pauli>(code & 3));
    p.set(1, static_cast<Pauli>(code >> 2));
    out.push_back(p);
  }
  return out;
}

// Identifies a dense 4x4 matrix as +-(two-site Pauli) by trace overlaps.
std::optional<PauliString> identify_pauli(const Eigen::Matrix4cd& m) {
  for (auto w : two_site_words()) {
    const cd overlap = (oracle::kron_pauli(w).adjoint() * m).trace() / 4.0;
    for (int s : {1, -1}) {
      if (std::abs(overlap - cd(s, 0)) < 1e-12) {
        w.set_sign(s);
        if ((m - oracle::kron_pauli(w)).norm() < 1e-12) return w;
      }
    }
  }
  return std::nullopt;
}

CliffordTableau random_chain_clifford(std::size_t n, int layers, std::mt19937_64& rng) {
  const auto& catalog = TwoSiteCliffordCatalog::standard();
  std::uniform_int_distribution<std::size_t> pick(0, catalog.size() - 1), pos(0, n - 2);
  auto t = CliffordTableau::identity(n);
  for (int l = 0; l < layers; ++l) t = compose_local(catalog[pick(rng)], pos(rng), t);
  return t;
}

}  // namespace

TEST_CASE("conjugate: textbook identities") {
  CHECK(conjugate(CliffordTableau::hadamard(1, 0), P("X")) == P("Z"));
  CHECK(conjugate(CliffordTableau::cnot(2, 0, 1), P("XI")) == P("XX"));
  CHECK(conjugate(CliffordTableau::phase_s(1, 0), P("Y")) == P("X", -1));

  // S Y S^dagger via dense 2x2 matrices.
  Eigen::Matrix2cd s;
  s << 1, 0, 0, cd(0, 1);
  Eigen::Matrix2cd sys = s * oracle::single_site('Y') * s.adjoint();
  CHECK((sys + oracle::single_site('X')).norm() < 1e-14);

  CHECK_THROWS_AS(conjugate(CliffordTableau::hadamard(2, 0), P("X")), SizeError);
}

TEST_CASE("conjugate_sum on chain positions") {
  WeightedPauliSum h(3);
  h.add(1.0, P("ZIX"));
  h.add(-0.5, P("YYZ"));
  auto same = conjugate_sum(CliffordTableau::identity(2), 0, h);
  CHECK(same.to_string() == h.to_string());

  // Z on the control is a fixed point; Z on the target picks up Z on the control.
  auto fixed = conjugate_sum(CliffordTableau::cnot(2, 0, 1), 0, h);
  CHECK(fixed[0].string == P("ZIX"));
  auto c = conjugate_sum(CliffordTableau::cnot(2, 1, 0), 0, h);
  CHECK(c[0].coefficient == 1.0);
  CHECK(c[0].string == P("ZZX"));
  // 8x8 dense oracle for the whole sum.
  Eigen::MatrixXcd cnot8 = oracle::kron(local_unitary(CliffordTableau::cnot(2, 1, 0)), Eigen::Matrix2cd::Identity());
  CHECK((cnot8 * oracle::kron_sum(h) * cnot8.adjoint() - oracle::kron_sum(c)).norm() < 1e-12);

  WeightedPauliSum x(3);
  x.add(0.5, P("XZI"));
  auto swapped = conjugate_sum(CliffordTableau::swap(2, 0, 1), 0, x);
  CHECK(swapped[0].coefficient == 0.5);
  CHECK(swapped[0].string == P("ZXI"));

  CHECK_THROWS_AS(conjugate_sum(CliffordTableau::swap(2, 0, 1), 2, x), RangeError);
}

TEST_CASE("compose: identities and dense oracle") {
  auto h = CliffordTableau::hadamard(1, 0);
  CHECK(compose(CliffordTableau::identity(1), h) == h);
  CHECK(compose(h, h).is_identity());
  auto s = CliffordTableau::phase_s(1, 0);
  CHECK(conjugate(compose(s, s), P("X")) == P("X", -1));
  // S^2 = Z and Z X Z^dagger = -X densely.
  Eigen::Matrix2cd z = oracle::single_site('Z');
  CHECK((z * oracle::single_site('X') * z.adjoint() + oracle::single_site('X')).norm() < 1e-14);
  CHECK_THROWS_AS(compose(h, CliffordTableau::identity(2)), SizeError);
}

TEST_CASE("compose: conjugate(compose(a,b), p) == conjugate(a, conjugate(b, p)); associativity") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_chain_clifford(5, 6, rng), b = random_chain_clifford(5, 6, rng), c = random_chain_clifford(5, 6, rng);
    auto p = oracle::random_pauli(5, rng);
    CHECK(conjugate(compose(a, b), p) == conjugate(a, conjugate(b, p)));
    CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
    CHECK(satisfies_symplectic_conditions(compose(a, b)));
  }
}

TEST_CASE("compose_local equals composing with the explicit embedding") {
  std::mt19937_64 rng(19);
  const auto& catalog = TwoSiteCliffordCatalog::standard();
  for (int trial = 0; trial < 40; ++trial) {
    auto inner = random_chain_clifford(6, 4, rng);
    const auto& g = catalog[trial * 17 % catalog.size()];
    const std::size_t k = static_cast<std::size_t>(trial % 5);
    CHECK(compose_local(g, k, inner) == compose(embed(g, k, 6), inner));
  }
}

TEST_CASE("inverse undoes a tableau") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    auto t = random_chain_clifford(4, 8, rng);
    CHECK(compose(t, inverse(t)).is_identity());
    CHECK(compose(inverse(t), t).is_identity());
  }
  const auto& catalog = TwoSiteCliffordCatalog::standard();
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    auto round = compose(catalog[i], inverse(catalog[i]));
    for (const auto& w : two_site_words()) CHECK(conjugate(round, w) == w);
  }
}

TEST_CASE("catalog: 720 distinct symplectic entries, identity first, deterministic") {
  const auto& catalog = TwoSiteCliffordCatalog::standard();
  REQUIRE(catalog.size() == 720);
  CHECK(catalog[0].is_identity());
  for (const auto& w : two_site_words()) CHECK(conjugate(catalog[0], w) == w);

  std::set<std::string> seen;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    CHECK(satisfies_symplectic_conditions(catalog[i]));
    std::string letters;
    for (std::size_t k = 0; k < 2; ++k) letters += catalog[i].x_image(k).letters() + catalog[i].z_image(k).letters();
    seen.insert(letters);
    CHECK(catalog[i].x_image(0).sign() == 1);
  }
  CHECK(seen.size() == 720);
  CHECK(enumerate_two_site_cliffords().export_text() == catalog.export_text());
}

TEST_CASE("|Sp(4,2)| by brute force over all 4x4 binary matrices") {
  int count = 0;
  for (unsigned bits = 0; bits < (1u << 16); ++bits) {
    Eigen::Matrix4i m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = (bits >> (4 * r + c)) & 1u;
    Eigen::Matrix4i omega = Eigen::Matrix4i::Zero();
    omega(0, 2) = omega(1, 3) = omega(2, 0) = omega(3, 1) = 1;
    Eigen::Matrix4i form = (m.transpose() * omega * m).unaryExpr([](int v) { return v & 1; });
    if (form == omega) ++count;
  }
  CHECK(count == 720);
}

TEST_CASE("symplectic validator rejects broken tableaus") {
  // Constructor refuses; build a broken one by parsing an invalid line.
  CHECK_THROWS_AS(CliffordTableau::parse("+1 XI +1 XI +1 IX +1 IZ"), ParseError);
  CHECK_THROWS_AS(CliffordTableau({P("XI"), P("IX")}, {P("ZI"), P("ZZ")}), Error);
}

TEST_CASE("local_unitary: identity and CNOT") {
  CHECK((local_unitary(CliffordTableau::identity(2)) - Eigen::Matrix4cd::Identity()).norm() == 0.0);
  Eigen::Matrix4cd cnot = Eigen::Matrix4cd::Zero();
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
  CHECK((local_unitary(CliffordTableau::cnot(2, 0, 1)) - cnot).norm() == 0.0);
}

TEST_CASE("exhaustive: dense conjugation by local_unitary equals tableau conjugation (720 x 16)") {
  const auto& catalog = TwoSiteCliffordCatalog::standard();
  int mismatches = 0;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const Eigen::Matrix4cd& u = catalog.unitary(i);
    if ((u * u.adjoint() - Eigen::Matrix4cd::Identity()).norm() > 1e-12) ++mismatches;
    // Canonical phase: first nonzero entry of column 0 is real positive.
    for (int r = 0; r < 4; ++r) {
      if (std::abs(u(r, 0)) > 1e-12) {
        CHECK(u(r, 0).imag() == 0.0);
        CHECK(u(r, 0).real() > 0.0);
        break;
      }
    }
    for (const auto& w : two_site_words()) {
      auto dense = identify_pauli(u * oracle::kron_pauli(w) * u.adjoint());
      if (!dense || !(*dense == conjugate(catalog[i], w))) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("conjugation preserves commutation relations") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = random_chain_clifford(4, 5, rng);
    auto p = oracle::random_pauli(4, rng), q = oracle::random_pauli(4, rng);
    CHECK(commutes(p, q) == commutes(conjugate(t, p), conjugate(t, q)));
  }
}

TEST_CASE("Hermitian frame: 1000 random conjugations keep real coefficients, term count and l1 norm") {
  std::mt19937_64 rng(31);
  const auto& catalog = TwoSiteCliffordCatalog::standard();
  WeightedPauliSum h(8);
  for (int t = 0; t < 12; ++t) h.add(0.1 * (t + 1) * (t % 2 ? -1 : 1), oracle::random_pauli(8, rng));
  const double l1 = h.coefficient_l1_norm();
  std::uniform_int_distribution<std::size_t> pick(0, catalog.size() - 1), pos(0, 6);
  for (int step = 0; step < 1000; ++step) {
    h = conjugate_sum(catalog.table(pick(rng)), pos(rng), h);
    REQUIRE(h.size() == 12);
  }
  CHECK(h.coefficient_l1_norm() == doctest::Approx(l1).epsilon(1e-14));
  for (const auto& t : h) CHECK(t.string.sign() == 1);
}

TEST_CASE("local classes: 20 classes of 36 entries each") {
  const auto& catalog = TwoSiteCliffordCatalog::standard();
  REQUIRE(catalog.has_local_classes());
  CHECK(catalog.representatives().size() == 20);
  CHECK(catalog.class_representative(0) == 0);
  std::map<std::size_t, int> sizes;
  for (std::size_t i = 0; i < catalog.size(); ++i) ++sizes[catalog.class_representative(i)];
  for (auto [rep, n] : sizes) CHECK(n == 36);

  TwoSiteCliffordCatalog only_identity({CliffordTableau::identity(2)});
  CHECK_FALSE(only_identity.has_local_classes());
}

TEST_CASE("catalog text export round-trips") {
  const auto& catalog = TwoSiteCliffordCatalog::standard();
  const std::string text = catalog.export_text();
  CHECK(text.substr(0, text.find('\n')) == "+1 XI +1 ZI +1 IX +1 IZ");
  auto parsed = TwoSiteCliffordCatalog::parse_text(text);
  CHECK(parsed.size() == 720);
  CHECK(parsed.export_text() == text);
}
