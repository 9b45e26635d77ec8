#include <doctest.h>

#include <random>

#include "catdvp/ed.hpp"
#include "catdvp/errors.hpp"
#include "catdvp/thermal.hpp"
#include "catdvp/tdvp.hpp"
#include "dense_oracle.hpp"

using namespace catdvp;
using oracle::cd;

namespace {

WeightedPauliSum random_sum(std::size_t n, std::size_t terms, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  WeightedPauliSum h(n);
  for (std::size_t t = 0; t < terms; ++t) h.add(g(rng), oracle::random_pauli(n, rng));
  return h;
}

MpsState normalized_random_mps(std::size_t n, Index bond, std::size_t center, std::mt19937_64& rng) {
  MpsState psi = oracle::random_mps(n, bond, rng);
  canonicalize(psi, center);
  normalize(psi);
  return psi;
}

// Full statevector with sites (k, k+1) replaced by the exact split of `block`.
Eigen::VectorXcd embed_block(MpsState psi, std::size_t k, const TwoSiteBlock& block) {
  const SplitResult r = split(block, TruncationPolicy{1024, 0.0}, CenterSide::Right);
  psi.set_pair(k, r.left, r.right);
  return r.kept_norm * oracle::statevector(psi);
}

Eigen::VectorXcd embed_site(MpsState psi, std::size_t k, const SiteTensor& t) {
  psi.set_tensor(k, t);
  return oracle::statevector(psi);
}

cd frobenius(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a.conjugate().cwiseProduct(b)).sum(); }

}  // namespace

TEST_CASE("H_eff is the projection of H onto the two-site space") {
  std::mt19937_64 rng(31);
  const std::size_t n = 6;
  const WeightedPauliSum h = random_sum(n, 20, rng);
  const Eigen::MatrixXcd hd = oracle::kron_sum(h);
  for (std::size_t k : {0u, 2u, 4u}) {
    const MpsState psi = normalized_random_mps(n, 3, k, rng);
    EnvironmentCache cache(h.size(), n);
    cache.build_left(psi, h, k);
    cache.build_right(psi, h, k + 2);
    const TwoSiteBlock base = merge(psi, k);
    for (int trial = 0; trial < 3; ++trial) {
      TwoSiteBlock b{oracle::random_matrix(base.left_dim(), base.data.cols(), rng)};
      TwoSiteBlock c{oracle::random_matrix(base.left_dim(), base.data.cols(), rng)};
      const cd local = frobenius(c.data, apply_h_eff(cache, h, k, b).data);
      const cd full = embed_block(psi, k, c).dot(hd * embed_block(psi, k, b));
      CHECK(std::abs(local - full) < 1e-10 * std::max(1.0, std::abs(full)));
    }
    // <psi|H|psi> through the center block
    const cd e = frobenius(base.data, apply_h_eff(cache, h, k, base).data);
    CHECK(e.real() == doctest::Approx(expectation(psi, h)).epsilon(1e-10));
  }
}

TEST_CASE("K_eff is the projection of H onto the one-site space") {
  std::mt19937_64 rng(37);
  const std::size_t n = 5;
  const WeightedPauliSum h = random_sum(n, 15, rng);
  const Eigen::MatrixXcd hd = oracle::kron_sum(h);
  for (std::size_t k : {0u, 1u, 3u}) {
    const MpsState psi = normalized_random_mps(n, 3, k + 1, rng);
    EnvironmentCache cache(h.size(), n);
    cache.build_left(psi, h, k + 1);
    cache.build_right(psi, h, k + 2);
    const SiteTensor& center = psi.tensor(k + 1);
    SiteTensor b{oracle::random_matrix(center.left_dim(), center.data.cols(), rng)};
    SiteTensor c{oracle::random_matrix(center.left_dim(), center.data.cols(), rng)};
    const cd local = frobenius(c.data, apply_k_eff(cache, h, k, b).data);
    const cd full = embed_site(psi, k + 1, c).dot(hd * embed_site(psi, k + 1, b));
    CHECK(std::abs(local - full) < 1e-10 * std::max(1.0, std::abs(full)));
  }
}

TEST_CASE("cached environments match fresh contractions") {
  std::mt19937_64 rng(41);
  const std::size_t n = 6;
  const WeightedPauliSum h = random_sum(n, 12, rng);
  MpsState psi = normalized_random_mps(n, 3, 0, rng);
  EnvironmentCache cache = build_right_environments(psi, h);
  for (std::size_t b = 1; b <= n; ++b) CHECK(cache.right_deviation(psi, h, b) < 1e-12);
  move_center(psi, n - 1);
  cache.build_left(psi, h, n - 1);
  for (std::size_t b = 0; b < n; ++b) CHECK(cache.left_deviation(psi, h, b) < 1e-12);
  cache.invalidate_all();
  CHECK_THROWS_AS(cache.left(0, 2), InternalError);
}

TEST_CASE("sweeps keep environments consistent and the state canonical") {
  for (bool clifford : {false, true}) {
    SimulationPlan plan;
    plan.model.n = 4;
    plan.sweep.truncation = TruncationPolicy{16, 0.0};
    plan.sweep.clifford_enabled = clifford;
    plan.sweep.clifford_search = CliffordSearch::LocalClassReduced;
    plan.sweep.verify_environments = true;
    ThermalSimulation sim(plan);
    for (int s = 0; s < 6; ++s) {
      const StepReport r = sim.step();
      CHECK(r.max_env_deviation < 1e-10);
      CHECK(r.max_entropy_excess <= 1e-12);
      CHECK(sim.state().center() == 0u);
      CHECK(is_canonical(sim.state()));
    }
  }
}

TEST_CASE("full-rank sweeps follow the exact purified state") {
  SimulationPlan plan;
  plan.model.n = 3;
  plan.sweep.delta_beta = 0.05;
  plan.sweep.truncation = TruncationPolicy{64, 0.0};
  ThermalSimulation sim(plan);
  const WeightedPauliSum hp = sim.physical_hamiltonian();
  for (int s = 0; s < 20; ++s) sim.step();
  const Eigen::VectorXcd ref = purified_reference(hp, sim.beta());
  const Eigen::VectorXcd got = oracle::statevector(sim.state()) * std::exp(sim.state().log_norm());
  CHECK(std::abs(std::abs(ref.normalized().dot(got.normalized())) - 1.0) < 1e-8);
  CHECK(got.norm() == doctest::Approx(ref.norm()).epsilon(1e-6));
}

TEST_CASE("disentangler never beats the identity by increasing entropy") {
  std::mt19937_64 rng(43);
  const auto& cat = TwoSiteCliffordCatalog::standard();
  REQUIRE(cat[0].is_identity());
  for (int trial = 0; trial < 20; ++trial) {
    const Index dl = 1 + static_cast<Index>(trial % 3), dr = 1 + static_cast<Index>((trial / 3) % 3);
    TwoSiteBlock b{oracle::random_matrix(dl, 4 * dr, rng)};
    for (DisentangleCost cost : {DisentangleCost::Entropy, DisentangleCost::TruncationWeight}) {
      const TruncationPolicy policy{2, 0.0};
      const DisentangleResult full = disentangle(b, cat, policy, cost, CliffordSearch::Exhaustive720);
      const DisentangleResult reduced = disentangle(b, cat, policy, cost, CliffordSearch::LocalClassReduced);
      CHECK(full.cost <= full.identity_cost + 1e-12);
      CHECK(reduced.cost == doctest::Approx(full.cost).epsilon(1e-12));
      CHECK(reduced.index == full.index);

      const TwoSiteBlock rotated = apply_two_site_unitary(b, cat.unitary(full.index));
      CHECK((rotated.data - full.block.data).cwiseAbs().maxCoeff() < 1e-12 * b.norm());
      if (cost == DisentangleCost::Entropy) {
        CHECK(full.report.entropy == doctest::Approx(full.cost).epsilon(1e-10));
        CHECK(full.report.entropy <= full.identity_entropy + 1e-12);
      }
    }
  }
}

TEST_CASE("a product block keeps the identity") {
  // (|0> + |1>) on site k times |0> on site k+1: already unentangled.
  TwoSiteBlock b{Eigen::MatrixXcd::Zero(1, 4)};
  b.data(0, 0) = 1.0;
  b.data(0, 2) = 1.0;
  const DisentangleResult r = disentangle(b, TwoSiteCliffordCatalog::standard(), TruncationPolicy{});
  CHECK(r.index == 0u);
  CHECK(r.cost == doctest::Approx(0.0));
}

TEST_CASE("a Bell pair is disentangled completely") {
  TwoSiteBlock b{Eigen::MatrixXcd::Zero(1, 4)};
  b.data(0, 0) = 1.0;
  b.data(0, 3) = 1.0;
  const DisentangleResult r = disentangle(b, TwoSiteCliffordCatalog::standard(), TruncationPolicy{});
  CHECK(r.identity_entropy == doctest::Approx(std::log(2.0)));
  CHECK(r.cost < 1e-12);
  CHECK(r.index != 0u);
}

TEST_CASE("sweep configuration validation") {
  SweepConfig c;
  CHECK_NOTHROW(c.validate());
  c.delta_beta = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = SweepConfig{};
  c.truncation.max_bond = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = SweepConfig{};
  c.truncation.rel_cutoff = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = SweepConfig{};
  c.krylov_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}
