#include <doctest.h>

#include <cmath>

#include "catdvp/ed.hpp"
#include "catdvp/errors.hpp"
#include "catdvp/thermal.hpp"
#include "dense_oracle.hpp"

using namespace catdvp;

TEST_CASE("model builders: term counts and order") {
  const WeightedPauliSum chain = build_heisenberg_chain(4);
  CHECK(chain.size() == 9);
  CHECK(chain[0].coefficient == doctest::Approx(0.25));
  CHECK(chain[0].string == PauliString::from_letters("XXII"));
  CHECK(chain[1].string == PauliString::from_letters("YYII"));
  CHECK(chain[2].string == PauliString::from_letters("ZZII"));

  CHECK(build_j1j2(4, 4, 0.5).size() == 126);
  CHECK(build_j1j2(4, 4, 0.0).size() == 72);
  CHECK(build_j1j2(2, 2, 0.0).size() == 12);
}

TEST_CASE("embedding puts physical letters on even chain positions") {
  const WeightedPauliSum h = embed_on_physical_sites(build_heisenberg_chain(2), 2);
  CHECK(h.n_sites() == 4);
  CHECK(h[0].string == PauliString::from_letters("XIXI"));
}

TEST_CASE("plan validation") {
  SimulationPlan p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.n_steps() == 20);
  p.beta_max = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p.beta_max = 1.03;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = SimulationPlan{};
  p.measure_every = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = SimulationPlan{};
  p.model.n = 1;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = SimulationPlan{};
  p.model.n = 13;
  p.oracle_compare = true;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("beta = 0 record: zero energy, pair entropy pattern") {
  SimulationPlan plan;
  plan.model.n = 4;
  ThermalSimulation sim(plan);
  const ThermalRecord r = sim.measure();
  CHECK(r.beta == 0.0);
  CHECK(std::abs(r.energy) < 1e-14);
  for (std::size_t b = 1; b < sim.state().size(); ++b)
    CHECK(std::abs(bond_entropy(sim.state(), b) - (b % 2 == 1 ? std::log(2.0) : 0.0)) < 1e-12);
}

TEST_CASE("oracle comparison fills the error columns") {
  SimulationPlan plan;
  plan.model.n = 4;
  plan.beta_max = 0.5;
  plan.oracle_compare = true;
  plan.sweep.truncation = TruncationPolicy{16, 0.0};
  const RunResult r = run(plan);
  REQUIRE_FALSE(r.truncated);
  REQUIRE(r.records.size() == 11);
  CHECK(r.records.front().abs_err_flag);  // E(0) = 0
  for (std::size_t i = 1; i < r.records.size(); ++i) {
    REQUIRE(r.records[i].energy_rel_err.has_value());
    CHECK(*r.records[i].energy_rel_err < 1e-9);
  }
}

TEST_CASE("measure_every thins the records but keeps the last one") {
  SimulationPlan plan;
  plan.model.n = 3;
  plan.beta_max = 0.35;
  plan.measure_every = 3;
  std::size_t streamed = 0;
  const RunResult r = run(plan, [&](const ThermalRecord&) { ++streamed; });
  REQUIRE(r.records.size() == 4);  // steps 0, 3, 6, 7
  CHECK(streamed == 4);
  CHECK(r.records[1].beta == doctest::Approx(0.15));
  CHECK(r.records.back().beta == doctest::Approx(0.35));
}

TEST_CASE("log norm tracks the partition function") {
  SimulationPlan plan;
  plan.model.n = 3;
  plan.beta_max = 1.0;
  plan.sweep.truncation = TruncationPolicy{64, 0.0};
  const RunResult r = run(plan);
  const SpectrumCache s = dense_spectrum(build_heisenberg_chain(3));
  for (const auto& rec : r.records)
    CHECK(std::exp(2.0 * rec.log_norm) * 8.0 == doctest::Approx(partition_function(s, rec.beta)).epsilon(1e-8));
}

TEST_CASE("observables are measured in the original frame") {
  SimulationPlan plan;
  plan.model.n = 4;
  plan.beta_max = 0.5;
  plan.sweep.truncation = TruncationPolicy{64, 0.0};
  SimulationPlan ca = plan;
  ca.sweep.clifford_enabled = true;
  ca.sweep.clifford_search = CliffordSearch::LocalClassReduced;
  ThermalSimulation a(plan), b(ca);
  for (std::size_t s = 0; s < plan.n_steps(); ++s) {
    a.step();
    b.step();
  }
  CHECK_FALSE(b.accumulated().is_identity());
  WeightedPauliSum obs(8);
  obs.add(1.0, PauliString::from_letters("ZIIIZIII"));
  obs.add(0.5, PauliString::from_letters("IIXIXIII"));
  const CliffordTableau id = CliffordTableau::identity(8);
  CHECK(measure_observable(b.state(), obs, b.accumulated()) ==
        doctest::Approx(measure_observable(a.state(), obs, id)).epsilon(1e-9));
  CHECK(b.measure().energy == doctest::Approx(a.measure().energy).epsilon(1e-9));
}

TEST_CASE("engine errors truncate the run and keep the cause") {
  SimulationPlan plan;
  plan.model.n = 4;
  plan.sweep.krylov_max_dim = 1;
  plan.sweep.krylov_tol = 1e-15;
  const RunResult r = run(plan);
  CHECK(r.truncated);
  CHECK_FALSE(r.error.empty());
  CHECK(r.records.size() == 1);
  REQUIRE(r.failure);
  CHECK_THROWS_AS(std::rethrow_exception(r.failure), ConvergenceError);
}
