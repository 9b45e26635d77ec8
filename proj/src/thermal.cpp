#include "catdvp/thermal.hpp"

#include <algorithm>
#include <cmath>

#include "catdvp/errors.hpp"

namespace catdvp {

std::size_t SimulationPlan::n_steps() const {
  const double ratio = beta_max / sweep.delta_beta;
  const double steps = std::round(ratio);
  if (std::abs(steps * sweep.delta_beta - beta_max) > 1e-9 * std::max(1.0, beta_max))
    throw ValidationError("plan: beta_max must be a whole number of delta_beta steps");
  return static_cast<std::size_t>(steps);
}

void SimulationPlan::validate() const {
  model.validate();
  sweep.validate();
  if (!(beta_max > 0.0) || !std::isfinite(beta_max)) throw ValidationError("plan: beta_max must be positive");
  if (measure_every < 1) throw ValidationError("plan: measure_every must be at least 1");
  if (oracle_compare && model.n_physical() > kDenseSpectrumCap)
    throw ValidationError("plan: oracle comparison is limited to " + std::to_string(kDenseSpectrumCap) +
                          " physical sites");
  (void)n_steps();
}

double internal_energy(const MpsState& state, const WeightedPauliSum& h_conjugated) {
  return expectation(state, h_conjugated);
}

double measure_observable(const MpsState& state, const WeightedPauliSum& obs, const CliffordTableau& accumulated) {
  if (obs.n_sites() != state.size() || accumulated.n_sites() != state.size())
    throw SizeError("measure_observable: observable, tableau and state lengths differ");
  return expectation(state, conjugate_sum(accumulated, obs));
}

namespace {

MpsState initial_state(const SimulationPlan& plan) {
  MpsState state = infinite_temperature_mps(plan.model.n_physical());
  if (plan.sweep.truncation.rel_cutoff == 0.0)
    pad_bonds(state, plan.sweep.truncation.max_bond, 0);
  else
    move_center(state, 0);
  return state;
}

}  // namespace

ThermalSimulation::ThermalSimulation(const SimulationPlan& plan, const TwoSiteCliffordCatalog* catalog)
    : plan_((plan.validate(), plan)),
      catalog_(catalog),
      h_physical_(build_model(plan.model)),
      h_(embed_on_physical_sites(h_physical_, plan.model.n_physical())),
      state_(initial_state(plan)),
      accumulated_(CliffordTableau::identity(state_.size())),
      cache_(build_right_environments(state_, h_)) {}

StepReport ThermalSimulation::step() {
  StepReport r = sweep(state_, h_, accumulated_, cache_, plan_.sweep, catalog_);
  ++steps_;
  pending_.max_discarded_weight = std::max(pending_.max_discarded_weight, r.max_discarded_weight);
  pending_.cliffords_applied += r.cliffords_applied;
  pending_.max_entropy_excess = std::max(pending_.max_entropy_excess, r.max_entropy_excess);
  pending_.wall_time += r.wall_time;
  return r;
}

ThermalRecord ThermalSimulation::measure(const SpectrumCache* oracle) {
  ThermalRecord rec = pending_;
  pending_ = ThermalRecord{};
  rec.beta = beta();
  rec.energy = internal_energy(state_, h_);
  rec.center_entropy = bond_entropy(state_, center_bond(state_.size()));
  rec.log_norm = state_.log_norm();
  if (oracle) {
    const RelativeError err = relative_error(rec.energy, thermal_energy(*oracle, rec.beta));
    rec.energy_rel_err = err.value;
    rec.abs_err_flag = err.absolute;
  }
  return rec;
}

RunResult run(const SimulationPlan& plan, const std::function<void(const ThermalRecord&)>& on_record,
              const TwoSiteCliffordCatalog* catalog) {
  plan.validate();
  RunResult result;
  auto emit = [&](ThermalRecord rec) {
    if (on_record) on_record(rec);
    result.records.push_back(std::move(rec));
  };
  try {
    ThermalSimulation sim(plan, catalog);
    std::optional<SpectrumCache> oracle;
    if (plan.oracle_compare) oracle = dense_spectrum(sim.physical_hamiltonian());
    const SpectrumCache* ref = oracle ? &*oracle : nullptr;
    emit(sim.measure(ref));
    const std::size_t n = plan.n_steps();
    for (std::size_t s = 1; s <= n; ++s) {
      sim.step();
      if (s % static_cast<std::size_t>(plan.measure_every) == 0 || s == n) emit(sim.measure(ref));
    }
  } catch (const Error& e) {
    result.truncated = true;
    result.error = e.what();
    result.failure = std::current_exception();
  }
  return result;
}

}  // namespace catdvp
