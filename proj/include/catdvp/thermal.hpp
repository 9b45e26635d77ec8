#pragma once

#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "catdvp/clifford.hpp"
#include "catdvp/ed.hpp"
#include "catdvp/mps.hpp"
#include "catdvp/pauli.hpp"
#include "catdvp/tdvp.hpp"

namespace catdvp {

enum class ModelKind { Chain1D, Rect2D };

/// Spin-1/2 Heisenberg-type models with open boundaries; S = sigma / 2, so
/// each bond contributes J/4 (XX + YY + ZZ).
struct ModelSpec {
  ModelKind kind = ModelKind::Chain1D;
  std::size_t n = 2;   // chain length
  std::size_t lx = 2;  // lattice width (Rect2D)
  std::size_t ly = 2;  // lattice height (Rect2D)
  double j1 = 1.0;
  double j2 = 0.0;     // Rect2D only

  std::size_t n_physical() const { return kind == ModelKind::Chain1D ? n : lx * ly; }
  void validate() const;
};

/// Nearest-neighbour chain: for every bond (i, i+1) the terms
/// 0.25 XX, 0.25 YY, 0.25 ZZ in that order.
WeightedPauliSum build_heisenberg_chain(std::size_t n, double j = 1.0);

/// Open lx x ly square lattice, site (x, y) -> y * lx + x. Bonds in order:
/// horizontal, vertical, then both plaquette diagonals (skipped if j2 == 0).
WeightedPauliSum build_j1j2(std::size_t lx, std::size_t ly, double j2, double j1 = 1.0);

WeightedPauliSum build_model(const ModelSpec& spec);

struct SimulationPlan {
  ModelSpec model;
  double beta_max = 1.0;
  SweepConfig sweep;
  int measure_every = 1;  // in sweeps
  bool oracle_compare = false;
  std::uint64_t seed = 0;  // unused by the deterministic engine; kept for test plans

  /// Number of sweeps; beta_max must be a multiple of delta_beta.
  std::size_t n_steps() const;
  void validate() const;
};

struct ThermalRecord {
  double beta = 0.0;
  double energy = 0.0;
  double center_entropy = 0.0;
  double max_discarded_weight = 0.0;  // since the previous record
  std::optional<double> energy_rel_err;
  bool abs_err_flag = false;  // energy_rel_err holds an absolute error
  double log_norm = 0.0;
  std::size_t cliffords_applied = 0;  // since the previous record
  double max_entropy_excess = 0.0;    // since the previous record
  double wall_time = 0.0;             // sweep time since the previous record
};

struct RunResult {
  std::vector<ThermalRecord> records;
  bool truncated = false;  // the run stopped early on an error
  std::string error;
  std::exception_ptr failure;  // the original error, for callers that classify it
};

/// <psi|h|psi> / <psi|psi>. h must be in the same Clifford frame as the state.
double internal_energy(const MpsState& state, const WeightedPauliSum& h_conjugated);

/// Rotates an original-frame observable into the current frame and measures it.
double measure_observable(const MpsState& state, const WeightedPauliSum& obs, const CliffordTableau& accumulated);

/// Purified imaginary-time evolution of one plan, one sweep at a time.
class ThermalSimulation {
 public:
  explicit ThermalSimulation(const SimulationPlan& plan, const TwoSiteCliffordCatalog* catalog = nullptr);

  const SimulationPlan& plan() const { return plan_; }
  std::size_t steps_done() const { return steps_; }
  double beta() const { return static_cast<double>(steps_) * plan_.sweep.delta_beta; }

  const MpsState& state() const { return state_; }
  /// Current-frame Hamiltonian on the purified chain.
  const WeightedPauliSum& hamiltonian() const { return h_; }
  /// Original Hamiltonian on the physical sites.
  const WeightedPauliSum& physical_hamiltonian() const { return h_physical_; }
  const CliffordTableau& accumulated() const { return accumulated_; }

  StepReport step();
  /// Energy and entropy at the current beta; the diagnostics accumulated
  /// since the previous call are attached and reset.
  ThermalRecord measure(const SpectrumCache* oracle = nullptr);

 private:
  SimulationPlan plan_;
  const TwoSiteCliffordCatalog* catalog_;
  WeightedPauliSum h_physical_;
  WeightedPauliSum h_;
  MpsState state_;
  CliffordTableau accumulated_;
  EnvironmentCache cache_;
  std::size_t steps_ = 0;
  ThermalRecord pending_;
};

/// Sweeps to beta_max, measuring at beta = 0, every measure_every sweeps and
/// at the end. On an engine error the records so far are returned with the
/// truncated marker set. `on_record` is called as each record is produced.
RunResult run(const SimulationPlan& plan, const std::function<void(const ThermalRecord&)>& on_record = {},
              const TwoSiteCliffordCatalog* catalog = nullptr);

}  // namespace catdvp
