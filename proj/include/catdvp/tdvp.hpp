#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "catdvp/clifford.hpp"
#include "catdvp/krylov.hpp"
#include "catdvp/mps.hpp"
#include "catdvp/pauli.hpp"

namespace catdvp {

/// Per-term left and right environments. left(i, b) contracts sites
/// [0, b) with the letters of term i and is indexed (bra, ket); right(i, b)
/// contracts sites [b, n) and is indexed (ket, bra). A slot is Identity when
/// the term is the identity on that side and the gauge makes the contraction
/// the identity matrix, so it is never stored.
class EnvironmentCache {
 public:
  enum class Slot : std::uint8_t { Invalid, Identity, Dense };

  EnvironmentCache() = default;
  EnvironmentCache(std::size_t n_terms, std::size_t n_sites);

  std::size_t n_terms() const { return n_terms_; }
  std::size_t n_sites() const { return n_sites_; }

  Slot left_slot(std::size_t term, std::size_t bond) const { return left_slot_.at(index(term, bond)); }
  Slot right_slot(std::size_t term, std::size_t bond) const { return right_slot_.at(index(term, bond)); }
  /// Throws InternalError for an invalid slot.
  const Eigen::MatrixXcd& left(std::size_t term, std::size_t bond) const;
  const Eigen::MatrixXcd& right(std::size_t term, std::size_t bond) const;

  /// left(., b) for every term from left(., b-1) and site b-1; left(., 0) is 1.
  void update_left(const MpsState& state, const WeightedPauliSum& h, std::size_t bond);
  /// right(., b) for every term from right(., b+1) and site b; right(., n) is 1.
  void update_right(const MpsState& state, const WeightedPauliSum& h, std::size_t bond);

  /// Left slots for bonds [0, up_to]; needs sites before up_to left-isometric.
  void build_left(const MpsState& state, const WeightedPauliSum& h, std::size_t up_to);
  /// Right slots for bonds [down_to, n]; needs sites from down_to right-isometric.
  void build_right(const MpsState& state, const WeightedPauliSum& h, std::size_t down_to);

  /// After term `term` changed on sites (k, k+1): left slots at bonds > k
  /// and right slots at bonds < k+2 no longer describe it.
  void invalidate_term(std::size_t term, std::size_t k);
  void invalidate_all();

  /// Largest entrywise deviation between a valid slot and the same
  /// contraction done from scratch (identity slots compare with 1).
  double left_deviation(const MpsState& state, const WeightedPauliSum& h, std::size_t bond) const;
  double right_deviation(const MpsState& state, const WeightedPauliSum& h, std::size_t bond) const;

 private:
  std::size_t index(std::size_t term, std::size_t bond) const;

  std::size_t n_terms_ = 0;
  std::size_t n_sites_ = 0;
  std::vector<Eigen::MatrixXcd> left_, right_;
  std::vector<Slot> left_slot_, right_slot_;
};

/// Right environments for every bond, for a state canonical at site 0.
EnvironmentCache build_right_environments(const MpsState& state, const WeightedPauliSum& h);

/// Projection of h onto the variational space of `width` (1 or 2) sites
/// starting at `first`, using left(., first) and right(., first + width).
/// Terms are grouped once at construction: purely local terms become one
/// small dense operator, terms with only one nontrivial environment are
/// summed per local letter pattern, the rest are kept individually.
class ProjectedOperator {
 public:
  ProjectedOperator(const EnvironmentCache& cache, const WeightedPauliSum& h, std::size_t first, int width);

  int width() const { return width_; }
  Index left_dim() const { return left_dim_; }
  Index right_dim() const { return right_dim_; }
  /// Block layout: left_dim x (2^width * right_dim), local index slow-to-fast
  /// in site order.
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& block) const;

 private:
  struct Pattern {
    int flip = 0;                           // xor mask on the local index
    std::array<Complex, 4> amplitude{};     // per local index q
  };
  struct Straddling {
    int pattern;
    double coefficient;
    const Eigen::MatrixXcd* left;
    const Eigen::MatrixXcd* right;
  };

  Pattern make_pattern(const PauliString& p) const;

  int width_;
  int local_dim_;
  Index left_dim_, right_dim_;
  std::vector<Pattern> patterns_;  // indexed by local letter code
  Eigen::MatrixXcd local_;
  std::vector<std::optional<Eigen::MatrixXcd>> left_sums_, right_sums_;
  std::vector<Straddling> straddling_;
};

/// H_eff on the merged block of sites (k, k+1).
TwoSiteBlock apply_h_eff(const EnvironmentCache& cache, const WeightedPauliSum& h, std::size_t k,
                         const TwoSiteBlock& block);
/// K_eff on the center tensor at site k+1, between bonds k+1 and k+2.
SiteTensor apply_k_eff(const EnvironmentCache& cache, const WeightedPauliSum& h, std::size_t k,
                       const SiteTensor& center);

enum class CliffordSearch { Exhaustive720, LocalClassReduced };
enum class DisentangleCost { Entropy, TruncationWeight };
enum class SweepDirection { LeftToRight, Symmetric };

struct SweepConfig {
  double delta_beta = 0.05;
  TruncationPolicy truncation;
  int krylov_max_dim = 25;
  double krylov_tol = 1e-10;
  bool clifford_enabled = false;
  CliffordSearch clifford_search = CliffordSearch::Exhaustive720;
  DisentangleCost cost = DisentangleCost::Entropy;
  SweepDirection direction = SweepDirection::LeftToRight;
  /// Test aid: compare the environments used at every step with a fresh
  /// contraction and report the worst deviation.
  bool verify_environments = false;

  void validate() const;
};

struct DisentangleResult {
  std::size_t index = 0;  // catalog index of the chosen entry
  TwoSiteBlock block;     // transformed block
  SvdReport report;       // untruncated spectrum of the transformed block
  double cost = 0.0;
  double identity_cost = 0.0;
  double identity_entropy = 0.0;
};

/// Tries catalog entries on the block and keeps the one with the lowest cost
/// (ties within 1e-12 go to the lowest index, so the identity wins exact
/// ties). LocalClassReduced tries one entry per local-equivalence class,
/// which gives the same choice for either cost because both depend only on
/// the spectrum; catalogs without class data are searched exhaustively.
DisentangleResult disentangle(const TwoSiteBlock& block, const TwoSiteCliffordCatalog& catalog,
                              const TruncationPolicy& policy, DisentangleCost cost = DisentangleCost::Entropy,
                              CliffordSearch search = CliffordSearch::Exhaustive720);

struct StepReport {
  double max_discarded_weight = 0.0;
  double center_entropy = 0.0;
  std::size_t cliffords_applied = 0;  // non-identity entries applied
  double wall_time = 0.0;             // seconds
  /// max over steps of (chosen entropy - identity entropy); never positive
  /// beyond round-off.
  double max_entropy_excess = -std::numeric_limits<double>::infinity();
  int max_krylov_dim = 0;
  double max_env_deviation = 0.0;  // only with verify_environments
};

/// One imaginary-time step of delta_beta / 2 on the purified state, i.e.
/// |psi> -> exp(-delta_beta H / 2)|psi> in the projected sense.
/// State: canonical at site 0, cache holding right environments for h (as
/// after build_right_environments or a previous sweep). On return the state
/// is again canonical at 0 with every bond spectrum recorded, the cache is
/// rebuilt for the returned h, and `accumulated` includes every applied
/// disentangler. With `catalog` null the standard catalog is used.
StepReport sweep(MpsState& state, WeightedPauliSum& h, CliffordTableau& accumulated, EnvironmentCache& cache,
                 const SweepConfig& cfg, const TwoSiteCliffordCatalog* catalog = nullptr);

/// Center-bond index of a chain of n sites.
inline std::size_t center_bond(std::size_t n_sites) { return n_sites / 2; }

}  // namespace catdvp
