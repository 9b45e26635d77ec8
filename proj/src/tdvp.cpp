#include "catdvp/tdvp.hpp"

#include <algorithm>
#include <cmath>

#include "catdvp/errors.hpp"

namespace catdvp {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// Squared singular values of the block across the pair bond after rotation
/// by u, from whichever reduced density matrix is smaller. The Gram blocks
/// are shared between candidates.
class BlockSpectra {
 public:
  explicit BlockSpectra(const TwoSiteBlock& block) {
    const Index dl = block.left_dim(), dr = block.right_dim();
    use_left_ = dl <= dr;
    dim_ = use_left_ ? dl : dr;
    for (int q = 0; q < 4; ++q)
      for (int r = 0; r < 4; ++r)
        gram_[q][r] = use_left_ ? MatrixXcd(block[q] * block[r].adjoint()) : MatrixXcd(block[q].adjoint() * block[r]);
  }

  Eigen::VectorXd operator()(const Eigen::Matrix4cd& u) const {
    MatrixXcd rho = MatrixXcd::Zero(2 * dim_, 2 * dim_);
    // lower block triangle only; the solver reads the lower half
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t <= s; ++t) {
        auto target = rho.block(s * dim_, t * dim_, dim_, dim_);
        for (int q = 0; q < 4; ++q)
          for (int r = 0; r < 4; ++r) {
            Complex c = 0.0;
            for (int o = 0; o < 2; ++o) {
              if (use_left_)
                c += u(2 * s + o, q) * std::conj(u(2 * t + o, r));
              else
                c += std::conj(u(2 * o + s, q)) * u(2 * o + t, r);
            }
            if (std::abs(c) < 1e-15) continue;
            target += c * gram_[q][r];
          }
      }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
    std::sort(w.data(), w.data() + w.size(), std::greater<double>());
    return w;
  }

 private:
  bool use_left_;
  Index dim_;
  MatrixXcd gram_[4][4];
};

double entropy_of_weights(const Eigen::VectorXd& w) {
  const double total = w.sum();
  if (!(total > 0.0)) return 0.0;
  double s = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    const double p = w(i) / total;
    if (p > 0.0) s -= p * std::log(p);
  }
  return std::max(s, 0.0);
}

double truncation_weight(const Eigen::VectorXd& w, const TruncationPolicy& policy) {
  const double total = w.sum();
  if (!(total > 0.0)) return 0.0;
  Index kept = w.size();
  if (policy.rel_cutoff > 0.0) {
    const double threshold = policy.rel_cutoff * std::sqrt(w(0));
    kept = 0;
    while (kept < w.size() && std::sqrt(w(kept)) >= threshold) ++kept;
  }
  kept = std::clamp<Index>(kept, 1, std::min<Index>(policy.max_bond, w.size()));
  return std::clamp(w.tail(w.size() - kept).sum() / total, 0.0, 1.0);
}

VectorXcd flatten(const MatrixXcd& m) { return Eigen::Map<const VectorXcd>(m.data(), m.size()); }

MatrixXcd unflatten(const VectorXcd& v, Index rows) {
  return Eigen::Map<const MatrixXcd>(v.data(), rows, v.size() / rows);
}

MatrixXcd evolve(const ProjectedOperator& op, const MatrixXcd& block, double tau, int sign, const SweepConfig& cfg,
                 StepReport& report) {
  const Index rows = block.rows();
  auto apply = [&](const VectorXcd& v) { return flatten(op.apply(unflatten(v, rows))); };
  KrylovInfo info;
  const VectorXcd out =
      krylov_evolve<Complex>(apply, flatten(block), tau, sign, KrylovOptions{cfg.krylov_max_dim, cfg.krylov_tol}, &info);
  report.max_krylov_dim = std::max(report.max_krylov_dim, info.dim);
  return unflatten(out, rows);
}

struct SweepContext {
  MpsState& state;
  WeightedPauliSum& h;
  CliffordTableau& accumulated;
  EnvironmentCache& cache;
  const SweepConfig& cfg;
  const TwoSiteCliffordCatalog& catalog;
  StepReport& report;
};

/// Evolution, optional disentangling and splitting of the block at (k, k+1).
void update_block(SweepContext& c, std::size_t k, double tau, CenterSide side) {
  if (c.cfg.verify_environments) {
    c.report.max_env_deviation = std::max({c.report.max_env_deviation, c.cache.left_deviation(c.state, c.h, k),
                                           c.cache.right_deviation(c.state, c.h, k + 2)});
  }
  TwoSiteBlock block = merge(c.state, k);
  block.data = evolve(ProjectedOperator(c.cache, c.h, k, 2), block.data, tau, -1, c.cfg, c.report);

  if (c.cfg.clifford_enabled) {
    DisentangleResult best =
        disentangle(block, c.catalog, c.cfg.truncation, c.cfg.cost, c.cfg.clifford_search);
    c.report.max_entropy_excess =
        std::max(c.report.max_entropy_excess, best.report.entropy - best.identity_entropy);
    if (!c.catalog[best.index].is_identity()) {
      block = std::move(best.block);
      std::vector<std::size_t> changed;
      c.h = conjugate_sum(c.catalog.table(best.index), k, c.h, &changed);
      for (std::size_t t : changed) c.cache.invalidate_term(t, k);
      c.accumulated = compose_local(c.catalog[best.index], k, c.accumulated);
      ++c.report.cliffords_applied;
    }
  }

  const SvdReport svd = update_pair(c.state, k, block, c.cfg.truncation, side);
  c.report.max_discarded_weight = std::max(c.report.max_discarded_weight, svd.discarded_weight);
}

void left_to_right(SweepContext& c, double tau) {
  const std::size_t n = c.state.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    update_block(c, k, tau, CenterSide::Right);
    c.cache.update_left(c.state, c.h, k + 1);
    if (k + 2 < n) {
      SiteTensor center = c.state.tensor(k + 1);
      center.data = evolve(ProjectedOperator(c.cache, c.h, k + 1, 1), center.data, tau, +1, c.cfg, c.report);
      c.state.set_tensor(k + 1, std::move(center));
    }
  }
}

void right_to_left(SweepContext& c, double tau) {
  const std::size_t n = c.state.size();
  for (std::size_t k = n - 1; k-- > 0;) {
    update_block(c, k, tau, CenterSide::Left);
    c.cache.update_right(c.state, c.h, k + 1);
    if (k > 0) {
      SiteTensor center = c.state.tensor(k);
      center.data = evolve(ProjectedOperator(c.cache, c.h, k, 1), center.data, tau, +1, c.cfg, c.report);
      c.state.set_tensor(k, std::move(center));
    }
  }
}

void rebuild_for_left_start(EnvironmentCache& cache, const MpsState& state, const WeightedPauliSum& h) {
  cache.invalidate_all();
  cache.build_left(state, h, 0);
  cache.build_right(state, h, 1);
}

}  // namespace

void SweepConfig::validate() const {
  if (!(delta_beta > 0.0) || !std::isfinite(delta_beta)) throw ValidationError("sweep: delta_beta must be positive");
  if (truncation.max_bond < 1) throw ValidationError("sweep: max_bond must be at least 1");
  if (!(truncation.rel_cutoff >= 0.0)) throw ValidationError("sweep: rel_cutoff must be nonnegative");
  if (krylov_max_dim < 1) throw ValidationError("sweep: krylov_max_dim must be positive");
  if (!(krylov_tol > 0.0)) throw ValidationError("sweep: krylov_tol must be positive");
}

DisentangleResult disentangle(const TwoSiteBlock& block, const TwoSiteCliffordCatalog& catalog,
                              const TruncationPolicy& policy, DisentangleCost cost, CliffordSearch search) {
  if (catalog.size() == 0) throw Error("disentangle: empty catalog");
  const BlockSpectra spectra(block);
  auto cost_of = [&](const Eigen::VectorXd& w) {
    return cost == DisentangleCost::Entropy ? entropy_of_weights(w) : truncation_weight(w, policy);
  };

  const Eigen::VectorXd identity_weights = spectra(Eigen::Matrix4cd::Identity());
  DisentangleResult result;
  result.identity_entropy = entropy_of_weights(identity_weights);
  result.identity_cost = cost_of(identity_weights);

  std::vector<std::size_t> candidates;
  if (search == CliffordSearch::LocalClassReduced && catalog.has_local_classes()) {
    candidates = catalog.representatives();
  } else {
    candidates.resize(catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i) candidates[i] = i;
  }

  std::vector<double> costs(candidates.size());
  std::vector<double> entropies(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Eigen::VectorXd w = spectra(catalog.unitary(candidates[c]));
    costs[c] = cost_of(w);
    entropies[c] = entropy_of_weights(w);
  }
  const double lowest = *std::min_element(costs.begin(), costs.end());
  std::size_t pick = candidates.size();
  for (std::size_t c = 0; c < candidates.size(); ++c)
    if (costs[c] <= lowest + 1e-12 && (pick == candidates.size() || candidates[c] < candidates[pick])) pick = c;

  result.index = candidates[pick];
  result.cost = costs[pick];
  result.block = apply_two_site_unitary(block, catalog.unitary(result.index));
  result.report.entropy = entropies[pick];
  result.report.kept = std::min(2 * block.left_dim(), 2 * block.right_dim());
  result.report.discarded_weight = 0.0;
  return result;
}

StepReport sweep(MpsState& state, WeightedPauliSum& h, CliffordTableau& accumulated, EnvironmentCache& cache,
                 const SweepConfig& cfg, const TwoSiteCliffordCatalog* catalog) {
  cfg.validate();
  const std::size_t n = state.size();
  if (n < 2) throw SizeError("sweep: need at least two sites");
  if (h.n_sites() != n || accumulated.n_sites() != n) throw SizeError("sweep: operator, tableau and state lengths differ");
  if (cache.n_terms() != h.size() || cache.n_sites() != n)
    throw InternalError("sweep: environment cache was built for a different operator");
  if (!state.center() || *state.center() != 0) throw StatePreparationError("sweep: state must be canonical at site 0");

  const auto start = std::chrono::steady_clock::now();
  StepReport report;
  SweepContext ctx{state, h, accumulated, cache, cfg, catalog ? *catalog : TwoSiteCliffordCatalog::standard(), report};

  if (cfg.direction == SweepDirection::LeftToRight) {
    left_to_right(ctx, cfg.delta_beta / 2);
    move_center(state, 0);
  } else {
    left_to_right(ctx, cfg.delta_beta / 4);
    cache.invalidate_all();
    cache.build_left(state, h, n - 1);
    cache.build_right(state, h, n);
    right_to_left(ctx, cfg.delta_beta / 4);
  }
  rebuild_for_left_start(cache, state, h);

  report.center_entropy = bond_entropy(state, center_bond(n));
  if (!cfg.clifford_enabled) report.max_entropy_excess = 0.0;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace catdvp
