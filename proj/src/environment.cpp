#include <algorithm>

#include "catdvp/errors.hpp"
#include "catdvp/tdvp.hpp"

namespace catdvp {

namespace {

using Eigen::MatrixXcd;

bool left_is_identity(const PauliString& p, std::size_t bond) {
  const auto first = p.first_support();
  return !first || *first >= bond;
}

bool right_is_identity(const PauliString& p, std::size_t bond) {
  const auto last = p.last_support();
  return !last || *last < bond;
}

// sum_s amp(s) M[s ^ x]^dagger E M[s]
MatrixXcd grow_left(const MatrixXcd& env, const SiteTensor& m, Pauli p) {
  MatrixXcd out = MatrixXcd::Zero(m.right_dim(), m.right_dim());
  const int flip = x_bit(p) ? 1 : 0;
  for (int s = 0; s < 2; ++s) out.noalias() += site_amplitude(p, s) * (m[s ^ flip].adjoint() * (env * m[s]));
  return out;
}

// sum_s amp(s) M[s] E M[s ^ x]^dagger
MatrixXcd grow_right(const MatrixXcd& env, const SiteTensor& m, Pauli p) {
  MatrixXcd out = MatrixXcd::Zero(m.left_dim(), m.left_dim());
  const int flip = x_bit(p) ? 1 : 0;
  for (int s = 0; s < 2; ++s) out.noalias() += site_amplitude(p, s) * ((m[s] * env) * m[s ^ flip].adjoint());
  return out;
}

MatrixXcd scratch_left(const MpsState& state, const PauliString& p, std::size_t bond) {
  MatrixXcd env = MatrixXcd::Ones(1, 1);
  for (std::size_t k = 0; k < bond; ++k) env = grow_left(env, state.tensor(k), p[k]);
  return env;
}

MatrixXcd scratch_right(const MpsState& state, const PauliString& p, std::size_t bond) {
  MatrixXcd env = MatrixXcd::Ones(1, 1);
  for (std::size_t k = state.size(); k-- > bond;) env = grow_right(env, state.tensor(k), p[k]);
  return env;
}

double deviation(const MatrixXcd& stored, const MatrixXcd& fresh) {
  if (stored.rows() != fresh.rows() || stored.cols() != fresh.cols()) return std::numeric_limits<double>::infinity();
  if (stored.size() == 0) return 0.0;
  return (stored - fresh).cwiseAbs().maxCoeff();
}

}  // namespace

EnvironmentCache::EnvironmentCache(std::size_t n_terms, std::size_t n_sites)
    : n_terms_(n_terms),
      n_sites_(n_sites),
      left_(n_terms * (n_sites + 1)),
      right_(n_terms * (n_sites + 1)),
      left_slot_(n_terms * (n_sites + 1), Slot::Invalid),
      right_slot_(n_terms * (n_sites + 1), Slot::Invalid) {}

std::size_t EnvironmentCache::index(std::size_t term, std::size_t bond) const {
  if (term >= n_terms_ || bond > n_sites_) throw RangeError("EnvironmentCache: slot out of range");
  return term * (n_sites_ + 1) + bond;
}

const MatrixXcd& EnvironmentCache::left(std::size_t term, std::size_t bond) const {
  const std::size_t i = index(term, bond);
  if (left_slot_[i] != Slot::Dense)
    throw InternalError("EnvironmentCache: left environment of term " + std::to_string(term) + " at bond " +
                        std::to_string(bond) + " is not stored");
  return left_[i];
}

const MatrixXcd& EnvironmentCache::right(std::size_t term, std::size_t bond) const {
  const std::size_t i = index(term, bond);
  if (right_slot_[i] != Slot::Dense)
    throw InternalError("EnvironmentCache: right environment of term " + std::to_string(term) + " at bond " +
                        std::to_string(bond) + " is not stored");
  return right_[i];
}

void EnvironmentCache::update_left(const MpsState& state, const WeightedPauliSum& h, std::size_t bond) {
  if (h.size() != n_terms_ || state.size() != n_sites_) throw SizeError("EnvironmentCache: size mismatch");
  for (std::size_t t = 0; t < n_terms_; ++t) {
    const PauliString& p = h[t].string;
    const std::size_t i = index(t, bond);
    if (left_is_identity(p, bond)) {
      left_slot_[i] = Slot::Identity;
      left_[i].resize(0, 0);
      continue;
    }
    const std::size_t prev = index(t, bond - 1);
    if (left_slot_[prev] == Slot::Invalid)
      throw InternalError("EnvironmentCache: left environment at bond " + std::to_string(bond - 1) + " is stale");
    const Index d = state.bond_dim(bond - 1);
    left_[i] = grow_left(left_slot_[prev] == Slot::Identity ? MatrixXcd(MatrixXcd::Identity(d, d)) : left_[prev],
                         state.tensor(bond - 1), p[bond - 1]);
    left_slot_[i] = Slot::Dense;
  }
}

void EnvironmentCache::update_right(const MpsState& state, const WeightedPauliSum& h, std::size_t bond) {
  if (h.size() != n_terms_ || state.size() != n_sites_) throw SizeError("EnvironmentCache: size mismatch");
  for (std::size_t t = 0; t < n_terms_; ++t) {
    const PauliString& p = h[t].string;
    const std::size_t i = index(t, bond);
    if (right_is_identity(p, bond)) {
      right_slot_[i] = Slot::Identity;
      right_[i].resize(0, 0);
      continue;
    }
    const std::size_t next = index(t, bond + 1);
    if (right_slot_[next] == Slot::Invalid)
      throw InternalError("EnvironmentCache: right environment at bond " + std::to_string(bond + 1) + " is stale");
    const Index d = state.bond_dim(bond + 1);
    right_[i] = grow_right(right_slot_[next] == Slot::Identity ? MatrixXcd(MatrixXcd::Identity(d, d)) : right_[next],
                           state.tensor(bond), p[bond]);
    right_slot_[i] = Slot::Dense;
  }
}

void EnvironmentCache::build_left(const MpsState& state, const WeightedPauliSum& h, std::size_t up_to) {
  for (std::size_t t = 0; t < n_terms_; ++t) left_slot_[index(t, 0)] = Slot::Identity;
  for (std::size_t b = 1; b <= up_to; ++b) update_left(state, h, b);
}

void EnvironmentCache::build_right(const MpsState& state, const WeightedPauliSum& h, std::size_t down_to) {
  for (std::size_t t = 0; t < n_terms_; ++t) right_slot_[index(t, n_sites_)] = Slot::Identity;
  for (std::size_t b = n_sites_; b-- > down_to;) update_right(state, h, b);
}

void EnvironmentCache::invalidate_term(std::size_t term, std::size_t k) {
  for (std::size_t b = k + 1; b <= n_sites_; ++b) left_slot_[index(term, b)] = Slot::Invalid;
  for (std::size_t b = 0; b < k + 2 && b <= n_sites_; ++b) right_slot_[index(term, b)] = Slot::Invalid;
}

void EnvironmentCache::invalidate_all() {
  std::fill(left_slot_.begin(), left_slot_.end(), Slot::Invalid);
  std::fill(right_slot_.begin(), right_slot_.end(), Slot::Invalid);
}

double EnvironmentCache::left_deviation(const MpsState& state, const WeightedPauliSum& h, std::size_t bond) const {
  double worst = 0.0;
  for (std::size_t t = 0; t < n_terms_; ++t) {
    const std::size_t i = index(t, bond);
    if (left_slot_[i] == Slot::Invalid) continue;
    const MatrixXcd fresh = scratch_left(state, h[t].string, bond);
    const Index d = state.bond_dim(bond);
    worst = std::max(worst, deviation(left_slot_[i] == Slot::Dense ? left_[i] : MatrixXcd(MatrixXcd::Identity(d, d)), fresh));
  }
  return worst;
}

double EnvironmentCache::right_deviation(const MpsState& state, const WeightedPauliSum& h, std::size_t bond) const {
  double worst = 0.0;
  for (std::size_t t = 0; t < n_terms_; ++t) {
    const std::size_t i = index(t, bond);
    if (right_slot_[i] == Slot::Invalid) continue;
    const MatrixXcd fresh = scratch_right(state, h[t].string, bond);
    const Index d = state.bond_dim(bond);
    worst = std::max(worst, deviation(right_slot_[i] == Slot::Dense ? right_[i] : MatrixXcd(MatrixXcd::Identity(d, d)), fresh));
  }
  return worst;
}

EnvironmentCache build_right_environments(const MpsState& state, const WeightedPauliSum& h) {
  if (h.n_sites() != state.size()) throw SizeError("build_right_environments: operator and state lengths differ");
  if (!state.center() || *state.center() != 0)
    throw StatePreparationError("build_right_environments: state must be canonical at site 0");
  EnvironmentCache cache(h.size(), state.size());
  cache.build_left(state, h, 0);
  cache.build_right(state, h, 1);
  return cache;
}

ProjectedOperator::ProjectedOperator(const EnvironmentCache& cache, const WeightedPauliSum& h, std::size_t first,
                                     int width)
    : width_(width), local_dim_(1 << width) {
  if (width != 1 && width != 2) throw Error("ProjectedOperator: width must be 1 or 2");
  if (h.size() != cache.n_terms() || h.n_sites() != cache.n_sites())
    throw SizeError("ProjectedOperator: cache does not match the operator");
  const std::size_t last_bond = first + static_cast<std::size_t>(width);
  if (last_bond > h.n_sites()) throw RangeError("ProjectedOperator: block out of range");

  const std::size_t n_patterns = std::size_t{1} << (2 * width);
  patterns_.resize(n_patterns);
  for (std::size_t code = 0; code < n_patterns; ++code) {
    PauliString p(static_cast<std::size_t>(width));
    for (int j = 0; j < width; ++j) p.set(static_cast<std::size_t>(j), static_cast<Pauli>((code >> (2 * j)) & 3u));
    patterns_[code] = make_pattern(p);
  }
  left_sums_.resize(n_patterns);
  right_sums_.resize(n_patterns);
  local_ = MatrixXcd::Zero(local_dim_, local_dim_);
  left_dim_ = -1;
  right_dim_ = -1;

  for (std::size_t t = 0; t < h.size(); ++t) {
    const PauliString& p = h[t].string;
    const double a = h[t].coefficient * p.sign();
    std::size_t code = 0;
    for (int j = 0; j < width; ++j) code |= static_cast<std::size_t>(p[first + static_cast<std::size_t>(j)]) << (2 * j);
    const auto ls = cache.left_slot(t, first);
    const auto rs = cache.right_slot(t, last_bond);
    if (ls == EnvironmentCache::Slot::Invalid || rs == EnvironmentCache::Slot::Invalid)
      throw InternalError("ProjectedOperator: stale environment for term " + std::to_string(t));
    const bool l_id = ls == EnvironmentCache::Slot::Identity;
    const bool r_id = rs == EnvironmentCache::Slot::Identity;
    if (!l_id) left_dim_ = cache.left(t, first).rows();
    if (!r_id) right_dim_ = cache.right(t, last_bond).rows();
    if (l_id && r_id) {
      const Pattern& pat = patterns_[code];
      for (int q = 0; q < local_dim_; ++q) local_(q ^ pat.flip, q) += a * pat.amplitude[q];
    } else if (r_id) {
      auto& sum = left_sums_[code];
      if (sum) *sum += a * cache.left(t, first);
      else sum = a * cache.left(t, first);
    } else if (l_id) {
      auto& sum = right_sums_[code];
      if (sum) *sum += a * cache.right(t, last_bond);
      else sum = a * cache.right(t, last_bond);
    } else {
      straddling_.push_back({static_cast<int>(code), a, &cache.left(t, first), &cache.right(t, last_bond)});
    }
  }
}

ProjectedOperator::Pattern ProjectedOperator::make_pattern(const PauliString& p) const {
  Pattern pat;
  for (int q = 0; q < local_dim_; ++q) {
    Complex amp = 1.0;
    int flip = 0;
    for (int j = 0; j < width_; ++j) {
      const int shift = width_ - 1 - j;  // site order is slow to fast
      const int s = (q >> shift) & 1;
      amp *= site_amplitude(p[static_cast<std::size_t>(j)], s);
      if (x_bit(p[static_cast<std::size_t>(j)])) flip |= 1 << shift;
    }
    pat.amplitude[static_cast<std::size_t>(q)] = amp;
    pat.flip = flip;
  }
  return pat;
}

MatrixXcd ProjectedOperator::apply(const MatrixXcd& block) const {
  const Index dl = block.rows();
  const Index dr = block.cols() / local_dim_;
  if ((left_dim_ >= 0 && dl != left_dim_) || (right_dim_ >= 0 && dr != right_dim_) || block.cols() % local_dim_ != 0)
    throw SizeError("ProjectedOperator: block shape does not match the environments");
  auto part = [&](const MatrixXcd& m, int q) { return m.middleCols(q * dr, dr); };

  MatrixXcd out = MatrixXcd::Zero(dl, block.cols());
  for (int p = 0; p < local_dim_; ++p)
    for (int q = 0; q < local_dim_; ++q)
      if (local_(p, q) != Complex(0.0)) out.middleCols(p * dr, dr) += local_(p, q) * part(block, q);

  for (std::size_t code = 0; code < patterns_.size(); ++code) {
    const Pattern& pat = patterns_[code];
    if (left_sums_[code]) {
      for (int q = 0; q < local_dim_; ++q)
        out.middleCols((q ^ pat.flip) * dr, dr).noalias() += pat.amplitude[q] * (*left_sums_[code] * part(block, q));
    }
    if (right_sums_[code]) {
      for (int q = 0; q < local_dim_; ++q)
        out.middleCols((q ^ pat.flip) * dr, dr).noalias() += pat.amplitude[q] * (part(block, q) * *right_sums_[code]);
    }
  }

  MatrixXcd tmp;
  for (const auto& s : straddling_) {
    const Pattern& pat = patterns_[static_cast<std::size_t>(s.pattern)];
    for (int q = 0; q < local_dim_; ++q) {
      tmp.noalias() = *s.left * part(block, q);
      out.middleCols((q ^ pat.flip) * dr, dr).noalias() += (s.coefficient * pat.amplitude[q]) * (tmp * *s.right);
    }
  }
  return out;
}

TwoSiteBlock apply_h_eff(const EnvironmentCache& cache, const WeightedPauliSum& h, std::size_t k,
                         const TwoSiteBlock& block) {
  return TwoSiteBlock{ProjectedOperator(cache, h, k, 2).apply(block.data)};
}

SiteTensor apply_k_eff(const EnvironmentCache& cache, const WeightedPauliSum& h, std::size_t k,
                       const SiteTensor& center) {
  return SiteTensor{ProjectedOperator(cache, h, k + 1, 1).apply(center.data)};
}

}  // namespace catdvp
