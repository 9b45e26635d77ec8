#include "catdvp/mps.hpp"

#include <algorithm>
#include <cmath>

#include "catdvp/errors.hpp"

namespace catdvp {

namespace {

using Eigen::MatrixXcd;

void check_site(const MpsState& state, std::size_t k, const char* op) {
  if (k >= state.size()) throw RangeError(std::string(op) + ": site " + std::to_string(k) + " out of range");
}

/// E' = sum_s' amp(s') M[s' ^ x]^dagger E M[s'] for a single-site letter.
MatrixXcd transfer_left(const MatrixXcd& env, const SiteTensor& m, Pauli p) {
  MatrixXcd out = MatrixXcd::Zero(m.right_dim(), m.right_dim());
  const int flip = x_bit(p) ? 1 : 0;
  for (int s = 0; s < 2; ++s) {
    out.noalias() += site_amplitude(p, s) * (m[s ^ flip].adjoint() * (env * m[s]));
  }
  return out;
}

/// Largest bond the chain can carry at `bond` without redundancy.
Index full_bond_dim(std::size_t bond, std::size_t n_sites, Index cap) {
  const std::size_t exponent = std::min(bond, n_sites - bond);
  if (exponent >= 62) return cap;
  return std::min<Index>(cap, Index{1} << exponent);
}

/// Center at site c moves one step left using an exact SVD.
void shift_center_left(MpsState& state, std::size_t c) {
  const SiteTensor& m = state.tensor(c);
  Eigen::JacobiSVD<MatrixXcd> svd(m.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  SiteTensor right{svd.matrixV().adjoint()};
  const MatrixXcd us = svd.matrixU() * s.asDiagonal();
  const SiteTensor& prev = state.tensor(c - 1);
  SiteTensor left{MatrixXcd(prev.left_dim(), 2 * us.cols())};
  for (int q = 0; q < 2; ++q) left[q] = prev[q] * us;
  state.set_pair(c - 1, std::move(left), std::move(right));
  const double n = s.norm();
  if (n > 0) state.set_spectrum(c, s / n);
}

/// Center at site c moves one step right using an exact SVD.
void shift_center_right(MpsState& state, std::size_t c) {
  const SiteTensor& m = state.tensor(c);
  const Index dl = m.left_dim(), dr = m.right_dim();
  MatrixXcd stacked(2 * dl, dr);
  for (int q = 0; q < 2; ++q) stacked.middleRows(q * dl, dl) = m[q];
  Eigen::JacobiSVD<MatrixXcd> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const Index kept = s.size();
  SiteTensor left{MatrixXcd(dl, 2 * kept)};
  for (int q = 0; q < 2; ++q) left[q] = svd.matrixU().middleRows(q * dl, dl);
  SiteTensor right{(s.asDiagonal() * svd.matrixV().adjoint()) * state.tensor(c + 1).data};
  state.set_pair(c, std::move(left), std::move(right));
  const double n = s.norm();
  if (n > 0) state.set_spectrum(c + 1, s / n);
}

}  // namespace

MpsState::MpsState(std::vector<SiteTensor> tensors) : MpsState(tensors, {}) {}

MpsState::MpsState(std::vector<SiteTensor> tensors, std::vector<SiteRole> roles)
    : tensors_(std::move(tensors)), roles_(std::move(roles)) {
  if (tensors_.empty()) throw SizeError("MpsState: empty chain");
  if (roles_.empty()) {
    for (std::size_t k = 0; k < tensors_.size(); ++k)
      roles_.push_back(k % 2 == 0 ? SiteRole::Physical : SiteRole::Ancilla);
  }
  if (roles_.size() != tensors_.size()) throw SizeError("MpsState: role count differs from site count");
  if (tensors_.front().left_dim() != 1 || tensors_.back().right_dim() != 1)
    throw SizeError("MpsState: boundary bonds must have dimension 1");
  for (std::size_t k = 0; k < tensors_.size(); ++k) {
    if (tensors_[k].data.cols() % 2 != 0) throw SizeError("MpsState: physical dimension must be 2");
    if (k + 1 < tensors_.size() && tensors_[k].right_dim() != tensors_[k + 1].left_dim())
      throw SizeError("MpsState: bond dimension mismatch at bond " + std::to_string(k + 1));
  }
  spectra_.assign(tensors_.size() + 1, std::nullopt);
  spectra_.front() = Eigen::VectorXd::Ones(1);
  spectra_.back() = Eigen::VectorXd::Ones(1);
}

Index MpsState::bond_dim(std::size_t bond) const {
  if (bond > tensors_.size()) throw RangeError("bond index out of range");
  if (bond == 0) return 1;
  return tensors_[bond - 1].right_dim();
}

Index MpsState::max_bond_dim() const {
  Index d = 1;
  for (const auto& t : tensors_) d = std::max(d, t.right_dim());
  return d;
}

void MpsState::forget_spectra() {
  for (std::size_t b = 1; b < tensors_.size(); ++b) spectra_[b].reset();
}

void MpsState::set_tensor(std::size_t k, SiteTensor t) {
  if (k >= tensors_.size()) throw RangeError("set_tensor: site out of range");
  if (t.left_dim() != bond_dim(k) || t.right_dim() != bond_dim(k + 1))
    throw SizeError("set_tensor: bond dimensions do not match neighbours");
  tensors_[k] = std::move(t);
}

void MpsState::set_pair(std::size_t k, SiteTensor left, SiteTensor right) {
  if (k + 1 >= tensors_.size()) throw RangeError("set_pair: site out of range");
  if (left.left_dim() != bond_dim(k) || right.right_dim() != bond_dim(k + 2) ||
      left.right_dim() != right.left_dim())
    throw SizeError("set_pair: bond dimensions do not match");
  if (left.right_dim() != tensors_[k].right_dim()) spectra_[k + 1].reset();
  tensors_[k] = std::move(left);
  tensors_[k + 1] = std::move(right);
}

MpsState infinite_temperature_mps(std::size_t n_physical) {
  if (n_physical == 0) throw SizeError("infinite_temperature_mps: need at least one physical site");
  std::vector<SiteTensor> tensors;
  for (std::size_t i = 0; i < n_physical; ++i) {
    SiteTensor phys{MatrixXcd::Zero(1, 4)};
    phys[0](0, 0) = 1.0;  // up:   [1, 0]
    phys[1](0, 1) = 1.0;  // down: [0, 1]
    SiteTensor anc{MatrixXcd::Zero(2, 2)};
    anc[0](1, 0) = M_SQRT1_2;  // up:   [0, 1/sqrt2]^T
    anc[1](0, 0) = M_SQRT1_2;  // down: [1/sqrt2, 0]^T
    tensors.push_back(std::move(phys));
    tensors.push_back(std::move(anc));
  }
  MpsState state(std::move(tensors));
  state.set_center(2 * n_physical - 1);
  for (std::size_t b = 1; b < 2 * n_physical; ++b) {
    if (b % 2 == 1)
      state.set_spectrum(b, Eigen::VectorXd::Constant(2, M_SQRT1_2));
    else
      state.set_spectrum(b, Eigen::VectorXd::Ones(1));
  }
  return state;
}

double entanglement_entropy(const Eigen::Ref<const Eigen::VectorXd>& singular_values) {
  const double total = singular_values.squaredNorm();
  if (total <= 0.0) return 0.0;
  double s = 0.0;
  for (Index i = 0; i < singular_values.size(); ++i) {
    const double p = singular_values(i) * singular_values(i) / total;
    if (p > 0.0) s -= p * std::log(p);
  }
  return std::max(s, 0.0);
}

TwoSiteBlock merge(const MpsState& state, std::size_t k) {
  if (k + 1 >= state.size()) throw RangeError("merge: position " + std::to_string(k) + " out of range");
  const auto c = state.center();
  if (!c || (*c != k && *c != k + 1))
    throw StatePreparationError("merge: canonical center must be at site " + std::to_string(k) + " or " +
                                std::to_string(k + 1));
  const SiteTensor& a = state.tensor(k);
  const SiteTensor& b = state.tensor(k + 1);
  TwoSiteBlock block{MatrixXcd(a.left_dim(), 4 * b.right_dim())};
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) block[2 * s1 + s2].noalias() = a[s1] * b[s2];
  return block;
}

SplitResult split(const TwoSiteBlock& block, const TruncationPolicy& policy, CenterSide side) {
  if (policy.max_bond < 1) throw Error("TruncationPolicy: max_bond must be at least 1");
  const Index dl = block.left_dim(), dr = block.right_dim();
  MatrixXcd mat(2 * dl, 2 * dr);
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) mat.block(s1 * dl, s2 * dr, dl, dr) = block[2 * s1 + s2];

  Eigen::JacobiSVD<MatrixXcd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double total = s.squaredNorm();
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericalConsistencyError("split: zero or non-finite block");

  Index kept = s.size();
  if (policy.rel_cutoff > 0.0) {
    const double threshold = policy.rel_cutoff * s(0);
    kept = 0;
    while (kept < s.size() && s(kept) >= threshold) ++kept;
  }
  kept = std::clamp<Index>(kept, 1, std::min<Index>(policy.max_bond, s.size()));

  SplitResult out;
  const double kept_weight = s.head(kept).squaredNorm();
  out.kept_norm = std::sqrt(kept_weight);
  out.spectrum = s.head(kept) / out.kept_norm;
  out.report.kept = kept;
  out.report.discarded_weight = std::clamp(1.0 - kept_weight / total, 0.0, 1.0);
  out.report.entropy = entanglement_entropy(out.spectrum);

  MatrixXcd u = svd.matrixU().leftCols(kept);
  MatrixXcd vh = svd.matrixV().leftCols(kept).adjoint();
  if (side == CenterSide::Right)
    vh = out.spectrum.asDiagonal() * vh;
  else
    u = u * out.spectrum.asDiagonal();

  out.left.data.resize(dl, 2 * kept);
  for (int s1 = 0; s1 < 2; ++s1) out.left[s1] = u.middleRows(s1 * dl, dl);
  out.right.data = std::move(vh);
  return out;
}

SvdReport update_pair(MpsState& state, std::size_t k, const TwoSiteBlock& block, const TruncationPolicy& policy,
                      CenterSide side) {
  SplitResult r = split(block, policy, side);
  state.set_pair(k, std::move(r.left), std::move(r.right));
  state.set_spectrum(k + 1, std::move(r.spectrum));
  state.add_log_norm(std::log(r.kept_norm));
  state.set_center(side == CenterSide::Right ? k + 1 : k);
  return r.report;
}

TwoSiteBlock apply_two_site_unitary(const TwoSiteBlock& block, const Eigen::Matrix4cd& u) {
  if ((u * u.adjoint() - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw NumericalConsistencyError("apply_two_site_unitary: matrix is not unitary");
  TwoSiteBlock out{MatrixXcd::Zero(block.left_dim(), block.data.cols())};
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      if (u(p, q) != Complex(0.0)) out[p] += u(p, q) * block[q];
  return out;
}

std::complex<double> overlap(const MpsState& bra, const MpsState& ket) {
  if (bra.size() != ket.size()) throw SizeError("overlap: chains of different length");
  MatrixXcd env = MatrixXcd::Ones(1, 1);
  for (std::size_t k = 0; k < ket.size(); ++k) {
    const SiteTensor& a = bra.tensor(k);
    const SiteTensor& b = ket.tensor(k);
    MatrixXcd next = MatrixXcd::Zero(a.right_dim(), b.right_dim());
    for (int s = 0; s < 2; ++s) next.noalias() += a[s].adjoint() * (env * b[s]);
    env = std::move(next);
  }
  return env(0, 0);
}

double norm_squared(const MpsState& state) { return overlap(state, state).real(); }

double expectation(const MpsState& state, const WeightedPauliSum& h) {
  if (h.n_sites() != state.size())
    throw SizeError("expectation: operator on " + std::to_string(h.n_sites()) + " sites, state on " +
                    std::to_string(state.size()));
  const double norm2 = norm_squared(state);
  if (!(norm2 > 0.0)) throw NumericalConsistencyError("expectation: state has zero norm");
  Complex total = 0.0;
  for (const auto& term : h) {
    MatrixXcd env = MatrixXcd::Ones(1, 1);
    for (std::size_t k = 0; k < state.size(); ++k) env = transfer_left(env, state.tensor(k), term.string[k]);
    total += term.coefficient * static_cast<double>(term.string.sign()) * env(0, 0);
  }
  total /= norm2;
  if (std::abs(total.imag()) > 1e-10 * std::max(1.0, h.coefficient_l1_norm()))
    throw NumericalConsistencyError("expectation: imaginary residue " + std::to_string(total.imag()));
  return total.real();
}

double bond_entropy(const MpsState& state, std::size_t bond) {
  if (bond > state.size()) throw RangeError("bond_entropy: bond out of range");
  const auto& s = state.spectrum(bond);
  if (!s) throw StatePreparationError("bond_entropy: spectrum at bond " + std::to_string(bond) + " is not known");
  return entanglement_entropy(*s);
}

void move_center(MpsState& state, std::size_t target) {
  check_site(state, target, "move_center");
  if (!state.center()) throw StatePreparationError("move_center: state has no canonical center");
  std::size_t c = *state.center();
  while (c > target) shift_center_left(state, c--);
  while (c < target) shift_center_right(state, c++);
  state.set_center(c);
}

void canonicalize(MpsState& state, std::size_t target) {
  check_site(state, target, "canonicalize");
  for (std::size_t c = 0; c + 1 < state.size(); ++c) shift_center_right(state, c);
  state.set_center(state.size() - 1);
  move_center(state, 0);
  move_center(state, target);
}

void normalize(MpsState& state) {
  if (!state.center()) throw StatePreparationError("normalize: state has no canonical center");
  const std::size_t c = *state.center();
  SiteTensor t = state.tensor(c);
  const double n = t.data.norm();
  if (!(n > 0.0)) throw NumericalConsistencyError("normalize: zero state");
  t.data /= n;
  state.set_tensor(c, std::move(t));
  state.add_log_norm(std::log(n));
}

void pad_bonds(MpsState& state, Index max_bond, std::size_t target) {
  check_site(state, target, "pad_bonds");
  const std::size_t n = state.size();
  std::vector<SiteTensor> tensors;
  for (std::size_t k = 0; k < n; ++k) tensors.push_back(state.tensor(k));
  std::vector<Index> dims(n + 1, 1);
  for (std::size_t b = 1; b < n; ++b) dims[b] = std::max(state.bond_dim(b), full_bond_dim(b, n, max_bond));
  for (std::size_t k = 0; k < n; ++k) {
    const SiteTensor& old = tensors[k];
    SiteTensor grown{MatrixXcd::Zero(dims[k], 2 * dims[k + 1])};
    for (int s = 0; s < 2; ++s) grown[s].topLeftCorner(old.left_dim(), old.right_dim()) = old[s];
    tensors[k] = std::move(grown);
  }
  const double log_norm = state.log_norm();
  MpsState padded(std::move(tensors), state.roles());
  padded.set_log_norm(log_norm);
  canonicalize(padded, target);
  state = std::move(padded);
}

double left_isometry_error(const SiteTensor& t) {
  MatrixXcd g = MatrixXcd::Zero(t.right_dim(), t.right_dim());
  for (int s = 0; s < 2; ++s) g.noalias() += t[s].adjoint() * t[s];
  g -= MatrixXcd::Identity(t.right_dim(), t.right_dim());
  return g.cwiseAbs().maxCoeff();
}

double right_isometry_error(const SiteTensor& t) {
  MatrixXcd g = MatrixXcd::Zero(t.left_dim(), t.left_dim());
  for (int s = 0; s < 2; ++s) g.noalias() += t[s] * t[s].adjoint();
  g -= MatrixXcd::Identity(t.left_dim(), t.left_dim());
  return g.cwiseAbs().maxCoeff();
}

bool is_canonical(const MpsState& state, double tol) {
  if (!state.center()) return false;
  const std::size_t c = *state.center();
  for (std::size_t k = 0; k < c; ++k)
    if (left_isometry_error(state.tensor(k)) > tol) return false;
  for (std::size_t k = c + 1; k < state.size(); ++k)
    if (right_isometry_error(state.tensor(k)) > tol) return false;
  return true;
}

Eigen::VectorXcd to_statevector(const MpsState& state, std::size_t cap) {
  if (state.size() > cap)
    throw CapExceededError("to_statevector: " + std::to_string(state.size()) + " sites exceeds cap " +
                           std::to_string(cap));
  MatrixXcd psi = MatrixXcd::Ones(1, 1);  // rows: basis prefix, cols: open bond
  for (std::size_t k = 0; k < state.size(); ++k) {
    const SiteTensor& m = state.tensor(k);
    MatrixXcd next(psi.rows() * 2, m.right_dim());
    for (int s = 0; s < 2; ++s) {
      const MatrixXcd part = psi * m[s];
      for (Index r = 0; r < psi.rows(); ++r) next.row(2 * r + s) = part.row(r);
    }
    psi = std::move(next);
  }
  return psi.col(0);
}

}  // namespace catdvp
