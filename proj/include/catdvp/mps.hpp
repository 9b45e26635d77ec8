#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catdvp/pauli.hpp"

namespace catdvp {

using Index = Eigen::Index;
using Complex = std::complex<double>;

enum class SiteRole { Physical, Ancilla };

/// M^{s} for s in {0 (up), 1 (down)}, stored side by side as a
/// left_dim x (2 * right_dim) matrix: columns [s * right_dim, (s+1) * right_dim).
struct SiteTensor {
  static constexpr Index kPhysDim = 2;

  Eigen::MatrixXcd data;

  Index left_dim() const { return data.rows(); }
  Index right_dim() const { return data.cols() / kPhysDim; }
  auto operator[](Index s) { return data.middleCols(s * right_dim(), right_dim()); }
  auto operator[](Index s) const { return data.middleCols(s * right_dim(), right_dim()); }
};

/// Merged tensor of two neighbouring sites (k, k+1): left_dim x (4 * right_dim)
/// with physical pair index p = 2 * s_k + s_{k+1} (site k is the slow index).
struct TwoSiteBlock {
  static constexpr Index kPairDim = 4;

  Eigen::MatrixXcd data;

  Index left_dim() const { return data.rows(); }
  Index right_dim() const { return data.cols() / kPairDim; }
  auto operator[](Index p) { return data.middleCols(p * right_dim(), right_dim()); }
  auto operator[](Index p) const { return data.middleCols(p * right_dim(), right_dim()); }
  double norm() const { return data.norm(); }
};

struct TruncationPolicy {
  Index max_bond = 64;
  /// Singular values below rel_cutoff * (largest) are dropped. Zero keeps
  /// every value, including exact zeros, up to max_bond.
  double rel_cutoff = 1e-10;
};

struct SvdReport {
  Index kept = 0;
  double discarded_weight = 0.0;  // dropped s^2 over total s^2
  double entropy = 0.0;           // von Neumann entropy of the kept, renormalized spectrum
};

/// Matrix product state on a chain of sites with alternating physical and
/// ancilla roles. Bonds are numbered by the count of sites to their left, so
/// bond b sits between sites b-1 and b; bonds 0 and size() are the trivial
/// boundaries.
class MpsState {
 public:
  /// Roles default to Physical on even (0-based) positions, Ancilla on odd.
  explicit MpsState(std::vector<SiteTensor> tensors);
  MpsState(std::vector<SiteTensor> tensors, std::vector<SiteRole> roles);

  std::size_t size() const { return tensors_.size(); }
  const SiteTensor& tensor(std::size_t k) const { return tensors_.at(k); }
  SiteRole role(std::size_t k) const { return roles_.at(k); }
  const std::vector<SiteRole>& roles() const { return roles_; }
  Index bond_dim(std::size_t bond) const;
  Index max_bond_dim() const;

  std::optional<std::size_t> center() const { return center_; }
  void set_center(std::optional<std::size_t> c) { center_ = c; }

  /// Normalized Schmidt values at a bond, when known.
  const std::optional<Eigen::VectorXd>& spectrum(std::size_t bond) const { return spectra_.at(bond); }
  void set_spectrum(std::size_t bond, Eigen::VectorXd s) { spectra_.at(bond) = std::move(s); }
  void forget_spectra();

  /// Accumulated log of normalization factors stripped from the state.
  double log_norm() const { return log_norm_; }
  void add_log_norm(double delta) { log_norm_ += delta; }
  void set_log_norm(double v) { log_norm_ = v; }

  /// Replaces one tensor. Bond dimensions must stay consistent.
  void set_tensor(std::size_t k, SiteTensor t);
  /// Replaces sites k and k+1 together (their shared bond may change size).
  void set_pair(std::size_t k, SiteTensor left, SiteTensor right);

 private:
  std::vector<SiteTensor> tensors_;
  std::vector<SiteRole> roles_;
  std::optional<std::size_t> center_;
  std::vector<std::optional<Eigen::VectorXd>> spectra_;
  double log_norm_ = 0.0;
};

/// The purified infinite-temperature state on 2 * n_physical sites with
/// M^up_{2i-1} = [1, 0], M^down_{2i-1} = [0, 1], M^up_{2i} = [0, 1/sqrt2]^T,
/// M^down_{2i} = [1/sqrt2, 0]^T (1-based positions). Every tensor is
/// left-isometric, so the canonical center is the last site; the Schmidt
/// spectra are filled in analytically.
MpsState infinite_temperature_mps(std::size_t n_physical);

/// -sum s^2 ln s^2 over the spectrum normalized to unit square sum.
double entanglement_entropy(const Eigen::Ref<const Eigen::VectorXd>& singular_values);

/// Contracts sites k and k+1. Requires the center at k or k+1.
TwoSiteBlock merge(const MpsState& state, std::size_t k);

enum class CenterSide { Left, Right };

struct SplitResult {
  SiteTensor left;
  SiteTensor right;
  Eigen::VectorXd spectrum;  // kept values, renormalized
  double kept_norm = 0.0;    // norm of the kept part before renormalization
  SvdReport report;
};

/// Truncated SVD across the pair bond. With CenterSide::Right the left tensor
/// is left-isometric and the singular values go into the right tensor, and
/// vice versa. The kept spectrum is renormalized to unit square sum.
SplitResult split(const TwoSiteBlock& block, const TruncationPolicy& policy, CenterSide side = CenterSide::Right);

/// Splits `block` into sites (k, k+1) of the state, moves the center to the
/// side given, records the bond spectrum and accumulates log(kept_norm).
SvdReport update_pair(MpsState& state, std::size_t k, const TwoSiteBlock& block, const TruncationPolicy& policy,
                      CenterSide side);

/// Rotates the pair index by U (4x4, unitary to 1e-10).
TwoSiteBlock apply_two_site_unitary(const TwoSiteBlock& block, const Eigen::Matrix4cd& u);

/// <psi|h|psi> / <psi|psi>. Works for any gauge.
double expectation(const MpsState& state, const WeightedPauliSum& h);

std::complex<double> overlap(const MpsState& bra, const MpsState& ket);
double norm_squared(const MpsState& state);

/// Entropy at `bond` from the stored spectrum.
double bond_entropy(const MpsState& state, std::size_t bond);

/// Moves the canonical center with exact (untruncated) SVDs, recording the
/// spectrum of every bond crossed.
void move_center(MpsState& state, std::size_t target);

/// Brings an arbitrary state into mixed canonical form at `target` with all
/// bond spectra recorded. The norm stays in the center tensor.
void canonicalize(MpsState& state, std::size_t target);

/// Moves the norm of the center tensor into log_norm.
void normalize(MpsState& state);

/// Grows every bond to min(max_bond, 2^b, 2^(L-b)) without changing the
/// state: zero padding, then re-canonicalization with orthonormal
/// completions. The center ends at `target`.
void pad_bonds(MpsState& state, Index max_bond, std::size_t target);

/// max |A^dagger A - 1| (left) or |B B^dagger - 1| (right).
double left_isometry_error(const SiteTensor& t);
double right_isometry_error(const SiteTensor& t);
/// True when tensors left of the center are left-isometric and those right
/// of it right-isometric, to `tol`.
bool is_canonical(const MpsState& state, double tol = 1e-10);

/// Dense statevector (site 0 = most significant bit), up to `cap` sites.
Eigen::VectorXcd to_statevector(const MpsState& state, std::size_t cap = 24);

/// Snapshot container: JSON with format tag and version, shapes, roles,
/// center, log_norm, spectra and tensor entries at full double precision.
std::string save_snapshot(const MpsState& state);
MpsState load_snapshot(const std::string& text);

}  // namespace catdvp
