#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include <Eigen/Dense>

#include "catdvp/errors.hpp"
#include "catdvp/pauli.hpp"

namespace catdvp {

constexpr std::size_t kDenseSpectrumCap = 12;
constexpr std::size_t kPurifiedReferenceCap = 24;

/// Dense matrix of a Pauli sum built column by column from the basis action.
/// Scalar may be real when no term carries an odd number of Y letters.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense_hamiltonian(const WeightedPauliSum& h, std::size_t cap) {
  if (h.n_sites() > cap)
    throw CapExceededError("dense_hamiltonian: " + std::to_string(h.n_sites()) + " sites exceeds cap " +
                           std::to_string(cap));
  const std::uint64_t dim = std::uint64_t{1} << h.n_sites();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(static_cast<Eigen::Index>(dim),
                                                                  static_cast<Eigen::Index>(dim));
  for (const auto& term : h) {
    if constexpr (!Eigen::NumTraits<Scalar>::IsComplex) {
      if (term.string.y_count() % 2 != 0) throw Error("dense_hamiltonian: complex term in a real build");
    }
    for (std::uint64_t col = 0; col < dim; ++col) {
      const BasisImage img = apply_to_basis(term.string, col);
      const std::complex<double> v = term.coefficient * img.amplitude;
      if constexpr (Eigen::NumTraits<Scalar>::IsComplex)
        m(static_cast<Eigen::Index>(img.index), static_cast<Eigen::Index>(col)) += v;
      else
        m(static_cast<Eigen::Index>(img.index), static_cast<Eigen::Index>(col)) += v.real();
    }
  }
  return m;
}

/// Full eigendecomposition of a Pauli sum on physical sites.
struct SpectrumCache {
  std::uint64_t model_hash = 0;
  Eigen::VectorXd eigenvalues;                 // ascending, 2^N entries
  std::optional<Eigen::MatrixXcd> eigenvectors;  // columns match eigenvalues
};

/// Stable hash of the term list (coefficients bitwise, letters, signs).
std::uint64_t model_hash(const WeightedPauliSum& h);

SpectrumCache dense_spectrum(const WeightedPauliSum& h, bool with_vectors = false,
                             std::size_t cap = kDenseSpectrumCap);

/// sum E exp(-beta E) / sum exp(-beta E), shifted by the lowest eigenvalue.
double thermal_energy(const SpectrumCache& spectrum, double beta);
/// sum exp(-beta E) without shift (may overflow for very large beta).
double partition_function(const SpectrumCache& spectrum, double beta);

/// exp(-beta H_embedded / 2) applied to the infinite-temperature pair state,
/// as a dense vector on the 2N purified sites (site 0 most significant,
/// physical sites at even positions). `h` acts on N physical sites.
Eigen::VectorXcd purified_reference(const WeightedPauliSum& h, double beta, std::size_t cap = kPurifiedReferenceCap);
Eigen::VectorXcd purified_reference(const SpectrumCache& spectrum, double beta, std::size_t cap = kPurifiedReferenceCap);

struct RelativeError {
  double value = 0.0;
  bool absolute = false;  // reference was below 1e-12, value is |a - b|
};
RelativeError relative_error(double value, double reference);

/// Process-wide cache of spectra keyed by model hash; safe to share between
/// threads.
class SpectrumStore {
 public:
  std::shared_ptr<const SpectrumCache> get(const WeightedPauliSum& h, bool with_vectors = false);

 private:
  std::mutex mutex_;
  std::map<std::pair<std::uint64_t, bool>, std::shared_ptr<const SpectrumCache>> entries_;
};

}  // namespace catdvp
