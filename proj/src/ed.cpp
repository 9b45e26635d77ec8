#include "catdvp/ed.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace catdvp {

std::uint64_t model_hash(const WeightedPauliSum& h) {
  // FNV-1a over sizes, coefficient bits and letters
  std::uint64_t x = 1469598103934665603ull;
  auto mix = [&x](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      x ^= (v >> (8 * b)) & 0xffu;
      x *= 1099511628211ull;
    }
  };
  mix(h.n_sites());
  mix(h.size());
  for (const auto& t : h) {
    mix(std::bit_cast<std::uint64_t>(t.coefficient));
    mix(static_cast<std::uint64_t>(t.string.sign() + 1));
    for (std::size_t k = 0; k < t.string.n_sites(); ++k) mix(static_cast<std::uint64_t>(t.string[k]));
  }
  return x;
}

SpectrumCache dense_spectrum(const WeightedPauliSum& h, bool with_vectors, std::size_t cap) {
  SpectrumCache out;
  out.model_hash = model_hash(h);
  const auto options = with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  bool real = true;
  for (const auto& t : h) real = real && t.string.y_count() % 2 == 0;
  if (real) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_hamiltonian<double>(h, cap), options);
    if (es.info() != Eigen::Success) throw NumericalConsistencyError("dense_spectrum: eigensolver failed");
    out.eigenvalues = es.eigenvalues();
    if (with_vectors) out.eigenvectors = es.eigenvectors().cast<std::complex<double>>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_hamiltonian<std::complex<double>>(h, cap), options);
    if (es.info() != Eigen::Success) throw NumericalConsistencyError("dense_spectrum: eigensolver failed");
    out.eigenvalues = es.eigenvalues();
    if (with_vectors) out.eigenvectors = es.eigenvectors();
  }
  return out;
}

double thermal_energy(const SpectrumCache& spectrum, double beta) {
  const Eigen::VectorXd& e = spectrum.eigenvalues;
  if (e.size() == 0) throw SizeError("thermal_energy: empty spectrum");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error("thermal_energy: beta must be finite and nonnegative");
  const double e0 = e.minCoeff();
  const Eigen::ArrayXd w = (-beta * (e.array() - e0)).exp();
  return (w * e.array()).sum() / w.sum();
}

double partition_function(const SpectrumCache& spectrum, double beta) {
  return (-beta * spectrum.eigenvalues.array()).exp().sum();
}

Eigen::VectorXcd purified_reference(const WeightedPauliSum& h, double beta, std::size_t cap) {
  if (2 * h.n_sites() > cap)
    throw CapExceededError("purified_reference: " + std::to_string(2 * h.n_sites()) + " purified sites exceeds cap " +
                           std::to_string(cap));
  return purified_reference(dense_spectrum(h, true, cap / 2), beta, cap);
}

Eigen::VectorXcd purified_reference(const SpectrumCache& spectrum, double beta, std::size_t cap) {
  if (!spectrum.eigenvectors) throw Error("purified_reference: spectrum was computed without eigenvectors");
  const std::uint64_t dim = static_cast<std::uint64_t>(spectrum.eigenvalues.size());
  const int n = std::countr_zero(dim);
  if (dim == 0 || std::popcount(dim) != 1) throw SizeError("purified_reference: dimension is not a power of two");
  if (static_cast<std::size_t>(2 * n) > cap)
    throw CapExceededError("purified_reference: " + std::to_string(2 * n) + " purified sites exceeds cap " +
                           std::to_string(cap));

  const Eigen::MatrixXcd& v = *spectrum.eigenvectors;
  const Eigen::VectorXd half = (-0.5 * beta * spectrum.eigenvalues.array()).exp();
  const Eigen::MatrixXcd propagator = v * half.asDiagonal() * v.adjoint();

  // Psi(p, a) = propagator(p, ~a) / sqrt(2^N), interleaved as p_0 a_0 p_1 a_1 ...
  const double scale = std::pow(2.0, -0.5 * n);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim * dim));
  for (std::uint64_t p = 0; p < dim; ++p)
    for (std::uint64_t a = 0; a < dim; ++a) {
      std::uint64_t index = 0;
      for (int j = 0; j < n; ++j) {
        const std::uint64_t pb = (p >> (n - 1 - j)) & 1u;
        const std::uint64_t ab = (a >> (n - 1 - j)) & 1u;
        index = (index << 2) | (pb << 1) | ab;
      }
      psi(static_cast<Eigen::Index>(index)) =
          scale * propagator(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(~a & (dim - 1)));
    }
  return psi;
}

RelativeError relative_error(double value, double reference) {
  const double diff = std::abs(value - reference);
  if (std::abs(reference) < 1e-12) return {diff, true};
  return {diff / std::abs(reference), false};
}

std::shared_ptr<const SpectrumCache> SpectrumStore::get(const WeightedPauliSum& h, bool with_vectors) {
  const auto key = std::make_pair(model_hash(h), with_vectors);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second;
  auto entry = std::make_shared<const SpectrumCache>(dense_spectrum(h, with_vectors));
  entries_.emplace(key, entry);
  return entry;
}

}  // namespace catdvp
