#pragma once

// Test-only dense constructions. Nothing here reuses the library's
// contraction or basis-action code, so comparisons against it are
// independent checks.

#include <complex>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "catdvp/mps.hpp"
#include "catdvp/pauli.hpp"

namespace oracle {

using cd = std::complex<double>;

inline Eigen::Matrix2cd single_site(char letter) {
  Eigen::Matrix2cd m;
  switch (letter) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cd(0, -1), cd(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m.setIdentity(); break;
  }
  return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Kronecker product of letter matrices times the sign.
inline Eigen::MatrixXcd kron_pauli(const catdvp::PauliString& p) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  const std::string letters = p.letters();
  for (char c : letters) m = kron(m, single_site(c));
  return static_cast<double>(p.sign()) * m;
}

inline Eigen::MatrixXcd kron_sum(const catdvp::WeightedPauliSum& h) {
  const Eigen::Index dim = Eigen::Index{1} << h.n_sites();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h) m += t.coefficient * kron_pauli(t.string);
  return m;
}

inline catdvp::PauliString random_pauli(std::size_t n, std::mt19937_64& rng, bool random_sign = true) {
  std::uniform_int_distribution<int> letter(0, 3), coin(0, 1);
  catdvp::PauliString p(n);
  for (std::size_t k = 0; k < n; ++k) p.set(k, static_cast<catdvp::Pauli>(letter(rng)));
  if (random_sign && coin(rng)) p.set_sign(-1);
  return p;
}

inline Eigen::MatrixXcd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cd(g(rng), g(rng));
  return m;
}

/// Dense statevector of an MPS by explicit index loops (site 0 = MSB).
inline Eigen::VectorXcd statevector(const catdvp::MpsState& psi) {
  const std::size_t n = psi.size();
  const std::uint64_t dim = std::uint64_t{1} << n;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Ones(1);
    for (std::size_t k = 0; k < n; ++k) {
      const int s = static_cast<int>((idx >> (n - 1 - k)) & 1u);
      const auto& t = psi.tensor(k).data;
      const Eigen::Index dr = t.cols() / 2;
      row = (row * t.middleCols(s * dr, dr)).eval();
    }
    v(static_cast<Eigen::Index>(idx)) = row(0);
  }
  return v;
}

/// Random MPS with the given bond dimensions, not canonical.
inline catdvp::MpsState random_mps(std::size_t n, Eigen::Index bond, std::mt19937_64& rng) {
  std::vector<catdvp::SiteTensor> tensors;
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Index dl = k == 0 ? 1 : bond;
    const Eigen::Index dr = k + 1 == n ? 1 : bond;
    tensors.push_back(catdvp::SiteTensor{random_matrix(dl, 2 * dr, rng)});
  }
  return catdvp::MpsState(std::move(tensors));
}

}  // namespace oracle
