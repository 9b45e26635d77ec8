#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catdvp/errors.hpp"

namespace catdvp {

struct KrylovOptions {
  int max_dim = 25;
  double tol = 1e-10;
};

struct KrylovInfo {
  int dim = 0;          // Krylov vectors used
  double residual = 0;  // final error estimate relative to the result norm
};

/// exp(sign * tau * A) v for a Hermitian action A, by Lanczos with full
/// reorthogonalization. The projected tridiagonal matrix is exponentiated
/// through its eigendecomposition. Convergence is judged by the standard
/// estimate beta_m |e_m^T y| relative to |y|; an invariant subspace
/// (breakdown) makes the result exact. Throws ConvergenceError when max_dim
/// is reached without meeting tol.
template <typename Scalar, typename Apply>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> krylov_evolve(Apply&& apply,
                                                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v,
                                                       double tau, int sign, const KrylovOptions& opt,
                                                       KrylovInfo* info = nullptr) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  if (sign != 1 && sign != -1) throw Error("krylov_evolve: sign must be +1 or -1");
  if (opt.max_dim < 1) throw Error("krylov_evolve: max_dim must be positive");

  const Real beta0 = v.norm();
  if (!(beta0 > 0) || !std::isfinite(static_cast<double>(beta0)))
    throw NumericalConsistencyError("krylov_evolve: start vector has zero or non-finite norm");
  if (tau == 0.0) {
    if (info) *info = KrylovInfo{0, 0.0};
    return v;
  }

  const Eigen::Index n = v.size();
  const int m_cap = static_cast<int>(std::min<Eigen::Index>(opt.max_dim, n));
  const double scale = sign * tau;

  std::vector<Vector> basis;
  basis.reserve(m_cap);
  basis.push_back(v / beta0);
  std::vector<Real> alpha, beta;
  double shift = 0.0;

  auto small_exp = [&](int m) {
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> t = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<decltype(t)> es(t);
    const auto& q = es.eigenvectors();
    // shifted by the largest exponent so that y cannot overflow
    const Eigen::Array<Real, Eigen::Dynamic, 1> e = scale * es.eigenvalues().array();
    shift = static_cast<double>(e.maxCoeff());
    Eigen::Matrix<Real, Eigen::Dynamic, 1> w = (e - Real(shift)).exp().matrix();
    // y = Q exp(scale Lambda - shift) Q^T e1
    return Eigen::Matrix<Real, Eigen::Dynamic, 1>(q * w.cwiseProduct(q.row(0).transpose()));
  };

  auto assemble = [&](const Eigen::Matrix<Real, Eigen::Dynamic, 1>& y) {
    const double factor = static_cast<double>(beta0) * std::exp(shift);
    if (!std::isfinite(factor))
      throw NumericalConsistencyError("krylov_evolve: exponential overflows (exponent " + std::to_string(shift) + ")");
    Vector out = Vector::Zero(n);
    for (Eigen::Index i = 0; i < y.size(); ++i) out.noalias() += (Real(factor) * y(i)) * basis[i];
    return out;
  };

  for (int j = 0; j < m_cap; ++j) {
    Vector w = apply(basis[j]);
    alpha.push_back(std::real(basis[j].dot(w)));
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) w.noalias() -= q.dot(w) * q;
    const Real b = w.norm();
    const int m = j + 1;
    const auto y = small_exp(m);
    const double ynorm = static_cast<double>(y.norm());
    const double estimate = static_cast<double>(b * std::abs(y(m - 1))) / std::max(ynorm, 1e-300);
    const bool breakdown = b <= Real(1e-13) * std::max<Real>(Real(1), std::abs(alpha.back()));
    if (breakdown || m == n || estimate < opt.tol) {
      if (info) *info = KrylovInfo{m, breakdown || m == n ? 0.0 : estimate};
      return assemble(y);
    }
    if (m == m_cap) throw ConvergenceError("krylov_evolve: no convergence within " + std::to_string(m_cap) + " vectors", estimate);
    beta.push_back(b);
    basis.push_back(w / b);
  }
  throw InternalError("krylov_evolve: unreachable");
}

}  // namespace catdvp
