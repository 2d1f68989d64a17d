#ifndef ROBUSTSSM_AD_HPP
#define ROBUSTSSM_AD_HPP

#include <Eigen/Dense>
#include <random>
#include <span>
#include <vector>

#include "robustssm/block_tridiag.hpp"
#include "robustssm/taylor2.hpp"

namespace rssm::ad {

// Exact gradient of a scalar function built from the supported elementary
// operations. F must be callable as f(std::span<const T>) -> T for any
// supported scalar T; evaluated in forward sweeps of up to 8 directions.
template <class F>
Eigen::VectorXd gradient(F&& f, const Eigen::VectorXd& at) {
  constexpr int kChunk = 8;
  const int n = static_cast<int>(at.size());
  Eigen::VectorXd g(n);
  std::vector<DualV<kChunk>> x(n);
  for (int s = 0; s < n; s += kChunk) {
    const int m = std::min(kChunk, n - s);
    for (int i = 0; i < n; ++i) x[i] = DualV<kChunk>(at[i]);
    for (int j = 0; j < m; ++j) x[s + j] = DualV<kChunk>::seed(at[s + j], j, m);
    const DualV<kChunk> r = f(std::span<const DualV<kChunk>>(x.data(), x.size()));
    if (!std::isfinite(r.v)) throw EvalError("ad::gradient: non-finite value");
    for (int j = 0; j < m; ++j) {
      g[s + j] = r.deriv(j);
      if (!std::isfinite(g[s + j]))
        throw EvalError("ad::gradient: non-finite derivative");
    }
  }
  return g;
}

namespace detail {
// second derivatives with respect to a chosen pair of coordinates
template <class F>
Eigen::Matrix2d pair_hessian(F&& f, const Eigen::VectorXd& at, int i, int j) {
  using T2 = Taylor2<double, 2>;
  const int n = static_cast<int>(at.size());
  std::vector<T2> x(n);
  for (int k = 0; k < n; ++k) x[k] = T2::constant(at[k], 2);
  x[i] = T2::seed(at[i], 0, 2);
  x[j] = T2::seed(at[j], 1, 2);
  const T2 r = f(std::span<const T2>(x.data(), x.size()));
  Eigen::Matrix2d h;
  h << r.hess(0, 0), r.hess(1, 0), r.hess(1, 0), r.hess(1, 1);
  return h;
}
}  // namespace detail

template <class F>
Eigen::MatrixXd hessian_dense(F&& f, const Eigen::VectorXd& at) {
  const int n = static_cast<int>(at.size());
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const Eigen::Matrix2d p = detail::pair_hessian(f, at, i, j);
      h(i, i) = p(0, 0);
      h(i, j) = h(j, i) = p(1, 0);
      h(j, j) = p(1, 1);
    }
  return h;
}

// Exact Hessian of a Markov-coupled objective over nb = n/q state blocks,
// restricted to the block-tridiagonal pattern. With verify_probes > 0, a
// random sample of non-adjacent coordinate pairs is checked for couplings
// that would violate the assumed structure.
template <int MaxQ = 8, class F>
SparseHessian hessian_block_tridiagonal(F&& f, const Eigen::VectorXd& at, int q,
                                        int verify_probes = 0) {
  using T2 = Taylor2<double, 2 * MaxQ>;
  const int n = static_cast<int>(at.size());
  if (q <= 0 || q > MaxQ || n % q != 0)
    throw ConfigError("hessian_block_tridiagonal: bad block size");
  const int nb = n / q;
  SparseHessian h(nb, q);

  std::vector<T2> x(n);
  auto sweep = [&](int b0, int nblk) {
    const int k = nblk * q;
    for (int i = 0; i < n; ++i) x[i] = T2::constant(at[i], k);
    for (int j = 0; j < k; ++j) x[b0 * q + j] = T2::seed(at[b0 * q + j], j, k);
    return f(std::span<const T2>(x.data(), x.size()));
  };

  if (nb == 1) {
    const T2 r = sweep(0, 1);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) h.diag(0)(i, j) = r.hess(i, j);
  } else {
    for (int b = 0; b + 1 < nb; ++b) {
      const T2 r = sweep(b, 2);
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
          h.diag(b)(i, j) = r.hess(i, j);
          h.sub(b)(i, j) = r.hess(q + i, j);
          if (b + 2 == nb) h.diag(b + 1)(i, j) = r.hess(q + i, q + j);
        }
    }
  }

  if (verify_probes > 0 && nb > 2) {
    std::mt19937_64 rng(0x5eed);
    for (int p = 0; p < verify_probes; ++p) {
      const int bi = static_cast<int>(rng() % nb);
      int bj = static_cast<int>(rng() % nb);
      if (std::abs(bi - bj) <= 1) continue;
      const int i = bi * q + static_cast<int>(rng() % q);
      const int j = bj * q + static_cast<int>(rng() % q);
      const Eigen::Matrix2d pij = detail::pair_hessian(f, at, i, j);
      if (std::abs(pij(1, 0)) > 1e-10)
        throw StructureError("objective couples non-adjacent state blocks");
    }
  }
  return h;
}

}  // namespace rssm::ad

#endif
