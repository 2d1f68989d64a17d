#ifndef ROBUSTSSM_BLOCK_TRIDIAG_HPP
#define ROBUSTSSM_BLOCK_TRIDIAG_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "robustssm/math.hpp"

namespace rssm {

// Symmetric block-tridiagonal matrix: nb diagonal q x q blocks and nb-1
// sub-diagonal blocks, sub(b) sitting at block row b+1, column b. Stores the
// full symmetric matrix (both triangles of the diagonal blocks).
class BlockTridiagonal {
 public:
  BlockTridiagonal() = default;
  BlockTridiagonal(int nb, int q)
      : nb_(nb), q_(q),
        diag_(nb, Eigen::MatrixXd::Zero(q, q)),
        sub_(nb > 0 ? nb - 1 : 0, Eigen::MatrixXd::Zero(q, q)) {}

  int blocks() const { return nb_; }
  int block_size() const { return q_; }
  int dim() const { return nb_ * q_; }

  Eigen::MatrixXd& diag(int b) { return diag_[b]; }
  const Eigen::MatrixXd& diag(int b) const { return diag_[b]; }
  Eigen::MatrixXd& sub(int b) { return sub_[b]; }
  const Eigen::MatrixXd& sub(int b) const { return sub_[b]; }

  void set_zero() {
    for (auto& m : diag_) m.setZero();
    for (auto& m : sub_) m.setZero();
  }

  // accumulate a symmetric contribution at flat indices (i, j); the pair must
  // live within one block or two adjacent blocks
  void add_sym(int i, int j, double v) {
    if (i < j) std::swap(i, j);
    const int bi = i / q_, bj = j / q_;
    const int ri = i - bi * q_, rj = j - bj * q_;
    if (bi == bj) {
      diag_[bi](ri, rj) += v;
      if (ri != rj) diag_[bi](rj, ri) += v;
    } else if (bi == bj + 1) {
      sub_[bj](ri, rj) += v;
    } else {
      throw StructureError("entry couples non-adjacent state blocks");
    }
  }

  double get(int i, int j) const {
    if (i < j) std::swap(i, j);
    const int bi = i / q_, bj = j / q_;
    const int ri = i - bi * q_, rj = j - bj * q_;
    if (bi == bj) return diag_[bi](ri, rj);
    if (bi == bj + 1) return sub_[bj](ri, rj);
    return 0.0;
  }

  BlockTridiagonal& operator*=(double s) {
    for (auto& m : diag_) m *= s;
    for (auto& m : sub_) m *= s;
    return *this;
  }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dim());
    for (int b = 0; b < nb_; ++b) {
      y.segment(b * q_, q_) += diag_[b] * x.segment(b * q_, q_);
      if (b + 1 < nb_) {
        y.segment((b + 1) * q_, q_) += sub_[b] * x.segment(b * q_, q_);
        y.segment(b * q_, q_) += sub_[b].transpose() * x.segment((b + 1) * q_, q_);
      }
    }
    return y;
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim(), dim());
    for (int b = 0; b < nb_; ++b) {
      out.block(b * q_, b * q_, q_, q_) = diag_[b];
      if (b + 1 < nb_) {
        out.block((b + 1) * q_, b * q_, q_, q_) = sub_[b];
        out.block(b * q_, (b + 1) * q_, q_, q_) = sub_[b].transpose();
      }
    }
    return out;
  }

  double max_asymmetry() const {
    double m = 0.0;
    for (const auto& d : diag_)
      m = std::max(m, (d - d.transpose()).cwiseAbs().maxCoeff());
    return m;
  }

 private:
  int nb_ = 0, q_ = 0;
  std::vector<Eigen::MatrixXd> diag_;
  std::vector<Eigen::MatrixXd> sub_;
};

// the spec's sparse Hessian container is exactly this layout
using SparseHessian = BlockTridiagonal;

// Blocked Cholesky A = L L^T of a block-tridiagonal SPD matrix, with solve,
// log-determinant and the Takahashi partial inverse restricted to the
// tridiagonal pattern.
class BlockCholesky {
 public:
  // returns false if any diagonal pivot fails (A + lambda*I not PD)
  bool factor(const BlockTridiagonal& a, double lambda = 0.0) {
    nb_ = a.blocks();
    q_ = a.block_size();
    L_.assign(nb_, Eigen::MatrixXd());
    M_.assign(nb_ > 0 ? nb_ - 1 : 0, Eigen::MatrixXd());
    Eigen::MatrixXd s;
    for (int b = 0; b < nb_; ++b) {
      s = a.diag(b);
      if (lambda != 0.0) s.diagonal().array() += lambda;
      if (b > 0) {
        // M_b = A[b,b-1] L_{b-1}^{-T}
        M_[b - 1] = L_[b - 1]
                        .triangularView<Eigen::Lower>()
                        .solve(a.sub(b - 1).transpose())
                        .transpose();
        s.noalias() -= M_[b - 1] * M_[b - 1].transpose();
      }
      Eigen::LLT<Eigen::MatrixXd> llt(s);
      if (llt.info() != Eigen::Success) return false;
      L_[b] = llt.matrixL();
      for (int i = 0; i < q_; ++i)
        if (!(L_[b](i, i) > 0.0) || !std::isfinite(L_[b](i, i))) return false;
    }
    return true;
  }

  double log_det() const {
    double s = 0.0;
    for (const auto& l : L_)
      for (int i = 0; i < q_; ++i) s += std::log(l(i, i));
    return 2.0 * s;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd y(rhs.size());
    for (int b = 0; b < nb_; ++b) {
      Eigen::VectorXd r = rhs.segment(b * q_, q_);
      if (b > 0) r.noalias() -= M_[b - 1] * y.segment((b - 1) * q_, q_);
      y.segment(b * q_, q_) = L_[b].triangularView<Eigen::Lower>().solve(r);
    }
    Eigen::VectorXd x(rhs.size());
    for (int b = nb_ - 1; b >= 0; --b) {
      Eigen::VectorXd r = y.segment(b * q_, q_);
      if (b + 1 < nb_)
        r.noalias() -= M_[b].transpose() * x.segment((b + 1) * q_, q_);
      x.segment(b * q_, q_) =
          L_[b].transpose().triangularView<Eigen::Upper>().solve(r);
    }
    return x;
  }

  // A^{-1} restricted to the block-tridiagonal pattern
  BlockTridiagonal partial_inverse() const {
    BlockTridiagonal z(nb_, q_);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(q_, q_);
    auto spd_inv = [&](const Eigen::MatrixXd& l) {
      Eigen::MatrixXd li = l.triangularView<Eigen::Lower>().solve(eye);
      return Eigen::MatrixXd(li.transpose() * li);
    };
    z.diag(nb_ - 1) = spd_inv(L_[nb_ - 1]);
    for (int b = nb_ - 2; b >= 0; --b) {
      // W = M_{b+1} L_b^{-1}
      Eigen::MatrixXd w = L_[b]
                              .transpose()
                              .triangularView<Eigen::Upper>()
                              .solve(M_[b].transpose())
                              .transpose();
      z.sub(b) = -z.diag(b + 1) * w;
      z.diag(b) = spd_inv(L_[b]) + w.transpose() * z.diag(b + 1) * w;
    }
    return z;
  }

 private:
  int nb_ = 0, q_ = 0;
  std::vector<Eigen::MatrixXd> L_;
  std::vector<Eigen::MatrixXd> M_;
};

}  // namespace rssm

#endif
