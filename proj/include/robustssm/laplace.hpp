#ifndef ROBUSTSSM_LAPLACE_HPP
#define ROBUSTSSM_LAPLACE_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "robustssm/block_tridiag.hpp"
#include "robustssm/density.hpp"
#include "robustssm/rho.hpp"
#include "robustssm/types.hpp"

namespace rssm {

struct LaplaceOptions {
  double inner_tol = 1e-8;   // sup-norm of the state gradient
  int max_iterations = 500;
  int max_halvings = 50;
};

struct LaplaceResult {
  double log_marginal = 0.0;
  StateSequence x_hat;
  int inner_iterations = 0;
  double inner_grad_norm = 0.0;
  double log_det_negH = 0.0;
  double joint_at_mode = 0.0;
};

struct InnerConvergenceError : std::runtime_error {
  Eigen::VectorXd last_iterate;
  InnerConvergenceError(const std::string& what, Eigen::VectorXd x)
      : std::runtime_error(what), last_iterate(std::move(x)) {}
};

struct CurvatureError : std::runtime_error {
  explicit CurvatureError(const std::string& what) : std::runtime_error(what) {}
};

// Laplace approximation of the (robustified) marginal log-likelihood for one
// dataset: Newton inner maximization over the states with the exact
// block-tridiagonal Hessian, then
//   log p(x_hat) + n/2 log(2 pi) - 1/2 log |-H(x_hat)|
// over the model's active state dimension n. The theta-score is exact: it
// carries the implicit dependence of x_hat and of the log-determinant on
// theta via third-order derivatives contracted against the partial inverse.
template <class M>
class LaplaceEngine {
 public:
  LaplaceEngine(const M& model, const ObservationSeries& y, const RhoConfig& rho,
                LaplaceOptions opts = {})
      : m_(model), y_(y), opts_(opts) {
    terms_ = m_.terms(y_);
    validate_terms(m_, terms_);
    rho_ = rho.resolve(m_.group_labels());
    n_ = active_dim(m_);
  }

  const M& model() const { return m_; }
  const ObservationSeries& data() const { return y_; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<RhoFunction>& rho_by_group() const { return rho_; }

  void set_rho(const RhoConfig& rho) { rho_ = rho.resolve(m_.group_labels()); }

  void clear_warm_start() { warm_.reset(); }
  void set_warm_start(const Eigen::VectorXd& x) { warm_ = x; }

  double joint_value(const Eigen::VectorXd& theta_unc,
                     const Eigen::VectorXd& xflat) const {
    const Eigen::VectorXd nat = natural_theta(m_, theta_unc);
    return robustified_joint(m_, std::span<const double>(nat.data(), nat.size()),
                             xflat, y_, terms_, rho_);
  }

  // Newton ascent to the inner mode from x_init (or the warm start / model
  // heuristic); leaves gradient, Hessian and value members at the solution
  Eigen::VectorXd inner_maximize(const Eigen::VectorXd& theta_unc,
                                 const Eigen::VectorXd* x_init = nullptr) {
    const Eigen::VectorXd nat = natural_theta(m_, theta_unc);
    const std::span<const double> nat_s(nat.data(), nat.size());

    Eigen::VectorXd x;
    if (x_init) x = *x_init;
    else if (warm_) x = *warm_;
    else x = to_flat(m_, m_.init_states(y_));
    if (!x.allFinite())
      throw InnerConvergenceError("inner_maximize: non-finite start", x);

    grad_.resize(n_);
    hess_ = BlockTridiagonal(active_rows(m_), m_.q());
    value_ = state_grad_hess(m_, nat_s, x, y_, terms_, rho_, grad_, hess_);

    int iter = 0;
    double lambda = 0.0;
    for (; iter < opts_.max_iterations; ++iter) {
      grad_norm_ = grad_.lpNorm<Eigen::Infinity>();
      if (grad_norm_ <= opts_.inner_tol) break;

      BlockTridiagonal a = hess_;
      a *= -1.0;
      while (!chol_.factor(a, lambda)) {
        lambda = lambda == 0.0 ? 1e-4 : lambda * 10.0;
        if (lambda > 1e10)
          throw InnerConvergenceError(
              "inner_maximize: Hessian regularization failed", x);
      }
      const Eigen::VectorXd step = chol_.solve(grad_);
      lambda = 0.0;  // reset on success

      double alpha = 1.0;
      bool accepted = false;
      for (int h = 0; h <= opts_.max_halvings; ++h, alpha *= 0.5) {
        const Eigen::VectorXd xnew = x + alpha * step;
        double vnew;
        try {
          vnew = robustified_joint(m_, nat_s, xnew, y_, terms_, rho_);
        } catch (const EvalError&) {
          continue;
        }
        if (vnew >= value_) {
          x = xnew;
          value_ = state_grad_hess(m_, nat_s, x, y_, terms_, rho_, grad_, hess_);
          accepted = true;
          break;
        }
      }
      if (!accepted)
        throw InnerConvergenceError(
            "inner_maximize: no ascent after " +
                std::to_string(opts_.max_halvings) + " halvings (|g|=" +
                std::to_string(grad_norm_) + ")",
            x);
    }
    grad_norm_ = grad_.lpNorm<Eigen::Infinity>();
    if (grad_norm_ > opts_.inner_tol)
      throw InnerConvergenceError("inner_maximize: iteration limit reached", x);
    iterations_ = iter;
    warm_ = x;
    return x;
  }

  LaplaceResult marginal(const Eigen::VectorXd& theta_unc,
                         const Eigen::VectorXd* x_init = nullptr) {
    const Eigen::VectorXd xhat = inner_maximize(theta_unc, x_init);
    BlockTridiagonal a = hess_;
    a *= -1.0;
    if (!chol_.factor(a, 0.0))
      throw CurvatureError(
          "laplace: -Hessian not positive definite at the inner mode");
    LaplaceResult res;
    res.joint_at_mode = value_;
    res.log_det_negH = chol_.log_det();
    res.log_marginal =
        value_ + 0.5 * n_ * kLog2Pi - 0.5 * res.log_det_negH;
    res.x_hat = from_flat(m_, xhat);
    res.inner_iterations = iterations_;
    res.inner_grad_norm = grad_norm_;
    return res;
  }

  // exact gradient of the Laplace objective with respect to unconstrained theta
  std::pair<Eigen::VectorXd, LaplaceResult> score(
      const Eigen::VectorXd& theta_unc, const Eigen::VectorXd* x_init = nullptr) {
    LaplaceResult res = marginal(theta_unc, x_init);
    const Eigen::VectorXd xhat = to_flat(m_, res.x_hat);
    const BlockTridiagonal ainv = chol_.partial_inverse();
    const ScoreSweepResult<M> sweep =
        score_sweep(m_, theta_unc, xhat, y_, terms_, rho_, ainv);
    const Eigen::VectorXd u = chol_.solve(sweep.trace_x);
    Eigen::VectorXd sc = sweep.direct + 0.5 * sweep.trace_theta +
                         0.5 * (sweep.cross.transpose() * u);
    if (!sc.allFinite()) throw EvalError("laplace score: non-finite result");
    return {std::move(sc), std::move(res)};
  }

  // marginal posterior standard deviations of the states at theta (from the
  // diagonal of the partial inverse at the inner mode)
  std::pair<LaplaceResult, Eigen::VectorXd> marginal_with_state_std(
      const Eigen::VectorXd& theta_unc) {
    LaplaceResult res = marginal(theta_unc);
    const BlockTridiagonal ainv = chol_.partial_inverse();
    Eigen::VectorXd sd(n_);
    const int q = m_.q();
    for (int b = 0; b < ainv.blocks(); ++b)
      for (int c = 0; c < q; ++c) sd[b * q + c] = std::sqrt(ainv.diag(b)(c, c));
    return {std::move(res), std::move(sd)};
  }

  std::vector<WeightRow> weights(const Eigen::VectorXd& theta_unc,
                                 const Eigen::VectorXd& xhat) const {
    const Eigen::VectorXd nat = natural_theta(m_, theta_unc);
    return contribution_weights(
        m_, std::span<const double>(nat.data(), nat.size()), xhat, y_, terms_,
        rho_);
  }

 private:
  const M& m_;
  const ObservationSeries& y_;
  LaplaceOptions opts_;
  std::vector<Term> terms_;
  std::vector<RhoFunction> rho_;
  int n_ = 0;

  std::optional<Eigen::VectorXd> warm_;
  Eigen::VectorXd grad_;
  BlockTridiagonal hess_;
  BlockCholesky chol_;
  double value_ = 0.0;
  double grad_norm_ = 0.0;
  int iterations_ = 0;
};

// spec-level convenience wrappers
template <class M>
StateSequence inner_maximize(const M& m, const Theta& theta,
                             const ObservationSeries& y, const RhoConfig& rho,
                             const StateSequence& x_init,
                             LaplaceOptions opts = {}) {
  LaplaceEngine<M> eng(m, y, rho, opts);
  const Eigen::VectorXd x0 = to_flat(m, x_init);
  return from_flat(m, eng.inner_maximize(theta.unconstrained(), &x0));
}

template <class M>
LaplaceResult laplace_log_marginal(const M& m, const Theta& theta,
                                   const ObservationSeries& y,
                                   const RhoConfig& rho,
                                   const StateSequence* x_warm = nullptr,
                                   LaplaceOptions opts = {}) {
  LaplaceEngine<M> eng(m, y, rho, opts);
  if (x_warm) {
    const Eigen::VectorXd w = to_flat(m, *x_warm);
    return eng.marginal(theta.unconstrained(), &w);
  }
  return eng.marginal(theta.unconstrained());
}

template <class M>
Eigen::VectorXd laplace_score(const M& m, const Theta& theta,
                              const ObservationSeries& y, const RhoConfig& rho,
                              LaplaceOptions opts = {}) {
  LaplaceEngine<M> eng(m, y, rho, opts);
  return eng.score(theta.unconstrained()).first;
}

}  // namespace rssm

#endif
