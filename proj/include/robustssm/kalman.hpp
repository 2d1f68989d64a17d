#ifndef ROBUSTSSM_KALMAN_HPP
#define ROBUSTSSM_KALMAN_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <vector>

#include "robustssm/math.hpp"
#include "robustssm/types.hpp"

namespace rssm {

// x_t = A x_{t-1} + w_t, w ~ N(0, Q);  y_t = C x_t + v_t, v ~ N(0, R);
// x_0 ~ N(m0, P0). Validation oracle for the Laplace layer: exact in the
// linear-Gaussian case.
struct LinearGaussianSsm {
  Eigen::MatrixXd A, Q, C, R;
  Eigen::VectorXd m0;
  Eigen::MatrixXd P0;

  int q() const { return static_cast<int>(A.rows()); }
  int r() const { return static_cast<int>(C.rows()); }
};

namespace detail {

inline std::vector<int> observed_cols(const ObservationSeries& y, int t) {
  std::vector<int> cols;
  for (int j = 0; j < y.r(); ++j)
    if (y.mask(t, j)) cols.push_back(j);
  return cols;
}

}  // namespace detail

// exact prediction-error-decomposition log-likelihood; missing coordinates
// are dropped from C and R step by step
inline double kalman_log_likelihood(const LinearGaussianSsm& lg,
                                    const ObservationSeries& y) {
  const int q = lg.q();
  Eigen::VectorXd m = lg.m0;
  Eigen::MatrixXd p = lg.P0;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(q, q);
  double ll = 0.0;
  for (int t = 0; t < y.T(); ++t) {
    // predict x_{t+1} | y_{1:t}
    m = lg.A * m;
    p = lg.A * p * lg.A.transpose() + lg.Q;
    p = 0.5 * (p + p.transpose());

    const std::vector<int> cols = detail::observed_cols(y, t);
    if (cols.empty()) continue;
    const int k = static_cast<int>(cols.size());
    Eigen::MatrixXd c(k, q);
    Eigen::MatrixXd rr(k, k);
    Eigen::VectorXd obs(k);
    for (int i = 0; i < k; ++i) {
      c.row(i) = lg.C.row(cols[i]);
      obs[i] = y.values(t, cols[i]);
      for (int j = 0; j < k; ++j) rr(i, j) = lg.R(cols[i], cols[j]);
    }
    const Eigen::VectorXd v = obs - c * m;
    Eigen::MatrixXd s = c * p * c.transpose() + rr;
    s = 0.5 * (s + s.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success)
      throw EvalError("kalman: innovation covariance not positive definite");
    double logdet = 0.0;
    const Eigen::MatrixXd l = llt.matrixL();
    for (int i = 0; i < k; ++i) logdet += 2.0 * std::log(l(i, i));
    const Eigen::VectorXd sv = llt.solve(v);
    ll += -0.5 * (k * kLog2Pi + logdet + v.dot(sv));

    // Joseph-form update keeps the covariance symmetric PSD
    const Eigen::MatrixXd kk = p * c.transpose() * llt.solve(
        Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd ikc = eye - kk * c;
    m += kk * v;
    p = ikc * p * ikc.transpose() + kk * rr * kk.transpose();
    p = 0.5 * (p + p.transpose());
  }
  return ll;
}

// RTS smoother means for x_{0:T}
inline StateSequence kalman_smoother_mean(const LinearGaussianSsm& lg,
                                          const ObservationSeries& y) {
  const int q = lg.q();
  const int T = y.T();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(q, q);

  std::vector<Eigen::VectorXd> m_filt(T + 1), m_pred(T + 1);
  std::vector<Eigen::MatrixXd> p_filt(T + 1), p_pred(T + 1);
  m_filt[0] = lg.m0;
  p_filt[0] = lg.P0;

  for (int t = 1; t <= T; ++t) {
    m_pred[t] = lg.A * m_filt[t - 1];
    p_pred[t] = lg.A * p_filt[t - 1] * lg.A.transpose() + lg.Q;
    p_pred[t] = 0.5 * (p_pred[t] + p_pred[t].transpose());
    m_filt[t] = m_pred[t];
    p_filt[t] = p_pred[t];

    const std::vector<int> cols = detail::observed_cols(y, t - 1);
    if (cols.empty()) continue;
    const int k = static_cast<int>(cols.size());
    Eigen::MatrixXd c(k, q);
    Eigen::MatrixXd rr(k, k);
    Eigen::VectorXd obs(k);
    for (int i = 0; i < k; ++i) {
      c.row(i) = lg.C.row(cols[i]);
      obs[i] = y.values(t - 1, cols[i]);
      for (int j = 0; j < k; ++j) rr(i, j) = lg.R(cols[i], cols[j]);
    }
    Eigen::MatrixXd s = c * p_pred[t] * c.transpose() + rr;
    s = 0.5 * (s + s.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success)
      throw EvalError("kalman: innovation covariance not positive definite");
    const Eigen::MatrixXd kk =
        p_pred[t] * c.transpose() * llt.solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd ikc = eye - kk * c;
    m_filt[t] = m_pred[t] + kk * (obs - c * m_pred[t]);
    p_filt[t] = ikc * p_pred[t] * ikc.transpose() + kk * rr * kk.transpose();
    p_filt[t] = 0.5 * (p_filt[t] + p_filt[t].transpose());
  }

  StateSequence out(T + 1, q);
  Eigen::VectorXd ms = m_filt[T];
  out.values.row(T) = ms.transpose();
  for (int t = T - 1; t >= 0; --t) {
    const Eigen::MatrixXd j =
        p_filt[t] * lg.A.transpose() * p_pred[t + 1].ldlt().solve(eye);
    ms = m_filt[t] + j * (ms - m_pred[t + 1]);
    out.values.row(t) = ms.transpose();
  }
  return out;
}

}  // namespace rssm

#endif
