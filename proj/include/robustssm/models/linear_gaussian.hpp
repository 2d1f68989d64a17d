#ifndef ROBUSTSSM_MODELS_LINEAR_GAUSSIAN_HPP
#define ROBUSTSSM_MODELS_LINEAR_GAUSSIAN_HPP

#include <Eigen/Cholesky>
#include <span>
#include <string>
#include <vector>

#include "robustssm/kalman.hpp"
#include "robustssm/rng.hpp"
#include "robustssm/term.hpp"
#include "robustssm/types.hpp"

namespace rssm {

// Generic linear-Gaussian SSM with fixed matrices (no free parameters);
// exercised against the Kalman oracle. Observation vectors are atomic terms:
// a partially observed y_t contributes the marginal density of its observed
// coordinates, which keeps correlated observation errors exact.
template <int MaxQ = 2>
class GenericLgModel {
 public:
  static constexpr int kMaxTermVars = 2 * MaxQ;
  static constexpr int kParamDim = 0;

  GenericLgModel(LinearGaussianSsm lg, int horizon)
      : lg_(std::move(lg)), horizon_(horizon) {
    if (lg_.q() > MaxQ || lg_.r() > 4)
      throw ConfigError("GenericLgModel: dimensions exceed template capacity");
    qinv_ = lg_.Q.inverse();
    qlogdet_ = std::log(lg_.Q.determinant());
    p0inv_ = lg_.P0.inverse();
    p0logdet_ = std::log(lg_.P0.determinant());
    const int r = lg_.r();
    rinv_.resize(std::size_t(1) << r);
    rlogdet_.assign(std::size_t(1) << r, 0.0);
    for (unsigned pat = 1; pat < rinv_.size(); ++pat) {
      std::vector<int> cols;
      for (int j = 0; j < r; ++j)
        if (pat & (1u << j)) cols.push_back(j);
      Eigen::MatrixXd sub(cols.size(), cols.size());
      for (size_t i = 0; i < cols.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
          sub(i, j) = lg_.R(cols[i], cols[j]);
      rinv_[pat] = sub.inverse();
      rlogdet_[pat] = std::log(sub.determinant());
    }
    for (int c = 0; c < lg_.q(); ++c)
      state_labels_.push_back("x" + std::to_string(c));
    for (int c = 0; c < lg_.r(); ++c)
      obs_labels_.push_back("y" + std::to_string(c));
  }

  int q() const { return lg_.q(); }
  int r() const { return lg_.r(); }
  int T() const { return horizon_; }
  int first_row() const { return 0; }

  const ThetaSpec& theta_spec() const { return spec_; }
  const std::vector<std::string>& group_labels() const { return groups_; }
  const std::vector<std::string>& state_labels() const { return state_labels_; }
  const std::vector<std::string>& obs_labels() const { return obs_labels_; }
  int year_of_row(int t) const { return t; }
  const LinearGaussianSsm& lg() const { return lg_; }

  std::vector<std::vector<int>> group_param_assoc() const { return {{}, {}, {}}; }

  std::vector<Term> terms(const ObservationSeries& y) const {
    const int q = lg_.q(), r = lg_.r();
    std::vector<Term> out;
    Term h;
    h.t = 0;
    h.type = TermType::Initial;
    h.group = 2;
    h.kind = 0;
    for (int c = 0; c < q; ++c) h.xvars.push_back(c);
    out.push_back(h);
    for (int t = 1; t <= horizon_; ++t) {
      Term f;
      f.t = t;
      f.type = TermType::Transition;
      f.group = 0;
      f.kind = 1;
      for (int c = 0; c < q; ++c) f.xvars.push_back((t - 1) * q + c);
      for (int c = 0; c < q; ++c) f.xvars.push_back(t * q + c);
      out.push_back(f);
      unsigned pat = 0;
      Term g;
      for (int j = 0; j < r; ++j)
        if (y.mask(t - 1, j)) {
          pat |= 1u << j;
          g.ycells.push_back((t - 1) * r + j);
        }
      if (pat == 0) continue;
      g.t = t;
      g.type = TermType::Observation;
      g.group = 1;
      g.kind = 2;
      g.a = static_cast<int16_t>(pat);
      for (int c = 0; c < q; ++c) g.xvars.push_back(t * q + c);
      out.push_back(g);
    }
    return out;
  }

  std::string term_label(const Term& term) const {
    return term.type == TermType::Observation ? "y" : "x";
  }

  template <class TS, class XS>
  XS term_value(const Term& term, std::span<const TS>, std::span<const XS> x,
                std::span<const double> y) const {
    const int q = lg_.q();
    switch (term.kind) {
      case 0: {  // x_0 ~ N(m0, P0)
        return mvn_logpdf(x.data(), nullptr, lg_.m0, p0inv_, p0logdet_, q);
      }
      case 1: {  // x_t | x_{t-1}
        std::array<XS, MaxQ> mean;
        for (int i = 0; i < q; ++i) {
          mean[i] = x[0] * lg_.A(i, 0);
          for (int j = 1; j < q; ++j) mean[i] += x[j] * lg_.A(i, j);
        }
        return mvn_logpdf(x.data() + q, mean.data(),
                          Eigen::VectorXd::Zero(q).eval(), qinv_, qlogdet_, q);
      }
      default: {  // observed subset of y_t | x_t
        const unsigned pat = static_cast<unsigned>(term.a);
        const int k = static_cast<int>(term.ycells.size());
        std::array<XS, 4> resid;
        int idx = 0;
        for (int j = 0; j < lg_.r(); ++j) {
          if (!(pat & (1u << j))) continue;
          XS mu = x[0] * lg_.C(j, 0);
          for (int c = 1; c < q; ++c) mu += x[c] * lg_.C(j, c);
          resid[idx] = y[idx] - mu;
          ++idx;
        }
        const Eigen::MatrixXd& rinv = rinv_[pat];
        XS quad = square(resid[0]) * rinv(0, 0);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) {
            if (i == 0 && j == 0) continue;
            quad += resid[i] * resid[j] * rinv(i, j);
          }
        return quad * (-0.5) - 0.5 * (k * kLog2Pi + rlogdet_[pat]);
      }
    }
  }

  StateSequence init_states(const ObservationSeries&) const {
    StateSequence x(horizon_ + 1, lg_.q());
    x.labels = state_labels_;
    return x;
  }

  void simulate(std::span<const double>, RngStream& rng, StateSequence& x,
                Eigen::MatrixXd& yvals) const {
    const int q = lg_.q(), r = lg_.r();
    const Eigen::MatrixXd lq = lg_.Q.llt().matrixL();
    const Eigen::MatrixXd lr = lg_.R.llt().matrixL();
    const Eigen::MatrixXd lp0 = lg_.P0.llt().matrixL();
    x = StateSequence(horizon_ + 1, q);
    x.labels = state_labels_;
    x.values.row(0) = rng.mvn(lg_.m0, lp0).transpose();
    for (int t = 1; t <= horizon_; ++t)
      x.values.row(t) =
          rng.mvn((lg_.A * x.values.row(t - 1).transpose()).eval(), lq)
              .transpose();
    yvals.resize(horizon_, r);
    for (int t = 1; t <= horizon_; ++t)
      yvals.row(t - 1) =
          rng.mvn((lg_.C * x.values.row(t).transpose()).eval(), lr).transpose();
  }

 private:
  template <class XS>
  XS mvn_logpdf(const XS* x, const XS* mean, const Eigen::VectorXd& shift,
                const Eigen::MatrixXd& prec, double logdet, int k) const {
    std::array<XS, MaxQ> resid;
    for (int i = 0; i < k; ++i) {
      if (mean) resid[i] = x[i] - mean[i];
      else resid[i] = x[i] - shift[i];
    }
    XS quad = square(resid[0]) * prec(0, 0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (i == 0 && j == 0) continue;
        quad += resid[i] * resid[j] * prec(i, j);
      }
    return quad * (-0.5) - 0.5 * (k * kLog2Pi + logdet);
  }

  LinearGaussianSsm lg_;
  int horizon_;
  Eigen::MatrixXd qinv_, p0inv_;
  double qlogdet_ = 0.0, p0logdet_ = 0.0;
  std::vector<Eigen::MatrixXd> rinv_;
  std::vector<double> rlogdet_;
  ThetaSpec spec_;
  std::vector<std::string> groups_ = {"state", "obs", "init"};
  std::vector<std::string> state_labels_, obs_labels_;
};

}  // namespace rssm

#endif
