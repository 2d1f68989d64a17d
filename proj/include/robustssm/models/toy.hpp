#ifndef ROBUSTSSM_MODELS_TOY_HPP
#define ROBUSTSSM_MODELS_TOY_HPP

#include <span>
#include <string>
#include <vector>

#include "robustssm/density.hpp"
#include "robustssm/kalman.hpp"
#include "robustssm/rng.hpp"
#include "robustssm/term.hpp"
#include "robustssm/types.hpp"

namespace rssm {

// scalar Gaussian log-density written on the residual, with S-valued variance
template <class XS, class S>
inline XS gauss_logpdf_var(const XS& resid, const S& var) {
  using std::log;
  return square(resid) / var * (-0.5) - 0.5 * log(var) - 0.5 * kLog2Pi;
}

// Scalar AR(1) state with Gaussian observation and a stationary initial law:
//   x_0 ~ N(0, s_x^2 / (1 - phi^2)),  x_t = phi x_{t-1} + e_t,  y_t = x_t + u_t
// theta = (phi, sigma_state, sigma_obs), p = 3.
class ToyAr1Model {
 public:
  static constexpr int kMaxTermVars = 2;
  static constexpr int kParamDim = 3;

  explicit ToyAr1Model(int horizon) : horizon_(horizon) {
    spec_ = {{"phi", ParamTransform::scaled_logit(1.0)},
             {"sigma_state", ParamTransform::log()},
             {"sigma_obs", ParamTransform::log()}};
  }

  int q() const { return 1; }
  int r() const { return 1; }
  int T() const { return horizon_; }
  int first_row() const { return 0; }

  const ThetaSpec& theta_spec() const { return spec_; }
  const std::vector<std::string>& group_labels() const { return groups_; }
  const std::vector<std::string>& state_labels() const { return state_labels_; }
  const std::vector<std::string>& obs_labels() const { return obs_labels_; }
  int year_of_row(int t) const { return t; }

  // parameters whose efficiency a tuning group targets
  std::vector<std::vector<int>> group_param_assoc() const {
    return {{0, 1}, {2}, {}};
  }

  std::vector<Term> terms(const ObservationSeries& y) const {
    std::vector<Term> out;
    Term h;
    h.t = 0;
    h.type = TermType::Initial;
    h.group = 2;
    h.kind = 0;
    h.xvars = {0};
    out.push_back(h);
    for (int t = 1; t <= horizon_; ++t) {
      Term f;
      f.t = t;
      f.type = TermType::Transition;
      f.group = 0;
      f.kind = 1;
      f.xvars = {t - 1, t};
      out.push_back(f);
      if (y.mask(t - 1, 0)) {
        Term g;
        g.t = t;
        g.type = TermType::Observation;
        g.group = 1;
        g.kind = 2;
        g.xvars = {t};
        g.ycells = {t - 1};
        out.push_back(g);
      }
    }
    return out;
  }

  std::string term_label(const Term& term) const {
    return term.type == TermType::Observation ? "y" : "x";
  }

  template <class TS, class XS>
  XS term_value(const Term& term, std::span<const TS> theta,
                std::span<const XS> x, std::span<const double> y) const {
    const TS& phi = theta[0];
    switch (term.kind) {
      case 0: {  // stationary initial law
        const TS var = theta[1] * theta[1] / (1.0 - phi * phi);
        return gauss_logpdf_var(x[0], var);
      }
      case 1: {  // AR(1) transition
        const TS var = theta[1] * theta[1];
        return gauss_logpdf_var(x[1] - x[0] * phi, var);
      }
      default: {  // observation
        const TS var = theta[2] * theta[2];
        return gauss_logpdf_var(y[0] - x[0], var);
      }
    }
  }

  StateSequence init_states(const ObservationSeries&) const {
    StateSequence x(horizon_ + 1, 1);
    x.labels = state_labels_;
    return x;
  }

  // ancestral simulation; draws every y cell, masking is applied by callers
  void simulate(std::span<const double> theta, RngStream& rng,
                StateSequence& x, Eigen::MatrixXd& yvals) const {
    const double phi = theta[0], sx = theta[1], sy = theta[2];
    x = StateSequence(horizon_ + 1, 1);
    x.labels = state_labels_;
    x.values(0, 0) = rng.gauss() * sx / std::sqrt(1.0 - phi * phi);
    for (int t = 1; t <= horizon_; ++t)
      x.values(t, 0) = phi * x.values(t - 1, 0) + sx * rng.gauss();
    yvals.resize(horizon_, 1);
    for (int t = 1; t <= horizon_; ++t)
      yvals(t - 1, 0) = x.values(t, 0) + sy * rng.gauss();
  }

  LinearGaussianSsm to_linear_gaussian(std::span<const double> theta) const {
    const double phi = theta[0], sx = theta[1], sy = theta[2];
    LinearGaussianSsm lg;
    lg.A = Eigen::MatrixXd::Constant(1, 1, phi);
    lg.Q = Eigen::MatrixXd::Constant(1, 1, sx * sx);
    lg.C = Eigen::MatrixXd::Constant(1, 1, 1.0);
    lg.R = Eigen::MatrixXd::Constant(1, 1, sy * sy);
    lg.m0 = Eigen::VectorXd::Zero(1);
    lg.P0 = Eigen::MatrixXd::Constant(1, 1, sx * sx / (1.0 - phi * phi));
    return lg;
  }

 private:
  int horizon_;
  ThetaSpec spec_;
  std::vector<std::string> groups_ = {"state", "obs", "init"};
  std::vector<std::string> state_labels_ = {"x"};
  std::vector<std::string> obs_labels_ = {"y"};
};

// Linear-Gaussian toy with a fixed AR coefficient; theta = (sigma_state,
// sigma_obs) so the Kalman-exact MLE is a convenient two-parameter oracle.
class ToyLgModel {
 public:
  static constexpr int kMaxTermVars = 2;
  static constexpr int kParamDim = 2;

  explicit ToyLgModel(int horizon, double coeff = 0.8)
      : horizon_(horizon), coeff_(coeff) {
    spec_ = {{"sigma_state", ParamTransform::log()},
             {"sigma_obs", ParamTransform::log()}};
  }

  int q() const { return 1; }
  int r() const { return 1; }
  int T() const { return horizon_; }
  int first_row() const { return 0; }
  double coeff() const { return coeff_; }

  const ThetaSpec& theta_spec() const { return spec_; }
  const std::vector<std::string>& group_labels() const { return groups_; }
  const std::vector<std::string>& state_labels() const { return state_labels_; }
  const std::vector<std::string>& obs_labels() const { return obs_labels_; }
  int year_of_row(int t) const { return t; }

  std::vector<std::vector<int>> group_param_assoc() const {
    return {{0}, {1}, {}};
  }

  std::vector<Term> terms(const ObservationSeries& y) const {
    std::vector<Term> out;
    Term h;
    h.t = 0;
    h.type = TermType::Initial;
    h.group = 2;
    h.kind = 0;
    h.xvars = {0};
    out.push_back(h);
    for (int t = 1; t <= horizon_; ++t) {
      Term f;
      f.t = t;
      f.type = TermType::Transition;
      f.group = 0;
      f.kind = 1;
      f.xvars = {t - 1, t};
      out.push_back(f);
      if (y.mask(t - 1, 0)) {
        Term g;
        g.t = t;
        g.type = TermType::Observation;
        g.group = 1;
        g.kind = 2;
        g.xvars = {t};
        g.ycells = {t - 1};
        out.push_back(g);
      }
    }
    return out;
  }

  std::string term_label(const Term& term) const {
    return term.type == TermType::Observation ? "y" : "x";
  }

  template <class TS, class XS>
  XS term_value(const Term& term, std::span<const TS> theta,
                std::span<const XS> x, std::span<const double> y) const {
    switch (term.kind) {
      case 0: {
        const TS var = theta[0] * theta[0] / (1.0 - coeff_ * coeff_);
        return gauss_logpdf_var(x[0], var);
      }
      case 1: {
        const TS var = theta[0] * theta[0];
        return gauss_logpdf_var(x[1] - x[0] * coeff_, var);
      }
      default: {
        const TS var = theta[1] * theta[1];
        return gauss_logpdf_var(y[0] - x[0], var);
      }
    }
  }

  StateSequence init_states(const ObservationSeries&) const {
    StateSequence x(horizon_ + 1, 1);
    x.labels = state_labels_;
    return x;
  }

  void simulate(std::span<const double> theta, RngStream& rng,
                StateSequence& x, Eigen::MatrixXd& yvals) const {
    const double sx = theta[0], sy = theta[1];
    x = StateSequence(horizon_ + 1, 1);
    x.labels = state_labels_;
    x.values(0, 0) = rng.gauss() * sx / std::sqrt(1.0 - coeff_ * coeff_);
    for (int t = 1; t <= horizon_; ++t)
      x.values(t, 0) = coeff_ * x.values(t - 1, 0) + sx * rng.gauss();
    yvals.resize(horizon_, 1);
    for (int t = 1; t <= horizon_; ++t)
      yvals(t - 1, 0) = x.values(t, 0) + sy * rng.gauss();
  }

  LinearGaussianSsm to_linear_gaussian(std::span<const double> theta) const {
    const double sx = theta[0], sy = theta[1];
    LinearGaussianSsm lg;
    lg.A = Eigen::MatrixXd::Constant(1, 1, coeff_);
    lg.Q = Eigen::MatrixXd::Constant(1, 1, sx * sx);
    lg.C = Eigen::MatrixXd::Constant(1, 1, 1.0);
    lg.R = Eigen::MatrixXd::Constant(1, 1, sy * sy);
    lg.m0 = Eigen::VectorXd::Zero(1);
    lg.P0 = Eigen::MatrixXd::Constant(1, 1, sx * sx / (1.0 - coeff_ * coeff_));
    return lg;
  }

 private:
  int horizon_;
  double coeff_;
  ThetaSpec spec_;
  std::vector<std::string> groups_ = {"state", "obs", "init"};
  std::vector<std::string> state_labels_ = {"x"};
  std::vector<std::string> obs_labels_ = {"y"};
};

}  // namespace rssm

#endif
