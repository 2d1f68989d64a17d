#ifndef ROBUSTSSM_TYPES_HPP
#define ROBUSTSSM_TYPES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "robustssm/math.hpp"
#include "robustssm/taylor2.hpp"

namespace rssm {

// Per-parameter bijection between the natural and unconstrained scales.
// ScaledLogit(a) maps (-a, a) <-> R via u = log[(a + x)/(a - x)].
struct ParamTransform {
  enum Kind { Identity, Log, ScaledLogit } kind = Identity;
  double bound = 1.0;

  static ParamTransform identity() { return {Identity, 0.0}; }
  static ParamTransform log() { return {Log, 0.0}; }
  static ParamTransform scaled_logit(double a) {
    if (!(a > 0.0)) throw ConfigError("scaled logit bound must be positive");
    return {ScaledLogit, a};
  }

  double to_unconstrained(double natural) const {
    switch (kind) {
      case Identity: return natural;
      case Log:
        if (!(natural > 0.0))
          throw ConfigError("log-transformed parameter must be positive");
        return std::log(natural);
      case ScaledLogit:
        if (!(std::abs(natural) < bound))
          throw ConfigError("parameter outside scaled-logit bound");
        return std::log((bound + natural) / (bound - natural));
    }
    return natural;
  }

  template <class T>
  T to_natural(const T& u) const {
    using std::exp;
    using std::tanh;
    switch (kind) {
      case Identity: return u;
      case Log: return exp(u);
      case ScaledLogit: return tanh(u * 0.5) * bound;
    }
    return u;
  }

  // d natural / d unconstrained, for delta-method standard errors
  double jacobian(double u) const {
    switch (kind) {
      case Identity: return 1.0;
      case Log: return std::exp(u);
      case ScaledLogit: {
        const double t = std::tanh(u * 0.5);
        return 0.5 * bound * (1.0 - t * t);
      }
    }
    return 1.0;
  }

  std::string to_string() const {
    switch (kind) {
      case Identity: return "identity";
      case Log: return "log";
      case ScaledLogit: return "logit(" + format_bound() + ")";
    }
    return "identity";
  }

  static ParamTransform parse(const std::string& s) {
    if (s == "identity") return identity();
    if (s == "log") return log();
    if (s.rfind("logit(", 0) == 0 && s.back() == ')')
      return scaled_logit(std::stod(s.substr(6, s.size() - 7)));
    throw ConfigError("unknown transform: " + s);
  }

 private:
  std::string format_bound() const {
    std::string b = std::to_string(bound);
    b.erase(b.find_last_not_of('0') + 1);
    if (!b.empty() && b.back() == '.') b.pop_back();
    return b;
  }
};

struct ParamSpec {
  std::string name;
  ParamTransform transform;
};

using ThetaSpec = std::vector<ParamSpec>;

// Model parameter vector kept consistent on both scales.
class Theta {
 public:
  Theta() = default;
  Theta(ThetaSpec spec, Eigen::VectorXd natural)
      : spec_(std::move(spec)), natural_(std::move(natural)) {
    if (static_cast<int>(spec_.size()) != natural_.size())
      throw ConfigError("theta spec / value size mismatch");
    unconstrained_.resize(natural_.size());
    for (int i = 0; i < natural_.size(); ++i)
      unconstrained_[i] = spec_[i].transform.to_unconstrained(natural_[i]);
  }

  static Theta from_unconstrained(ThetaSpec spec, const Eigen::VectorXd& u) {
    Theta t;
    t.spec_ = std::move(spec);
    t.unconstrained_ = u;
    t.natural_.resize(u.size());
    for (int i = 0; i < u.size(); ++i)
      t.natural_[i] = t.spec_[i].transform.to_natural(u[i]);
    return t;
  }

  int size() const { return static_cast<int>(spec_.size()); }
  const ThetaSpec& spec() const { return spec_; }
  const Eigen::VectorXd& natural() const { return natural_; }
  const Eigen::VectorXd& unconstrained() const { return unconstrained_; }
  const std::string& name(int i) const { return spec_[i].name; }

  int index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (spec_[i].name == name) return i;
    throw ConfigError("unknown parameter: " + name);
  }

 private:
  ThetaSpec spec_;
  Eigen::VectorXd natural_;
  Eigen::VectorXd unconstrained_;
};

// applies the declared transforms with any supported scalar type
template <class T, int MaxP>
inline void natural_from_unconstrained(const ThetaSpec& spec,
                                       std::span<const T> u,
                                       std::array<T, MaxP>& out) {
  for (size_t i = 0; i < spec.size(); ++i)
    out[i] = spec[i].transform.to_natural(u[i]);
}

// Latent states x_{0:T}, one row per time index, q coordinates per row.
struct StateSequence {
  Eigen::MatrixXd values;  // (T+1) x q
  std::vector<std::string> labels;

  StateSequence() = default;
  StateSequence(int rows, int q)
      : values(Eigen::MatrixXd::Zero(rows, q)) {}

  int rows() const { return static_cast<int>(values.rows()); }
  int q() const { return static_cast<int>(values.cols()); }

  bool all_finite() const { return values.allFinite(); }
};

// Observations y_{1:T} with a per-cell observed mask; masked cells never
// enter a likelihood sum whatever value they carry.
struct ObservationSeries {
  Eigen::MatrixXd values;                      // T x r
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  // true = observed
  std::vector<std::string> labels;
  std::vector<int> years;  // time labels, one per row

  ObservationSeries() = default;
  ObservationSeries(int t, int r)
      : values(Eigen::MatrixXd::Zero(t, r)),
        mask(Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
            t, r, true)) {}

  int T() const { return static_cast<int>(values.rows()); }
  int r() const { return static_cast<int>(values.cols()); }

  int observed_count() const {
    int n = 0;
    for (int t = 0; t < T(); ++t)
      for (int j = 0; j < r(); ++j)
        if (mask(t, j)) ++n;
    return n;
  }
};

}  // namespace rssm

#endif
