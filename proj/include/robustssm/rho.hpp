#ifndef ROBUSTSSM_RHO_HPP
#define ROBUSTSSM_RHO_HPP

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "robustssm/math.hpp"
#include "robustssm/taylor2.hpp"

namespace rssm {

enum class RhoFamily { Identity, SSH, LogLogistic };

inline const char* to_string(RhoFamily f) {
  switch (f) {
    case RhoFamily::Identity: return "identity";
    case RhoFamily::SSH: return "ssh";
    case RhoFamily::LogLogistic: return "log-logistic";
  }
  return "?";
}

inline RhoFamily rho_family_from_string(const std::string& s) {
  if (s == "identity") return RhoFamily::Identity;
  if (s == "ssh") return RhoFamily::SSH;
  if (s == "log-logistic" || s == "loglogistic") return RhoFamily::LogLogistic;
  throw ConfigError("unknown rho family: " + s);
}

// A bounded-influence transform of one log-likelihood contribution. The
// derivative acts as the robustness weight in (0, 1]; Identity is the exact
// c = infinity limit.
struct RhoFunction {
  RhoFamily family = RhoFamily::Identity;
  double c = 0.0;

  RhoFunction() = default;
  RhoFunction(RhoFamily fam, double tuning) : family(fam), c(tuning) {
    if (family != RhoFamily::Identity && !(c > 0.0))
      throw ConfigError("rho tuning constant must be positive");
  }

  static RhoFunction identity() { return RhoFunction(); }
  static RhoFunction ssh(double c) { return RhoFunction(RhoFamily::SSH, c); }
  static RhoFunction log_logistic(double c) {
    return RhoFunction(RhoFamily::LogLogistic, c);
  }

  bool is_identity() const { return family == RhoFamily::Identity; }

  // generic over double / DualV / Taylor2; branch points resolved on the
  // primal value, with the identity branch taken at z == -c
  template <class T>
  T operator()(const T& z) const {
    switch (family) {
      case RhoFamily::Identity:
        return z;
      case RhoFamily::SSH: {
        if (value_of(z) >= -c) return z;
        using std::asinh;
        return asinh((z + c) * (1.0 / c)) * c - c;
      }
      case RhoFamily::LogLogistic:
        return log1p_exp(z + c) - log1p_exp(c);
    }
    return z;
  }

  double weight(double z) const {
    switch (family) {
      case RhoFamily::Identity:
        return 1.0;
      case RhoFamily::SSH: {
        if (z >= -c) return 1.0;
        const double u = (z + c) / c;
        return 1.0 / std::sqrt(1.0 + u * u);
      }
      case RhoFamily::LogLogistic:
        return logistic(z + c);
    }
    return 1.0;
  }
};

inline double evaluate(const RhoFunction& rho, double z) {
  require_finite(z, "rho::evaluate");
  return rho(z);
}

inline double derivative(const RhoFunction& rho, double z) {
  require_finite(z, "rho::derivative");
  return rho.weight(z);
}

inline double second_derivative(const RhoFunction& rho, double z) {
  require_finite(z, "rho::second_derivative");
  switch (rho.family) {
    case RhoFamily::Identity:
      return 0.0;
    case RhoFamily::SSH: {
      if (z >= -rho.c) return 0.0;
      const double u = (z + rho.c) / rho.c;
      const double t = 1.0 + u * u;
      return -u / (rho.c * t * std::sqrt(t));
    }
    case RhoFamily::LogLogistic: {
      const double s = logistic(z + rho.c);
      return s * (1.0 - s);
    }
  }
  return 0.0;
}

// One rho per likelihood-contribution group, keyed by the model's group label.
struct RhoConfig {
  std::vector<std::pair<std::string, RhoFunction>> groups;

  static RhoConfig all_identity(const std::vector<std::string>& labels) {
    RhoConfig cfg;
    for (const auto& l : labels) cfg.groups.emplace_back(l, RhoFunction::identity());
    return cfg;
  }

  const RhoFunction* find(const std::string& label) const {
    for (const auto& [l, r] : groups)
      if (l == label) return &r;
    return nullptr;
  }

  void set(const std::string& label, RhoFunction rho) {
    for (auto& [l, r] : groups)
      if (l == label) {
        r = rho;
        return;
      }
    groups.emplace_back(label, rho);
  }

  bool is_identity() const {
    for (const auto& [l, r] : groups)
      if (!r.is_identity()) return false;
    return true;
  }

  // tuning-constant multiplier (annealing stage); Identity entries unchanged
  RhoConfig scaled(double mult) const {
    RhoConfig out = *this;
    for (auto& [l, r] : out.groups)
      if (!r.is_identity()) r.c *= mult;
    return out;
  }

  // map onto a model's group order; every model group must be covered
  std::vector<RhoFunction> resolve(const std::vector<std::string>& labels) const {
    std::vector<RhoFunction> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
      const RhoFunction* r = find(l);
      if (!r) throw ConfigError("rho config is missing group '" + l + "'");
      out.push_back(*r);
    }
    return out;
  }
};

}  // namespace rssm

#endif
