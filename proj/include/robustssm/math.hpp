#ifndef ROBUSTSSM_MATH_HPP
#define ROBUSTSSM_MATH_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rssm {

inline constexpr double kLog2Pi = 1.8378770664093454836;

// log(1 + e^u) without overflow; for u > 35 the correction e^{-u} is below
// double resolution of u itself.
inline double log1p_exp(double u) {
  if (u > 35.0) return u + std::exp(-u);
  if (u < -40.0) return std::exp(u);
  return std::log1p(std::exp(u));
}

inline double logistic(double u) {
  if (u >= 0.0) {
    const double e = std::exp(-u);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(u);
  return e / (1.0 + e);
}

inline double log_sum_exp(double a, double b) {
  if (a >= b) return a + log1p_exp(b - a);
  return b + log1p_exp(a - b);
}

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct StructureError : std::runtime_error {
  explicit StructureError(const std::string& what) : std::runtime_error(what) {}
};

inline void require_finite(double z, const char* ctx) {
  if (!std::isfinite(z))
    throw EvalError(std::string(ctx) + ": non-finite argument");
}

}  // namespace rssm

#endif
