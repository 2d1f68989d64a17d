#ifndef ROBUSTSSM_DUAL_HPP
#define ROBUSTSSM_DUAL_HPP

#include <algorithm>
#include <array>
#include <cmath>

#include "robustssm/math.hpp"

namespace rssm {

// Forward-mode dual with a fixed-capacity tangent vector. Only the first n
// slots are live; constants carry n = 0 so arithmetic with them costs
// nothing. All seeds of one evaluation must use a common slot layout.
template <int Cap>
struct DualV {
  double v = 0.0;
  int n = 0;
  std::array<double, Cap> d;

  DualV() = default;
  DualV(double value) : v(value), n(0) {}  // NOLINT: implicit by design

  static DualV seed(double value, int slot, int nslots) {
    DualV r;
    r.v = value;
    r.n = nslots;
    std::fill_n(r.d.begin(), nslots, 0.0);
    r.d[slot] = 1.0;
    return r;
  }

  double deriv(int slot) const { return slot < n ? d[slot] : 0.0; }

  DualV operator-() const {
    DualV r;
    r.v = -v;
    r.n = n;
    for (int i = 0; i < n; ++i) r.d[i] = -d[i];
    return r;
  }

  DualV& operator+=(const DualV& b) {
    v += b.v;
    const int c = std::min(n, b.n);
    for (int i = 0; i < c; ++i) d[i] += b.d[i];
    for (int i = n; i < b.n; ++i) d[i] = b.d[i];
    n = std::max(n, b.n);
    return *this;
  }
  DualV& operator-=(const DualV& b) {
    v -= b.v;
    const int c = std::min(n, b.n);
    for (int i = 0; i < c; ++i) d[i] -= b.d[i];
    for (int i = n; i < b.n; ++i) d[i] = -b.d[i];
    n = std::max(n, b.n);
    return *this;
  }
  DualV& operator*=(const DualV& b) { return *this = *this * b; }
  DualV& operator/=(const DualV& b) { return *this = *this / b; }

  friend DualV operator+(DualV a, const DualV& b) { return a += b; }
  friend DualV operator-(DualV a, const DualV& b) { return a -= b; }

  friend DualV operator*(const DualV& a, const DualV& b) {
    DualV r;
    r.v = a.v * b.v;
    r.n = std::max(a.n, b.n);
    const int c = std::min(a.n, b.n);
    for (int i = 0; i < c; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    for (int i = c; i < a.n; ++i) r.d[i] = a.d[i] * b.v;
    for (int i = c; i < b.n; ++i) r.d[i] = a.v * b.d[i];
    return r;
  }

  friend DualV operator/(const DualV& a, const DualV& b) {
    const double ib = 1.0 / b.v;
    DualV r;
    r.v = a.v * ib;
    r.n = std::max(a.n, b.n);
    const double s = -r.v * ib;
    const int c = std::min(a.n, b.n);
    for (int i = 0; i < c; ++i) r.d[i] = a.d[i] * ib + s * b.d[i];
    for (int i = c; i < a.n; ++i) r.d[i] = a.d[i] * ib;
    for (int i = c; i < b.n; ++i) r.d[i] = s * b.d[i];
    return r;
  }

  friend DualV operator+(DualV a, double b) { a.v += b; return a; }
  friend DualV operator+(double a, DualV b) { b.v += a; return b; }
  friend DualV operator-(DualV a, double b) { a.v -= b; return a; }
  friend DualV operator-(double a, const DualV& b) { return -b + a; }
  friend DualV operator*(const DualV& a, double b) {
    DualV r;
    r.v = a.v * b;
    r.n = a.n;
    for (int i = 0; i < a.n; ++i) r.d[i] = a.d[i] * b;
    return r;
  }
  friend DualV operator*(double a, const DualV& b) { return b * a; }
  friend DualV operator/(const DualV& a, double b) { return a * (1.0 / b); }
  friend DualV operator/(double a, const DualV& b) {
    return DualV(a) / b;
  }
};

template <int Cap>
inline DualV<Cap> chain(const DualV<Cap>& a, double f, double fp) {
  DualV<Cap> r;
  r.v = f;
  r.n = a.n;
  for (int i = 0; i < a.n; ++i) r.d[i] = fp * a.d[i];
  return r;
}

template <int Cap>
inline DualV<Cap> exp(const DualV<Cap>& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e);
}
template <int Cap>
inline DualV<Cap> log(const DualV<Cap>& a) {
  return chain(a, std::log(a.v), 1.0 / a.v);
}
template <int Cap>
inline DualV<Cap> log1p(const DualV<Cap>& a) {
  return chain(a, std::log1p(a.v), 1.0 / (1.0 + a.v));
}
template <int Cap>
inline DualV<Cap> sqrt(const DualV<Cap>& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s);
}
template <int Cap>
inline DualV<Cap> asinh(const DualV<Cap>& a) {
  return chain(a, std::asinh(a.v), 1.0 / std::sqrt(1.0 + a.v * a.v));
}
template <int Cap>
inline DualV<Cap> logistic(const DualV<Cap>& a) {
  const double s = logistic(a.v);
  return chain(a, s, s * (1.0 - s));
}
template <int Cap>
inline DualV<Cap> log1p_exp(const DualV<Cap>& a) {
  return chain(a, log1p_exp(a.v), logistic(a.v));
}
template <int Cap>
inline DualV<Cap> tanh(const DualV<Cap>& a) {
  const double t = std::tanh(a.v);
  return chain(a, t, 1.0 - t * t);
}

inline double value_of(double x) { return x; }
template <int Cap>
inline double value_of(const DualV<Cap>& x) { return x.v; }

}  // namespace rssm

#endif
