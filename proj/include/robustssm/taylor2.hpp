#ifndef ROBUSTSSM_TAYLOR2_HPP
#define ROBUSTSSM_TAYLOR2_HPP

#include <array>
#include <cmath>
#include <type_traits>

#include "robustssm/dual.hpp"

namespace rssm {

// Second-order Taylor value over up to K local variables: value, gradient and
// packed lower-triangular Hessian. The scalar S is double for plain second
// derivatives or DualV for a third-order tangent sweep. All operands of one
// expression must share the same k (mixed scalar/Taylor2 ops handle
// constants).
template <class S, int K>
struct Taylor2 {
  static constexpr int kHessSize = (K * (K + 1)) / 2;

  S val{};
  int k = 0;
  std::array<S, K> g;
  std::array<S, kHessSize> h;

  static constexpr int hidx(int i, int j) {  // requires j <= i
    return i * (i + 1) / 2 + j;
  }

  static Taylor2 constant(const S& value, int k) {
    Taylor2 r;
    r.val = value;
    r.k = k;
    for (int i = 0; i < k; ++i) r.g[i] = S(0.0);
    for (int i = 0; i < r.nh(); ++i) r.h[i] = S(0.0);
    return r;
  }

  static Taylor2 seed(const S& value, int slot, int k) {
    Taylor2 r = constant(value, k);
    r.g[slot] = S(1.0);
    return r;
  }

  int nh() const { return (k * (k + 1)) / 2; }

  const S& hess(int i, int j) const { return i >= j ? h[hidx(i, j)] : h[hidx(j, i)]; }

  Taylor2 operator-() const {
    Taylor2 r;
    r.val = -val;
    r.k = k;
    for (int i = 0; i < k; ++i) r.g[i] = -g[i];
    for (int i = 0; i < nh(); ++i) r.h[i] = -h[i];
    return r;
  }

  Taylor2& operator+=(const Taylor2& b) {
    val += b.val;
    for (int i = 0; i < k; ++i) g[i] += b.g[i];
    for (int i = 0; i < nh(); ++i) h[i] += b.h[i];
    return *this;
  }
  Taylor2& operator-=(const Taylor2& b) {
    val -= b.val;
    for (int i = 0; i < k; ++i) g[i] -= b.g[i];
    for (int i = 0; i < nh(); ++i) h[i] -= b.h[i];
    return *this;
  }

  friend Taylor2 operator+(Taylor2 a, const Taylor2& b) { return a += b; }
  friend Taylor2 operator-(Taylor2 a, const Taylor2& b) { return a -= b; }

  friend Taylor2 operator*(const Taylor2& a, const Taylor2& b) {
    Taylor2 r;
    r.k = a.k;
    r.val = a.val * b.val;
    for (int i = 0; i < a.k; ++i) r.g[i] = a.g[i] * b.val + a.val * b.g[i];
    for (int i = 0; i < a.k; ++i)
      for (int j = 0; j <= i; ++j)
        r.h[hidx(i, j)] = a.h[hidx(i, j)] * b.val + a.val * b.h[hidx(i, j)] +
                          a.g[i] * b.g[j] + a.g[j] * b.g[i];
    return r;
  }

  friend Taylor2 operator/(const Taylor2& a, const Taylor2& b) {
    return a * reciprocal(b);
  }

  // scalar (S or double) broadcast
  Taylor2& operator+=(const S& c) { val += c; return *this; }
  Taylor2& operator-=(const S& c) { val -= c; return *this; }

  friend Taylor2 operator+(Taylor2 a, const S& c) { a.val += c; return a; }
  friend Taylor2 operator+(const S& c, Taylor2 a) { a.val += c; return a; }
  friend Taylor2 operator-(Taylor2 a, const S& c) { a.val -= c; return a; }
  friend Taylor2 operator-(const S& c, const Taylor2& a) { return -a + c; }
  friend Taylor2 operator*(const Taylor2& a, const S& c) {
    Taylor2 r;
    r.k = a.k;
    r.val = a.val * c;
    for (int i = 0; i < a.k; ++i) r.g[i] = a.g[i] * c;
    for (int i = 0; i < a.nh(); ++i) r.h[i] = a.h[i] * c;
    return r;
  }
  friend Taylor2 operator*(const S& c, const Taylor2& a) { return a * c; }
  friend Taylor2 operator/(const Taylor2& a, const S& c) { return a * (S(1.0) / c); }
  friend Taylor2 operator/(const S& c, const Taylor2& a) { return reciprocal(a) * c; }

  template <class D = double, class = std::enable_if_t<!std::is_same_v<S, D>>>
  friend Taylor2 operator+(Taylor2 a, D c) { a.val += S(c); return a; }
  template <class D = double, class = std::enable_if_t<!std::is_same_v<S, D>>>
  friend Taylor2 operator+(D c, Taylor2 a) { a.val += S(c); return a; }
  template <class D = double, class = std::enable_if_t<!std::is_same_v<S, D>>>
  friend Taylor2 operator-(Taylor2 a, D c) { a.val -= S(c); return a; }
  template <class D = double, class = std::enable_if_t<!std::is_same_v<S, D>>>
  friend Taylor2 operator-(D c, const Taylor2& a) { return -a + S(c); }
  template <class D = double, class = std::enable_if_t<!std::is_same_v<S, D>>>
  friend Taylor2 operator*(const Taylor2& a, D c) { return a * S(c); }
  template <class D = double, class = std::enable_if_t<!std::is_same_v<S, D>>>
  friend Taylor2 operator*(D c, const Taylor2& a) { return a * S(c); }
  template <class D = double, class = std::enable_if_t<!std::is_same_v<S, D>>>
  friend Taylor2 operator/(const Taylor2& a, D c) { return a * S(1.0 / c); }
  template <class D = double, class = std::enable_if_t<!std::is_same_v<S, D>>>
  friend Taylor2 operator/(D c, const Taylor2& a) { return reciprocal(a) * S(c); }
};

// f applied through the chain rule given f(u), f'(u), f''(u) at u = a.val.
template <class S, int K>
inline Taylor2<S, K> chain(const Taylor2<S, K>& a, const S& f0, const S& f1, const S& f2) {
  Taylor2<S, K> r;
  r.k = a.k;
  r.val = f0;
  for (int i = 0; i < a.k; ++i) r.g[i] = f1 * a.g[i];
  for (int i = 0; i < a.k; ++i)
    for (int j = 0; j <= i; ++j)
      r.h[Taylor2<S, K>::hidx(i, j)] =
          f1 * a.h[Taylor2<S, K>::hidx(i, j)] + f2 * (a.g[i] * a.g[j]);
  return r;
}

template <class S, int K>
inline Taylor2<S, K> reciprocal(const Taylor2<S, K>& a) {
  const S u = S(1.0) / a.val;
  const S u2 = u * u;
  return chain(a, u, -u2, S(2.0) * u2 * u);
}

template <class S, int K>
inline Taylor2<S, K> exp(const Taylor2<S, K>& a) {
  using std::exp;
  const S e = exp(a.val);
  return chain(a, e, e, e);
}

template <class S, int K>
inline Taylor2<S, K> log(const Taylor2<S, K>& a) {
  using std::log;
  const S f1 = S(1.0) / a.val;
  return chain(a, log(a.val), f1, -(f1 * f1));
}

template <class S, int K>
inline Taylor2<S, K> log1p(const Taylor2<S, K>& a) {
  using std::log1p;
  const S f1 = S(1.0) / (S(1.0) + a.val);
  return chain(a, log1p(a.val), f1, -(f1 * f1));
}

template <class S, int K>
inline Taylor2<S, K> sqrt(const Taylor2<S, K>& a) {
  using std::sqrt;
  const S s = sqrt(a.val);
  const S f1 = S(0.5) / s;
  return chain(a, s, f1, S(-0.5) * f1 / a.val);
}

template <class S, int K>
inline Taylor2<S, K> asinh(const Taylor2<S, K>& a) {
  using std::asinh;
  using std::sqrt;
  const S t2 = S(1.0) + a.val * a.val;
  const S t = sqrt(t2);
  const S f1 = S(1.0) / t;
  return chain(a, asinh(a.val), f1, -a.val / (t2 * t));
}

template <class S, int K>
inline Taylor2<S, K> logistic(const Taylor2<S, K>& a) {
  const S s = logistic(a.val);
  const S sp = s * (S(1.0) - s);
  return chain(a, s, sp, sp * (S(1.0) - S(2.0) * s));
}

template <class S, int K>
inline Taylor2<S, K> log1p_exp(const Taylor2<S, K>& a) {
  const S s = logistic(a.val);
  return chain(a, log1p_exp(a.val), s, s * (S(1.0) - s));
}

template <class S, int K>
inline Taylor2<S, K> tanh(const Taylor2<S, K>& a) {
  using std::tanh;
  const S t = tanh(a.val);
  const S f1 = S(1.0) - t * t;
  return chain(a, t, f1, S(-2.0) * t * f1);
}

template <class S, int K>
inline double value_of(const Taylor2<S, K>& x) {
  return value_of(x.val);
}

template <class S, int K>
inline Taylor2<S, K> square(const Taylor2<S, K>& a) { return a * a; }
inline double square(double a) { return a * a; }
template <int Cap>
inline DualV<Cap> square(const DualV<Cap>& a) { return a * a; }

// overflow-safe log(e^a + e^b) for any supported scalar
template <class T>
inline T log_sum_exp(const T& a, const T& b) {
  if (value_of(a) >= value_of(b)) return a + log1p_exp(b - a);
  return b + log1p_exp(a - b);
}

}  // namespace rssm

#endif
