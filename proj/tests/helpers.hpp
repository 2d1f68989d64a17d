#ifndef ROBUSTSSM_TEST_HELPERS_HPP
#define ROBUSTSSM_TEST_HELPERS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>

namespace rssm::test {

inline double central_diff(const std::function<double(double)>& f, double x,
                           double h = 0.0) {
  if (h == 0.0) h = std::cbrt(2.2e-16) * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline Eigen::VectorXd fd_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double hscale = 0.0) {
  Eigen::VectorXd g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double h = (hscale == 0.0)
                         ? std::cbrt(2.2e-16) * std::max(1.0, std::abs(x[i]))
                         : hscale;
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline Eigen::MatrixXd fd_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double hscale = 1e-5) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd j(f0.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double h = hscale * std::max(1.0, std::abs(x[i]));
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    j.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

inline Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng, double ridge = 0.5) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  Eigen::MatrixXd s = a * a.transpose() / n;
  s.diagonal().array() += ridge;
  return s;
}

}  // namespace rssm::test

#endif
