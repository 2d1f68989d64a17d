#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <span>

#include "helpers.hpp"
#include "robustssm/ad.hpp"
#include "robustssm/rho.hpp"

using namespace rssm;
using Catch::Approx;

namespace {

// scalar-generic test functions
struct Poly {
  template <class T>
  T operator()(std::span<const T> x) const {
    return x[0] * x[0] + 3.0 * x[1];
  }
};

struct Mixture {
  template <class T>
  T operator()(std::span<const T> x) const {
    using std::exp;
    using std::log;
    using std::sqrt;
    using std::asinh;
    T a = exp(x[0] * 0.3) + log(x[1] + 4.0);
    T b = sqrt(x[2] * x[2] + 1.5) - asinh(x[0] - x[2]);
    T c = logistic(x[1] * x[0]) + log1p_exp(x[2] - x[1]);
    T d = log_sum_exp(x[0], x[2] * 0.5);
    return a * b + c / (x[1] + 7.0) - d;
  }
};

}  // namespace

TEST_CASE("gradient of a polynomial") {
  Eigen::VectorXd at(2);
  at << 2.0, 5.0;
  const Eigen::VectorXd g = ad::gradient(Poly{}, at);
  CHECK(g[0] == Approx(4.0).margin(1e-14));
  CHECK(g[1] == Approx(3.0).margin(1e-14));
}

TEST_CASE("gradient through the rho vocabulary") {
  const RhoFunction rho = RhoFunction::ssh(1.0);
  auto f = [&](auto x) { return rho(x[0]); };
  Eigen::VectorXd at(1);
  at << -2.0;
  const Eigen::VectorXd g = ad::gradient(f, at);
  CHECK(g[0] == Approx(std::sqrt(0.5)).epsilon(1e-13));
}

TEST_CASE("gradient matches finite differences for mixed compositions") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd(0.0, 0.8);
  for (int rep = 0; rep < 25; ++rep) {
    Eigen::VectorXd at(3);
    for (int i = 0; i < 3; ++i) at[i] = nd(rng);
    const Eigen::VectorXd g = ad::gradient(Mixture{}, at);
    const Eigen::VectorXd fd = test::fd_gradient(
        [&](const Eigen::VectorXd& x) {
          std::vector<double> xs(x.data(), x.data() + x.size());
          return Mixture{}(std::span<const double>(xs));
        },
        at);
    for (int i = 0; i < 3; ++i) CHECK(test::rel_err(g[i], fd[i]) < 1e-6);
  }
}

TEST_CASE("gradient is linear in the objective") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd(0.0, 0.7);
  auto f1 = [](auto x) { return exp(x[0] * 0.2) * x[1]; };
  auto f2 = [](auto x) { return log(x[1] * x[1] + 2.0) - x[0]; };
  auto fsum = [&](auto x) { return f1(x) + f2(x); };
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd at(2);
    at << nd(rng), nd(rng);
    const Eigen::VectorXd g =
        ad::gradient(f1, at) + ad::gradient(f2, at);
    const Eigen::VectorXd gs = ad::gradient(fsum, at);
    CHECK((g - gs).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("second-order sweep agrees with nested duals and FD") {
  // d2/dz2 of rho_ssh: checks the Taylor2 chain rule against the closed form
  const RhoFunction rho = RhoFunction::ssh(1.0);
  using T2 = Taylor2<double, 1>;
  const T2 z = T2::seed(-2.0, 0, 1);
  const T2 r = rho(z);
  CHECK(r.val == Approx(std::asinh(-1.0) - 1.0).epsilon(1e-14));
  CHECK(r.g[0] == Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(r.h[0] == Approx(second_derivative(rho, -2.0)).epsilon(1e-12));
}

TEST_CASE("third-order tangents through Taylor2<DualV>") {
  // f(x) = exp(a x): all mixed third derivatives known in closed form
  using S = DualV<1>;
  using T2 = Taylor2<S, 1>;
  const double a = 0.7, x0 = 0.3;
  S xv = S::seed(x0, 0, 1);
  T2 x = T2::seed(xv, 0, 1);
  using std::exp;
  const T2 r = exp(x * a);
  const double e = std::exp(a * x0);
  CHECK(value_of(r) == Approx(e).epsilon(1e-14));
  CHECK(r.g[0].v == Approx(a * e).epsilon(1e-14));
  CHECK(r.h[0].v == Approx(a * a * e).epsilon(1e-14));
  CHECK(r.h[0].d[0] == Approx(a * a * a * e).epsilon(1e-13));
}

TEST_CASE("block tridiagonal hessian of a quadratic chain") {
  // sum_t -(x_t - x_{t-1})^2 / 2 over 3 scalar blocks
  auto f = [](auto x) {
    using T = std::decay_t<decltype(x[0])>;
    T acc = -0.5 * square(x[1] - x[0]);
    acc += -0.5 * square(x[2] - x[1]);
    return acc;
  };
  Eigen::VectorXd at(3);
  at << 0.3, -0.2, 1.1;
  const SparseHessian h = ad::hessian_block_tridiagonal(f, at, 1);
  Eigen::MatrixXd expect(3, 3);
  expect << -1, 1, 0, 1, -2, 1, 0, 1, -1;
  CHECK((h.to_dense() - expect).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("off-pattern entries vanish for Markov objectives") {
  // T=3, q=2 toy: random adjacent couplings only
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  Eigen::VectorXd at(8);
  for (int i = 0; i < 8; ++i) at[i] = nd(rng);
  auto f = [](auto x) {
    using T = std::decay_t<decltype(x[0])>;
    T acc = T(0.0) * x[0];
    for (int t = 1; t < 4; ++t) {
      acc += -0.7 * square(x[2 * t] - 0.9 * x[2 * t - 2] + 0.1 * x[2 * t - 1]);
      acc += -0.4 * square(x[2 * t + 1] - 0.5 * x[2 * t - 1]);
      acc += exp(x[2 * t] * 0.05) * 0.3;
    }
    return acc;
  };
  const SparseHessian h = ad::hessian_block_tridiagonal(f, at, 2);
  const Eigen::MatrixXd dense = ad::hessian_dense(f, at);
  // pattern entries agree
  CHECK((h.to_dense() - dense).cwiseAbs().maxCoeff() < 1e-10);
  // off-pattern entries are numerically zero
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (std::abs(i / 2 - j / 2) > 1) CHECK(std::abs(dense(i, j)) < 1e-12);
  CHECK(h.max_asymmetry() < 1e-12);
}

TEST_CASE("structure violation raises") {
  auto bad = [](auto x) { return x[0] * x[4]; };  // couples blocks 0 and 4
  Eigen::VectorXd at = Eigen::VectorXd::Constant(5, 0.5);
  CHECK_THROWS_AS(ad::hessian_block_tridiagonal(bad, at, 1, 64),
                  StructureError);
}

TEST_CASE("non-finite evaluation raises") {
  auto f = [](auto x) { using std::log; return log(x[0]); };
  Eigen::VectorXd at(1);
  at << -1.0;
  CHECK_THROWS_AS(ad::gradient(f, at), EvalError);
}

TEST_CASE("elementary ops match finite differences away from branch points") {
  auto ops = std::vector<std::function<double(double)>>{
      [](double u) { return std::exp(u); },
      [](double u) { return std::log(u + 5.0); },
      [](double u) { return std::sqrt(u * u + 0.7); },
      [](double u) { return std::asinh(u); },
      [](double u) { return logistic(u); },
      [](double u) { return log1p_exp(u); }};
  auto duals = std::vector<std::function<DualV<1>(DualV<1>)>>{
      [](DualV<1> u) { return exp(u); },
      [](DualV<1> u) { return log(u + 5.0); },
      [](DualV<1> u) { return sqrt(u * u + 0.7); },
      [](DualV<1> u) { return asinh(u); },
      [](DualV<1> u) { return logistic(u); },
      [](DualV<1> u) { return log1p_exp(u); }};
  for (size_t k = 0; k < ops.size(); ++k) {
    for (double u = -3.0; u <= 3.0; u += 0.31) {
      const double fd = test::central_diff(ops[k], u);
      const DualV<1> r = duals[k](DualV<1>::seed(u, 0, 1));
      CHECK(test::rel_err(r.d[0], fd) < 1e-6);
    }
  }
}
