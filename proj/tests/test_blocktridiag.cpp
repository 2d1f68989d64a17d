#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "helpers.hpp"
#include "robustssm/block_tridiag.hpp"

using namespace rssm;

namespace {

BlockTridiagonal random_spd_tridiag(int nb, int q, std::mt19937_64& rng) {
  // assemble as J J^T of a block-bidiagonal J, guaranteeing SPD
  std::normal_distribution<double> nd;
  std::vector<Eigen::MatrixXd> d(nb), s(nb > 1 ? nb - 1 : 0);
  for (int b = 0; b < nb; ++b) {
    d[b] = test::random_spd(q, rng, 1.0);
    if (b + 1 < nb) {
      s[b] = Eigen::MatrixXd(q, q);
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) s[b](i, j) = 0.4 * nd(rng);
    }
  }
  BlockTridiagonal a(nb, q);
  for (int b = 0; b < nb; ++b) {
    a.diag(b) = d[b] * d[b].transpose();
    a.diag(b).diagonal().array() += 0.5;
    if (b > 0) {
      a.diag(b) += s[b - 1] * s[b - 1].transpose();
      a.sub(b - 1) = s[b - 1] * d[b - 1].transpose();
    }
  }
  return a;
}

}  // namespace

TEST_CASE("block cholesky reproduces dense results") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const int nb = 1 + static_cast<int>(rng() % 6);
    const int q = 1 + static_cast<int>(rng() % 3);
    const BlockTridiagonal a = random_spd_tridiag(nb, q, rng);
    const Eigen::MatrixXd dense = a.to_dense();

    BlockCholesky chol;
    REQUIRE(chol.factor(a));

    // log determinant
    const double ld = std::log(dense.determinant());
    CHECK(std::abs(chol.log_det() - ld) < 1e-8 * std::max(1.0, std::abs(ld)));

    // solve
    Eigen::VectorXd rhs(a.dim());
    std::normal_distribution<double> nd;
    for (int i = 0; i < rhs.size(); ++i) rhs[i] = nd(rng);
    const Eigen::VectorXd x = chol.solve(rhs);
    CHECK((dense * x - rhs).cwiseAbs().maxCoeff() < 1e-9);

    // partial inverse equals the dense inverse on the pattern
    const BlockTridiagonal z = chol.partial_inverse();
    const Eigen::MatrixXd zi = dense.inverse();
    for (int b = 0; b < nb; ++b) {
      CHECK((z.diag(b) - zi.block(b * q, b * q, q, q)).cwiseAbs().maxCoeff() <
            1e-9);
      if (b + 1 < nb)
        CHECK((z.sub(b) - zi.block((b + 1) * q, b * q, q, q))
                  .cwiseAbs()
                  .maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("factor fails on indefinite input and succeeds with shift") {
  BlockTridiagonal a(2, 2);
  a.diag(0) << -1.0, 0.0, 0.0, 2.0;
  a.diag(1) << 3.0, 0.0, 0.0, 3.0;
  BlockCholesky chol;
  CHECK_FALSE(chol.factor(a));
  CHECK(chol.factor(a, 2.5));
}

TEST_CASE("add_sym rejects non-adjacent couplings") {
  BlockTridiagonal a(4, 2);
  a.add_sym(0, 1, 0.5);
  a.add_sym(3, 1, 0.25);
  CHECK_THROWS_AS(a.add_sym(7, 0, 1.0), StructureError);
  CHECK(a.get(0, 1) == 0.5);
  CHECK(a.get(1, 0) == 0.5);
  CHECK(a.get(1, 3) == 0.25);
}

TEST_CASE("multiply agrees with dense multiply") {
  std::mt19937_64 rng(9);
  const BlockTridiagonal a = random_spd_tridiag(5, 3, rng);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(a.dim());
  for (int i = 0; i < v.size(); ++i) v[i] = nd(rng);
  CHECK((a.multiply(v) - a.to_dense() * v).cwiseAbs().maxCoeff() < 1e-10);
}
