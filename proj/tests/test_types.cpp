#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <sstream>

#include "robustssm/io.hpp"
#include "robustssm/types.hpp"

using namespace rssm;
using Catch::Approx;

TEST_CASE("transform round trips are tight") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const ThetaSpec spec = {{"a", ParamTransform::identity()},
                          {"b", ParamTransform::log()},
                          {"c", ParamTransform::scaled_logit(1.0)},
                          {"d", ParamTransform::scaled_logit(0.95)}};
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd unc(4);
    for (int i = 0; i < 4; ++i) unc[i] = u(rng);
    const Theta t = Theta::from_unconstrained(spec, unc);
    const Theta back(spec, t.natural());
    CHECK((back.unconstrained() - unc).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(t.natural()[1] > 0.0);
    CHECK(std::abs(t.natural()[2]) < 1.0);
    CHECK(std::abs(t.natural()[3]) < 0.95);
  }
}

TEST_CASE("transform jacobian matches finite differences") {
  const ParamTransform ts[] = {ParamTransform::identity(), ParamTransform::log(),
                               ParamTransform::scaled_logit(0.95)};
  for (const auto& tr : ts)
    for (double u = -2.0; u <= 2.0; u += 0.37) {
      const double h = 1e-6;
      const double fd = (tr.to_natural(u + h) - tr.to_natural(u - h)) / (2 * h);
      CHECK(tr.jacobian(u) == Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("transform errors") {
  CHECK_THROWS_AS(ParamTransform::log().to_unconstrained(-0.5), ConfigError);
  CHECK_THROWS_AS(ParamTransform::scaled_logit(0.95).to_unconstrained(0.96),
                  ConfigError);
  CHECK_THROWS_AS(ParamTransform::parse("sqrtish"), ConfigError);
  CHECK(ParamTransform::parse("logit(0.95)").bound == Approx(0.95));
}

TEST_CASE("theta json round trip") {
  const ThetaSpec spec = {{"sigma", ParamTransform::log()},
                          {"rho", ParamTransform::scaled_logit(1.0)}};
  Eigen::VectorXd nat(2);
  nat << 0.22, 0.88;
  const Theta t(spec, nat);
  const Theta back = theta_from_json(theta_to_json(t));
  CHECK((back.natural() - t.natural()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(back.name(1) == "rho");
  CHECK(back.spec()[1].transform.kind == ParamTransform::ScaledLogit);
}

TEST_CASE("observation csv round trip with NA cells") {
  ObservationSeries y(3, 2);
  y.labels = {"c1", "c2"};
  y.years = {1990, 1991, 1992};
  y.values << 1.5, 2.5, 3.5, 4.5, 5.5, 6.5;
  y.mask(1, 0) = false;
  y.mask(2, 1) = false;

  std::stringstream ss;
  write_observations_csv(y, ss);
  const ObservationSeries b = read_observations_csv(ss);
  CHECK(b.T() == 3);
  CHECK(b.r() == 2);
  CHECK(b.labels == y.labels);
  CHECK(b.years == y.years);
  CHECK(b.observed_count() == 4);
  for (int t = 0; t < 3; ++t)
    for (int j = 0; j < 2; ++j) {
      CHECK(b.mask(t, j) == y.mask(t, j));
      if (b.mask(t, j)) CHECK(b.values(t, j) == y.values(t, j));
    }
}

TEST_CASE("rho config json round trip") {
  RhoConfig cfg;
  cfg.groups = {{"F-transitions", RhoFunction::ssh(1.2)},
                {"C-observations", RhoFunction::log_logistic(2.0)},
                {"init", RhoFunction::identity()}};
  const RhoConfig back = rho_config_from_json(rho_config_to_json(cfg));
  CHECK(back.groups.size() == 3);
  CHECK(back.find("F-transitions")->c == Approx(1.2));
  CHECK(back.find("C-observations")->family == RhoFamily::LogLogistic);
  CHECK(back.find("init")->is_identity());
  CHECK_FALSE(back.is_identity());
  CHECK(back.scaled(4.0).find("F-transitions")->c == Approx(4.8));
  CHECK_THROWS_AS(cfg.resolve({"F-transitions", "missing-group"}), ConfigError);
}
