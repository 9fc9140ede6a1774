#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "popsize/covariate_estimators.hpp"
#include "popsize/errors.hpp"
#include "popsize/estimators.hpp"

#include "support.hpp"

using namespace popsize;
using testsupport::close_rel;

TEST_CASE("heroin users adjusted for age") {
  const Dataset ds = testsupport::heroin_dataset();
  const auto [fit, est, weights] = zelterman_regression(ds, {true, {"age"}});
  CHECK(fit.family == Family::Logistic);
  CHECK(fit.n_fit == 160);   // only counts 1 and 2 enter the likelihood
  CHECK(fit.log_lik == doctest::Approx(-93.86).epsilon(2.2e-4));
  CHECK(est.method == Method::ZeltermanRegression);
  CHECK(est.n_observed == 268);
  CHECK(std::abs(est.n_hat - 505.0) < 2.0);
  CHECK(std::abs(est.ci_low - 379.0) < 5.0);
  CHECK(std::abs(est.ci_high - 630.0) < 5.0);
  CHECK(weights.w.size() == 268);
  CHECK(weights.clamp_events == 0);
}

TEST_CASE("methamphetamine users adjusted for age") {
  const Dataset ds = testsupport::meth_dataset();
  const auto [fit, est, weights] = zelterman_regression(ds, {true, {"age"}});
  CHECK(fit.n_fit == 271);
  CHECK(fit.log_lik == doctest::Approx(-42.72).epsilon(5e-4));
  CHECK(std::abs(est.n_hat - 3772.0) < 5.0);
  CHECK(std::abs(est.ci_low - 1376.0) < 15.0);
  CHECK(std::abs(est.ci_high - 6169.0) < 15.0);
}

TEST_CASE("intercept-only regression reduces to the homogeneous estimator") {
  SUBCASE("bangkok frequency data") {
    const Dataset ds =
        dataset_from_counts(testsupport::bangkok_meth_table().expand());
    const auto [fit, est, weights] = zelterman_regression(ds, {true, {}});
    const PopulationEstimate homog =
        zelterman_estimate(testsupport::bangkok_meth_table());
    CHECK(close_rel(est.n_hat, homog.n_hat, 1e-6));
    CHECK(close_rel(est.se, homog.se, 1e-6));
    // the logistic intercept is the log of half the rate
    CHECK(2.0 * std::exp(fit.beta[0]) ==
          doctest::Approx(0.10468850353243417).epsilon(1e-8));
  }
  SUBCASE("heroin and methamphetamine record data") {
    for (const Dataset &ds :
         {testsupport::heroin_dataset(), testsupport::meth_dataset()}) {
      const auto [fit, est, weights] = zelterman_regression(ds, {true, {}});
      const PopulationEstimate homog =
          zelterman_estimate(ds.frequency_table());
      CHECK(close_rel(est.n_hat, homog.n_hat, 1e-6));
      CHECK(close_rel(est.se, homog.se, 1e-6));
      CHECK(close_rel(est.var_sampling, homog.var_sampling, 1e-6));
      CHECK(close_rel(est.var_parameter, homog.var_parameter, 1e-6));
    }
  }
}

TEST_CASE("zt-poisson regression reduces to the homogeneous MLE") {
  for (const Dataset &ds :
       {dataset_from_counts(testsupport::bangkok_meth_table().expand()),
        testsupport::heroin_dataset(), testsupport::meth_dataset()}) {
    const auto [fit, est, weights] =
        zt_poisson_regression_estimate(ds, {true, {}});
    const auto [rate, homog] = zt_poisson_mle(ds.frequency_table());
    CHECK(close_rel(est.n_hat, homog.n_hat, 1e-6));
    CHECK(close_rel(est.se, homog.se, 1e-6));
    CHECK(std::exp(fit.beta[0]) ==
          doctest::Approx(rate.lambda_hat).epsilon(1e-8));
  }
}

TEST_CASE("zt-poisson regression on the bangkok data") {
  const Dataset ds =
      dataset_from_counts(testsupport::bangkok_meth_table().expand());
  const auto [fit, est, weights] =
      zt_poisson_regression_estimate(ds, {true, {}});
  CHECK(est.method == Method::ZTPoissonRegression);
  CHECK(std::abs(est.n_hat - 15325.0) < 10.0);
  CHECK(std::abs(est.ci_low - 13989.0) < 20.0);
  CHECK(std::abs(est.ci_high - 16661.0) < 20.0);
}

TEST_CASE("units beyond count two only enter the inclusion sum") {
  const Dataset ds = testsupport::heroin_dataset();
  const auto [fit, est, weights] = zelterman_regression(ds, {true, {"age"}});

  // removing a count-4 unit leaves the logistic data untouched
  Dataset reduced = ds;
  std::size_t removed = 0;
  for (std::size_t i = 0; i < reduced.units.size(); ++i)
    if (reduced.units[i].count == 4) {
      removed = i;
      reduced.units.erase(reduced.units.begin() + i);
      break;
    }
  const auto [fit2, est2, weights2] =
      zelterman_regression(reduced, {true, {"age"}});
  for (std::size_t j = 0; j < fit.beta.size(); ++j)
    CHECK(fit2.beta[j] == doctest::Approx(fit.beta[j]).epsilon(1e-12));
  const double unit_share = 1.0 / weights.w[removed];
  CHECK(est.n_hat - est2.n_hat ==
        doctest::Approx(unit_share).epsilon(1e-9));
}

TEST_CASE("per-unit gradients match finite differences") {
  const Dataset ds = testsupport::heroin_dataset();
  const DesignMatrix design = build_design(ds, {true, {"age"}});
  const auto [fit, est, weights] = zelterman_regression(ds, {true, {"age"}});

  auto inv_w = [&](std::size_t i, const std::vector<double> &beta) {
    const UnitWeights uw = make_unit_weights(design, beta, 2.0);
    return 1.0 / uw.w[i];
  };
  const double h = 1e-5;
  for (std::size_t i = 0; i < design.rows(); i += 13) {
    for (std::size_t j = 0; j < fit.beta.size(); ++j) {
      std::vector<double> up = fit.beta, down = fit.beta;
      up[j] += h;
      down[j] -= h;
      const double fd = (inv_w(i, up) - inv_w(i, down)) / (2.0 * h);
      CHECK(close_rel(weights.grad(i, j), fd, 1e-5));
    }
  }
}

TEST_CASE("estimate is invariant under affine covariate changes") {
  const Dataset ds = testsupport::heroin_dataset();
  Dataset rescaled = ds;
  for (ObservedUnit &u : rescaled.units) {
    const double age = std::get<double>(u.values[0]);
    u.values[0] = (age - 30.0) / 10.0;
  }
  const auto [fit1, est1, w1] = zelterman_regression(ds, {true, {"age"}});
  const auto [fit2, est2, w2] =
      zelterman_regression(rescaled, {true, {"age"}});
  CHECK(close_rel(est1.n_hat, est2.n_hat, 1e-8));
  CHECK(close_rel(est1.se, est2.se, 1e-8));
  for (std::size_t i = 0; i < w1.w.size(); i += 17)
    CHECK(close_rel(w1.w[i], w2.w[i], 1e-8));
}

TEST_CASE("variance split") {
  const Dataset ds = testsupport::heroin_dataset();
  const auto [fit, est, weights] = zelterman_regression(ds, {true, {"age"}});
  const auto [vs, vp] = zelterman_reg_variance(weights, fit.cov_beta);
  CHECK(vs > 0.0);
  CHECK(vp >= 0.0);
  CHECK(est.se * est.se == doctest::Approx(vs + vp).epsilon(1e-12));

  SUBCASE("dimension mismatch is caught") {
    CHECK_THROWS_AS(zelterman_reg_variance(weights, Matrix(3, 3)),
                    UsageError);
  }
  SUBCASE("parameter term stays nonnegative across random subsamples") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Splitmix64 rng(seed);
      Dataset sub;
      sub.schema = ds.schema;
      for (const ObservedUnit &u : ds.units)
        if (rng.next_double() < 0.6)
          sub.units.push_back(u);
      try {
        const auto [f, e, w] = zelterman_regression(sub, {true, {"age"}});
        CHECK(e.var_parameter >= 0.0);
        CHECK(e.n_hat >= static_cast<double>(sub.units.size()));
      } catch (const Error &) {
        // a subsample may lose all count-2 units; that is fine here
      }
    }
  }
}

TEST_CASE("degenerate regression inputs") {
  SUBCASE("no count-2 units") {
    const Dataset ds = dataset_from_counts({1, 1, 1, 3});
    CHECK_THROWS_AS(zelterman_regression(ds, {true, {}}),
                    DegenerateDataError);
  }
  SUBCASE("no count-1 units") {
    const Dataset ds = dataset_from_counts({2, 2, 5});
    CHECK_THROWS_AS(zelterman_regression(ds, {true, {}}),
                    DegenerateDataError);
  }
}

TEST_CASE("inclusion probabilities are clamped before inversion") {
  DesignMatrix design;
  design.column_names = {"intercept"};
  design.values = Matrix(1, 1, 1.0);
  const UnitWeights uw = make_unit_weights(design, {-40.0}, 2.0);
  CHECK(uw.clamp_events == 1);
  CHECK(uw.w[0] == kWeightFloor);

  const UnitWeights fine = make_unit_weights(design, {0.0}, 2.0);
  CHECK(fine.clamp_events == 0);
  CHECK(fine.w[0] == doctest::Approx(-std::expm1(-2.0)).epsilon(1e-15));
}
