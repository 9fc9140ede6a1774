#include "popsize/estimators.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "popsize/errors.hpp"

namespace popsize {

std::string method_name(Method m) {
  switch (m) {
  case Method::Zelterman:
    return "zelterman";
  case Method::Chao:
    return "chao";
  case Method::ZTPoissonMLE:
    return "ztpoisson";
  case Method::ZeltermanRegression:
    return "zelterman-reg";
  case Method::ZTPoissonRegression:
    return "ztpoisson-reg";
  }
  return "?";
}

namespace {

void attach_rate_ci(RateEstimate &r) {
  if (r.var_log_lambda) {
    const double half = kZ975 * std::sqrt(*r.var_log_lambda);
    r.ci_low = r.lambda_hat * std::exp(-half);
    r.ci_high = r.lambda_hat * std::exp(half);
  } else {
    r.ci_low = r.ci_high = std::numeric_limits<double>::quiet_NaN();
  }
}

void attach_estimate_ci(PopulationEstimate &e) {
  e.se = std::sqrt(e.var_sampling + e.var_parameter);
  e.ci_low = e.n_hat - kZ975 * e.se;
  e.ci_high = e.n_hat + kZ975 * e.se;
}

} // namespace

RateEstimate zelterman_lambda(const FrequencyTable &table, int j) {
  if (j < 1)
    throw DomainError("zelterman_lambda: j must be >= 1");
  const std::int64_t fj = table[j];
  const std::int64_t fj1 = table[j + 1];
  if (fj == 0)
    throw DegenerateDataError("zelterman_lambda: denominator frequency zero "
                              "(f" +
                              std::to_string(j) + "=0)");
  if (fj1 == 0)
    throw DegenerateDataError(
        "zelterman_lambda: f" + std::to_string(j + 1) +
        "=0, estimator collapses to lambda_hat = 0");
  RateEstimate r;
  r.lambda_hat = (j + 1.0) * static_cast<double>(fj1) / static_cast<double>(fj);
  if (j == 1)
    r.var_log_lambda = 1.0 / static_cast<double>(fj) +
                       1.0 / static_cast<double>(fj1);
  attach_rate_ci(r);
  return r;
}

double var_lambda1(const FrequencyTable &table) {
  const double f1 = static_cast<double>(table[1]);
  const double f2 = static_cast<double>(table[2]);
  if (f1 <= 0.0)
    throw DegenerateDataError("var_lambda1: f1=0");
  return 4.0 * f2 * (f1 + f2) / (f1 * f1 * f1);
}

double horvitz_thompson(std::int64_t n, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("horvitz_thompson: lambda must be positive and finite");
  return static_cast<double>(n) / (-std::expm1(-lambda));
}

PopulationEstimate zelterman_estimate(const FrequencyTable &table) {
  const RateEstimate rate = zelterman_lambda(table, 1);
  const double lambda = rate.lambda_hat;
  const double w = -std::expm1(-lambda);
  const double q = 1.0 - w;
  const double n = static_cast<double>(table.n());

  PopulationEstimate e;
  e.method = Method::Zelterman;
  e.n_observed = table.n();
  e.n_hat = n / w;
  e.var_sampling = n * q / (w * w);
  // delta-method term: the summed gradient of the Horvitz-Thompson sum,
  // squared, times Var(log lambda_hat)
  const double grad_sum = n * q * lambda / (w * w);
  e.var_parameter = grad_sum * grad_sum * (*rate.var_log_lambda);
  attach_estimate_ci(e);
  return e;
}

PopulationEstimate chao_estimate(const FrequencyTable &table) {
  const double f1 = static_cast<double>(table[1]);
  const double f2 = static_cast<double>(table[2]);
  if (f2 <= 0.0)
    throw DegenerateDataError("chao_estimate: f2=0, Chao estimator undefined");
  const double n = static_cast<double>(table.n());

  PopulationEstimate e;
  e.method = Method::Chao;
  e.n_observed = table.n();
  e.n_hat = n + f1 * f1 / (2.0 * f2);
  const double r = f1 / f2;
  e.var_sampling =
      f2 * (0.25 * r * r * r * r + r * r * r + 0.5 * r * r);
  e.var_parameter = 0.0;
  attach_estimate_ci(e);
  return e;
}

std::pair<RateEstimate, PopulationEstimate>
zt_poisson_mle(const FrequencyTable &table) {
  if (table.n() < 1)
    throw DegenerateDataError("zt_poisson_mle: empty table");
  const double ybar = mean_count(table);
  if (!(ybar > 1.0))
    throw DegenerateDataError(
        "zt_poisson_mle: mean count <= 1, the score equation "
        "lambda/(1-e^{-lambda}) = ybar has no positive root");

  // truncated mean mu(lambda) = lambda / (1 - e^{-lambda}) is increasing
  // with mu(0+) = 1, so the root is bracketed by (0, ybar]
  const auto mu = [](double lam) { return lam / (-std::expm1(-lam)); };
  const auto dmu = [](double lam) {
    const double w = -std::expm1(-lam);
    const double q = 1.0 - w;
    return (w - lam * q) / (w * w);
  };

  double lo = 0.0;
  double hi = 2.0 * ybar;
  double lambda = ybar;
  bool converged = false;
  int iter = 0;
  for (; iter < 100; ++iter) {
    const double g = mu(lambda) - ybar;
    if (g > 0.0)
      hi = lambda;
    else
      lo = lambda;
    double next = lambda - g / dmu(lambda);
    if (!(next > lo) || !(next < hi))
      next = 0.5 * (lo + hi);
    const double step = next - lambda;
    lambda = next;
    if (std::abs(step) < 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "zt_poisson_mle: no convergence after 100 iterations, last "
           "iterate lambda="
        << lambda;
    throw IterationError(msg.str());
  }

  const double w = -std::expm1(-lambda);
  const double q = 1.0 - w;
  const double n = static_cast<double>(table.n());

  // observed information for lambda: sum_i y_i / lambda^2 - n q / w^2
  const double info = static_cast<double>(table.total()) / (lambda * lambda) -
                      n * q / (w * w);
  if (!(info > 0.0))
    throw DegenerateDataError("zt_poisson_mle: non-positive observed "
                              "information at the MLE");
  RateEstimate rate;
  rate.lambda_hat = lambda;
  rate.var_log_lambda = 1.0 / (info * lambda * lambda);
  attach_rate_ci(rate);

  PopulationEstimate e;
  e.method = Method::ZTPoissonMLE;
  e.n_observed = table.n();
  e.n_hat = n / w;
  e.var_sampling = n * q / (w * w);
  const double grad_sum = n * q * lambda / (w * w);
  e.var_parameter = grad_sum * grad_sum * (*rate.var_log_lambda);
  attach_estimate_ci(e);
  return {rate, e};
}

} // namespace popsize
