#ifndef POPSIZE_ESTIMATORS_HPP
#define POPSIZE_ESTIMATORS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "popsize/counts.hpp"

namespace popsize {

// 97.5% standard normal quantile used for every 95% interval.
inline constexpr double kZ975 = 1.959964;

enum class Method {
  Zelterman,
  Chao,
  ZTPoissonMLE,
  ZeltermanRegression,
  ZTPoissonRegression,
};

std::string method_name(Method m);

/// Population size estimate with its variance split into the sampling
/// term and the parameter-uncertainty term; se^2 is their sum.
/// The 95% interval is on the natural scale: n_hat +- 1.959964 se.
struct PopulationEstimate {
  double n_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t n_observed = 0;
  Method method = Method::Zelterman;
  double var_sampling = 0.0;
  double var_parameter = 0.0;
};

/// Poisson rate estimate; the 95% interval is multiplicative,
/// lambda_hat * exp(-+ 1.959964 sqrt(var_log_lambda)).
/// var_log_lambda is absent when no variance formula applies.
struct RateEstimate {
  double lambda_hat = 0.0;
  std::optional<double> var_log_lambda;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Ratio estimator lambda_j = (j+1) f_{j+1} / f_j. The log-scale variance
// 1/f1 + 1/f2 is attached for j = 1 only.
RateEstimate zelterman_lambda(const FrequencyTable &table, int j = 1);

// Natural-scale variance of the j = 1 ratio estimator,
// 4 f2 (f1 + f2) / f1^3.
double var_lambda1(const FrequencyTable &table);

// n / (1 - e^{-lambda}), with a stable denominator.
double horvitz_thompson(std::int64_t n, double lambda);

// Horvitz-Thompson estimate with the singleton/doubleton rate plugged in.
PopulationEstimate zelterman_estimate(const FrequencyTable &table);

// Lower-bound estimator n + f1^2 / (2 f2) with its asymptotic variance.
PopulationEstimate chao_estimate(const FrequencyTable &table);

// Homogeneous zero-truncated Poisson maximum likelihood: solves
// lambda / (1 - e^{-lambda}) = mean count by safeguarded Newton.
std::pair<RateEstimate, PopulationEstimate>
zt_poisson_mle(const FrequencyTable &table);

} // namespace popsize

#endif
