#ifndef POPSIZE_COVARIATE_ESTIMATORS_HPP
#define POPSIZE_COVARIATE_ESTIMATORS_HPP

#include <tuple>
#include <vector>

#include "popsize/data_io.hpp"
#include "popsize/estimators.hpp"
#include "popsize/glm.hpp"
#include "popsize/linalg.hpp"

namespace popsize {

/// Per-unit inclusion machinery for the Horvitz-Thompson sum
/// N_hat = sum_i 1/w_i with w_i estimated from a regression:
///   eta_i  linear predictor
///   v_i    -2 e^{eta_i} (two-count binomial route) or -e^{eta_i}
///          (zero-truncated Poisson route)
///   w_i    1 - e^{v_i}, the inclusion probability
///   grad   row i holds d(1/w_i)/d(beta) = ((1-w_i) v_i / w_i^2) x_i
struct UnitWeights {
  std::vector<double> eta;
  std::vector<double> v;
  std::vector<double> w;
  Matrix grad;
  int clamp_events = 0;   // w_i raised to the floor before division

  std::vector<double> grad_row(std::size_t i) const;
  std::vector<double> grad_sum() const;
};

// Floor applied to predicted inclusion probabilities before 1/w_i.
inline constexpr double kWeightFloor = 1e-12;

// Evaluate weights for every design row at beta; scale is the factor c
// in v_i = -c e^{eta_i} (2 for the Zelterman route, 1 for ZT-Poisson).
UnitWeights make_unit_weights(const DesignMatrix &design,
                              const std::vector<double> &beta, double scale);

// Variance of sum_i 1/w_i split into the sampling term
// sum (1-w_i)/w_i^2 and the delta-method parameter term
// (sum grad_i)^T cov_beta (sum grad_i).
std::pair<double, double> zelterman_reg_variance(const UnitWeights &weights,
                                                 const Matrix &cov_beta);

/// Covariate-adjusted Zelterman estimator: logistic regression of
/// "count equals 2" against "count equals 1" on the units with counts
/// in {1,2}, then a Horvitz-Thompson sum over all observed units.
std::tuple<FitResult, PopulationEstimate, UnitWeights>
zelterman_regression(const Dataset &dataset, const ModelSpec &spec);

/// Zero-truncated Poisson regression estimator over all observed units.
std::tuple<FitResult, PopulationEstimate, UnitWeights>
zt_poisson_regression_estimate(const Dataset &dataset, const ModelSpec &spec);

} // namespace popsize

#endif
