#include "popsize/covariate_estimators.hpp"

#include <cmath>

#include "popsize/errors.hpp"

namespace popsize {

std::vector<double> UnitWeights::grad_row(std::size_t i) const {
  std::vector<double> out(grad.cols());
  for (std::size_t j = 0; j < grad.cols(); ++j)
    out[j] = grad(i, j);
  return out;
}

std::vector<double> UnitWeights::grad_sum() const {
  std::vector<double> out(grad.cols(), 0.0);
  for (std::size_t i = 0; i < grad.rows(); ++i)
    for (std::size_t j = 0; j < grad.cols(); ++j)
      out[j] += grad(i, j);
  return out;
}

UnitWeights make_unit_weights(const DesignMatrix &design,
                              const std::vector<double> &beta, double scale) {
  if (beta.size() != design.cols())
    throw UsageError("make_unit_weights: beta length does not match design");
  const std::size_t n = design.rows();
  const std::size_t p = design.cols();
  UnitWeights uw;
  uw.eta.resize(n);
  uw.v.resize(n);
  uw.w.resize(n);
  uw.grad = Matrix(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    const double *x = design.values.row(i);
    double eta = 0.0;
    for (std::size_t j = 0; j < p; ++j)
      eta += x[j] * beta[j];
    const double v = -scale * std::exp(eta);
    double w = -std::expm1(v);
    if (w < kWeightFloor) {
      w = kWeightFloor;
      ++uw.clamp_events;
    }
    uw.eta[i] = eta;
    uw.v[i] = v;
    uw.w[i] = w;
    const double coef = (1.0 - w) * v / (w * w);
    for (std::size_t j = 0; j < p; ++j)
      uw.grad(i, j) = coef * x[j];
  }
  return uw;
}

std::pair<double, double>
zelterman_reg_variance(const UnitWeights &weights, const Matrix &cov_beta) {
  if (cov_beta.rows() != weights.grad.cols() ||
      cov_beta.cols() != weights.grad.cols())
    throw UsageError("zelterman_reg_variance: covariance dimension does not "
                     "match the gradient length");
  double var_sampling = 0.0;
  for (double w : weights.w)
    var_sampling += (1.0 - w) / (w * w);
  const std::vector<double> g = weights.grad_sum();
  const double var_parameter = quad_form(g, cov_beta, g);
  return {var_sampling, var_parameter};
}

namespace {

PopulationEstimate horvitz_thompson_estimate(const UnitWeights &weights,
                                             const Matrix &cov_beta,
                                             Method method,
                                             std::int64_t n_observed) {
  PopulationEstimate e;
  e.method = method;
  e.n_observed = n_observed;
  e.n_hat = 0.0;
  for (double w : weights.w)
    e.n_hat += 1.0 / w;
  const auto [vs, vp] = zelterman_reg_variance(weights, cov_beta);
  e.var_sampling = vs;
  e.var_parameter = vp;
  e.se = std::sqrt(vs + vp);
  e.ci_low = e.n_hat - kZ975 * e.se;
  e.ci_high = e.n_hat + kZ975 * e.se;
  return e;
}

} // namespace

std::tuple<FitResult, PopulationEstimate, UnitWeights>
zelterman_regression(const Dataset &dataset, const ModelSpec &spec) {
  const DesignMatrix design_all = build_design(dataset, spec);

  std::vector<std::size_t> idx;
  std::vector<int> z;
  for (std::size_t i = 0; i < dataset.units.size(); ++i) {
    const std::int64_t y = dataset.units[i].count;
    if (y == 1 || y == 2) {
      idx.push_back(i);
      z.push_back(y == 2 ? 1 : 0);
    }
  }
  std::int64_t ones = 0;
  for (int v : z)
    ones += v;
  if (idx.empty() || ones == 0)
    throw DegenerateDataError("zelterman_regression: no units with count 2");
  if (ones == static_cast<std::int64_t>(z.size()))
    throw DegenerateDataError("zelterman_regression: no units with count 1");

  const DesignMatrix design_sub = design_all.select_rows(idx);
  FitResult fit = fit_logistic(design_sub, z);

  // lambda_i = 2 e^{eta_i} for every observed unit, counts >= 3 included
  UnitWeights weights = make_unit_weights(design_all, fit.beta, 2.0);
  PopulationEstimate est = horvitz_thompson_estimate(
      weights, fit.cov_beta, Method::ZeltermanRegression,
      static_cast<std::int64_t>(dataset.units.size()));
  return {std::move(fit), est, std::move(weights)};
}

std::tuple<FitResult, PopulationEstimate, UnitWeights>
zt_poisson_regression_estimate(const Dataset &dataset,
                               const ModelSpec &spec) {
  const DesignMatrix design = build_design(dataset, spec);
  std::vector<std::int64_t> y;
  y.reserve(dataset.units.size());
  for (const ObservedUnit &u : dataset.units)
    y.push_back(u.count);

  FitResult fit = fit_zt_poisson_reg(design, y);

  UnitWeights weights = make_unit_weights(design, fit.beta, 1.0);
  PopulationEstimate est = horvitz_thompson_estimate(
      weights, fit.cov_beta, Method::ZTPoissonRegression,
      static_cast<std::int64_t>(dataset.units.size()));
  return {std::move(fit), est, std::move(weights)};
}

} // namespace popsize
