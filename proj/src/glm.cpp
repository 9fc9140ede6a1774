#include "popsize/glm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "popsize/errors.hpp"

namespace popsize {

namespace {

constexpr double kStepTol = 1e-8;
constexpr double kLogLikTol = 1e-12;
constexpr double kScoreTol = 1e-6;
constexpr double kRankTol = 1e-10;
constexpr double kSeparationBound = 30.0;
constexpr int kMaxIterations = 100;

double softplus(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta))
                   : std::log1p(std::exp(eta));
}

double logistic(double eta) {
  if (eta >= 0.0) {
    const double e = std::exp(-eta);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

void check_full_rank(const DesignMatrix &design) {
  const std::size_t p = design.cols();
  Matrix xtx(p, p);
  for (std::size_t i = 0; i < design.rows(); ++i) {
    const double *x = design.values.row(i);
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = a; b < p; ++b)
        xtx(a, b) += x[a] * x[b];
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < a; ++b)
      xtx(a, b) = xtx(b, a);
  std::size_t bad = 0;
  if (rank_spd(xtx, kRankTol, &bad) < p)
    throw SingularityError("design matrix is rank deficient (column '" +
                           design.column_names.at(bad) + "' is linearly "
                           "dependent)");
}

using EvalFn = std::function<GlmDerivatives(const std::vector<double> &)>;

FitResult fit_newton(const DesignMatrix &design, Family family,
                     std::vector<double> beta, const EvalFn &eval) {
  if (design.rows() == 0)
    throw DegenerateDataError("no rows to fit");
  check_full_rank(design);

  GlmDerivatives cur = eval(beta);
  if (!std::isfinite(cur.log_lik))
    throw IterationError("log-likelihood not finite at the starting point");
  std::vector<double> ll_trace{cur.log_lik};

  bool converged = false;
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    const std::vector<double> direction =
        solve_spd(cur.neg_hessian, cur.score);

    // backtracking line search: never accept a worse log-likelihood
    double scale = 1.0;
    std::vector<double> candidate(beta.size());
    GlmDerivatives next{};
    bool improved = false;
    const double slack = kLogLikTol * (std::abs(cur.log_lik) + 1.0);
    for (int h = 0; h < 60; ++h) {
      for (std::size_t j = 0; j < beta.size(); ++j)
        candidate[j] = beta[j] + scale * direction[j];
      next = eval(candidate);
      if (std::isfinite(next.log_lik) && next.log_lik >= cur.log_lik - slack) {
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved)
      throw IterationError("line search failed to improve the "
                           "log-likelihood");

    double max_step = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j)
      max_step = std::max(max_step, std::abs(scale * direction[j]));
    const double ll_change = next.log_lik - cur.log_lik;

    beta = candidate;
    const double prev_ll = cur.log_lik;
    cur = std::move(next);
    ll_trace.push_back(cur.log_lik);

    const double ll_converged_tol =
        kLogLikTol * std::max(1.0, std::abs(prev_ll));
    double max_beta = 0.0;
    for (double b : beta)
      max_beta = std::max(max_beta, std::abs(b));
    if (max_beta > kSeparationBound && ll_change > ll_converged_tol)
      throw SeparationError(
          "coefficient magnitude exceeded " +
          std::to_string(static_cast<int>(kSeparationBound)) +
          " while the log-likelihood was still improving; the maximum "
          "lies on the parameter boundary (separated or degenerate data)");

    double max_score = 0.0;
    for (double g : cur.score)
      max_score = std::max(max_score, std::abs(g));
    if ((max_step < kStepTol || std::abs(ll_change) < ll_converged_tol) &&
        max_score < kScoreTol) {
      converged = true;
      ++iter;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "no convergence after " << kMaxIterations
        << " iterations, last log-likelihood " << cur.log_lik;
    throw IterationError(msg.str());
  }

  FitResult fit;
  fit.family = family;
  fit.term_names = design.column_names;
  fit.beta = beta;
  fit.cov_beta = invert_spd(cur.neg_hessian);
  fit.log_lik = cur.log_lik;
  fit.aic = -2.0 * cur.log_lik + 2.0 * static_cast<double>(beta.size());
  fit.n_fit = static_cast<int>(design.rows());
  fit.converged = true;
  fit.iterations = iter;
  fit.ll_trace = std::move(ll_trace);
  return fit;
}

} // namespace

double FitResult::se(std::size_t j) const {
  return std::sqrt(cov_beta(j, j));
}

GlmDerivatives logistic_derivatives(const DesignMatrix &design,
                                    const std::vector<int> &z,
                                    const std::vector<double> &beta) {
  const std::size_t p = design.cols();
  GlmDerivatives d{0.0, std::vector<double>(p, 0.0), Matrix(p, p)};
  for (std::size_t i = 0; i < design.rows(); ++i) {
    const double *x = design.values.row(i);
    double eta = 0.0;
    for (std::size_t j = 0; j < p; ++j)
      eta += x[j] * beta[j];
    const double prob = logistic(eta);
    const double w = prob * (1.0 - prob);
    d.log_lik += z[i] * eta - softplus(eta);
    const double resid = z[i] - prob;
    for (std::size_t a = 0; a < p; ++a) {
      d.score[a] += resid * x[a];
      for (std::size_t b = a; b < p; ++b)
        d.neg_hessian(a, b) += w * x[a] * x[b];
    }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < a; ++b)
      d.neg_hessian(a, b) = d.neg_hessian(b, a);
  return d;
}

GlmDerivatives zt_poisson_derivatives(const DesignMatrix &design,
                                      const std::vector<std::int64_t> &y,
                                      const std::vector<double> &beta) {
  const std::size_t p = design.cols();
  GlmDerivatives d{0.0, std::vector<double>(p, 0.0), Matrix(p, p)};
  for (std::size_t i = 0; i < design.rows(); ++i) {
    const double *x = design.values.row(i);
    double eta = 0.0;
    for (std::size_t j = 0; j < p; ++j)
      eta += x[j] * beta[j];
    const double lambda = std::exp(eta);
    const double w = -std::expm1(-lambda);          // P(Y >= 1)
    const double mu = lambda / w;                   // truncated mean
    const double var = mu * (1.0 + lambda - mu);    // truncated variance
    const double yi = static_cast<double>(y[i]);
    d.log_lik += yi * eta - lambda - std::log(w) - std::lgamma(yi + 1.0);
    const double resid = yi - mu;
    for (std::size_t a = 0; a < p; ++a) {
      d.score[a] += resid * x[a];
      for (std::size_t b = a; b < p; ++b)
        d.neg_hessian(a, b) += var * x[a] * x[b];
    }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < a; ++b)
      d.neg_hessian(a, b) = d.neg_hessian(b, a);
  return d;
}

FitResult fit_logistic(const DesignMatrix &design, const std::vector<int> &z) {
  if (design.rows() != z.size())
    throw UsageError("fit_logistic: design rows and outcome length differ");
  for (int v : z)
    if (v != 0 && v != 1)
      throw ValidationError("fit_logistic: outcomes must be 0 or 1");

  std::vector<double> beta(design.cols(), 0.0);
  // start the intercept at the logit of the sample proportion
  for (std::size_t j = 0; j < design.cols(); ++j) {
    if (design.column_names[j] == "intercept") {
      const double n = static_cast<double>(z.size());
      double ones = 0.0;
      for (int v : z)
        ones += v;
      const double prob =
          std::clamp(ones / n, 0.5 / n, 1.0 - 0.5 / n);
      beta[j] = std::log(prob / (1.0 - prob));
      break;
    }
  }
  return fit_newton(design, Family::Logistic, std::move(beta),
                    [&](const std::vector<double> &b) {
                      return logistic_derivatives(design, z, b);
                    });
}

FitResult fit_zt_poisson_reg(const DesignMatrix &design,
                             const std::vector<std::int64_t> &y) {
  if (design.rows() != y.size())
    throw UsageError("fit_zt_poisson_reg: design rows and count length "
                     "differ");
  for (std::int64_t v : y)
    if (v < 1)
      throw ValidationError("fit_zt_poisson_reg: counts must be >= 1");

  std::vector<double> beta(design.cols(), 0.0);
  return fit_newton(design, Family::ZTPoisson, std::move(beta),
                    [&](const std::vector<double> &b) {
                      return zt_poisson_derivatives(design, y, b);
                    });
}

LrtResult likelihood_ratio_test(const FitResult &full,
                                const FitResult &reduced) {
  if (full.family != reduced.family)
    throw UsageError("likelihood_ratio_test: different model families");
  if (full.n_fit != reduced.n_fit)
    throw UsageError("likelihood_ratio_test: models were fit on different "
                     "numbers of rows");
  const std::set<std::string> full_cols(full.term_names.begin(),
                                        full.term_names.end());
  for (const std::string &name : reduced.term_names)
    if (!full_cols.count(name))
      throw UsageError("likelihood_ratio_test: models are not nested "
                       "(reduced column '" +
                       name + "' absent from the full model)");

  LrtResult r;
  r.df = static_cast<int>(full.beta.size()) -
         static_cast<int>(reduced.beta.size());
  double stat = 2.0 * (full.log_lik - reduced.log_lik);
  if (stat < -1e-8)
    throw UsageError("likelihood_ratio_test: full model has lower "
                     "log-likelihood than the nested reduced model");
  r.statistic = std::max(0.0, stat);
  if (r.df == 0) {
    if (r.statistic > 1e-8)
      throw UsageError("likelihood_ratio_test: identical designs with "
                       "different likelihoods");
    r.p_value = 1.0;
  } else {
    r.p_value = chi_square_upper_tail(r.statistic, r.df);
  }
  return r;
}

namespace {

// regularized incomplete gamma Q(a, x), a > 0, x >= 0
double gamma_q(double a, double x) {
  if (x <= 0.0)
    return 1.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // lower series: P(a,x), then complement
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int k = 0; k < 500; ++k) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16)
        break;
    }
    return 1.0 - sum * std::exp(log_prefix);
  }
  // Lentz continued fraction for Q(a,x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k <= 500; ++k) {
    const double an = -k * (k - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny)
      d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny)
      c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16)
      break;
  }
  return h * std::exp(log_prefix);
}

} // namespace

double chi_square_upper_tail(double x, int df) {
  if (x < 0.0)
    throw DomainError("chi_square_upper_tail: x must be >= 0");
  if (df < 1)
    throw DomainError("chi_square_upper_tail: df must be >= 1");
  return std::clamp(gamma_q(0.5 * df, 0.5 * x), 0.0, 1.0);
}

} // namespace popsize
