#ifndef POPSIZE_GLM_HPP
#define POPSIZE_GLM_HPP

#include <string>
#include <vector>

#include "popsize/data_io.hpp"
#include "popsize/linalg.hpp"

namespace popsize {

enum class Family { Logistic, ZTPoisson };

/// Maximum likelihood fit of one regression model. cov_beta is the
/// inverse observed information at beta_hat.
struct FitResult {
  Family family = Family::Logistic;
  std::vector<std::string> term_names;
  std::vector<double> beta;
  Matrix cov_beta;
  double log_lik = 0.0;
  double aic = 0.0;
  int n_fit = 0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> ll_trace;   // accepted log-likelihoods, first to last

  double se(std::size_t j) const;
};

struct LrtResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Binary logistic regression, Newton-Raphson with step halving.
// z must be 0/1 and align with the design rows.
FitResult fit_logistic(const DesignMatrix &design,
                       const std::vector<int> &z);

// Zero-truncated Poisson regression with log link, exact gradient and
// Hessian; counts must all be >= 1.
FitResult fit_zt_poisson_reg(const DesignMatrix &design,
                             const std::vector<std::int64_t> &y);

// G^2 = 2 (LL_full - LL_reduced) with a chi-square p-value. The models
// must share family and rows and the reduced columns must be a subset
// of the full columns.
LrtResult likelihood_ratio_test(const FitResult &full,
                                const FitResult &reduced);

// Upper tail P(X > x) for a chi-square variable with df degrees of
// freedom, via the regularized incomplete gamma function.
double chi_square_upper_tail(double x, int df);

// Log-likelihood, score and negative Hessian of one family at beta;
// exposed so tests can difference them numerically.
struct GlmDerivatives {
  double log_lik;
  std::vector<double> score;
  Matrix neg_hessian;
};
GlmDerivatives logistic_derivatives(const DesignMatrix &design,
                                    const std::vector<int> &z,
                                    const std::vector<double> &beta);
GlmDerivatives zt_poisson_derivatives(const DesignMatrix &design,
                                      const std::vector<std::int64_t> &y,
                                      const std::vector<double> &beta);

} // namespace popsize

#endif
