#include "popsize/counts.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "popsize/errors.hpp"

namespace popsize {

FrequencyTable::FrequencyTable(std::map<int, std::int64_t> freq)
    : freq_(std::move(freq)) {
  for (const auto &[j, fj] : freq_) {
    if (j < 1)
      throw ValidationError("count value " + std::to_string(j) +
                            " is not positive; data must be zero-truncated");
    if (fj < 0)
      throw ValidationError("negative frequency for count " +
                            std::to_string(j));
    n_ += fj;
    total_ += static_cast<std::int64_t>(j) * fj;
  }
}

std::int64_t FrequencyTable::operator[](int j) const {
  auto it = freq_.find(j);
  return it == freq_.end() ? 0 : it->second;
}

int FrequencyTable::max_count() const {
  int m = 0;
  for (const auto &[j, fj] : freq_)
    if (fj > 0)
      m = std::max(m, j);
  return m;
}

std::vector<int> FrequencyTable::expand() const {
  std::vector<int> counts;
  counts.reserve(static_cast<std::size_t>(n_));
  for (const auto &[j, fj] : freq_)
    for (std::int64_t k = 0; k < fj; ++k)
      counts.push_back(j);
  return counts;
}

double poisson_pmf(int j, double lambda) {
  if (j < 0)
    throw DomainError("poisson_pmf: count must be >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("poisson_pmf: lambda must be positive and finite");
  if (j == 0)
    return std::exp(-lambda);
  const double lp = -lambda + j * std::log(lambda) - std::lgamma(j + 1.0);
  return std::min(1.0, std::exp(lp));
}

double zt_poisson_pmf(int j, double lambda) {
  if (j < 1)
    throw DomainError("zt_poisson_pmf: support is j >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("zt_poisson_pmf: lambda must be positive and finite");
  // log(1 - e^{-lambda}) via expm1
  const double log_w = std::log(-std::expm1(-lambda));
  const double lp =
      -lambda + j * std::log(lambda) - std::lgamma(j + 1.0) - log_w;
  return std::min(1.0, std::exp(lp));
}

FrequencyTable table_from_counts(const std::vector<int> &counts) {
  std::map<int, std::int64_t> freq;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1)
      throw ValidationError("count at index " + std::to_string(i) + " is " +
                            std::to_string(counts[i]) + "; must be >= 1");
    ++freq[counts[i]];
  }
  return FrequencyTable(std::move(freq));
}

double mean_count(const FrequencyTable &table) {
  if (table.n() < 1)
    throw DomainError("mean_count: empty table");
  return static_cast<double>(table.total()) / static_cast<double>(table.n());
}

} // namespace popsize
