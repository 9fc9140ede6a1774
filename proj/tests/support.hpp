#ifndef POPSIZE_TESTS_SUPPORT_HPP
#define POPSIZE_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "popsize/counts.hpp"
#include "popsize/data_io.hpp"
#include "popsize/simulate.hpp"

namespace testsupport {

inline std::string data_path(const std::string &name) {
  return std::string(POPSIZE_DATA_DIR) + "/" + name;
}

// Bangkok 2001 methamphetamine users: contact counts, frequency form.
inline popsize::FrequencyTable bangkok_meth_table() {
  return popsize::FrequencyTable({{1, 3114},
                                  {2, 163},
                                  {3, 23},
                                  {4, 20},
                                  {5, 9},
                                  {6, 3},
                                  {7, 3},
                                  {8, 3},
                                  {9, 4},
                                  {10, 3},
                                  {12, 1}});
}

// Female heroin users by age (individual records, bundled fixture).
inline popsize::Dataset heroin_dataset() {
  popsize::Schema schema;
  schema.covariates.push_back(
      {"age", popsize::CovariateKind::Continuous, {}, ""});
  return popsize::read_individual_csv(data_path("table3.csv"), "contacts",
                                      schema);
}

// Female methamphetamine users by age.
inline popsize::Dataset meth_dataset() {
  popsize::Schema schema;
  schema.covariates.push_back(
      {"age", popsize::CovariateKind::Continuous, {}, ""});
  return popsize::read_individual_csv(data_path("table2.csv"), "contacts",
                                      schema);
}

// Deterministic table generator for property tests: f1, f2 uniform in
// [1, 1000]; with_tail adds f3..f5 draws.
inline popsize::FrequencyTable random_table(std::uint64_t seed,
                                            bool with_tail) {
  popsize::Splitmix64 rng(popsize::Splitmix64::mix(seed ^
                                                   0x5bf0364cd1f4a9e3ULL));
  auto uniform_int = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng.next_double() *
                                          static_cast<double>(hi - lo + 1));
  };
  std::map<int, std::int64_t> freq;
  freq[1] = uniform_int(1, 1000);
  freq[2] = uniform_int(1, 1000);
  if (with_tail)
    for (int j = 3; j <= 5; ++j) {
      const std::int64_t fj = uniform_int(0, 50);
      if (fj > 0)
        freq[j] = fj;
    }
  return popsize::FrequencyTable(std::move(freq));
}

// |a - b| <= tol * max(1, |a|, |b|): the relative comparison used for
// derivative checks, with a unit floor so zeros compare sanely.
inline bool close_rel(double a, double b, double tol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

// Vector comparison relative to the vectors' own magnitude. At a
// maximum the score is ~0 while finite differences carry truncation
// noise at the problem scale, so the floor may be passed in (e.g. the
// score norm at beta = 0).
inline bool close_rel_vec(const std::vector<double> &a,
                          const std::vector<double> &b, double tol,
                          double floor = 1.0) {
  double scale = std::max(1.0, floor);
  for (double v : a)
    scale = std::max(scale, std::abs(v));
  for (double v : b)
    scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol * scale)
      return false;
  return true;
}

inline bool close_to(double value, double target, double abs_tol) {
  return std::abs(value - target) <= abs_tol;
}

} // namespace testsupport

#endif
