#ifndef POPSIZE_COUNTS_HPP
#define POPSIZE_COUNTS_HPP

#include <cstdint>
#include <map>
#include <vector>

namespace popsize {

/// Frequency table of zero-truncated counts: freq[j] = number of units
/// observed exactly j times (j >= 1). Zeros are structurally absent.
class FrequencyTable {
public:
  FrequencyTable() = default;

  // freq entries with fj = 0 are kept as given (a table built from raw
  // counts never contains them; a table read from a file may)
  explicit FrequencyTable(std::map<int, std::int64_t> freq);
  FrequencyTable(std::initializer_list<std::pair<const int, std::int64_t>> init)
      : FrequencyTable(std::map<int, std::int64_t>(init)) {}

  const std::map<int, std::int64_t> &freq() const { return freq_; }

  // fj, zero when j is absent
  std::int64_t operator[](int j) const;

  // number of observed units, sum fj
  std::int64_t n() const { return n_; }
  // total count, sum j*fj
  std::int64_t total() const { return total_; }

  // largest j with fj > 0, or 0 for an empty table
  int max_count() const;

  // multiset of counts, ascending; inverse of table_from_counts
  std::vector<int> expand() const;

private:
  std::map<int, std::int64_t> freq_;
  std::int64_t n_ = 0;
  std::int64_t total_ = 0;
};

// Poisson point mass e^{-lambda} lambda^j / j!, evaluated in log space.
double poisson_pmf(int j, double lambda);

// Zero-truncated Poisson point mass for j >= 1:
//   e^{-lambda} / (1 - e^{-lambda}) * lambda^j / j!
// The denominator uses expm1 so small lambda stays accurate.
double zt_poisson_pmf(int j, double lambda);

// Tally a sequence of positive counts into a FrequencyTable.
FrequencyTable table_from_counts(const std::vector<int> &counts);

// Sample mean of the observed counts, total / n.
double mean_count(const FrequencyTable &table);

} // namespace popsize

#endif
