#ifndef POPSIZE_REPORT_HPP
#define POPSIZE_REPORT_HPP

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "popsize/counts.hpp"
#include "popsize/estimators.hpp"
#include "popsize/glm.hpp"

namespace popsize {

inline constexpr int kReportSchemaVersion = 1;

// Fixed-width decimal renderings used verbatim by both the text and the
// JSON "display" block, so the two modes can never disagree.
std::string fmt_count(double v);   // population-scale values: integers
std::string fmt_rate(double v);    // rates and coefficients: 4 decimals
std::string fmt_ll(double v);      // log-likelihood / AIC: 2 decimals
std::string fmt_stat(double v);    // test statistics / p-values: 3 decimals
std::string fmt_g6(double v);      // everything else: 6 significant digits

struct InputDigest {
  std::string path;
  std::string format;           // "individual" or "frequency"
  std::int64_t rows = 0;        // data rows in the file
  std::int64_t n_observed = 0;  // units
  std::map<int, std::int64_t> frequencies;
};

InputDigest digest_from_table(const std::string &path,
                              const std::string &format, std::int64_t rows,
                              const FrequencyTable &table);

/// One fitted model: ordered key/value display lines plus the full
/// precision numbers behind them.
struct FitReport {
  std::string method;
  InputDigest input;
  std::optional<PopulationEstimate> estimate;
  std::optional<RateEstimate> rate;
  std::optional<FitResult> fit;
  std::vector<std::string> warnings;

  // key -> rendered value, insertion-ordered; the single source for
  // every number both renderers print
  std::vector<std::pair<std::string, std::string>> display() const;

  void render_text(std::ostream &out) const;
  nlohmann::json to_json() const;
};

struct ComparisonRow {
  std::string model_label;        // comma list of terms, "" = intercept only
  PopulationEstimate estimate;
  FitResult fit;
  std::optional<LrtResult> lrt;   // against the previous model
  std::vector<std::string> warnings;
};

struct ComparisonReport {
  std::string method;
  InputDigest input;
  std::vector<ComparisonRow> models;

  void render_text(std::ostream &out) const;
  nlohmann::json to_json() const;
};

struct ReplicateResult {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  PopulationEstimate estimate;
  bool covered = false;
  double rel_bias = 0.0;
};

struct SimulationAggregate {
  int replicates = 0;
  int failures = 0;
  double mean_n_hat = 0.0;
  double mean_rel_bias = 0.0;
  double coverage = 0.0;
};

struct SimulationReport {
  std::int64_t n_pop = 0;
  std::string model_label;        // "poisson(lambda=...)" or mixture spec
  std::uint64_t seed_base = 0;
  int seeds = 0;
  std::string prng;
  std::vector<std::string> methods;
  std::map<std::string, std::vector<ReplicateResult>> results;
  std::map<std::string, SimulationAggregate> aggregates;

  void render_text(std::ostream &out) const;
  nlohmann::json to_json() const;
};

} // namespace popsize

#endif
