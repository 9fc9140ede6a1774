#ifndef POPSIZE_DATA_IO_HPP
#define POPSIZE_DATA_IO_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "popsize/counts.hpp"
#include "popsize/linalg.hpp"

namespace popsize {

enum class CovariateKind { Continuous, Categorical };

struct Covariate {
  std::string name;
  CovariateKind kind = CovariateKind::Continuous;
  // categorical only: declared levels in order, and the omitted reference
  std::vector<std::string> levels;
  std::string reference;
};

/// Ordered covariate declarations; values are validated against it.
struct Schema {
  std::vector<Covariate> covariates;

  bool has(const std::string &name) const;
  const Covariate &at(const std::string &name) const;
};

// A covariate value: numeric for continuous, label for categorical.
using CovariateValue = std::variant<double, std::string>;

struct ObservedUnit {
  std::int64_t count = 0;               // truncated count, >= 1
  std::vector<CovariateValue> values;   // aligned with schema order
};

struct Dataset {
  Schema schema;
  std::vector<ObservedUnit> units;

  std::vector<int> counts() const;
  FrequencyTable frequency_table() const;
};

/// Covariate selection for one model; the intercept is on by default.
struct ModelSpec {
  bool intercept = true;
  std::vector<std::string> terms;
};

/// Numeric design matrix with named columns; rows align with
/// Dataset::units. Categorical covariates become reference-omitted
/// dummy columns named "name=level".
struct DesignMatrix {
  Matrix values;
  std::vector<std::string> column_names;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }

  DesignMatrix select_rows(const std::vector<std::size_t> &idx) const;
};

// Read one-unit-per-row CSV. The header must contain count_column and
// every schema covariate; extra columns are ignored.
Dataset read_individual_csv(const std::string &path,
                            const std::string &count_column,
                            const Schema &schema);

// Read a "count,freq" CSV into a FrequencyTable.
FrequencyTable read_frequency_csv(const std::string &path);

// Writers for the two formats (round-trip partners of the readers).
void write_individual_csv(const Dataset &dataset, const std::string &path,
                          const std::string &count_column);
void write_frequency_csv(const FrequencyTable &table, const std::string &path);

// Expand a model spec against the dataset schema into a numeric matrix.
DesignMatrix build_design(const Dataset &dataset, const ModelSpec &spec);

// Dataset with no covariates, one unit per count (lets frequency-only
// data flow through the regression estimators).
Dataset dataset_from_counts(const std::vector<int> &counts);

} // namespace popsize

#endif
