#include "popsize/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "popsize/errors.hpp"

namespace popsize {

bool Schema::has(const std::string &name) const {
  return std::any_of(covariates.begin(), covariates.end(),
                     [&](const Covariate &c) { return c.name == name; });
}

const Covariate &Schema::at(const std::string &name) const {
  for (const Covariate &c : covariates)
    if (c.name == name)
      return c;
  throw UsageError("unknown covariate '" + name + "'");
}

std::vector<int> Dataset::counts() const {
  std::vector<int> out;
  out.reserve(units.size());
  for (const ObservedUnit &u : units)
    out.push_back(static_cast<int>(u.count));
  return out;
}

FrequencyTable Dataset::frequency_table() const {
  return table_from_counts(counts());
}

DesignMatrix DesignMatrix::select_rows(
    const std::vector<std::size_t> &idx) const {
  DesignMatrix out;
  out.column_names = column_names;
  out.values = Matrix(idx.size(), values.cols());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < values.cols(); ++c)
      out.values(r, c) = values(idx[r], c);
  return out;
}

namespace {

std::string trim(const std::string &s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::int64_t parse_int(const std::string &s, const std::string &what,
                       long line) {
  std::int64_t v = 0;
  const char *first = s.data();
  const char *last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ValidationError(what + " '" + s + "' is not an integer", line);
  return v;
}

double parse_double(const std::string &s, const std::string &what,
                    long line) {
  // locale-independent: from_chars always uses the dot decimal point
  double v = 0.0;
  const char *first = s.data();
  const char *last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ValidationError(what + " '" + s + "' is not a number", line);
  return v;
}

std::ifstream open_or_throw(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("cannot open file '" + path + "'");
  return in;
}

} // namespace

Dataset read_individual_csv(const std::string &path,
                            const std::string &count_column,
                            const Schema &schema) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("empty file '" + path + "'");

  const std::vector<std::string> header = split_csv_line(line);
  auto column_of = [&](const std::string &name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name)
        return i;
    throw ValidationError("column '" + name + "' missing from header of '" +
                          path + "'");
  };

  const std::size_t count_idx = column_of(count_column);
  std::vector<std::size_t> cov_idx;
  for (const Covariate &c : schema.covariates)
    cov_idx.push_back(column_of(c.name));

  Dataset ds;
  ds.schema = schema;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() < header.size())
      throw ValidationError("row has " + std::to_string(fields.size()) +
                                " fields, header has " +
                                std::to_string(header.size()),
                            line_no);
    ObservedUnit unit;
    unit.count = parse_int(fields[count_idx], "count", line_no);
    if (unit.count < 1)
      throw ValidationError("count must be >= 1, got " +
                                std::to_string(unit.count),
                            line_no);
    for (std::size_t k = 0; k < schema.covariates.size(); ++k) {
      const Covariate &cov = schema.covariates[k];
      const std::string &raw = fields[cov_idx[k]];
      if (raw.empty())
        throw ValidationError("blank value for covariate '" + cov.name + "'",
                              line_no);
      if (cov.kind == CovariateKind::Continuous) {
        unit.values.emplace_back(
            parse_double(raw, "covariate '" + cov.name + "'", line_no));
      } else {
        if (std::find(cov.levels.begin(), cov.levels.end(), raw) ==
            cov.levels.end())
          throw ValidationError("unknown level '" + raw + "' for covariate '" +
                                    cov.name + "'",
                                line_no);
        unit.values.emplace_back(raw);
      }
    }
    ds.units.push_back(std::move(unit));
  }
  return ds;
}

FrequencyTable read_frequency_csv(const std::string &path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("empty file '" + path + "'");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "count" || header[1] != "freq")
    throw ValidationError("frequency CSV header must be exactly "
                          "\"count,freq\", got \"" +
                          trim(line) + "\"");

  std::map<int, std::int64_t> freq;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 2)
      throw ValidationError("expected two fields", line_no);
    const std::int64_t count = parse_int(fields[0], "count", line_no);
    const std::int64_t f = parse_int(fields[1], "freq", line_no);
    if (count < 1)
      throw ValidationError("count value must be >= 1, got " +
                                std::to_string(count),
                            line_no);
    if (f < 0)
      throw ValidationError("freq must be >= 0, got " + std::to_string(f),
                            line_no);
    if (!freq.emplace(static_cast<int>(count), f).second)
      throw ValidationError("duplicate count value " + std::to_string(count),
                            line_no);
  }
  return FrequencyTable(std::move(freq));
}

void write_individual_csv(const Dataset &dataset, const std::string &path,
                          const std::string &count_column) {
  std::ofstream out(path);
  if (!out)
    throw ValidationError("cannot write file '" + path + "'");
  out << count_column;
  for (const Covariate &c : dataset.schema.covariates)
    out << ',' << c.name;
  out << '\n';
  std::ostringstream num;
  for (const ObservedUnit &u : dataset.units) {
    out << u.count;
    for (std::size_t k = 0; k < u.values.size(); ++k) {
      out << ',';
      if (std::holds_alternative<double>(u.values[k])) {
        num.str("");
        num.precision(17);
        num << std::get<double>(u.values[k]);
        out << num.str();
      } else {
        out << std::get<std::string>(u.values[k]);
      }
    }
    out << '\n';
  }
}

void write_frequency_csv(const FrequencyTable &table,
                         const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw ValidationError("cannot write file '" + path + "'");
  out << "count,freq\n";
  for (const auto &[j, fj] : table.freq())
    out << j << ',' << fj << '\n';
}

DesignMatrix build_design(const Dataset &dataset, const ModelSpec &spec) {
  // validate the spec: terms must exist in the schema, no duplicates
  for (std::size_t i = 0; i < spec.terms.size(); ++i) {
    if (!dataset.schema.has(spec.terms[i]))
      throw UsageError("model term '" + spec.terms[i] +
                       "' is not a schema covariate");
    for (std::size_t j = i + 1; j < spec.terms.size(); ++j)
      if (spec.terms[i] == spec.terms[j])
        throw UsageError("duplicate model term '" + spec.terms[i] + "'");
  }

  // columns in schema order regardless of the order terms were given
  struct Col {
    std::size_t cov_index;      // position in schema
    std::string name;
    bool is_dummy;
    std::string level;          // dummy level when is_dummy
  };
  std::vector<Col> cols;
  for (std::size_t k = 0; k < dataset.schema.covariates.size(); ++k) {
    const Covariate &cov = dataset.schema.covariates[k];
    if (std::find(spec.terms.begin(), spec.terms.end(), cov.name) ==
        spec.terms.end())
      continue;
    if (cov.kind == CovariateKind::Continuous) {
      cols.push_back({k, cov.name, false, ""});
    } else {
      if (cov.levels.empty())
        throw UsageError("categorical '" + cov.name + "' declares no levels");
      // reference defaults to the last declared level
      const std::string &ref =
          cov.reference.empty() ? cov.levels.back() : cov.reference;
      for (const std::string &level : cov.levels) {
        if (level == ref)
          continue;
        cols.push_back({k, cov.name + "=" + level, true, level});
      }
    }
  }

  DesignMatrix dm;
  const std::size_t p = (spec.intercept ? 1 : 0) + cols.size();
  dm.values = Matrix(dataset.units.size(), p);
  if (spec.intercept)
    dm.column_names.push_back("intercept");
  for (const Col &c : cols)
    dm.column_names.push_back(c.name);

  for (std::size_t r = 0; r < dataset.units.size(); ++r) {
    std::size_t j = 0;
    if (spec.intercept)
      dm.values(r, j++) = 1.0;
    for (const Col &c : cols) {
      const CovariateValue &v = dataset.units[r].values.at(c.cov_index);
      if (c.is_dummy)
        dm.values(r, j++) = (std::get<std::string>(v) == c.level) ? 1.0 : 0.0;
      else
        dm.values(r, j++) = std::get<double>(v);
    }
  }
  return dm;
}

Dataset dataset_from_counts(const std::vector<int> &counts) {
  Dataset ds;
  ds.units.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1)
      throw ValidationError("count at index " + std::to_string(i) +
                            " must be >= 1");
    ObservedUnit u;
    u.count = counts[i];
    ds.units.push_back(std::move(u));
  }
  return ds;
}

} // namespace popsize
