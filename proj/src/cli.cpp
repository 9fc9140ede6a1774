#include "popsize/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "popsize/covariate_estimators.hpp"
#include "popsize/data_io.hpp"
#include "popsize/errors.hpp"
#include "popsize/estimators.hpp"
#include "popsize/glm.hpp"
#include "popsize/report.hpp"
#include "popsize/simulate.hpp"

namespace popsize::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

std::vector<std::string> split(const std::string &s, char sep,
                               bool keep_empty) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      if (keep_empty || !cur.empty())
        out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (keep_empty || !cur.empty())
    out.push_back(cur);
  return out;
}

Method parse_method(const std::string &name) {
  if (name == "zelterman")
    return Method::Zelterman;
  if (name == "chao")
    return Method::Chao;
  if (name == "ztpoisson")
    return Method::ZTPoissonMLE;
  if (name == "zelterman-reg")
    return Method::ZeltermanRegression;
  if (name == "ztpoisson-reg")
    return Method::ZTPoissonRegression;
  throw UsageError("unknown method '" + name + "'");
}

bool is_regression(Method m) {
  return m == Method::ZeltermanRegression ||
         m == Method::ZTPoissonRegression;
}

// "--categorical name=l1,l2,...[:reference]"
struct CategoricalFlag {
  std::string name;
  std::vector<std::string> levels;
  std::string reference;
};

CategoricalFlag parse_categorical(const std::string &raw) {
  const std::size_t eq = raw.find('=');
  if (eq == std::string::npos || eq == 0)
    throw UsageError("bad --categorical value '" + raw +
                     "', expected name=level,level[:reference]");
  CategoricalFlag flag;
  flag.name = raw.substr(0, eq);
  std::string rest = raw.substr(eq + 1);
  const std::size_t colon = rest.rfind(':');
  if (colon != std::string::npos) {
    flag.reference = rest.substr(colon + 1);
    rest = rest.substr(0, colon);
  }
  flag.levels = split(rest, ',', false);
  if (flag.levels.size() < 2)
    throw UsageError("categorical '" + flag.name +
                     "' needs at least two levels");
  std::set<std::string> seen;
  for (const std::string &level : flag.levels)
    if (!seen.insert(level).second)
      throw UsageError("categorical '" + flag.name + "' repeats level '" +
                       level + "'");
  if (flag.reference.empty())
    flag.reference = flag.levels.back();   // default: last declared level
  else if (!seen.count(flag.reference))
    throw UsageError("categorical '" + flag.name + "' reference '" +
                     flag.reference + "' is not a declared level");
  return flag;
}

Schema build_schema(const std::vector<std::string> &covariates,
                    const std::vector<std::string> &categorical_flags) {
  std::vector<CategoricalFlag> cats;
  for (const std::string &raw : categorical_flags)
    cats.push_back(parse_categorical(raw));

  Schema schema;
  std::set<std::string> seen;
  for (const std::string &name : covariates) {
    if (!seen.insert(name).second)
      throw UsageError("covariate '" + name + "' listed twice");
    Covariate cov;
    cov.name = name;
    auto it = std::find_if(cats.begin(), cats.end(),
                           [&](const CategoricalFlag &c) {
                             return c.name == name;
                           });
    if (it != cats.end()) {
      cov.kind = CovariateKind::Categorical;
      cov.levels = it->levels;
      cov.reference = it->reference;
    }
    schema.covariates.push_back(std::move(cov));
  }
  for (const CategoricalFlag &c : cats)
    if (!schema.has(c.name))
      throw UsageError("--categorical names '" + c.name +
                       "' which is not a covariate in use");
  return schema;
}

struct LoadedData {
  std::optional<FrequencyTable> table;   // frequency format
  std::optional<Dataset> dataset;       // individual format
  InputDigest digest;
};

LoadedData load_data(const std::string &path, const std::string &format,
                     const std::string &count_col, const Schema &schema) {
  LoadedData data;
  if (format == "frequency") {
    FrequencyTable table = read_frequency_csv(path);
    const std::int64_t rows =
        static_cast<std::int64_t>(table.freq().size());
    data.digest = digest_from_table(path, format, rows, table);
    data.table = std::move(table);
  } else if (format == "individual") {
    if (count_col.empty())
      throw UsageError("--count-col is required with --format individual");
    Dataset ds = read_individual_csv(path, count_col, schema);
    const FrequencyTable table = ds.frequency_table();
    data.digest = digest_from_table(
        path, format, static_cast<std::int64_t>(ds.units.size()), table);
    data.dataset = std::move(ds);
  } else {
    throw UsageError("--format must be 'individual' or 'frequency'");
  }
  return data;
}

std::vector<std::string> regression_warnings(const UnitWeights &weights,
                                             const FitResult &fit) {
  std::vector<std::string> warnings;
  if (weights.clamp_events > 0) {
    std::ostringstream msg;
    msg << weights.clamp_events << " predicted inclusion probabilities "
        << "clamped at " << kWeightFloor
        << " before inversion; the estimate is dominated by those units";
    warnings.push_back(msg.str());
  }
  for (std::size_t j = 0; j < fit.beta.size(); ++j)
    if (std::abs(fit.beta[j]) > 10.0) {
      warnings.push_back("coefficient '" + fit.term_names[j] +
                         "' is large (" + fmt_rate(fit.beta[j]) +
                         "); data may be near-degenerate");
    }
  return warnings;
}

void emit(const nlohmann::json &j, std::ostream &out) {
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string method;
  std::string data;
  std::string format;
  std::string count_col;
  std::string covariates;
  std::vector<std::string> categorical;
  std::string output = "text";
};

int cmd_fit(const FitArgs &args, std::ostream &out) {
  const Method method = parse_method(args.method);
  const std::vector<std::string> terms = split(args.covariates, ',', false);
  if (!is_regression(method) && !terms.empty())
    throw UsageError("--covariates applies to regression methods only");
  if (is_regression(method) && args.format == "frequency")
    throw UsageError("regression methods need individual records; "
                     "--format frequency carries no covariates");

  const Schema schema = build_schema(terms, args.categorical);
  const LoadedData data =
      load_data(args.data, args.format, args.count_col, schema);

  FitReport report;
  report.method = args.method;
  report.input = data.digest;

  const FrequencyTable table =
      data.table ? *data.table : data.dataset->frequency_table();

  switch (method) {
  case Method::Zelterman:
    report.rate = zelterman_lambda(table, 1);
    report.estimate = zelterman_estimate(table);
    break;
  case Method::Chao:
    report.estimate = chao_estimate(table);
    break;
  case Method::ZTPoissonMLE: {
    auto [rate, est] = zt_poisson_mle(table);
    report.rate = rate;
    report.estimate = est;
    break;
  }
  case Method::ZeltermanRegression: {
    ModelSpec spec{true, terms};
    auto [fit, est, weights] = zelterman_regression(*data.dataset, spec);
    report.warnings = regression_warnings(weights, fit);
    report.fit = std::move(fit);
    report.estimate = est;
    break;
  }
  case Method::ZTPoissonRegression: {
    ModelSpec spec{true, terms};
    auto [fit, est, weights] =
        zt_poisson_regression_estimate(*data.dataset, spec);
    report.warnings = regression_warnings(weights, fit);
    report.fit = std::move(fit);
    report.estimate = est;
    break;
  }
  }

  if (args.output == "json")
    emit(report.to_json(), out);
  else
    report.render_text(out);
  return kExitOk;
}

// ------------------------------------------------------------ compare

struct CompareArgs {
  std::string method;
  std::string data;
  std::string format = "individual";
  std::string count_col;
  std::string models;
  std::vector<std::string> categorical;
  std::string output = "text";
};

int cmd_compare(const CompareArgs &args, std::ostream &out) {
  const Method method = parse_method(args.method);
  if (!is_regression(method))
    throw UsageError("compare supports zelterman-reg and ztpoisson-reg");
  if (args.format != "individual")
    throw UsageError("compare needs --format individual");

  const std::vector<std::string> model_strings =
      split(args.models, ';', true);
  if (model_strings.empty())
    throw UsageError("--models is empty");

  std::vector<std::vector<std::string>> model_terms;
  std::vector<std::string> all_terms;   // union, first-use order
  for (const std::string &m : model_strings) {
    std::vector<std::string> terms = split(m, ',', false);
    for (const std::string &t : terms)
      if (std::find(all_terms.begin(), all_terms.end(), t) ==
          all_terms.end())
        all_terms.push_back(t);
    model_terms.push_back(std::move(terms));
  }

  // every model after the first must nest the previous one
  for (std::size_t k = 1; k < model_terms.size(); ++k) {
    const std::set<std::string> prev(model_terms[k - 1].begin(),
                                     model_terms[k - 1].end());
    const std::set<std::string> curr(model_terms[k].begin(),
                                     model_terms[k].end());
    if (!std::includes(curr.begin(), curr.end(), prev.begin(), prev.end()))
      throw UsageError("model " + std::to_string(k + 1) + " ('" +
                       model_strings[k] + "') does not nest model " +
                       std::to_string(k) + " ('" + model_strings[k - 1] +
                       "')");
  }

  const Schema schema = build_schema(all_terms, args.categorical);
  const LoadedData data =
      load_data(args.data, args.format, args.count_col, schema);

  ComparisonReport report;
  report.method = args.method;
  report.input = data.digest;
  report.models.reserve(model_terms.size());   // keep row pointers stable

  const FitResult *previous = nullptr;
  for (std::size_t k = 0; k < model_terms.size(); ++k) {
    ModelSpec spec{true, model_terms[k]};
    ComparisonRow row;
    row.model_label = model_strings[k];
    if (method == Method::ZeltermanRegression) {
      auto [fit, est, weights] = zelterman_regression(*data.dataset, spec);
      row.warnings = regression_warnings(weights, fit);
      row.fit = std::move(fit);
      row.estimate = est;
    } else {
      auto [fit, est, weights] =
          zt_poisson_regression_estimate(*data.dataset, spec);
      row.warnings = regression_warnings(weights, fit);
      row.fit = std::move(fit);
      row.estimate = est;
    }
    report.models.push_back(std::move(row));
    ComparisonRow &stored = report.models.back();
    if (previous)
      stored.lrt = likelihood_ratio_test(stored.fit, *previous);
    previous = &stored.fit;
  }

  if (args.output == "json")
    emit(report.to_json(), out);
  else
    report.render_text(out);
  return kExitOk;
}

// ----------------------------------------------------------- simulate

struct SimulateArgs {
  std::int64_t n_pop = 0;
  double lambda = 0.0;
  bool lambda_set = false;
  std::string mixture;
  int seeds = 1;
  std::uint64_t seed_base = 0;
  std::string methods = "zelterman";
  std::string dump_dir;
  std::string output = "text";
};

std::vector<MixtureComponent> parse_mixture(const std::string &raw) {
  std::vector<MixtureComponent> components;
  for (const std::string &part : split(raw, ',', false)) {
    const std::size_t colon = part.find(':');
    if (colon == std::string::npos)
      throw UsageError("bad --mixture component '" + part +
                       "', expected weight:lambda");
    MixtureComponent c;
    try {
      c.weight = std::stod(part.substr(0, colon));
      c.lambda = std::stod(part.substr(colon + 1));
    } catch (const std::exception &) {
      throw UsageError("bad --mixture component '" + part + "'");
    }
    components.push_back(c);
  }
  if (components.empty())
    throw UsageError("--mixture is empty");
  return components;
}

int cmd_simulate(const SimulateArgs &args, std::ostream &out) {
  if (args.n_pop < 1)
    throw UsageError("--n-pop must be >= 1");
  if (args.seeds < 1)
    throw UsageError("--seeds must be >= 1");
  if (args.lambda_set == !args.mixture.empty())
    throw UsageError("give exactly one of --lambda and --mixture");

  std::vector<MixtureComponent> components;
  std::string model_label;
  if (args.lambda_set) {
    components = {{1.0, args.lambda}};
    model_label = "poisson(lambda=" + fmt_rate(args.lambda) + ")";
  } else {
    components = parse_mixture(args.mixture);
    model_label = "mixture(" + args.mixture + ")";
  }

  std::vector<Method> methods;
  std::vector<std::string> method_names;
  for (const std::string &name : split(args.methods, ',', false)) {
    const Method m = parse_method(name);
    if (is_regression(m))
      throw UsageError("simulate supports the homogeneous methods only");
    methods.push_back(m);
    method_names.push_back(name);
  }
  if (methods.empty())
    throw UsageError("--method is empty");

  if (!args.dump_dir.empty())
    std::filesystem::create_directories(args.dump_dir);

  SimulationReport report;
  report.n_pop = args.n_pop;
  report.model_label = model_label;
  report.seed_base = args.seed_base;
  report.seeds = args.seeds;
  report.prng = kPrngStream;
  report.methods = method_names;

  for (int k = 0; k < args.seeds; ++k) {
    const std::uint64_t seed = args.seed_base + static_cast<std::uint64_t>(k);
    const SimulatedPopulation pop =
        simulate_mixture(args.n_pop, components, seed);
    if (!args.dump_dir.empty()) {
      std::vector<int> counts;
      for (const SimulatedUnit &u : pop.units)
        if (u.observed)
          counts.push_back(static_cast<int>(u.count));
      const std::filesystem::path file =
          std::filesystem::path(args.dump_dir) /
          ("seed_" + std::to_string(seed) + ".csv");
      write_individual_csv(dataset_from_counts(counts), file.string(),
                           "count");
    }
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      ReplicateResult r;
      r.seed = seed;
      try {
        r.estimate = truncate_and_estimate(pop, methods[mi]);
        r.covered = r.estimate.ci_low <= static_cast<double>(pop.true_n) &&
                    static_cast<double>(pop.true_n) <= r.estimate.ci_high;
        r.rel_bias = (r.estimate.n_hat - static_cast<double>(pop.true_n)) /
                     static_cast<double>(pop.true_n);
      } catch (const Error &e) {
        r.failed = true;
        r.failure = e.what();
      }
      report.results[method_names[mi]].push_back(std::move(r));
    }
  }

  for (const std::string &name : method_names) {
    SimulationAggregate agg;
    double sum_n = 0.0, sum_bias = 0.0;
    int covered = 0, ok = 0;
    for (const ReplicateResult &r : report.results[name]) {
      ++agg.replicates;
      if (r.failed) {
        ++agg.failures;
        continue;
      }
      ++ok;
      sum_n += r.estimate.n_hat;
      sum_bias += r.rel_bias;
      covered += r.covered ? 1 : 0;
    }
    if (ok > 0) {
      agg.mean_n_hat = sum_n / ok;
      agg.mean_rel_bias = sum_bias / ok;
      agg.coverage = static_cast<double>(covered) / ok;
    }
    report.aggregates[name] = agg;
  }

  if (args.output == "json")
    emit(report.to_json(), out);
  else
    report.render_text(out);
  return kExitOk;
}

} // namespace

int run(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Population size estimation from zero-truncated count data"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App *fit = app.add_subcommand(
      "fit", "Estimate population size with one method");
  fit->add_option("--method", fit_args.method,
                  "zelterman|chao|ztpoisson|zelterman-reg|ztpoisson-reg")
      ->required();
  fit->add_option("--data", fit_args.data, "input CSV path")->required();
  fit->add_option("--format", fit_args.format, "individual|frequency")
      ->required();
  fit->add_option("--count-col", fit_args.count_col,
                  "count column name (individual format)");
  fit->add_option("--covariates", fit_args.covariates,
                  "comma-separated covariate names (regression methods)");
  fit->add_option("--categorical", fit_args.categorical,
                  "name=level,level[:reference], repeatable");
  fit->add_option("--output", fit_args.output, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  CompareArgs compare_args;
  CLI::App *compare = app.add_subcommand(
      "compare", "Fit a nested model sequence and run likelihood-ratio "
                 "tests");
  compare->add_option("--method", compare_args.method,
                      "zelterman-reg|ztpoisson-reg")
      ->required();
  compare->add_option("--data", compare_args.data, "input CSV path")
      ->required();
  compare->add_option("--format", compare_args.format,
                      "individual (records with covariates)");
  compare->add_option("--count-col", compare_args.count_col,
                      "count column name")
      ->required();
  compare->add_option("--models", compare_args.models,
                      "semicolon-separated covariate lists, nested, first "
                      "is the base")
      ->required();
  compare->add_option("--categorical", compare_args.categorical,
                      "name=level,level[:reference], repeatable");
  compare->add_option("--output", compare_args.output, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  SimulateArgs sim_args;
  CLI::App *simulate = app.add_subcommand(
      "simulate", "Generate synthetic populations and score estimators");
  simulate->add_option("--n-pop", sim_args.n_pop, "true population size")
      ->required();
  CLI::Option *lambda_opt =
      simulate->add_option("--lambda", sim_args.lambda,
                           "homogeneous Poisson rate");
  simulate->add_option("--mixture", sim_args.mixture,
                       "weight:lambda,weight:lambda,...");
  simulate->add_option("--seeds", sim_args.seeds, "number of replicates");
  simulate->add_option("--seed-base", sim_args.seed_base,
                       "seed of the first replicate");
  simulate->add_option("--method", sim_args.methods,
                       "comma list of zelterman|chao|ztpoisson");
  simulate->add_option("--dump-dir", sim_args.dump_dir,
                       "write per-seed observed units as CSV here");
  simulate->add_option("--output", sim_args.output, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
    sim_args.lambda_set = lambda_opt->count() > 0;
    if (fit->parsed())
      return cmd_fit(fit_args, out);
    if (compare->parsed())
      return cmd_compare(compare_args, out);
    return cmd_simulate(sim_args, out);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "popsize: error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError &e) {
    err << "popsize: error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError &e) {
    err << "popsize: error: validation: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DegenerateDataError &e) {
    err << "popsize: error: degenerate: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const SingularityError &e) {
    err << "popsize: error: singular: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const SeparationError &e) {
    err << "popsize: error: separation: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IterationError &e) {
    err << "popsize: error: iteration: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DomainError &e) {
    err << "popsize: error: domain: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error &e) {
    err << "popsize: error: internal: " << e.what() << "\n";
    return kExitNumerical;
  }
}

} // namespace popsize::cli
