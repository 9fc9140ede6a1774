#include "popsize/report.hpp"

#include <cmath>
#include <cstdio>

namespace popsize {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

nlohmann::json json_estimate(const PopulationEstimate &e) {
  return {{"method", method_name(e.method)},
          {"n_hat", e.n_hat},
          {"se", e.se},
          {"ci_low", e.ci_low},
          {"ci_high", e.ci_high},
          {"n_observed", e.n_observed},
          {"var_sampling", e.var_sampling},
          {"var_parameter", e.var_parameter}};
}

nlohmann::json json_rate(const RateEstimate &r) {
  nlohmann::json j{{"lambda_hat", r.lambda_hat},
                   {"ci_low", r.ci_low},
                   {"ci_high", r.ci_high}};
  if (r.var_log_lambda)
    j["var_log_lambda"] = *r.var_log_lambda;
  else
    j["var_log_lambda"] = nullptr;
  return j;
}

nlohmann::json json_fit(const FitResult &f) {
  std::vector<double> se;
  se.reserve(f.beta.size());
  for (std::size_t j = 0; j < f.beta.size(); ++j)
    se.push_back(f.se(j));
  return {{"family", f.family == Family::Logistic ? "logistic"
                                                  : "zt-poisson"},
          {"terms", f.term_names},
          {"beta", f.beta},
          {"se", se},
          {"log_lik", f.log_lik},
          {"aic", f.aic},
          {"n_fit", f.n_fit},
          {"converged", f.converged},
          {"iterations", f.iterations}};
}

nlohmann::json json_input(const InputDigest &in) {
  nlohmann::json freq = nlohmann::json::object();
  for (const auto &[j, fj] : in.frequencies)
    freq[std::to_string(j)] = fj;
  return {{"path", in.path},
          {"format", in.format},
          {"rows", in.rows},
          {"n_observed", in.n_observed},
          {"frequencies", freq}};
}

void append_estimate_display(
    std::vector<std::pair<std::string, std::string>> &kv,
    const PopulationEstimate &e) {
  kv.emplace_back("n_hat", fmt_count(e.n_hat));
  kv.emplace_back("se", fmt_count(e.se));
  kv.emplace_back("ci_low", fmt_count(e.ci_low));
  kv.emplace_back("ci_high", fmt_count(e.ci_high));
  kv.emplace_back("var_sampling", fmt_g6(e.var_sampling));
  kv.emplace_back("var_parameter", fmt_g6(e.var_parameter));
}

void append_fit_display(std::vector<std::pair<std::string, std::string>> &kv,
                        const FitResult &f) {
  for (std::size_t j = 0; j < f.beta.size(); ++j) {
    kv.emplace_back("beta[" + f.term_names[j] + "]", fmt_rate(f.beta[j]));
    kv.emplace_back("se[" + f.term_names[j] + "]", fmt_rate(f.se(j)));
  }
  kv.emplace_back("log_lik", fmt_ll(f.log_lik));
  kv.emplace_back("aic", fmt_ll(f.aic));
}

} // namespace

std::string fmt_count(double v) { return fixed(v, 0); }
std::string fmt_rate(double v) { return fixed(v, 4); }
std::string fmt_ll(double v) { return fixed(v, 2); }
std::string fmt_stat(double v) { return fixed(v, 3); }

std::string fmt_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

InputDigest digest_from_table(const std::string &path,
                              const std::string &format, std::int64_t rows,
                              const FrequencyTable &table) {
  InputDigest in;
  in.path = path;
  in.format = format;
  in.rows = rows;
  in.n_observed = table.n();
  in.frequencies = table.freq();
  return in;
}

std::vector<std::pair<std::string, std::string>> FitReport::display() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("method", method);
  kv.emplace_back("n_observed", std::to_string(input.n_observed));
  if (rate) {
    kv.emplace_back("lambda_hat", fmt_rate(rate->lambda_hat));
    if (rate->var_log_lambda) {
      kv.emplace_back("lambda_ci_low", fmt_rate(rate->ci_low));
      kv.emplace_back("lambda_ci_high", fmt_rate(rate->ci_high));
    }
  }
  if (estimate)
    append_estimate_display(kv, *estimate);
  if (fit)
    append_fit_display(kv, *fit);
  return kv;
}

void FitReport::render_text(std::ostream &out) const {
  out << "method: " << method << "\n";
  out << "data: " << input.path << " (" << input.format << ", "
      << input.rows << " rows, n=" << input.n_observed << ")\n";
  out << "frequencies:";
  for (const auto &[j, fj] : input.frequencies)
    out << " " << j << ":" << fj;
  out << "\n";
  for (const auto &[key, value] : display()) {
    if (key == "method" || key == "n_observed")
      continue;
    out << key << ": " << value << "\n";
  }
  if (fit)
    out << "converged: " << (fit->converged ? "yes" : "no") << " ("
        << fit->iterations << " iterations, " << fit->n_fit
        << " rows in likelihood)\n";
  for (const std::string &w : warnings)
    out << "warning: " << w << "\n";
}

nlohmann::json FitReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "fit";
  j["method"] = method;
  j["input"] = json_input(input);
  j["estimate"] = estimate ? json_estimate(*estimate) : nlohmann::json();
  j["rate"] = rate ? json_rate(*rate) : nlohmann::json();
  j["fit"] = fit ? json_fit(*fit) : nlohmann::json();
  j["warnings"] = warnings;
  nlohmann::json disp = nlohmann::json::object();
  for (const auto &[key, value] : display())
    disp[key] = value;
  j["display"] = disp;
  return j;
}

void ComparisonReport::render_text(std::ostream &out) const {
  out << "method: " << method << "\n";
  out << "data: " << input.path << " (" << input.format << ", "
      << input.rows << " rows, n=" << input.n_observed << ")\n";
  for (const ComparisonRow &row : models) {
    out << "model{" << row.model_label << "}:";
    out << " n_hat=" << fmt_count(row.estimate.n_hat);
    out << " ci=(" << fmt_count(row.estimate.ci_low) << ", "
        << fmt_count(row.estimate.ci_high) << ")";
    out << " log_lik=" << fmt_ll(row.fit.log_lik);
    out << " aic=" << fmt_ll(row.fit.aic);
    if (row.lrt) {
      out << " lrt_stat=" << fmt_stat(row.lrt->statistic);
      out << " lrt_df=" << row.lrt->df;
      out << " lrt_p=" << fmt_stat(row.lrt->p_value);
    }
    out << "\n";
    for (const std::string &w : row.warnings)
      out << "warning: " << w << "\n";
  }
}

nlohmann::json ComparisonReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "compare";
  j["method"] = method;
  j["input"] = json_input(input);
  j["models"] = nlohmann::json::array();
  for (const ComparisonRow &row : models) {
    nlohmann::json m;
    m["model"] = row.model_label;
    m["estimate"] = json_estimate(row.estimate);
    m["fit"] = json_fit(row.fit);
    if (row.lrt)
      m["lrt"] = {{"statistic", row.lrt->statistic},
                  {"df", row.lrt->df},
                  {"p_value", row.lrt->p_value}};
    else
      m["lrt"] = nullptr;
    m["warnings"] = row.warnings;
    nlohmann::json disp = nlohmann::json::object();
    disp["n_hat"] = fmt_count(row.estimate.n_hat);
    disp["ci_low"] = fmt_count(row.estimate.ci_low);
    disp["ci_high"] = fmt_count(row.estimate.ci_high);
    disp["log_lik"] = fmt_ll(row.fit.log_lik);
    disp["aic"] = fmt_ll(row.fit.aic);
    if (row.lrt) {
      disp["lrt_stat"] = fmt_stat(row.lrt->statistic);
      disp["lrt_p"] = fmt_stat(row.lrt->p_value);
    }
    m["display"] = disp;
    j["models"].push_back(m);
  }
  return j;
}

void SimulationReport::render_text(std::ostream &out) const {
  out << "simulation: n_pop=" << n_pop << " model=" << model_label
      << " seeds=" << seeds << " seed_base=" << seed_base
      << " prng=" << prng << "\n";
  for (const std::string &m : methods) {
    const auto &rows = results.at(m);
    for (const ReplicateResult &r : rows) {
      out << "replicate seed=" << r.seed << " method=" << m;
      if (r.failed) {
        out << " failed: " << r.failure << "\n";
        continue;
      }
      out << " n_hat=" << fmt_count(r.estimate.n_hat) << " ci=("
          << fmt_count(r.estimate.ci_low) << ", "
          << fmt_count(r.estimate.ci_high) << ")"
          << " covered=" << (r.covered ? "yes" : "no") << "\n";
    }
  }
  for (const std::string &m : methods) {
    const SimulationAggregate &a = aggregates.at(m);
    out << "aggregate method=" << m << " replicates=" << a.replicates
        << " failures=" << a.failures
        << " mean_n_hat=" << fmt_count(a.mean_n_hat)
        << " mean_rel_bias=" << fmt_stat(a.mean_rel_bias)
        << " coverage=" << fmt_stat(a.coverage) << "\n";
  }
}

nlohmann::json SimulationReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "simulate";
  j["prng"] = prng;
  j["config"] = {{"n_pop", n_pop},
                 {"model", model_label},
                 {"seeds", seeds},
                 {"seed_base", seed_base},
                 {"methods", methods}};
  nlohmann::json reps = nlohmann::json::object();
  for (const std::string &m : methods) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ReplicateResult &r : results.at(m)) {
      nlohmann::json e;
      e["seed"] = r.seed;
      if (r.failed) {
        e["failed"] = r.failure;
      } else {
        e["n_hat"] = r.estimate.n_hat;
        e["se"] = r.estimate.se;
        e["ci_low"] = r.estimate.ci_low;
        e["ci_high"] = r.estimate.ci_high;
        e["covered"] = r.covered;
        e["rel_bias"] = r.rel_bias;
        e["display"] = {{"n_hat", fmt_count(r.estimate.n_hat)},
                        {"ci_low", fmt_count(r.estimate.ci_low)},
                        {"ci_high", fmt_count(r.estimate.ci_high)}};
      }
      arr.push_back(e);
    }
    reps[m] = arr;
  }
  j["replicates"] = reps;
  nlohmann::json agg = nlohmann::json::object();
  for (const std::string &m : methods) {
    const SimulationAggregate &a = aggregates.at(m);
    agg[m] = {{"replicates", a.replicates},
              {"failures", a.failures},
              {"mean_n_hat", a.mean_n_hat},
              {"mean_rel_bias", a.mean_rel_bias},
              {"coverage", a.coverage},
              {"display",
               {{"mean_n_hat", fmt_count(a.mean_n_hat)},
                {"mean_rel_bias", fmt_stat(a.mean_rel_bias)},
                {"coverage", fmt_stat(a.coverage)}}}};
  }
  j["aggregates"] = agg;
  return j;
}

} // namespace popsize
