// pacbound — bound queries, region estimation, reference-table reproduction
// and validation runs on discrete scenarios.
#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pacbound/classic.hpp"
#include "pacbound/conditioned.hpp"
#include "pacbound/region.hpp"
#include "pacbound/tables.hpp"
#include "pacbound/validation.hpp"

namespace {

using nlohmann::json;
using namespace pacbound;

constexpr std::uint64_t kEnumerationBudget = 10'000'000;

struct RegionArgs {
  std::optional<double> p_delta;
  std::optional<std::int64_t> hits;
  std::optional<std::int64_t> m_a;
  double alpha = 0.05;

  bool any() const { return p_delta || hits || m_a; }
  bool counts_complete() const { return hits && m_a; }
};

void add_region_options(CLI::App& cmd, RegionArgs& region) {
  cmd.add_option("--p-delta", region.p_delta,
                 "exact probability mass of the zero-loss region");
  cmd.add_option("--hits", region.hits,
                 "membership count inside the region (with --m-a)");
  cmd.add_option("--m-a", region.m_a, "auxiliary sample size (with --hits)");
  cmd.add_option("--alpha", region.alpha,
                 "one-sided level for the estimated region (default 0.05)");
}

json diagnostics_to_json(const Diagnostics& d) {
  json j{{"iterations", d.iterations},
         {"residual", d.residual},
         {"clamped", d.clamped},
         {"effective", d.effective}};
  if (d.p_hat >= 0.0) j["p_hat"] = d.p_hat;
  if (d.p_lower >= 0.0) j["p_lower"] = d.p_lower;
  return j;
}

json bound_to_json(const BoundResult& r) {
  return json{{"method", to_string(r.method)},
              {"bound", r.bound},
              {"confidence", r.confidence},
              {"diagnostics", diagnostics_to_json(r.diagnostics)}};
}

void print_kv(std::ostream& os, const std::string& key, const std::string& v) {
  os << std::left << std::setw(14) << key << v << "\n";
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void emit(const json& j, bool as_json, std::ostream& os,
          const std::function<void(std::ostream&)>& text) {
  if (as_json)
    os << j.dump(2) << "\n";
  else
    text(os);
}

void print_bound_text(std::ostream& os, const BoundResult& r) {
  print_kv(os, "method", to_string(r.method));
  print_kv(os, "bound", num(r.bound));
  print_kv(os, "confidence", num(r.confidence));
  print_kv(os, "effective", num(r.diagnostics.effective));
  print_kv(os, "iterations", std::to_string(r.diagnostics.iterations));
  print_kv(os, "residual", num(r.diagnostics.residual));
  print_kv(os, "clamped", r.diagnostics.clamped ? "yes" : "no");
  if (r.diagnostics.p_hat >= 0.0)
    print_kv(os, "p_hat", num(r.diagnostics.p_hat));
  if (r.diagnostics.p_lower >= 0.0)
    print_kv(os, "p_lower", num(r.diagnostics.p_lower));
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

struct BoundArgs {
  RiskQuery query;
  std::string method = "classic";
  RegionArgs region;
  double tol = 1e-12;
  bool as_json = false;
};

int run_bound(const BoundArgs& args) {
  const Method method = method_from_string(args.method);
  BoundResult result;
  if (method == Method::classic) {
    if (args.region.any())
      throw std::domain_error(
          "--p-delta/--hits/--m-a apply to --method implicit or closed-form");
    result = hoeffding_bound(args.query);
  } else {
    if (!args.region.p_delta && !args.region.counts_complete())
      throw std::domain_error(
          "conditioned methods need --p-delta or both --hits and --m-a");
    const RegionKnowledge knowledge =
        args.region.p_delta
            ? RegionKnowledge::exact(*args.region.p_delta)
            : RegionKnowledge::from_counts(*args.region.m_a,
                                           *args.region.hits,
                                           args.region.alpha);
    if (knowledge.is_exact()) {
      const double p_delta = std::get<double>(knowledge.value);
      result = method == Method::implicit
                   ? implicit_bound(args.query, p_delta, args.tol)
                   : closed_form_bound(args.query, p_delta);
    } else {
      const auto& est = std::get<RegionKnowledge::Estimate>(knowledge.value);
      result = bound_with_estimated_region(args.query, {est.m_a, est.hits},
                                           est.alpha, method);
    }
  }
  json j = bound_to_json(result);
  j["query"] = {{"m", args.query.m},
                {"delta", args.query.delta},
                {"c", args.query.loss_range},
                {"r_hat", args.query.r_hat},
                {"big_m", args.query.hypothesis_count}};
  emit(j, args.as_json, std::cout,
       [&](std::ostream& os) { print_bound_text(os, result); });
  return 0;
}

// ---------------------------------------------------------------------------
// confidence
// ---------------------------------------------------------------------------

struct ConfidenceArgs {
  RiskQuery query;
  std::optional<double> s;
  RegionArgs region;
  bool as_json = false;
};

int run_confidence(const ConfidenceArgs& args) {
  json j;
  double failure = 0.0;
  std::string mode;

  double p_delta = -1.0;
  double combined = -1.0;
  if (args.region.p_delta) {
    p_delta = *args.region.p_delta;
  } else if (args.region.counts_complete()) {
    const MembershipSample ms{*args.region.m_a, *args.region.hits};
    p_delta = clopper_pearson_lower(ms, args.region.alpha);
    j["p_hat"] = estimate_pdelta(ms);
    j["p_lower"] = p_delta;
  } else if (args.region.any()) {
    throw std::domain_error("region estimate needs both --hits and --m-a");
  }

  if (p_delta < 0.0) {
    if (!args.s)
      throw std::domain_error("confidence needs --s or region knowledge");
    mode = "classic";
    failure = hoeffding_confidence(args.query.m, *args.s,
                                   args.query.hypothesis_count,
                                   args.query.loss_range);
  } else if (args.s) {
    mode = "at-offset";
    failure = conditional_failure_prob(*args.s, args.query, p_delta);
  } else {
    mode = "updated";
    failure = updated_confidence(args.query, p_delta);
    RiskQuery base = args.query;
    base.hypothesis_count = 1;
    j["fixed_bound"] = hoeffding_bound(base).bound;
  }
  if (args.region.counts_complete())
    combined = combined_confidence(failure, args.region.alpha);

  j["mode"] = mode;
  j["failure_prob"] = failure;
  j["confidence"] = 1.0 - failure;
  if (args.s) j["s"] = *args.s;
  if (combined >= 0.0) {
    j["combined_failure_prob"] = combined;
    j["combined_confidence"] = 1.0 - combined;
  }
  emit(j, args.as_json, std::cout, [&](std::ostream& os) {
    print_kv(os, "mode", mode);
    if (args.s) print_kv(os, "s", num(*args.s));
    if (j.contains("fixed_bound"))
      print_kv(os, "fixed_bound", num(j["fixed_bound"].get<double>()));
    if (j.contains("p_hat")) print_kv(os, "p_hat", num(j["p_hat"].get<double>()));
    if (j.contains("p_lower"))
      print_kv(os, "p_lower", num(j["p_lower"].get<double>()));
    print_kv(os, "failure_prob", num(failure));
    print_kv(os, "confidence", num(1.0 - failure));
    if (combined >= 0.0) {
      print_kv(os, "combined", num(combined));
      print_kv(os, "combined_conf", num(1.0 - combined));
    }
  });
  return 0;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::int64_t m_a = 1;
  std::int64_t hits = 0;
  double alpha = 0.05;
  double delta = 0.05;
  std::optional<std::string> method;
  RiskQuery query;
  bool as_json = false;
};

int run_estimate(const EstimateArgs& args) {
  const MembershipSample ms{args.m_a, args.hits};
  const double p_hat = estimate_pdelta(ms);
  const double p_lower = clopper_pearson_lower(ms, args.alpha);
  const double combined = combined_confidence(args.delta, args.alpha);

  json j{{"m_a", args.m_a},
         {"hits", args.hits},
         {"alpha", args.alpha},
         {"p_hat", p_hat},
         {"p_lower", p_lower},
         {"delta", args.delta},
         {"combined_failure_prob", combined},
         {"combined_confidence", 1.0 - combined}};

  std::optional<BoundResult> bound;
  if (args.method) {
    RiskQuery q = args.query;
    q.delta = args.delta;
    bound = bound_with_estimated_region(q, ms, args.alpha,
                                        method_from_string(*args.method));
    j["bound"] = bound_to_json(*bound);
  }
  emit(j, args.as_json, std::cout, [&](std::ostream& os) {
    print_kv(os, "p_hat", num(p_hat));
    print_kv(os, "p_lower", num(p_lower));
    print_kv(os, "combined", num(combined));
    print_kv(os, "combined_conf", num(1.0 - combined));
    if (bound) {
      os << "\n";
      print_bound_text(os, *bound);
    }
  });
  return 0;
}

// ---------------------------------------------------------------------------
// tables
// ---------------------------------------------------------------------------

struct TablesArgs {
  std::string table;
  std::optional<std::int64_t> m;
  std::optional<double> delta;
  std::optional<double> r_hat;
  std::optional<double> c;
  std::vector<double> decreases;
  bool as_json = false;
  bool as_csv = false;
};

json table_report_to_json(const TableReport& rep) {
  json rows = json::array();
  for (const auto& row : rep.rows) {
    json r{{"decrease_pct", row.decrease_pct}, {"computed", row.computed}};
    if (row.published) {
      r["verdict"] = row.pass ? "PASS" : "FLAG";
      r["published"] = *row.published;
    }
    if (row.abs_diff) r["abs_diff"] = *row.abs_diff;
    if (row.companion) r["confidence_route"] = *row.companion;
    if (!row.note.empty()) r["note"] = row.note;
    rows.push_back(r);
  }
  return json{{"table", to_string(rep.spec.id)},
              {"spec",
               {{"m", rep.spec.m},
                {"delta", rep.spec.delta},
                {"r_hat", rep.spec.r_hat},
                {"c", rep.spec.loss_range}}},
              {"tolerance", rep.tolerance},
              {"rows", rows},
              {"findings", rep.findings}};
}

void print_table_text(std::ostream& os, const TableReport& rep) {
  os << to_string(rep.spec.id) << "  (m=" << rep.spec.m
     << ", delta=" << num(rep.spec.delta) << ", r_hat=" << num(rep.spec.r_hat)
     << ", C=" << num(rep.spec.loss_range)
     << ", tolerance=" << num(rep.tolerance) << ")\n";
  const bool with_companion = rep.spec.id == TableId::table2;
  os << std::left << std::setw(10) << "decrease" << std::setw(13) << "computed";
  if (with_companion) os << std::setw(13) << "conf-route";
  os << std::setw(13) << "published" << std::setw(13) << "|diff|"
     << "verdict\n";
  for (const auto& row : rep.rows) {
    os << std::left << std::setw(10) << (num(row.decrease_pct) + "%")
       << std::setw(13) << num(row.computed);
    if (with_companion)
      os << std::setw(13) << (row.companion ? num(*row.companion) : "-");
    os << std::setw(13) << (row.published ? num(*row.published) : "-")
       << std::setw(13) << (row.abs_diff ? num(*row.abs_diff) : "-")
       << (row.published ? (row.pass ? "PASS" : "FLAG") : "-") << "\n";
  }
  if (!rep.findings.empty()) {
    os << "findings:\n";
    for (const auto& f : rep.findings) os << "  - " << f << "\n";
  }
}

void print_table_csv(std::ostream& os, const TableReport& rep) {
  const bool with_companion = rep.spec.id == TableId::table2;
  os << "decrease_pct,computed";
  if (with_companion) os << ",confidence_route";
  os << ",published,abs_diff,verdict\n";
  os << std::setprecision(17);
  for (const auto& row : rep.rows) {
    os << row.decrease_pct << "," << row.computed;
    if (with_companion) {
      os << ",";
      if (row.companion) os << *row.companion;
    }
    os << ",";
    if (row.published) os << *row.published;
    os << ",";
    if (row.abs_diff) os << *row.abs_diff;
    os << "," << (row.published ? (row.pass ? "PASS" : "FLAG") : "") << "\n";
  }
}

int run_tables(const TablesArgs& args) {
  TableSpec spec = default_table_spec(table_id_from_string(args.table));
  if (args.m) spec.m = *args.m;
  if (args.delta) spec.delta = *args.delta;
  if (args.r_hat) spec.r_hat = *args.r_hat;
  if (args.c) spec.loss_range = *args.c;
  if (!args.decreases.empty()) spec.decreases = args.decreases;
  const TableReport rep = reproduce_table(spec);
  if (args.as_csv) {
    print_table_csv(std::cout, rep);
    return 0;
  }
  emit(table_report_to_json(rep), args.as_json, std::cout,
       [&](std::ostream& os) { print_table_text(os, rep); });
  return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string scenario;
  std::int64_t m = 1;
  double delta = 0.05;
  std::string method = "classic";
  std::string mode = "auto";
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;
  std::optional<double> s;
  bool as_json = false;
};

bool enumerable(const DiscreteScenario& sc, std::int64_t m) {
  if (m > 20) return false;
  long double states = 1.0L;
  for (std::int64_t j = 0; j < m; ++j) {
    states *= static_cast<long double>(sc.points().size());
    if (states > static_cast<long double>(kEnumerationBudget)) return false;
  }
  return true;
}

int run_validate(const ValidateArgs& args) {
  const DiscreteScenario sc = DiscreteScenario::load_file(args.scenario);
  const Method method = method_from_string(args.method);

  std::string mode = args.mode;
  if (mode == "auto") mode = enumerable(sc, args.m) ? "exact" : "mc";
  if (mode != "exact" && mode != "mc")
    throw std::domain_error("--mode must be auto, exact or mc");

  json j{{"scenario", args.scenario},
         {"mode", mode},
         {"method", to_string(method)},
         {"m", args.m},
         {"delta", args.delta},
         {"true_risk", sc.true_risk()},
         {"region_mass", sc.region_mass()}};

  if (mode == "exact") {
    const ExactCoverageReport rep =
        exact_coverage(sc, static_cast<int>(args.m), args.delta, method);
    const bool pass = rep.failure_mass <= args.delta;
    j["failure_mass"] = rep.failure_mass;
    j["coverage"] = rep.coverage;
    j["mean_bound"] = rep.mean_bound;
    j["mean_r_hat"] = rep.mean_r_hat;
    j["verdict"] = pass ? "PASS" : "FAIL";
    std::optional<ExactFailureReport> fixed;
    if (args.s) {
      fixed = exact_failure_probability(sc, static_cast<int>(args.m), *args.s);
      json per_k = json::array();
      for (std::size_t k = 1; k < fixed->outside_count_prob.size(); ++k)
        per_k.push_back({{"k_outside", k},
                         {"prob", fixed->outside_count_prob[k]},
                         {"conditional_fail", fixed->conditional_fail_by_k[k]}});
      j["at_offset"] = {{"s", *args.s},
                        {"unconditional", fixed->unconditional},
                        {"conditional", fixed->conditional},
                        {"per_k", per_k}};
    }
    emit(j, args.as_json, std::cout, [&](std::ostream& os) {
      print_kv(os, "mode", "exact");
      print_kv(os, "method", to_string(method));
      print_kv(os, "failure_mass", num(rep.failure_mass));
      print_kv(os, "coverage", num(rep.coverage));
      print_kv(os, "mean_bound", num(rep.mean_bound));
      print_kv(os, "mean_r_hat", num(rep.mean_r_hat));
      print_kv(os, "verdict", pass ? "PASS" : "FAIL");
      if (fixed) {
        os << "at offset s=" << num(*args.s) << ": unconditional "
           << num(fixed->unconditional) << ", conditional "
           << num(fixed->conditional) << "\n";
        for (std::size_t k = 1; k < fixed->outside_count_prob.size(); ++k)
          os << "  k_outside=" << k << "  prob "
             << num(fixed->outside_count_prob[k]) << "  cond_fail "
             << num(fixed->conditional_fail_by_k[k]) << "\n";
      }
    });
    return pass ? 0 : 2;
  }

  const CoverageReport rep = monte_carlo_coverage(sc, args.m, args.delta,
                                                  method, args.trials,
                                                  args.seed);
  const double sigma = std::sqrt(args.delta * (1.0 - args.delta) /
                                 static_cast<double>(args.trials));
  const double threshold = 1.0 - args.delta - 3.0 * sigma;
  const bool pass = rep.coverage >= threshold;
  j["trials"] = rep.trials;
  j["seed"] = rep.seed;
  j["coverage"] = rep.coverage;
  j["mean_bound"] = rep.mean_bound;
  j["mean_r_hat"] = rep.mean_r_hat;
  j["threshold"] = threshold;
  j["verdict"] = pass ? "PASS" : "FAIL";
  emit(j, args.as_json, std::cout, [&](std::ostream& os) {
    print_kv(os, "mode", "mc");
    print_kv(os, "method", to_string(method));
    print_kv(os, "trials", std::to_string(rep.trials));
    print_kv(os, "seed", std::to_string(rep.seed));
    print_kv(os, "coverage", num(rep.coverage));
    print_kv(os, "mean_bound", num(rep.mean_bound));
    print_kv(os, "mean_r_hat", num(rep.mean_r_hat));
    print_kv(os, "threshold", num(threshold));
    print_kv(os, "verdict", pass ? "PASS" : "FAIL");
  });
  return pass ? 0 : 2;
}

void add_query_options(CLI::App& cmd, RiskQuery& q) {
  cmd.add_option("--m", q.m, "evaluating-sample size")->required();
  cmd.add_option("--delta", q.delta, "failure probability (default 0.05)");
  cmd.add_option("--c", q.loss_range, "loss range C (default 1)");
  cmd.add_option("--r-hat", q.r_hat, "evaluated error (default 0)");
  cmd.add_option("--big-m", q.hypothesis_count,
                 "hypothesis count M (default 1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC generalisation bounds conditioned on a zero-loss region"};
  app.require_subcommand(1);

  BoundArgs bound_args;
  auto* bound_cmd =
      app.add_subcommand("bound", "compute a generalisation bound");
  add_query_options(*bound_cmd, bound_args.query);
  bound_cmd
      ->add_option("--method", bound_args.method,
                   "classic | implicit | closed-form")
      ->required();
  add_region_options(*bound_cmd, bound_args.region);
  bound_cmd->add_option("--tol", bound_args.tol, "solver tolerance");
  bound_cmd->add_flag("--json", bound_args.as_json, "machine-readable output");

  ConfidenceArgs conf_args;
  auto* conf_cmd =
      app.add_subcommand("confidence", "failure probability for a fixed bound");
  add_query_options(*conf_cmd, conf_args.query);
  conf_cmd->add_option("--s", conf_args.s, "bound offset to evaluate");
  add_region_options(*conf_cmd, conf_args.region);
  conf_cmd->add_flag("--json", conf_args.as_json, "machine-readable output");

  EstimateArgs est_args;
  auto* est_cmd = app.add_subcommand(
      "estimate", "region-mass estimate and Clopper-Pearson lower limit");
  est_cmd->add_option("--m-a", est_args.m_a, "auxiliary sample size")
      ->required();
  est_cmd->add_option("--hits", est_args.hits, "membership count")->required();
  est_cmd->add_option("--alpha", est_args.alpha,
                      "one-sided level (default 0.05)");
  est_cmd->add_option("--delta", est_args.delta,
                      "bound failure probability (default 0.05)");
  est_cmd->add_option("--method", est_args.method,
                      "also evaluate this conditioned bound at p_lower");
  est_cmd->add_option("--m", est_args.query.m, "evaluating-sample size");
  est_cmd->add_option("--c", est_args.query.loss_range, "loss range C");
  est_cmd->add_option("--r-hat", est_args.query.r_hat, "evaluated error");
  est_cmd->add_flag("--json", est_args.as_json, "machine-readable output");

  TablesArgs table_args;
  auto* tables_cmd =
      app.add_subcommand("tables", "reproduce the published reference tables");
  tables_cmd->add_option("table", table_args.table, "table1 | table2 | table3")
      ->required();
  tables_cmd->add_option("--m", table_args.m, "override m");
  tables_cmd->add_option("--delta", table_args.delta, "override delta");
  tables_cmd->add_option("--r-hat", table_args.r_hat, "override r_hat");
  tables_cmd->add_option("--c", table_args.c, "override C");
  tables_cmd
      ->add_option("--decreases", table_args.decreases,
                   "percent decreases (comma separated)")
      ->delimiter(',');
  tables_cmd->add_flag("--json", table_args.as_json, "machine-readable output");
  tables_cmd->add_flag("--csv", table_args.as_csv, "CSV output");

  ValidateArgs val_args;
  auto* val_cmd = app.add_subcommand(
      "validate", "exact or Monte Carlo coverage on a scenario file");
  val_cmd->add_option("--scenario", val_args.scenario, "scenario file path")
      ->required();
  val_cmd->add_option("--m", val_args.m, "evaluating-sample size")->required();
  val_cmd->add_option("--delta", val_args.delta,
                      "failure probability (default 0.05)");
  val_cmd->add_option("--method", val_args.method,
                      "classic | implicit | closed-form");
  val_cmd->add_option("--mode", val_args.mode, "auto | exact | mc");
  val_cmd->add_option("--trials", val_args.trials,
                      "Monte Carlo trials (default 10000)");
  val_cmd->add_option("--seed", val_args.seed, "master seed (default 0)");
  val_cmd->add_option("--s", val_args.s,
                      "also report exact failure probabilities at this offset");
  val_cmd->add_flag("--json", val_args.as_json, "machine-readable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bound_cmd->parsed()) return run_bound(bound_args);
    if (conf_cmd->parsed()) return run_confidence(conf_args);
    if (est_cmd->parsed()) return run_estimate(est_args);
    if (tables_cmd->parsed()) return run_tables(table_args);
    if (val_cmd->parsed()) return run_validate(val_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
