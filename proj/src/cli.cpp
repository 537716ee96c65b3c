#include "ecomp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecomp/config.hpp"
#include "ecomp/decomposition.hpp"
#include "ecomp/iu_benchmark.hpp"
#include "ecomp/myerson.hpp"
#include "ecomp/property_suite.hpp"
#include "ecomp/simple_auctions.hpp"

namespace ecomp {

namespace {

using nlohmann::json;

// Monte-Carlo estimates may differ from the truth by a few standard errors;
// checks built on them are widened by this many.
constexpr double kMcSigmas = 4.0;
// Bidder draws allowed for one Monte-Carlo benchmark estimate.
constexpr double kMcDrawBudget = 5e8;
constexpr double kLpTolerance = 1e-6;

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", x);
  return std::strtod(buffer, nullptr);
}

std::string fmt(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", x);
  return buffer;
}

// Rounds every number in place to 12 significant digits.
void round_numbers(json& node) {
  if (node.is_number_float()) {
    node = round12(node.get<double>());
  } else if (node.is_structured()) {
    for (auto& child : node) round_numbers(child);
  }
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEnumerationCapExceeded:
    case ErrorCode::kInstanceTooLarge:
      return kExitCaps;
    case ErrorCode::kLpNumericalFailure:
    case ErrorCode::kLpUnbounded:
    case ErrorCode::kLpMaxIterations:
      return kExitLp;
    default:
      return kExitConfig;
  }
}

class Table {
 public:
  explicit Table(std::vector<std::string> headers) : headers_(std::move(headers)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out) const {
    std::vector<std::size_t> width(headers_.size());
    for (std::size_t c = 0; c < headers_.size(); ++c) {
      width[c] = headers_[c].size();
      for (const auto& row : rows_) width[c] = std::max(width[c], row[c].size());
    }
    const auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        out << (c ? "  " : "") << std::left << std::setw(static_cast<int>(width[c])) << cells[c];
      }
      out << '\n';
    };
    line(headers_);
    for (const auto& row : rows_) line(row);
  }

  void print_csv(std::ostream& out) const {
    const auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << cells[c];
      out << '\n';
    };
    line(headers_);
    for (const auto& row : rows_) line(row);
  }

 private:
  std::vector<std::string> headers_;
  std::vector<std::vector<std::string>> rows_;
};

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<double> tolerance;
  std::string out_path;
  std::string format;
};

InstanceConfig load_with_overrides(const CommonFlags& flags) {
  InstanceConfig config = load_config(flags.config_path);
  if (flags.mode) config.mode = *flags.mode == "exact" ? RunMode::kExact : RunMode::kMonteCarlo;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.samples) {
    if (*flags.samples == 0) fail(ErrorCode::kConfigParse, "--samples must be positive");
    config.samples = *flags.samples;
  }
  if (flags.tolerance) {
    if (!(*flags.tolerance >= 0.0)) fail(ErrorCode::kConfigParse, "--tolerance must be non-negative");
    config.tolerance = *flags.tolerance;
  }
  return config;
}

// Writes to --out when given, otherwise to the report stream.
void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) fail(ErrorCode::kConfigParse, "cannot write '" + out_path + "'");
  file << text;
}

json config_json(const InstanceConfig& config) {
  json items = json::array();
  for (const ItemSpec& item : config.items) items.push_back({{"values", item.values}, {"probs", item.probs}});
  return {{"items", items},
          {"n", config.n},
          {"n_prime", config.resolved_n_prime()},
          {"epsilon", config.epsilon},
          {"mode", std::string(to_string(config.mode))},
          {"samples", config.samples},
          {"seed", config.seed},
          {"tolerance", config.tolerance}};
}

json check_json(const CheckRecord& c) {
  return {{"name", c.name}, {"lhs", c.lhs},       {"rhs", c.rhs},
          {"slack", c.slack}, {"holds", c.holds}, {"anchor", c.anchor}};
}

double vcg_or_zero(const AuctionSetting& setting, int n) { return n >= 2 ? vcg_revenue(setting, n) : 0.0; }

json analyze_exact(const InstanceConfig& config, const AuctionSetting& setting) {
  const int n = config.n;
  const int n_prime = config.resolved_n_prime();
  ChainOptions options;
  options.tolerance = config.tolerance;
  const TheoremVerdict verdict = main_theorem_verdict(setting, n, config.epsilon, n_prime, options);
  const DecompositionReport& r = verdict.chain;
  std::vector<CheckRecord> checks = r.checks;

  if (r.all_regular) {
    const BulowKlempererCheck bk = bulow_klemperer_check(setting, n, config.tolerance);
    checks.push_back(make_record("bulow_klemperer_n", bk.srev_n, bk.vcg_n_plus_1, config.tolerance,
                                 "SRev(n) at most VCG(n + 1) for regular items"));
  }
  if (verdict.optimal_revenue) {
    checks.push_back(make_record("rev_le_benchmark", *verdict.optimal_revenue, *r.iu_n, kLpTolerance,
                                 "optimal revenue at most the benchmark at n bidders"));
    const double rev = *verdict.optimal_revenue;
    if (verdict.branch == TheoremBranch::kCompetitionSuffices) {
      checks.push_back(make_record("theorem", (1.0 - config.epsilon) * rev, verdict.vcg_nprime,
                                   config.tolerance, "(1 - epsilon) Rev(n) at most VCG(n')"));
    } else {
      checks.push_back(make_record("theorem", rev, verdict.simple_floor, config.tolerance,
                                   "Rev(n) at most max(BVCG(n'), SRev(n'))"));
    }
  }

  json scalars = {{"srev_n", srev(setting, n)},
                  {"srev_nprime", r.srev_nprime},
                  {"vcg_n", vcg_or_zero(setting, n)},
                  {"vcg_nprime", r.vcg_nprime},
                  {"vcg_nprime_plus_1", r.vcg_nprime_plus_1},
                  {"iu_n_nprime", optional_number(r.iu_n)},
                  {"iu_nprime_nprime", optional_number(r.iu_nprime)},
                  {"single", r.single},
                  {"under", r.under},
                  {"over", r.over},
                  {"tail", r.tail},
                  {"tail_unclipped", r.tail_unclipped},
                  {"tail_exact", r.tail_exact},
                  {"core", r.core},
                  {"surplus_bound", r.surplus_bound},
                  {"ronen_sum", r.ronen_sum},
                  {"fee_mass", r.fee_mass},
                  {"participation_lb", r.participation_lb},
                  {"bvcg_floor", r.bvcg_floor},
                  {"revenue_lb", r.revenue_lb},
                  {"s_all", r.s_all},
                  {"pi_bvcg_floor", r.pi_bvcg_floor},
                  {"all_regular", r.all_regular},
                  {"lp_revenue", optional_number(verdict.optimal_revenue)}};

  json check_list = json::array();
  bool all_hold = true;
  for (const CheckRecord& c : checks) {
    check_list.push_back(check_json(c));
    all_hold = all_hold && c.holds;
  }
  json verdict_json = {{"branch", std::string(to_string(verdict.branch))},
                       {"holds", verdict.holds},
                       {"optimal_revenue", optional_number(verdict.optimal_revenue)},
                       {"vcg_nprime", verdict.vcg_nprime},
                       {"simple_floor", verdict.simple_floor},
                       {"pi_floor", optional_number(verdict.pi_floor)},
                       {"lp_error", verdict.lp_error ? json(*verdict.lp_error) : json(nullptr)}};
  all_hold = all_hold && verdict.holds;
  return {{"scalars", scalars}, {"checks", check_list}, {"verdict", verdict_json}, {"all_hold", all_hold}};
}

std::optional<MonteCarloEstimate> mc_iu_within_budget(const InstanceConfig& config,
                                                      const AuctionSetting& setting, int n) {
  const int n_prime = config.resolved_n_prime();
  if (static_cast<double>(n) * static_cast<double>(config.samples) > kMcDrawBudget) return std::nullopt;
  return monte_carlo_iu(setting, n, n_prime, config.samples, config.seed);
}

json estimate_json(const std::optional<MonteCarloEstimate>& e) {
  if (!e) return nullptr;
  return {{"estimate", e->estimate}, {"std_error", optional_number(e->std_error)}, {"samples", e->samples}};
}

json analyze_monte_carlo(const InstanceConfig& config, const AuctionSetting& setting) {
  const int n = config.n;
  const int n_prime = config.resolved_n_prime();
  const auto iu_n = mc_iu_within_budget(config, setting, n);
  const auto iu_np = mc_iu_within_budget(config, setting, n_prime);
  const double vcg_np = vcg_or_zero(setting, n_prime);

  json check_list = json::array();
  bool all_hold = true;
  const auto add = [&](const CheckRecord& c) {
    check_list.push_back(check_json(c));
    all_hold = all_hold && c.holds;
  };
  if (iu_n && iu_np && n_prime >= 2) {
    const double ratio = static_cast<double>(n) / n_prime;
    const double allowance =
        kMcSigmas * (iu_n->std_error.value_or(0.0) + ratio * iu_np->std_error.value_or(0.0));
    add(make_record("step2_unconditional_mc", iu_n->estimate,
                    ratio * iu_np->estimate + vcg_np + allowance, config.tolerance,
                    "benchmark at n bidders vs scaled benchmark at n' plus VCG(n'), widened by four standard errors"));
  }

  json scalars = {{"srev_n", srev(setting, n)},
                  {"srev_nprime", srev(setting, n_prime)},
                  {"vcg_n", vcg_or_zero(setting, n)},
                  {"vcg_nprime", vcg_np},
                  {"vcg_nprime_plus_1", vcg_revenue(setting, n_prime + 1)},
                  {"iu_n_nprime", estimate_json(iu_n)},
                  {"iu_nprime_nprime", estimate_json(iu_np)}};
  json verdict = {{"branch", std::string(to_string(TheoremBranch::kUnknown))}, {"holds", all_hold}};
  return {{"scalars", scalars}, {"checks", check_list}, {"verdict", verdict}, {"all_hold", all_hold}};
}

std::string analysis_table(const json& report) {
  std::ostringstream out;
  out << "scalars\n";
  Table scalars({"name", "value"});
  for (const auto& [name, value] : report["scalars"].items()) {
    if (value.is_object()) {
      std::string text = value["estimate"].dump();
      if (!value["std_error"].is_null()) text += " +/- " + value["std_error"].dump();
      scalars.add({name, text});
    } else {
      scalars.add({name, value.dump()});
    }
  }
  scalars.print(out);
  out << "\nchecks\n";
  Table checks({"name", "lhs", "rhs", "slack", "holds"});
  for (const auto& c : report["checks"]) {
    checks.add({c["name"].get<std::string>(), c["lhs"].dump(), c["rhs"].dump(), c["slack"].dump(),
                c["holds"].get<bool>() ? "yes" : "NO"});
  }
  checks.print(out);
  out << "\nverdict: " << report["verdict"]["branch"].get<std::string>()
      << (report["all_hold"].get<bool>() ? " (all checks hold)" : " (some check failed)") << '\n';
  return out.str();
}

int cmd_analyze(const CommonFlags& flags, std::ostream& out) {
  const InstanceConfig config = load_with_overrides(flags);
  const AuctionSetting setting = config.setting();
  json report = config.mode == RunMode::kExact ? analyze_exact(config, setting)
                                               : analyze_monte_carlo(config, setting);
  report["config"] = config_json(config);
  round_numbers(report);
  const bool all_hold = report["all_hold"].get<bool>();
  if (flags.format == "table") {
    emit(analysis_table(report), flags.out_path, out);
  } else {
    emit(report.dump(2) + "\n", flags.out_path, out);
    if (!flags.out_path.empty()) out << analysis_table(report);
  }
  return all_hold ? kExitOk : kExitCheckFailed;
}

int cmd_iron(const CommonFlags& flags, std::ostream& out) {
  const InstanceConfig config = load_with_overrides(flags);
  const AuctionSetting setting = config.setting();
  Table table({"item", "value", "prob", "phi", "phi_tilde", "regular"});
  json items = json::array();
  for (std::size_t j = 0; j < setting.num_items(); ++j) {
    const IronedTable t = iron(setting.item(j));
    json rows = json::array();
    for (std::size_t i = 0; i < t.item.size(); ++i) {
      table.add({std::to_string(j), fmt(t.item.value(i)), fmt(t.item.prob(i)), fmt(t.phi[i]),
                 fmt(t.phi_tilde[i]), t.regular ? "true" : "false"});
      rows.push_back({{"value", t.item.value(i)},
                      {"prob", t.item.prob(i)},
                      {"phi", t.phi[i]},
                      {"phi_tilde", t.phi_tilde[i]}});
    }
    items.push_back({{"item", j}, {"rows", rows}, {"regular", t.regular}});
  }
  std::ostringstream text;
  if (flags.format == "csv") {
    table.print_csv(text);
  } else if (flags.format == "json") {
    json doc = {{"items", items}};
    round_numbers(doc);
    text << doc.dump(2) << '\n';
  } else {
    table.print(text);
  }
  emit(text.str(), flags.out_path, out);
  return kExitOk;
}

struct VerifyFlags {
  std::uint64_t seed = 1;
  int count = 100;
  VerifyBounds bounds;
  std::string out_path;
  std::string format = "table";
};

int cmd_verify(const VerifyFlags& flags, std::ostream& out) {
  const std::vector<SuiteResult> results = run_property_suites(flags.seed, flags.count, flags.bounds);
  bool ok = true;
  Table table({"suite", "instances", "failures", "worst_slack", "status"});
  json suites = json::array();
  for (const SuiteResult& r : results) {
    ok = ok && r.failures == 0;
    if (r.instances == 0) continue;
    table.add({r.name, std::to_string(r.instances), std::to_string(r.failures), fmt(r.worst_slack),
               r.failures == 0 ? "pass" : "FAIL"});
    suites.push_back({{"suite", r.name},
                      {"instances", r.instances},
                      {"failures", r.failures},
                      {"worst_slack", r.worst_slack},
                      {"first_failure", r.first_failure}});
  }
  std::ostringstream text;
  if (flags.format == "json") {
    json doc = {{"seed", flags.seed}, {"count", flags.count}, {"suites", suites}, {"all_pass", ok}};
    round_numbers(doc);
    text << doc.dump(2) << '\n';
  } else if (flags.format == "csv") {
    table.print_csv(text);
  } else {
    table.print(text);
    for (const SuiteResult& r : results) {
      if (!r.first_failure.empty()) text << r.name << ": " << r.first_failure << '\n';
    }
  }
  emit(text.str(), flags.out_path, out);
  return ok ? kExitOk : kExitCheckFailed;
}

struct SweepFlags {
  CommonFlags common;
  std::optional<int> from;
  std::optional<int> to;
};

int cmd_sweep(const SweepFlags& flags, std::ostream& out) {
  const InstanceConfig config = load_with_overrides(flags.common);
  const AuctionSetting setting = config.setting();
  const int from = flags.from.value_or(config.n);
  const int to = flags.to.value_or(config.resolved_n_prime());
  if (from < 1) fail(ErrorCode::kConfigParse, "--from must be positive");
  Table table({"n_prime", "vcg", "srev", "iu_n_nprime", "iu_nprime_nprime", "bvcg_floor", "pi_bvcg_floor"});
  for (int n_prime = from; n_prime <= to; ++n_prime) {
    std::vector<std::string> row = {std::to_string(n_prime), fmt(vcg_or_zero(setting, n_prime)),
                                    fmt(srev(setting, n_prime))};
    if (config.mode == RunMode::kExact) {
      if (n_prime > setting.caps().max_n_prime) {
        fail(ErrorCode::kEnumerationCapExceeded,
             "n_prime = " + std::to_string(n_prime) + " exceeds the exact-mode cap; use monte_carlo mode");
      }
      const DecompositionReport r = decomposition_terms(setting, n_prime);
      const IUTables tables = build_iu_tables(setting, n_prime);
      row.push_back(fmt(iu_from_tables(tables, config.n)));
      row.push_back(fmt(iu_from_tables(tables, n_prime)));
      row.push_back(fmt(r.bvcg_floor));
      row.push_back(fmt(r.pi_bvcg_floor));
    } else {
      InstanceConfig at = config;
      at.n_prime = n_prime;
      const auto iu_n = mc_iu_within_budget(at, setting, config.n);
      const auto iu_np = mc_iu_within_budget(at, setting, n_prime);
      row.push_back(iu_n ? fmt(iu_n->estimate) : "");
      row.push_back(iu_np ? fmt(iu_np->estimate) : "");
      row.push_back("");
      row.push_back("");
    }
    table.add(std::move(row));
  }
  std::ostringstream text;
  if (flags.common.format == "table") {
    table.print(text);
  } else {
    table.print_csv(text);
  }
  emit(text.str(), flags.common.out_path, out);
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_run_options,
                const std::vector<std::string>& formats) {
  cmd->add_option("--config", flags.config_path, "instance config (JSON)")->required();
  if (with_run_options) {
    cmd->add_option("--mode", flags.mode, "exact or mc")
        ->check(CLI::IsMember({"exact", "mc", "monte_carlo"}));
    cmd->add_option("--seed", flags.seed, "Monte-Carlo seed");
    cmd->add_option("--samples", flags.samples, "Monte-Carlo sample count");
    cmd->add_option("--tolerance", flags.tolerance, "check tolerance");
  }
  cmd->add_option("--out", flags.out_path, "write the report to this file");
  flags.format = formats.front();
  cmd->add_option("--format", flags.format, "output format")->check(CLI::IsMember(formats));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Enhanced-competition revenue toolkit", "ecomp"};
  app.require_subcommand(1);

  CommonFlags analyze_flags;
  CLI::App* analyze = app.add_subcommand("analyze", "full pipeline report for one instance");
  add_common(analyze, analyze_flags, true, {"json", "table"});

  CommonFlags iron_flags;
  CLI::App* iron_cmd = app.add_subcommand("iron", "virtual and ironed virtual value tables");
  add_common(iron_cmd, iron_flags, false, {"table", "csv", "json"});

  VerifyFlags verify_flags;
  CLI::App* verify = app.add_subcommand("verify", "randomized invariant suites");
  verify->add_option("--seed", verify_flags.seed, "root seed");
  verify->add_option("--count", verify_flags.count, "instances per suite")->check(CLI::NonNegativeNumber);
  verify->add_option("--max-items", verify_flags.bounds.max_items)->check(CLI::Range(1, 4));
  verify->add_option("--max-support", verify_flags.bounds.max_support)->check(CLI::Range(1, 8));
  verify->add_option("--max-value", verify_flags.bounds.max_value)->check(CLI::Range(1, 1000));
  verify->add_option("--max-n", verify_flags.bounds.max_n)->check(CLI::Range(1, 8));
  verify->add_option("--max-n-prime", verify_flags.bounds.max_n_prime)->check(CLI::Range(1, 64));
  verify->add_option("--out", verify_flags.out_path, "write the summary to this file");
  verify->add_option("--format", verify_flags.format, "output format")
      ->check(CLI::IsMember({"table", "json", "csv"}));

  SweepFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "CSV of revenues and benchmarks over a range of n'");
  add_common(sweep, sweep_flags.common, true, {"csv", "table"});
  sweep->add_option("--from", sweep_flags.from, "first n' (default n)");
  sweep->add_option("--to", sweep_flags.to, "last n' (default the configured n')");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (verify_flags.bounds.max_support > verify_flags.bounds.max_value + 1) {
    err << "error: --max-support exceeds the number of available values\n";
    return kExitConfig;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_flags, out);
    if (*iron_cmd) return cmd_iron(iron_flags, out);
    if (*verify) return cmd_verify(verify_flags, out);
    if (*sweep) return cmd_sweep(sweep_flags, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitConfig;
}

}  // namespace ecomp
