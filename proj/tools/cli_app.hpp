#pragma once

// Batch runner behind the `eigcount` executable. Exit codes: 0 success,
// 1 numerical or runtime failure, 2 configuration error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "eigcount/io.hpp"
#include "eigcount/reduction.hpp"
#include "eigcount/verify.hpp"
#include "eigcount/wegner.hpp"
#include "eigcount/witness.hpp"

namespace eigcount::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> out;
  std::optional<std::string> summary;
  std::optional<unsigned> jobs;
  bool dump_config = false;
  std::vector<std::string> suites;
  std::vector<std::string> tol_overrides;
};

/// Worker count: --jobs, else SPECTRAL_COUNT_JOBS, else hardware concurrency.
inline unsigned resolve_jobs(const std::optional<unsigned>& flag) {
  if (flag) {
    if (*flag < 1) throw ConfigError("--jobs must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("SPECTRAL_COUNT_JOBS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("SPECTRAL_COUNT_JOBS must be a positive integer, got '" + std::string(env) + "'");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void write_output(const std::optional<std::string>& path, const std::string& text, std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream f(*path, std::ios::binary);
  if (!f) throw Error(Errc::NumericalFailure, "cannot write '" + *path + "'");
  f << text;
  if (!f) throw Error(Errc::NumericalFailure, "write to '" + *path + "' failed");
}

/// Summary path: explicit, else "<out>.json" when writing to a file.
inline std::optional<std::string> summary_path(const std::optional<std::string>& summary,
                                               const std::optional<std::string>& out) {
  if (summary) return summary;
  if (out) return *out + ".json";
  return std::nullopt;
}

template <class Parse>
auto parse_config(const Document& doc, Parse parse) {
  try {
    return parse(doc);
  } catch (const SchemaError& e) {
    throw ConfigError(doc.locate(e.pointer(), e.what()));
  }
}

inline Document config_document(const Overrides& o, bool required) {
  if (o.config.empty()) {
    if (required) throw ConfigError("--config is required");
    return parse_document("{}", "<defaults>");
  }
  return load_document(o.config);
}

inline int cmd_count(const Overrides& o, std::ostream& out) {
  const Document doc = config_document(o, true);
  CountConfig c = parse_config(doc, parse_count);
  if (o.out) c.out = o.out;
  if (o.dump_config) {
    out << dump(c).dump(2) << '\n';
    return kExitOk;
  }
  const auto spectrum = eigvalsh(c.matrix.value);
  std::string csv = "eps,energy,m,count,at_least_m\n";
  for (double eps : c.eps) {
    const int count = count_in_interval(spectrum, c.energy, eps);
    for (int m : c.m)
      csv += io::format_double(eps) + ',' + io::format_double(c.energy) + ',' + std::to_string(m) + ',' +
             std::to_string(count) + ',' + (count >= m ? "1" : "0") + '\n';
  }
  write_output(c.out, csv, out);
  return kExitOk;
}

inline int cmd_witness(const Overrides& o, std::ostream& out) {
  const Document doc = config_document(o, true);
  WitnessConfig c = parse_config(doc, parse_witness);
  if (o.out) c.out = o.out;
  if (o.dump_config) {
    out << dump(c).dump(2) << '\n';
    return kExitOk;
  }
  const auto& a = c.matrix.value;
  const double k = c.k.value_or(counting_constant(c.m, static_cast<int>(a.dim())).k);
  json result;
  if (c.block) {
    const auto gamma = find_block_witness(a, c.eps, c.m, *c.block, k);
    result = json{{"found", gamma.has_value()},
                  {"gamma", gamma ? index_set_to_json(*gamma) : json(nullptr)},
                  {"m", c.m},
                  {"eps", c.eps},
                  {"K", k},
                  {"block", *c.block}};
  } else {
    const auto w = find_witness_pair(a, c.eps, c.m, k);
    if (w) {
      result = certificate_to_json(*w);
      result["found"] = true;
    } else {
      result = json{{"found", false}, {"m", c.m}, {"eps", c.eps}, {"K", k}};
    }
  }
  write_output(c.out, result.dump(2) + '\n', out);
  return kExitOk;
}

inline int cmd_reduce(const Overrides& o, std::ostream& out) {
  const Document doc = config_document(o, true);
  ReduceConfig c = parse_config(doc, parse_reduce);
  if (o.out) c.out = o.out;
  if (o.dump_config) {
    out << dump(c).dump(2) << '\n';
    return kExitOk;
  }
  const auto r = reduce(c.b1.value, c.b2.value);
  json counts = json::array();
  for (double eps : c.eps) {
    const auto s = count_sandwich_check(c.b1.value, c.b2.value, eps);
    counts.push_back(json{{"eps", eps}, {"low", s.low}, {"mid", s.mid}, {"high", s.high}, {"holds", s.holds()}});
  }
  const json result{{"a", r.a},
                    {"L", r.l},
                    {"nu", r.nu},
                    {"extended_range", r.extended},
                    {"lower_scale", r.lower_scale},
                    {"upper_scale", r.upper_scale},
                    {"b_hat", matrix_to_json(r.b_hat)},
                    {"counts", counts}};
  write_output(c.out, result.dump(2) + '\n', out);
  return kExitOk;
}

inline json fit_or_error(std::span<const double> grid, std::span<const McReport> reps) {
  try {
    return fit_to_json(fit_scaling(grid, reps));
  } catch (const Error& e) {
    if (e.code() != Errc::InsufficientPositivePoints) throw;
    return json{{"error", e.what()}};
  }
}

inline int cmd_wegner(const Overrides& o, std::ostream& out) {
  const Document doc = config_document(o, true);
  WegnerConfig c = parse_config(doc, parse_wegner);
  if (o.seed) c.seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  if (o.out) c.out = o.out;
  if (o.summary) c.summary = o.summary;
  if (o.dump_config) {
    out << dump(c).dump(2) << '\n';
    return kExitOk;
  }
  McOptions opt;
  opt.jobs = resolve_jobs(o.jobs);
  opt.alpha = c.alpha;
  const auto reports = count_probability_sweep(c.model.value, c.eps, c.m, c.trials, {c.seed, 0}, opt);
  write_output(c.out, reports_to_csv(reports), out);

  json fits = json::object();
  std::map<int, double> slopes;
  for (int m : c.m) {
    std::vector<McReport> per_m;
    for (const auto& r : reports)
      if (r.m == m) per_m.push_back(r);
    const json f = fit_or_error(c.eps, per_m);
    if (f.contains("exponent")) slopes[m] = f["exponent"].get<double>();
    fits[std::to_string(m)] = f;
  }
  json summary{{"command", "wegner"}, {"config", dump(c)}, {"reports", reports_to_json(reports)}, {"fits", fits}};
  if (slopes.contains(1) && slopes.contains(2))
    summary["minami"] = json{{"slope_m1", slopes[1]}, {"slope_m2", slopes[2]}, {"gap", slopes[2] - slopes[1]}};
  if (const auto sp = summary_path(c.summary, c.out)) write_output(sp, summary.dump(2) + '\n', out);
  return kExitOk;
}

/// Exact P(|det H_hat| <= delta) for a single scalar site with uniform
/// disorder, or nullopt when the model is not of that form.
inline std::optional<double> single_site_exact(const ModelSpec& s, int a, double delta) {
  if (s.family != ModelFamily::Anderson || s.graph.vertices != 1 ||
      s.site_dist.kind != DistributionKind::UniformInterval || !(s.coupling > 0.0))
    return std::nullopt;
  const double b = s.coupling * s.site_dist.support_bound;
  const double h0 = s.hopping(0, 0).real();
  if (!(std::abs(a) > b)) return std::nullopt;
  const double c = a > 0 ? h0 : -h0;
  return scalar_event_measure(std::abs(a), c, delta, b) / (2.0 * b);
}

inline int cmd_det_event(const Overrides& o, std::ostream& out) {
  const Document doc = config_document(o, true);
  DetEventConfig c = parse_config(doc, parse_det_event);
  if (o.seed) c.seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  if (o.out) c.out = o.out;
  if (o.summary) c.summary = o.summary;
  if (o.dump_config) {
    out << dump(c).dump(2) << '\n';
    return kExitOk;
  }
  McOptions opt;
  opt.jobs = resolve_jobs(o.jobs);
  opt.alpha = c.alpha;
  opt.regularity_k = c.regularity_k;
  const auto reports = det_event_sweep(c.model.value, c.a, c.delta, c.trials, {c.seed, 0}, opt);
  write_output(c.out, reports_to_csv(reports), out);

  json exact = json::array();
  for (double d : c.delta) {
    const auto e = single_site_exact(c.model.value, c.a, d);
    exact.push_back(e ? json(*e) : json(nullptr));
  }
  const json summary{{"command", "det-event"},
                     {"config", dump(c)},
                     {"reports", reports_to_json(reports)},
                     {"exact_single_site", exact}};
  if (const auto sp = summary_path(c.summary, c.out)) write_output(sp, summary.dump(2) + '\n', out);
  return kExitOk;
}

inline int cmd_verify(const Overrides& o, std::ostream& out, std::ostream& err) {
  const Document doc = config_document(o, false);
  VerifyConfig c = parse_config(doc, parse_verify);
  if (o.seed) c.seed = *o.seed;
  if (o.trials) c.instances = *o.trials;
  if (!o.suites.empty()) {
    c.suites.clear();
    for (const auto& s : o.suites) {
      try {
        check_suite_name(s, "");
      } catch (const SchemaError&) {
        throw ConfigError("--suite: unknown suite '" + s + "'");
      }
      c.suites.push_back(s);
    }
  }
  for (const auto& kv : o.tol_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--override-tol expects NAME=VALUE, got '" + kv + "'");
    const std::string name = kv.substr(0, eq);
    if (!default_tolerances().contains(name)) throw ConfigError("--override-tol: unknown tolerance '" + name + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing");
      c.tolerances[name] = v;
    } catch (const std::logic_error&) {
      throw ConfigError("--override-tol: '" + kv.substr(eq + 1) + "' is not a number");
    }
  }
  if (o.dump_config) {
    out << dump(c).dump(2) << '\n';
    return kExitOk;
  }
  VerifyOptions opt{c.seed, c.instances, c.tolerances};
  std::ostringstream table;
  table << std::left << std::setw(40) << "property" << std::right << std::setw(10) << "instances" << std::setw(11)
        << "violations" << std::setw(15) << "worst_margin"
        << "  status\n";
  std::optional<PropertyResult> first_bad;
  for (const auto& suite : c.suites) {
    for (const auto& r : run_suite(suite, opt)) {
      table << std::left << std::setw(40) << r.name << std::right << std::setw(10) << r.instances << std::setw(11)
            << r.violations << std::setw(15) << std::setprecision(4) << r.worst_margin << "  "
            << (r.passed() ? "PASS" : "FAIL") << '\n';
      if (!r.passed() && !first_bad) first_bad = r;
    }
  }
  write_output(o.out, table.str(), out);
  if (first_bad) {
    err << "first failing property: " << first_bad->name << " (replay: --seed " << first_bad->seed
        << ", instance " << first_bad->first_failure.value_or(0) << ")\n";
    return kExitFailure;
  }
  return kExitOk;
}

inline void add_common(CLI::App* sub, Overrides& o, bool with_mc) {
  sub->add_option("--config", o.config, "JSON config file");
  sub->add_option("--out", o.out, "output path (default: stdout)");
  sub->add_flag("--dump-config", o.dump_config, "print the resolved config and exit");
  if (with_mc) {
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--trials", o.trials, "number of trials");
    sub->add_option("--jobs", o.jobs, "worker threads (default: SPECTRAL_COUNT_JOBS or all cores)");
    sub->add_option("--summary", o.summary, "JSON summary path (default: <out>.json)");
  }
}

/// Runs the command line `args` (without the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Small-eigenvalue counting, witnesses and Wegner-type Monte Carlo"};
  app.require_subcommand(1);
  Overrides o;
  auto* count = app.add_subcommand("count", "count eigenvalues in (E - eps, E + eps)");
  auto* witness = app.add_subcommand("witness", "search for a Green-function witness pair");
  auto* red = app.add_subcommand("reduce", "norm-reduction transform and count sandwich");
  auto* wegner = app.add_subcommand("wegner", "Monte Carlo P(C_eps(H - E) >= m) sweep");
  auto* det = app.add_subcommand("det-event", "Monte Carlo P(|det H_hat| <= delta) sweep");
  auto* verify = app.add_subcommand("verify", "run the property suites");
  for (auto* s : {count, witness, red}) add_common(s, o, false);
  for (auto* s : {wegner, det}) add_common(s, o, true);
  add_common(verify, o, false);
  verify->add_option("--seed", o.seed, "master seed");
  verify->add_option("--trials", o.trials, "instances per property");
  verify->add_option("--suite", o.suites, "suite to run (repeatable)");
  verify->add_option("--override-tol", o.tol_overrides, "NAME=VALUE tolerance override (repeatable)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    if (count->parsed()) return cmd_count(o, out);
    if (witness->parsed()) return cmd_witness(o, out);
    if (red->parsed()) return cmd_reduce(o, out);
    if (wegner->parsed()) return cmd_wegner(o, out);
    if (det->parsed()) return cmd_det_event(o, out);
    return cmd_verify(o, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SchemaError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace eigcount::cli
