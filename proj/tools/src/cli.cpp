#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "funk/errors.hpp"
#include "funkgeo/cli.hpp"

namespace funkgeo {
namespace {

const std::vector<std::string> kCommands = {"analyze", "funk-check", "deform", "identities",
                                            "chain",   "search",     "catalog"};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void parse_tolerance(const std::string& spec, RunConfig& config) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw UsageError("--tol expects NAME=VALUE, got '" + spec + "'");
  const std::string name = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);
  tolerance(config, name);  // rejects unknown names
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !(v >= 0.0)) {
    throw UsageError("invalid tolerance value in '" + spec + "'");
  }
  config.tolerances[name] = v;
}

void print_summary(const nlohmann::json& report, std::ostream& out) {
  out << report["command"].get<std::string>() << ": "
      << (report["verdict"]["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
  for (const auto& check : report["verdict"]["checks"]) {
    out << "  " << (check["pass"].get<bool>() ? "ok   " : "FAIL ") << check["name"].get<std::string>()
        << " = " << check["value"].dump() << " (tol " << check["tolerance"].dump() << ")\n";
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for Funk functions of sprays and Finsler metrics", "funkgeo"};
  app.set_version_flag("--version", std::string(kVersion));

  RunConfig flags;
  std::string config_path;
  std::vector<std::string> tol_specs;

  app.add_option("command", flags.command, "Command to run")
      ->required()
      ->check(CLI::IsMember(kCommands));
  auto* metric = app.add_option("--metric", flags.metric, "Catalog metric name");
  auto* metric_expr = app.add_option("--metric-expr", flags.metric_expr, "Finsler function expression");
  auto* candidate = app.add_option("--candidate", flags.candidate, "Catalog candidate name");
  auto* candidate_expr = app.add_option("--candidate-expr", flags.candidate_expr,
                                        "Candidate expression (may use F)");
  auto* candidate_degree = app.add_option("--candidate-degree", flags.candidate_degree,
                                          "Declared homogeneity degree of --candidate-expr");
  auto* deform = app.add_option("--deform", flags.deform, "Deform the spray by a catalog candidate P");
  auto* deform_expr = app.add_option("--deform-expr", flags.deform_expr, "Deform the spray by P (expression)");
  auto* n = app.add_option("--n", flags.n, "Dimension (2..4)");
  auto* samples = app.add_option("--samples", flags.samples, "Number of samples");
  auto* seed = app.add_option("--seed", flags.seed, "RNG seed");
  auto* domain = app.add_option("--domain", flags.domain, "Sampling domain, e.g. \"x:box(-1,1);y:annulus(0.5,2)\"");
  auto* json_path = app.add_option("--json", flags.json_path, "Write the JSON report to PATH");
  auto* assert_flag = app.add_flag("--assert", flags.assert_mode, "Exit 3 when a check fails");
  auto* tol = app.add_option("--tol", tol_specs, "Tolerance override NAME=VALUE (repeatable)");
  auto* c = app.add_option("--c", flags.c, "Constant c of the cF candidate");
  auto* a = app.add_option("--a", flags.a, "Function a(x) of the aF candidate");
  auto* restarts = app.add_option("--restarts", flags.restarts, "Search restarts");
  auto* max_iter = app.add_option("--max-iter", flags.max_iter, "Search iterations per restart");
  app.add_option("--config", config_path, "Config file with [section] key = value lines");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  RunConfig config;
  nlohmann::json report;
  try {
    if (!config_path.empty()) apply_config_text(read_file(config_path), config);
    config.command = flags.command;
    auto take = [](CLI::Option* opt, auto& dst, const auto& src) {
      if (opt->count() > 0) dst = src;
    };
    take(metric, config.metric, flags.metric);
    if (metric->count() > 0) config.metric_expr.reset();
    take(metric_expr, config.metric_expr, flags.metric_expr);
    take(candidate, config.candidate, flags.candidate);
    take(candidate_expr, config.candidate_expr, flags.candidate_expr);
    if (candidate->count() > 0 && candidate_expr->count() == 0) config.candidate_expr.reset();
    if (candidate_expr->count() > 0 && candidate->count() == 0) config.candidate.reset();
    take(candidate_degree, config.candidate_degree, flags.candidate_degree);
    take(deform, config.deform, flags.deform);
    take(deform_expr, config.deform_expr, flags.deform_expr);
    take(n, config.n, flags.n);
    take(samples, config.samples, flags.samples);
    take(seed, config.seed, flags.seed);
    take(domain, config.domain, flags.domain);
    take(json_path, config.json_path, flags.json_path);
    take(assert_flag, config.assert_mode, flags.assert_mode);
    take(c, config.c, flags.c);
    take(a, config.a, flags.a);
    take(restarts, config.restarts, flags.restarts);
    take(max_iter, config.max_iter, flags.max_iter);
    if (tol->count() > 0) {
      for (const auto& spec : tol_specs) parse_tolerance(spec, config);
    }
    report = run_command(config);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const funk::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const funk::CompileError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const funk::Error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  }

  const std::string text = report.dump(2) + "\n";
  if (config.json_path) {
    std::ofstream file(*config.json_path, std::ios::binary);
    if (!file || !(file << text)) {
      err << "error: cannot write '" << *config.json_path << "'\n";
      return kUsage;
    }
    print_summary(report, out);
  } else {
    out << text;
  }
  if (config.assert_mode && !report["verdict"]["pass"].get<bool>()) {
    if (!config.json_path) print_summary(report, err);
    return kAssertion;
  }
  return kOk;
}

}  // namespace funkgeo
