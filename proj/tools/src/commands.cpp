#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "funk/analysis.hpp"
#include "funk/catalog.hpp"
#include "funk/errors.hpp"
#include "funk/expr.hpp"
#include "funk/search.hpp"
#include "funkgeo/cli.hpp"

namespace funkgeo {

using nlohmann::json;

const std::vector<std::string>& tolerance_names() {
  static const std::vector<std::string> names = {"geodesic", "kappa",   "rho",          "funk",
                                                 "phiphi0",  "identity", "isotropy",    "search",
                                                 "fiber",    "af_prediction"};
  return names;
}

double tolerance(const RunConfig& config, const std::string& name) {
  if (const auto it = config.tolerances.find(name); it != config.tolerances.end()) return it->second;
  if (name == "geodesic" || name == "af_prediction") return 1e-9;
  if (name == "kappa") return !config.metric_expr && config.metric == "funk-ball" ? 1e-6 : 1e-8;
  if (name == "rho" || name == "phiphi0") return 1e-7;
  if (name == "funk" || name == "identity" || name == "isotropy" || name == "search" ||
      name == "fiber") {
    return 1e-8;
  }
  throw UsageError("unknown tolerance '" + name + "'");
}

namespace {

struct Verdict {
  json checks = json::array();
  bool pass = true;

  void add(const std::string& name, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    pass = pass && ok;
    checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", ok}});
  }
};

// Resolved inputs shared by every command.
struct Context {
  const RunConfig& config;
  funk::ScalarField metric;
  std::optional<double> expected_kappa;
  bool flat = false;
  bool deformed = false;
  funk::SamplingDomain domain;

  funk::Spray base_spray() const {
    return flat ? funk::flat_spray(config.n) : funk::geodesic_spray(metric, config.n);
  }
};

funk::ScalarField resolve_factor(const Context& ctx, const std::optional<std::string>& name,
                                 const std::optional<std::string>& expression, const char* what) {
  if (name && expression) {
    throw UsageError(std::string("give either --") + what + " or --" + what + "-expr, not both");
  }
  if (expression) {
    const auto ast = funk::expr::parse(*expression, ctx.config.n, true);
    return funk::expr::compile(ast, ctx.metric, ctx.config.candidate_degree);
  }
  if (name) {
    const auto& entry = funk::find_candidate(*name);
    funk::CandidateOptions opt;
    opt.c = ctx.config.c;
    opt.a = ctx.config.a;
    return entry.make(ctx.config.n, ctx.metric, opt);
  }
  throw UsageError(std::string("this command needs --") + what + " or --" + what + "-expr");
}

Context make_context(const RunConfig& config) {
  if (config.n < 2 || config.n > 4) throw UsageError("--n must be in [2, 4]");
  if (config.samples < 1) throw UsageError("--samples must be at least 1");
  Context ctx{config, {}, std::nullopt, false, false, {}};
  if (config.metric_expr) {
    const auto ast = funk::expr::parse(*config.metric_expr, config.n, false);
    ctx.metric = funk::expr::compile(ast, std::nullopt, 1);
    ctx.domain = funk::SamplingDomain{funk::XDomain::box(-1.0, 1.0), funk::YAnnulus{}};
  } else {
    const auto& entry = funk::find_metric(config.metric);
    ctx.metric = entry.field();
    ctx.expected_kappa = entry.kappa;
    ctx.flat = entry.flat;
    ctx.domain = entry.domain;
  }
  if (config.command == "search") ctx.domain = funk::SearchConfig{}.domain;
  if (config.domain) ctx.domain = funk::SamplingDomain::parse(*config.domain, ctx.domain);
  ctx.deformed = config.deform || config.deform_expr;
  if (config.metric_expr) {
    const auto probes = funk::draw_samples(ctx.domain, config.n, 16, config.seed, 3);
    funk::check_homogeneity(ctx.metric, probes.points, 1.0);
  }
  return ctx;
}

funk::Spray make_spray(const Context& ctx, const funk::SampleSet& samples) {
  funk::Spray s = ctx.base_spray();
  if (!ctx.deformed) return s;
  const auto P = resolve_factor(ctx, ctx.config.deform, ctx.config.deform_expr, "deform");
  return funk::projective_deform(s, P, samples.points);
}

json config_json(const RunConfig& c, const Context& ctx) {
  auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
  json tols = json::object();
  for (const auto& name : tolerance_names()) tols[name] = tolerance(c, name);
  return {{"command", c.command},
          {"metric", c.metric_expr ? json(nullptr) : json(c.metric)},
          {"metric_expr", opt(c.metric_expr)},
          {"candidate", opt(c.candidate)},
          {"candidate_expr", opt(c.candidate_expr)},
          {"candidate_degree", c.candidate_degree},
          {"deform", opt(c.deform)},
          {"deform_expr", opt(c.deform_expr)},
          {"n", c.n},
          {"samples", c.samples},
          {"seed", c.seed},
          {"domain", ctx.domain.to_string()},
          {"c", c.c},
          {"a", c.a},
          {"restarts", c.restarts},
          {"max_iter", c.max_iter},
          {"assert", c.assert_mode},
          {"tolerances", tols}};
}

struct Outcome {
  json summary;
  json samples = json::array();
};

Outcome cmd_analyze(const Context& ctx, Verdict& v) {
  const auto& c = ctx.config;
  const auto samples = funk::draw_samples(ctx.domain, c.n, c.samples, c.seed);
  const funk::Spray s = make_spray(ctx, samples);
  Outcome out;
  out.summary["spray"] = s.provenance();
  out.summary["seed"] = c.seed;

  std::optional<funk::FlagCurvatureReport> fc;
  if (!ctx.deformed) {
    const auto gc = funk::geodesic_contract(s, ctx.metric, samples);
    out.summary["geodesic"] = {{"d_h_F", gc.d_h_F}, {"defect", gc.defect}};
    v.add("geodesic_d_h_F", gc.d_h_F, tolerance(c, "geodesic"));
    v.add("geodesic_defect", gc.defect, tolerance(c, "geodesic"));

    fc = funk::flag_curvature(ctx.metric, c.n, samples);
    out.summary["flag_curvature"] = funk::summary_json(*fc);
    if (ctx.expected_kappa) {
      const double k = *ctx.expected_kappa;
      out.summary["flag_curvature"]["expected_kappa"] = k;
      const double dev = std::max(std::abs(fc->min_kappa - k), std::abs(fc->max_kappa - k));
      v.add("kappa", dev, tolerance(c, "kappa"));
      v.add("flag_residual", fc->max_residual, tolerance(c, "kappa"));
    }
  }

  const auto iso = funk::isotropy_decompose(s, samples);
  out.summary["isotropy"] = funk::summary_json(iso);
  v.add("isotropy_residual", iso.max_residual, tolerance(c, "isotropy"));

  // rho against kappa F^2 (geodesic case) and against F^2 (ratio, for deformed sprays).
  double rho_dev = 0.0;
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = -ratio_min;
  for (std::size_t k = 0; k < samples.points.size(); ++k) {
    const double f2 = std::pow(ctx.metric.value(samples.points[k]), 2);
    const double rho = iso.rows[k].rho;
    ratio_min = std::min(ratio_min, rho / f2);
    ratio_max = std::max(ratio_max, rho / f2);
    if (ctx.expected_kappa && !ctx.deformed) {
      rho_dev = std::max(rho_dev, std::abs(rho - *ctx.expected_kappa * f2));
    }
  }
  out.summary["isotropy"]["rho_over_F2"] = {{"min", ratio_min}, {"max", ratio_max}};
  if (ctx.expected_kappa && !ctx.deformed) v.add("rho_kappa_F2", rho_dev, tolerance(c, "rho"));

  const auto iso_rows = funk::samples_json(iso);
  for (std::size_t k = 0; k < iso_rows.size(); ++k) {
    json row = iso_rows[k];
    row["iso_residual"] = row["residual"];
    row.erase("residual");
    if (fc) {
      row["kappa"] = fc->kappa[k];
      row["flag_residual"] = fc->residual[k];
    }
    out.samples.push_back(std::move(row));
  }
  return out;
}

Outcome cmd_funk_check(const Context& ctx, Verdict& v) {
  const auto& c = ctx.config;
  const auto samples = funk::draw_samples(ctx.domain, c.n, c.samples, c.seed);
  const funk::Spray s = make_spray(ctx, samples);
  const auto P = resolve_factor(ctx, c.candidate, c.candidate_expr, "candidate");
  const auto r = funk::funk_residual(s, P, samples);
  Outcome out{funk::summary_json(r), funk::samples_json(r)};
  out.summary["spray"] = s.provenance();
  out.summary["candidate"] = P.name();
  v.add("funk_sup", r.sup_norm, tolerance(c, "funk"));
  return out;
}

Outcome cmd_deform(const Context& ctx, Verdict& v) {
  const auto& c = ctx.config;
  const auto samples = funk::draw_samples(ctx.domain, c.n, c.samples, c.seed);
  const funk::Spray s = make_spray(ctx, samples);
  const auto P = resolve_factor(ctx, c.candidate, c.candidate_expr, "candidate");
  const auto r = funk::verify_phiphi0(s, P, samples);
  Outcome out{funk::summary_json(r), funk::samples_json(r)};
  out.summary["spray"] = s.provenance();
  out.summary["candidate"] = P.name();
  v.add("phiphi0_relative", r.max_relative_difference, tolerance(c, "phiphi0"));
  return out;
}

std::vector<funk::ScalarField> identity_fields(const Context& ctx) {
  const int n = ctx.config.n;
  auto field = [&](const std::string& source, std::optional<int> degree) {
    return funk::expr::compile(funk::expr::parse(source, n, true), ctx.metric, degree);
  };
  std::vector<funk::ScalarField> fields = {ctx.metric.with_name("F"), field("y1", 1),
                                           field("x1*y2 + F", 1), field("x2*y1^2 + y2^3", std::nullopt)};
  if (ctx.config.candidate || ctx.config.candidate_expr) {
    fields.push_back(resolve_factor(ctx, ctx.config.candidate, ctx.config.candidate_expr, "candidate"));
  }
  return fields;
}

Outcome cmd_identities(const Context& ctx, Verdict& v) {
  const auto& c = ctx.config;
  const auto samples = funk::draw_samples(ctx.domain, c.n, c.samples, c.seed);
  const funk::Spray s = make_spray(ctx, samples);
  const auto t = funk::identity_suite(s, identity_fields(ctx), samples);
  Outcome out{funk::summary_json(t), json::array()};
  for (std::size_t k = 0; k < std::min<std::size_t>(samples.points.size(), 1000); ++k) {
    out.samples.push_back(funk::point_json(samples.points[k]));
  }
  v.add("identity_scaled", t.max_scaled, tolerance(c, "identity"));
  return out;
}

Outcome cmd_chain(const Context& ctx, Verdict& v) {
  const auto& c = ctx.config;
  if (ctx.deformed || ctx.flat) {
    throw UsageError("chain works on the geodesic spray of a metric; drop --deform and use a non-flat metric");
  }
  const auto samples = funk::draw_samples(ctx.domain, c.n, c.samples, c.seed);
  const auto P = resolve_factor(ctx, c.candidate, c.candidate_expr, "candidate");
  const auto r = funk::theorem1_chain(ctx.metric, P, c.n, samples);
  Outcome out{funk::summary_json(r), funk::samples_json(r)};
  out.summary["candidate"] = P.name();
  v.add("fiber_variance", r.max_fiber_variance, tolerance(c, "fiber"));
  v.add("af_prediction", r.max_af_prediction_error, tolerance(c, "af_prediction"));
  return out;
}

Outcome cmd_search(const Context& ctx, Verdict& v) {
  const auto& c = ctx.config;
  funk::SearchConfig sc;
  sc.restarts = c.restarts;
  sc.max_iter = c.max_iter;
  sc.seed = c.seed;
  sc.samples = c.samples;
  sc.validation_samples = c.samples;
  sc.domain = ctx.domain;
  if (sc.restarts < 1 || sc.max_iter < 0) throw UsageError("--restarts must be >= 1, --max-iter >= 0");
  const auto probes = funk::draw_samples(ctx.domain, c.n, std::min(c.samples, 16), c.seed, 3);
  const funk::Spray s = make_spray(ctx, probes);
  const auto r = funk::search_funk(s, sc);
  Outcome out{funk::summary_json(r), funk::samples_json(r)};
  out.summary["spray"] = s.provenance();
  v.add("search_validation_rms", r.best.validation_rms, tolerance(c, "search"));
  return out;
}

Outcome cmd_catalog() {
  Outcome out;
  json metrics = json::array();
  for (const auto& e : funk::metric_catalog()) {
    metrics.push_back({{"name", e.name},
                       {"formula", e.formula},
                       {"description", e.description},
                       {"kappa", e.kappa ? json(*e.kappa) : json(nullptr)},
                       {"domain", e.domain.to_string()},
                       {"dimensions", {2, 4}}});
  }
  json candidates = json::array();
  for (const auto& e : funk::candidate_catalog()) {
    candidates.push_back({{"name", e.name},
                          {"formula", e.formula},
                          {"description", e.description},
                          {"needs_metric", e.needs_metric}});
  }
  out.summary = {{"metrics", metrics}, {"candidates", candidates}};
  return out;
}

}  // namespace

json run_command(const RunConfig& config) {
  static const std::map<std::string, std::function<Outcome(const Context&, Verdict&)>> commands = {
      {"analyze", cmd_analyze},   {"funk-check", cmd_funk_check}, {"deform", cmd_deform},
      {"identities", cmd_identities}, {"chain", cmd_chain},       {"search", cmd_search}};

  Verdict verdict;
  Outcome outcome;
  json config_echo;
  if (config.command == "catalog") {
    outcome = cmd_catalog();
    config_echo = {{"command", "catalog"}};
  } else {
    const auto it = commands.find(config.command);
    if (it == commands.end()) throw UsageError("unknown command '" + config.command + "'");
    const Context ctx = make_context(config);
    config_echo = config_json(config, ctx);
    outcome = it->second(ctx, verdict);
  }
  return {{"version", kVersion},
          {"command", config.command},
          {"config", config_echo},
          {"summary", outcome.summary},
          {"samples", outcome.samples},
          {"verdict", {{"pass", verdict.pass}, {"checks", verdict.checks}}}};
}

}  // namespace funkgeo
