#include "funk/catalog.hpp"

#include <stdexcept>

#include "funk/errors.hpp"
#include "funk/expr.hpp"

namespace funk {
namespace {

Jet squared_norm(const std::vector<Jet>& v) {
  Jet acc = v[0] * v[0];
  for (std::size_t i = 1; i < v.size(); ++i) acc += v[i] * v[i];
  return acc;
}

Jet inner(const std::vector<Jet>& a, const std::vector<Jet>& b) {
  Jet acc = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

bool inside_unit_ball(std::span<const double> x) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return r2 < 1.0;
}

// sqrt(|y|^2 (1 - |x|^2) + <x,y>^2), shared by the Klein and Funk metrics.
Jet ball_root(const JetVars& v) {
  const Jet one_minus = 1.0 - squared_norm(v.x);
  const Jet xy = inner(v.x, v.y);
  return sqrt(squared_norm(v.y) * one_minus + xy * xy);
}

}  // namespace

ScalarField euclidean_metric() {
  return ScalarField(
      "euclidean", [](const JetVars& v) { return sqrt(squared_norm(v.y)); }, 1);
}

ScalarField sphere_metric() {
  return ScalarField(
      "sphere",
      [](const JetVars& v) { return 2.0 * sqrt(squared_norm(v.y)) / (1.0 + squared_norm(v.x)); }, 1);
}

ScalarField klein_metric() {
  return ScalarField(
      "klein", [](const JetVars& v) { return ball_root(v) / (1.0 - squared_norm(v.x)); }, 1,
      inside_unit_ball);
}

ScalarField funk_ball_metric() {
  return ScalarField(
      "funk-ball",
      [](const JetVars& v) { return (ball_root(v) + inner(v.x, v.y)) / (1.0 - squared_norm(v.x)); },
      1, inside_unit_ball);
}

ScalarField linear_rational_candidate() {
  return ScalarField(
      "linear-rational", [](const JetVars& v) { return v.y[0] / (1.0 - v.x[0]); }, 1,
      [](std::span<const double> x) { return x[0] != 1.0; });
}

ScalarField zero_candidate() {
  return ScalarField("zero", [](const JetVars& v) { return v.constant(0.0); }, 1);
}

const std::vector<MetricEntry>& metric_catalog() {
  static const std::vector<MetricEntry> entries = [] {
    const SamplingDomain box{XDomain::box(-1.0, 1.0), YAnnulus{}};
    const SamplingDomain ball{XDomain::ball(0.6), YAnnulus{}};
    std::vector<MetricEntry> e;
    e.push_back({"euclidean", "|y|", "Euclidean norm; geodesic spray is flat", 0.0, box, false,
                 euclidean_metric});
    e.push_back({"flat", "|y|", "the zero spray G = 0 with the Euclidean norm as F", 0.0, box, true,
                 euclidean_metric});
    e.push_back({"sphere", "2|y|/(1+|x|^2)", "round unit sphere, stereographic chart", 1.0, box,
                 false, sphere_metric});
    e.push_back({"klein", "sqrt(|y|^2(1-|x|^2)+<x,y>^2)/(1-|x|^2)",
                 "Klein (Beltrami) model of hyperbolic space on the unit ball", -1.0, ball, false,
                 klein_metric});
    e.push_back({"funk-ball", "(sqrt(|y|^2(1-|x|^2)+<x,y>^2)+<x,y>)/(1-|x|^2)",
                 "Funk metric of the unit ball; projectively flat, non-reversible", -0.25, ball,
                 false, funk_ball_metric});
    return e;
  }();
  return entries;
}

const std::vector<CandidateEntry>& candidate_catalog() {
  static const std::vector<CandidateEntry> entries = [] {
    std::vector<CandidateEntry> e;
    e.push_back({"theta", "funk-ball F", "Funk metric of the unit ball used as a projective factor",
                 false, [](int, const std::optional<ScalarField>&, const CandidateOptions&) {
                   return funk_ball_metric().with_name("theta");
                 }});
    e.push_back({"linear-rational", "y1/(1-x1)", "rational Funk function of the flat spray", false,
                 [](int, const std::optional<ScalarField>&, const CandidateOptions&) {
                   return linear_rational_candidate();
                 }});
    e.push_back({"cF", "c*F", "constant multiple of the active metric (--c)", true,
                 [](int, const std::optional<ScalarField>& metric, const CandidateOptions& opt) {
                   return (opt.c * *metric).with_name("cF");
                 }});
    e.push_back({"aF", "a(x)*F", "basic function times the active metric (--a)", true,
                 [](int n, const std::optional<ScalarField>& metric, const CandidateOptions& opt) {
                   const auto ast = expr::parse(opt.a, n, false);
                   const ScalarField a = expr::compile(ast, std::nullopt, 0);
                   struct UsesY {
                     static bool check(const expr::Ast& node) {
                       if (!node) return false;
                       return node->op == expr::Op::VarY || check(node->lhs) || check(node->rhs);
                     }
                   };
                   if (UsesY::check(ast)) throw CompileError("a(x) must not depend on y");
                   return (a * *metric).with_name("aF").with_degree(1);
                 }});
    e.push_back({"y1", "y1", "first fiber coordinate; 1-homogeneous, not of the form a(x)F", false,
                 [](int, const std::optional<ScalarField>&, const CandidateOptions&) {
                   return ScalarField("y1", [](const JetVars& v) { return v.y[0]; }, 1);
                 }});
    e.push_back({"zero", "0", "the trivial projective factor", false,
                 [](int, const std::optional<ScalarField>&, const CandidateOptions&) {
                   return zero_candidate();
                 }});
    return e;
  }();
  return entries;
}

const MetricEntry& find_metric(std::string_view name) {
  for (const auto& e : metric_catalog()) {
    if (e.name == name) return e;
  }
  throw std::out_of_range("unknown metric '" + std::string(name) + "'");
}

const CandidateEntry& find_candidate(std::string_view name) {
  for (const auto& e : candidate_catalog()) {
    if (e.name == name) return e;
  }
  throw std::out_of_range("unknown candidate '" + std::string(name) + "'");
}

}  // namespace funk
