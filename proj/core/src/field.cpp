#include "funk/field.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "funk/errors.hpp"

namespace funk {
namespace {

std::string short_number(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

}  // namespace

PhasePoint make_phase_point(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("phase point: x and y differ in length");
  if (x.size() < 2) throw std::invalid_argument("phase point: dimension must be at least 2");
  bool nonzero = false;
  for (double v : y) nonzero = nonzero || v != 0.0;
  if (!nonzero) throw DomainError("phase point: y = 0 is outside the slit tangent space");
  return PhasePoint{std::move(x), std::move(y)};
}

JetVars JetVars::lift(const PhasePoint& p, int order) { return lift(p, order, 0); }

JetVars JetVars::lift(const PhasePoint& p, int order, int extra_vars) {
  const int n = p.dimension();
  const int dim = 2 * n + extra_vars;
  JetVars v;
  v.x.reserve(static_cast<std::size_t>(n));
  v.y.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v.x.push_back(Jet::variable(dim, order, x_var(i), p.x[static_cast<std::size_t>(i)]));
  }
  for (int i = 0; i < n; ++i) {
    v.y.push_back(Jet::variable(dim, order, y_var(n, i), p.y[static_cast<std::size_t>(i)]));
  }
  return v;
}

ScalarField::ScalarField(std::string name, Evaluator eval, std::optional<int> degree,
                         DomainPredicate domain)
    : impl_(std::make_shared<const Impl>(
          Impl{std::move(name), std::move(eval), degree, std::move(domain)})) {}

bool ScalarField::in_domain(std::span<const double> x) const {
  return !impl_->domain || impl_->domain(x);
}

Jet ScalarField::evaluate(const JetVars& vars) const {
  if (impl_->domain) {
    std::vector<double> base(vars.x.size());
    for (std::size_t i = 0; i < base.size(); ++i) base[i] = vars.x[i].value();
    if (!impl_->domain(base)) throw DomainError("point outside the domain of " + impl_->name);
  }
  return impl_->eval(vars);
}

Jet ScalarField::jet(const PhasePoint& p, int order) const {
  return evaluate(JetVars::lift(p, order));
}

double ScalarField::value(const PhasePoint& p) const { return jet(p, 0).value(); }

ScalarField ScalarField::with_name(std::string name) const {
  return ScalarField(std::move(name), impl_->eval, impl_->degree, impl_->domain);
}

ScalarField ScalarField::with_degree(std::optional<int> degree) const {
  return ScalarField(impl_->name, impl_->eval, degree, impl_->domain);
}

namespace {

ScalarField::DomainPredicate both(const ScalarField& f, const ScalarField& g) {
  if (!f.has_domain() && !g.has_domain()) return {};
  return [f, g](std::span<const double> x) { return f.in_domain(x) && g.in_domain(x); };
}

}  // namespace

ScalarField operator*(double c, const ScalarField& f) {
  return ScalarField(
      "(" + short_number(c) + ")*" + f.name(),
      [c, f](const JetVars& v) { return f.evaluate(v) * c; }, f.degree(),
      [f](std::span<const double> x) { return f.in_domain(x); });
}

ScalarField operator*(const ScalarField& f, const ScalarField& g) {
  std::optional<int> degree;
  if (f.degree() && g.degree()) degree = *f.degree() + *g.degree();
  return ScalarField(
      f.name() + "*" + g.name(), [f, g](const JetVars& v) { return f.evaluate(v) * g.evaluate(v); },
      degree, both(f, g));
}

ScalarField operator+(const ScalarField& f, const ScalarField& g) {
  std::optional<int> degree;
  if (f.degree() && g.degree() && *f.degree() == *g.degree()) degree = f.degree();
  return ScalarField(
      f.name() + "+" + g.name(), [f, g](const JetVars& v) { return f.evaluate(v) + g.evaluate(v); },
      degree, both(f, g));
}

Jet jet_eval(const ScalarField& f, const PhasePoint& p, int order) {
  if (order < 0) throw std::invalid_argument("jet order must be non-negative");
  return f.jet(p, order);
}

double partial(const ScalarField& f, const PhasePoint& p, std::span<const int> multi_index) {
  int degree = 0;
  for (int e : multi_index) degree += e;
  return f.jet(p, degree).partial(multi_index);
}

double euler_residual(const ScalarField& f, const PhasePoint& p, double degree) {
  const int n = p.dimension();
  const Jet j = f.jet(p, 1);
  double acc = -degree * j.value();
  for (int i = 0; i < n; ++i) acc += p.y[static_cast<std::size_t>(i)] * j.derivative(y_var(n, i)).value();
  return acc;
}

void check_homogeneity(const ScalarField& f, std::span<const PhasePoint> points, double degree,
                       double tol) {
  for (const auto& p : points) {
    const double value = f.value(p);
    const double r = euler_residual(f, p, degree);
    if (!(std::abs(r) <= tol * (1.0 + std::abs(value)))) {
      throw HomogeneityError(f.name() + " is not " + short_number(degree) +
                             "-homogeneous in y (Euler residual " + short_number(r) + ")");
    }
  }
}

}  // namespace funk
