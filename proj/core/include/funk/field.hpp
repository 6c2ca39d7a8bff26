#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "funk/jet.hpp"

namespace funk {

/// A point (x, y) of the slit tangent space: chart coordinates x and fiber
/// coordinates y, with n >= 2 and y != 0.
struct PhasePoint {
  std::vector<double> x;
  std::vector<double> y;

  int dimension() const noexcept { return static_cast<int>(x.size()); }
};

/// Validates the PhasePoint invariants; throws std::invalid_argument on
/// mismatched sizes or n < 2 and DomainError on y = 0.
PhasePoint make_phase_point(std::vector<double> x, std::vector<double> y);

/// Coordinates lifted to jet variables. In the canonical lift, x^i is jet
/// variable i and y^i is jet variable n + i; extended lifts may carry extra
/// variables after the first 2n (parameters).
struct JetVars {
  std::vector<Jet> x;
  std::vector<Jet> y;

  int n() const noexcept { return static_cast<int>(x.size()); }
  int dim() const { return x.front().dim(); }
  int order() const { return x.front().order(); }
  Jet constant(double v) const { return Jet::constant(dim(), order(), v); }

  static JetVars lift(const PhasePoint& p, int order);
  static JetVars lift(const PhasePoint& p, int order, int extra_vars);
};

/// Jet variable index of x^i / y^i in a canonical lift of dimension n.
constexpr int x_var(int i) noexcept { return i; }
constexpr int y_var(int n, int i) noexcept { return n + i; }

/// A pure scalar map on the slit tangent space, evaluable over jets.
class ScalarField {
 public:
  using Evaluator = std::function<Jet(const JetVars&)>;
  using DomainPredicate = std::function<bool(std::span<const double> x)>;

  ScalarField() = default;
  ScalarField(std::string name, Evaluator eval, std::optional<int> degree = std::nullopt,
              DomainPredicate domain = {});

  const std::string& name() const noexcept { return impl_->name; }
  std::optional<int> degree() const noexcept { return impl_->degree; }
  bool has_domain() const noexcept { return static_cast<bool>(impl_->domain); }
  bool in_domain(std::span<const double> x) const;

  /// Evaluates on lifted variables. Throws DomainError if the base point
  /// (the constant terms of x) fails the domain predicate.
  Jet evaluate(const JetVars& vars) const;
  Jet jet(const PhasePoint& p, int order) const;
  double value(const PhasePoint& p) const;

  ScalarField with_name(std::string name) const;
  ScalarField with_degree(std::optional<int> degree) const;

 private:
  struct Impl {
    std::string name;
    Evaluator eval;
    std::optional<int> degree;
    DomainPredicate domain;
  };
  std::shared_ptr<const Impl> impl_;
};

ScalarField operator*(double c, const ScalarField& f);
ScalarField operator*(const ScalarField& f, const ScalarField& g);
ScalarField operator+(const ScalarField& f, const ScalarField& g);

/// Taylor jet of f at p up to `order`.
Jet jet_eval(const ScalarField& f, const PhasePoint& p, int order);

/// Exact mixed partial of f at p. The multi-index runs over (x^1..x^n, y^1..y^n).
double partial(const ScalarField& f, const PhasePoint& p, std::span<const int> multi_index);

/// sum_i y^i df/dy^i - degree * f at p.
double euler_residual(const ScalarField& f, const PhasePoint& p, double degree);

/// Throws HomogeneityError when |euler_residual| > tol * (1 + |f|) at any
/// point.
void check_homogeneity(const ScalarField& f, std::span<const PhasePoint> points, double degree,
                        double tol = 1e-8);

struct FdOptions {
  double step = 1e-4;
  /// Multiplies the step by 10^(|mu| - 1) so that second and third
  /// differences are not dominated by roundoff.
  bool scale_with_degree = true;
};

/// Central finite-difference estimate of a mixed partial (|mu| <= 3) with one
/// Richardson extrapolation level. Uses only order-0 evaluations of f.
double fd_oracle(const ScalarField& f, const PhasePoint& p, std::span<const int> multi_index,
                 const FdOptions& options = {});

}  // namespace funk
