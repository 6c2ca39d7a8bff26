#pragma once

// Spray geometry in induced coordinates (x^i, y^i) of the slit tangent space.
//
// Conventions (all components with respect to the dx^i basis):
//   N^i_j     = dG^i/dy^j
//   delta_j   = d/dx^j - N^l_j d/dy^l
//   Phi^i_j   = 2 dG^i/dx^j - S(N^i_j) - N^i_k N^k_j
//   R^i_jk    = delta_k N^i_j - delta_j N^i_k
// so that y^j R^i_jk = Phi^i_k and delta_j delta_k f - delta_k delta_j f =
// R^i_jk df/dy^i. Semi-basic 2-forms are stored as antisymmetric matrices
// w_jk with w(X, Y) = w_jk X^j Y^k.

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "funk/field.hpp"

namespace funk {

struct MetricTensor {
  Eigen::MatrixXd g;
  double condition = 1.0;
};

struct SemiBasicOneForm {
  Eigen::VectorXd components;
};

struct SemiBasicTwoForm {
  Eigen::MatrixXd components;
};

struct ConnectionData {
  Eigen::MatrixXd N;  // N(i, j) = N^i_j
  /// Horizontal projector on T(TM) in the (d/dx, d/dy) basis, 2n x 2n.
  Eigen::MatrixXd horizontal_projector;
};

struct JacobiEndo {
  Eigen::MatrixXd phi;  // phi(i, j) = Phi^i_j
};

struct CurvatureR {
  int n = 0;
  std::vector<double> components;  // R^i_jk at (i * n + j) * n + k

  double operator()(int i, int j, int k) const {
    return components[static_cast<std::size_t>((i * n + j) * n + k)];
  }
};

/// A spray S = y^i d/dx^i - 2 G^i d/dy^i, given by a jet evaluator for its
/// coefficients G^i.
class Spray {
 public:
  using Evaluator = std::function<std::vector<Jet>(const PhasePoint&, int order)>;

  Spray(int n, Evaluator eval, std::string provenance);

  int dimension() const noexcept { return n_; }
  const std::string& provenance() const noexcept { return provenance_; }

  /// Jets of G^1..G^n at p over the canonical lift, to the given order.
  std::vector<Jet> coefficients(const PhasePoint& p, int order) const;

 private:
  int n_;
  Evaluator eval_;
  std::string provenance_;
};

/// Throws SingularMetric when the condition number exceeds this bound.
inline constexpr double kMaxMetricCondition = 1e12;

MetricTensor metric_tensor(const ScalarField& F, const PhasePoint& p);

/// G^i = 1/4 g^{il} (y^k d^2F^2/dy^l dx^k - dF^2/dx^l).
Spray geodesic_spray(const ScalarField& F, int n);
Spray flat_spray(int n);

/// S - 2 P C, i.e. G^i + P y^i. P is Euler-checked for 1-homogeneity at
/// `probes` (or at a fixed default set when none are given).
Spray projective_deform(const Spray& s, const ScalarField& P);
Spray projective_deform(const Spray& s, const ScalarField& P, std::span<const PhasePoint> probes);

using JetOneForm = std::vector<Jet>;
/// Row-major n x n antisymmetric components.
using JetTwoForm = std::vector<Jet>;

/// Jet-level spray geometry at one point. With coefficient order K, N is
/// known to order K-1 and Phi, R to order K-2.
class LocalGeometry {
 public:
  LocalGeometry(const Spray& s, const PhasePoint& p, int order);

  int n() const noexcept { return n_; }
  int order() const noexcept { return order_; }
  const PhasePoint& point() const noexcept { return point_; }
  const JetVars& vars() const noexcept { return vars_; }

  /// f evaluated on the same lift as the spray.
  Jet field(const ScalarField& f) const { return f.evaluate(vars_); }

  const Jet& G(int i) const { return g_[static_cast<std::size_t>(i)]; }
  const Jet& N(int i, int j) const { return nl_[index(i, j)]; }
  const Jet& Phi(int i, int j) const;
  Jet R(int i, int j, int k) const;

  Jet dx(int j, const Jet& f) const { return f.derivative(x_var(j)); }
  Jet dy(int j, const Jet& f) const { return f.derivative(y_var(n_, j)); }
  Jet delta(int j, const Jet& f) const;
  Jet spray_derivative(const Jet& f) const;

  JetOneForm d_J(const Jet& f) const;
  JetOneForm d_h(const Jet& f) const;
  JetOneForm d_Phi(const Jet& f) const;
  JetTwoForm d_R(const Jet& f) const;

  JetTwoForm d_J(const JetOneForm& alpha) const;
  JetTwoForm d_h(const JetOneForm& alpha) const;
  JetTwoForm d_Phi(const JetOneForm& alpha) const;

  /// (i_S w)_k = y^j w_jk.
  JetOneForm contract_spray(const JetTwoForm& w) const;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i * n_ + j); }
  void require_phi() const;

  int n_;
  int order_;
  PhasePoint point_;
  JetVars vars_;
  std::vector<Jet> g_;
  std::vector<Jet> nl_;
  std::vector<Jet> phi_;
};

SemiBasicOneForm values(const JetOneForm& form);
SemiBasicTwoForm values(const JetTwoForm& form, int n);

ConnectionData connection(const Spray& s, const PhasePoint& p);
JacobiEndo jacobi(const Spray& s, const PhasePoint& p);
CurvatureR curvature_R(const Spray& s, const PhasePoint& p);

enum class Derivation { J, h, Phi };

SemiBasicOneForm d_on_function(Derivation which, const Spray& s, const ScalarField& f,
                               const PhasePoint& p);
SemiBasicTwoForm d_R_on_function(const Spray& s, const ScalarField& f, const PhasePoint& p);

/// A semi-basic 1-form field given by jet-evaluable components.
using OneFormField = std::function<JetOneForm(const LocalGeometry&)>;

SemiBasicTwoForm d_h_on_oneform(const Spray& s, const OneFormField& alpha, const PhasePoint& p);

/// Components of i_S dd_J F^2 + dF^2 in the (dx, dy) basis, length 2n.
/// Vanishes exactly when s is the geodesic spray of F.
Eigen::VectorXd geodesic_defect(const Spray& s, const ScalarField& F, const PhasePoint& p);

}  // namespace funk
