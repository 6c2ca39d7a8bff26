#include "funk/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "funk/errors.hpp"

namespace funk {

Spray::Spray(int n, Evaluator eval, std::string provenance)
    : n_(n), eval_(std::move(eval)), provenance_(std::move(provenance)) {
  if (n < 2) throw std::invalid_argument("spray dimension must be at least 2");
}

std::vector<Jet> Spray::coefficients(const PhasePoint& p, int order) const {
  if (p.dimension() != n_) throw std::invalid_argument("phase point dimension does not match spray");
  return eval_(p, order);
}

namespace {

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double smallest = s(s.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smallest;
}

void check_condition(const Eigen::MatrixXd& g) {
  const double c = condition_number(g);
  if (!(c <= kMaxMetricCondition)) {
    throw SingularMetric("metric tensor condition number " + std::to_string(c) + " exceeds 1e12");
  }
}

std::vector<PhasePoint> default_probes(int n) {
  // Fixed, well-inside probe points: |x| <= 0.3, 0.5 <= |y| <= 2.
  std::vector<PhasePoint> probes;
  for (int k = 0; k < 6; ++k) {
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] = 0.3 / std::sqrt(n) * std::sin(1.7 * k + 0.9 * i);
      y[static_cast<std::size_t>(i)] = std::cos(0.8 * k + 1.3 * i);
    }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    const double radius = 0.5 + 1.5 * k / 5.0;
    for (double& v : y) v *= radius / norm;
    probes.push_back(make_phase_point(std::move(x), std::move(y)));
  }
  return probes;
}

}  // namespace

MetricTensor metric_tensor(const ScalarField& F, const PhasePoint& p) {
  const int n = p.dimension();
  const Jet f = F.jet(p, 2);
  const Jet e = f * f;
  MetricTensor out;
  out.g.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const Jet ei = e.derivative(y_var(n, i));
    for (int j = 0; j < n; ++j) out.g(i, j) = 0.5 * ei.derivative(y_var(n, j)).value();
  }
  // Mixed partials of a jet are symmetric up to roundoff; enforce exactly.
  out.g = 0.5 * (out.g + out.g.transpose()).eval();
  out.condition = condition_number(out.g);
  if (!(out.condition <= kMaxMetricCondition)) {
    throw SingularMetric("metric tensor condition number " + std::to_string(out.condition) +
                         " exceeds 1e12");
  }
  return out;
}

Spray geodesic_spray(const ScalarField& F, int n) {
  auto eval = [F, n](const PhasePoint& p, int order) {
    const JetVars v = JetVars::lift(p, order + 2);
    const Jet f = F.evaluate(v);
    const Jet e = f * f;
    std::vector<Jet> ey(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) ey[static_cast<std::size_t>(l)] = e.derivative(y_var(n, l));

    std::vector<Jet> a(static_cast<std::size_t>(n * n));
    Eigen::MatrixXd g0(n, n);
    std::vector<Jet> b(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
      const Jet& el = ey[static_cast<std::size_t>(l)];
      for (int k = 0; k < n; ++k) {
        // 4 g_lk = 2 d^2F^2/dy^l dy^k
        Jet entry = el.derivative(y_var(n, k)) * 2.0;
        g0(l, k) = entry.value() / 4.0;
        a[static_cast<std::size_t>(l * n + k)] = std::move(entry);
      }
      Jet rhs = -e.derivative(x_var(l));
      for (int k = 0; k < n; ++k) rhs += v.y[static_cast<std::size_t>(k)] * el.derivative(x_var(k));
      b[static_cast<std::size_t>(l)] = std::move(rhs);
    }
    check_condition(g0);
    return solve(std::move(a), std::move(b));
  };
  return Spray(n, std::move(eval), "geodesic(" + F.name() + ")");
}

Spray flat_spray(int n) {
  auto eval = [n](const PhasePoint& p, int order) {
    const int dim = 2 * p.dimension();
    return std::vector<Jet>(static_cast<std::size_t>(n), Jet::constant(dim, order, 0.0));
  };
  return Spray(n, std::move(eval), "flat");
}

Spray projective_deform(const Spray& s, const ScalarField& P) {
  const auto probes = default_probes(s.dimension());
  return projective_deform(s, P, probes);
}

Spray projective_deform(const Spray& s, const ScalarField& P, std::span<const PhasePoint> probes) {
  if (P.degree() && *P.degree() != 1) {
    throw HomogeneityError(P.name() + " declares degree " + std::to_string(*P.degree()) +
                           ", a projective factor must be 1-homogeneous");
  }
  check_homogeneity(P, probes, 1.0, 1e-8);
  auto eval = [s, P](const PhasePoint& p, int order) {
    std::vector<Jet> g = s.coefficients(p, order);
    const JetVars v = JetVars::lift(p, order);
    const Jet pj = P.evaluate(v);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += pj * v.y[i];
    return g;
  };
  return Spray(s.dimension(), std::move(eval), "deformed(" + s.provenance() + ", " + P.name() + ")");
}

LocalGeometry::LocalGeometry(const Spray& s, const PhasePoint& p, int order)
    : n_(s.dimension()), order_(order), point_(p), vars_(JetVars::lift(p, order)) {
  if (order < 1) throw std::invalid_argument("LocalGeometry needs coefficient order >= 1");
  g_ = s.coefficients(p, order);
  nl_.resize(static_cast<std::size_t>(n_ * n_));
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) nl_[index(i, j)] = dy(j, G(i));
  }
  if (order >= 2) {
    phi_.resize(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        Jet phi = dx(j, G(i)) * 2.0 - spray_derivative(N(i, j));
        for (int k = 0; k < n_; ++k) phi -= N(i, k) * N(k, j);
        phi_[index(i, j)] = std::move(phi);
      }
    }
  }
}

void LocalGeometry::require_phi() const {
  if (phi_.empty()) throw std::logic_error("curvature needs spray coefficients to order >= 2");
}

const Jet& LocalGeometry::Phi(int i, int j) const {
  require_phi();
  return phi_[index(i, j)];
}

Jet LocalGeometry::R(int i, int j, int k) const {
  require_phi();
  return delta(k, N(i, j)) - delta(j, N(i, k));
}

Jet LocalGeometry::delta(int j, const Jet& f) const {
  Jet r = dx(j, f);
  for (int l = 0; l < n_; ++l) r -= N(l, j) * dy(l, f);
  return r;
}

Jet LocalGeometry::spray_derivative(const Jet& f) const {
  Jet r = vars_.y[0] * dx(0, f);
  for (int k = 1; k < n_; ++k) r += vars_.y[static_cast<std::size_t>(k)] * dx(k, f);
  for (int k = 0; k < n_; ++k) r -= G(k) * dy(k, f) * 2.0;
  return r;
}

JetOneForm LocalGeometry::d_J(const Jet& f) const {
  JetOneForm out;
  for (int i = 0; i < n_; ++i) out.push_back(dy(i, f));
  return out;
}

JetOneForm LocalGeometry::d_h(const Jet& f) const {
  JetOneForm out;
  for (int i = 0; i < n_; ++i) out.push_back(delta(i, f));
  return out;
}

JetOneForm LocalGeometry::d_Phi(const Jet& f) const {
  require_phi();
  const JetOneForm fy = d_J(f);
  JetOneForm out;
  for (int j = 0; j < n_; ++j) {
    Jet acc = Phi(0, j) * fy[0];
    for (int i = 1; i < n_; ++i) acc += Phi(i, j) * fy[static_cast<std::size_t>(i)];
    out.push_back(std::move(acc));
  }
  return out;
}

JetTwoForm LocalGeometry::d_R(const Jet& f) const {
  require_phi();
  const JetOneForm fy = d_J(f);
  JetTwoForm out(static_cast<std::size_t>(n_ * n_));
  for (int j = 0; j < n_; ++j) {
    for (int k = j; k < n_; ++k) {
      Jet acc = R(0, j, k) * fy[0];
      for (int i = 1; i < n_; ++i) acc += R(i, j, k) * fy[static_cast<std::size_t>(i)];
      out[index(k, j)] = -acc;
      out[index(j, k)] = std::move(acc);
    }
  }
  return out;
}

namespace {

// w_jk = a_j(b_k) - a_k(b_j) for a family of first-order operators a_j
// applied to components b_k.
template <typename Op>
JetTwoForm antisymmetrize(int n, const JetOneForm& alpha, Op op) {
  JetTwoForm out(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      Jet w = op(j, alpha[static_cast<std::size_t>(k)]) - op(k, alpha[static_cast<std::size_t>(j)]);
      out[static_cast<std::size_t>(k * n + j)] = -w;
      out[static_cast<std::size_t>(j * n + k)] = std::move(w);
    }
  }
  return out;
}

}  // namespace

JetTwoForm LocalGeometry::d_J(const JetOneForm& alpha) const {
  return antisymmetrize(n_, alpha, [this](int j, const Jet& a) { return dy(j, a); });
}

JetTwoForm LocalGeometry::d_h(const JetOneForm& alpha) const {
  return antisymmetrize(n_, alpha, [this](int j, const Jet& a) { return delta(j, a); });
}

JetTwoForm LocalGeometry::d_Phi(const JetOneForm& alpha) const {
  require_phi();
  return antisymmetrize(n_, alpha, [this](int j, const Jet& a) {
    Jet acc = Phi(0, j) * dy(0, a);
    for (int i = 1; i < n_; ++i) acc += Phi(i, j) * dy(i, a);
    return acc;
  });
}

JetOneForm LocalGeometry::contract_spray(const JetTwoForm& w) const {
  JetOneForm out;
  for (int k = 0; k < n_; ++k) {
    Jet acc = vars_.y[0] * w[index(0, k)];
    for (int j = 1; j < n_; ++j) acc += vars_.y[static_cast<std::size_t>(j)] * w[index(j, k)];
    out.push_back(std::move(acc));
  }
  return out;
}

SemiBasicOneForm values(const JetOneForm& form) {
  SemiBasicOneForm out;
  out.components.resize(static_cast<Eigen::Index>(form.size()));
  for (std::size_t i = 0; i < form.size(); ++i) out.components(static_cast<Eigen::Index>(i)) = form[i].value();
  return out;
}

SemiBasicTwoForm values(const JetTwoForm& form, int n) {
  SemiBasicTwoForm out;
  out.components.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) out.components(j, k) = form[static_cast<std::size_t>(j * n + k)].value();
  }
  return out;
}

ConnectionData connection(const Spray& s, const PhasePoint& p) {
  const LocalGeometry geo(s, p, 1);
  const int n = geo.n();
  ConnectionData out;
  out.N.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.N(i, j) = geo.N(i, j).value();
  }
  out.horizontal_projector = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  out.horizontal_projector.topLeftCorner(n, n).setIdentity();
  out.horizontal_projector.bottomLeftCorner(n, n) = -out.N;
  return out;
}

JacobiEndo jacobi(const Spray& s, const PhasePoint& p) {
  const LocalGeometry geo(s, p, 2);
  const int n = geo.n();
  JacobiEndo out;
  out.phi.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.phi(i, j) = geo.Phi(i, j).value();
  }
  return out;
}

CurvatureR curvature_R(const Spray& s, const PhasePoint& p) {
  const LocalGeometry geo(s, p, 2);
  const int n = geo.n();
  CurvatureR out;
  out.n = n;
  out.components.assign(static_cast<std::size_t>(n * n * n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const double r = geo.R(i, j, k).value();
        out.components[static_cast<std::size_t>((i * n + j) * n + k)] = r;
        out.components[static_cast<std::size_t>((i * n + k) * n + j)] = -r;
      }
    }
  }
  return out;
}

SemiBasicOneForm d_on_function(Derivation which, const Spray& s, const ScalarField& f,
                               const PhasePoint& p) {
  if (which == Derivation::J) {
    const JetVars v = JetVars::lift(p, 1);
    const Jet fj = f.evaluate(v);
    SemiBasicOneForm out;
    out.components.resize(p.dimension());
    for (int i = 0; i < p.dimension(); ++i) out.components(i) = fj.derivative(y_var(p.dimension(), i)).value();
    return out;
  }
  const int order = which == Derivation::h ? 1 : 2;
  const LocalGeometry geo(s, p, order);
  const Jet fj = geo.field(f);
  return values(which == Derivation::h ? geo.d_h(fj) : geo.d_Phi(fj));
}

SemiBasicTwoForm d_R_on_function(const Spray& s, const ScalarField& f, const PhasePoint& p) {
  const LocalGeometry geo(s, p, 2);
  return values(geo.d_R(geo.field(f)), geo.n());
}

SemiBasicTwoForm d_h_on_oneform(const Spray& s, const OneFormField& alpha, const PhasePoint& p) {
  const LocalGeometry geo(s, p, 2);
  return values(geo.d_h(alpha(geo)), geo.n());
}

Eigen::VectorXd geodesic_defect(const Spray& s, const ScalarField& F, const PhasePoint& p) {
  const int n = p.dimension();
  const LocalGeometry geo(s, p, 1);
  const JetVars v = JetVars::lift(p, 2);
  const Jet f = F.evaluate(v);
  const Jet e = f * f;
  auto ex = [&](int i) { return e.derivative(x_var(i)); };
  auto ey = [&](int i) { return e.derivative(y_var(n, i)); };
  Eigen::VectorXd out(2 * n);
  for (int i = 0; i < n; ++i) {
    const Jet eyi = ey(i);
    double acc = ex(i).value();
    for (int j = 0; j < n; ++j) {
      const double yj = p.y[static_cast<std::size_t>(j)];
      acc += yj * eyi.derivative(x_var(j)).value();
      acc -= yj * ex(i).derivative(y_var(n, j)).value();
      acc -= 2.0 * geo.G(j).value() * eyi.derivative(y_var(n, j)).value();
    }
    out(i) = acc;
  }
  for (int j = 0; j < n; ++j) {
    const Jet eyj = ey(j);
    double acc = eyj.value();
    for (int i = 0; i < n; ++i) acc -= p.y[static_cast<std::size_t>(i)] * eyj.derivative(y_var(n, i)).value();
    out(n + j) = acc;
  }
  return out;
}

}  // namespace funk
