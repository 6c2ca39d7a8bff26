#include "oracles.hpp"

namespace oracle {
namespace {

template <typename Fn>
auto diff4(Fn&& f, const Eigen::VectorXd& x, int k, double h) {
  Eigen::VectorXd xp2 = x, xp1 = x, xm1 = x, xm2 = x;
  xp2(k) += 2 * h;
  xp1(k) += h;
  xm1(k) -= h;
  xm2(k) -= 2 * h;
  return ((-f(xp2) + 8.0 * f(xp1) - 8.0 * f(xm1) + f(xm2)) / (12.0 * h)).eval();
}

}  // namespace

Eigen::MatrixXd sphere_g(const Eigen::VectorXd& x) {
  const double s = 1.0 + x.squaredNorm();
  return 4.0 / (s * s) * Eigen::MatrixXd::Identity(x.size(), x.size());
}

Eigen::MatrixXd klein_g(const Eigen::VectorXd& x) {
  const double s = 1.0 - x.squaredNorm();
  return Eigen::MatrixXd::Identity(x.size(), x.size()) / s + x * x.transpose() / (s * s);
}

std::vector<Eigen::MatrixXd> christoffel(const MetricFn& g, const Eigen::VectorXd& x, double h) {
  const auto n = x.size();
  std::vector<Eigen::MatrixXd> dg;  // dg[k] = d g / d x^k
  for (Eigen::Index k = 0; k < n; ++k) dg.push_back(diff4(g, x, static_cast<int>(k), h));
  const Eigen::MatrixXd ginv = g(x).inverse();
  std::vector<Eigen::MatrixXd> gamma(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        double acc = 0.0;
        for (Eigen::Index l = 0; l < n; ++l) {
          acc += ginv(i, l) * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
        }
        gamma[i](j, k) = 0.5 * acc;
      }
    }
  }
  return gamma;
}

std::vector<double> riemann(const MetricFn& g, const Eigen::VectorXd& x, double h) {
  const auto n = static_cast<int>(x.size());
  // Flatten Gamma so it can be differenced as a vector.
  auto flat_gamma = [&](const Eigen::VectorXd& at) {
    const auto gm = christoffel(g, at, h);
    Eigen::VectorXd out(n * n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out((i * n + j) * n + k) = gm[i](j, k);
    return out;
  };
  std::vector<Eigen::VectorXd> dgamma;
  for (int k = 0; k < n; ++k) dgamma.push_back(diff4(flat_gamma, x, k, h));
  const Eigen::VectorXd gm = flat_gamma(x);
  auto G = [&](int i, int j, int k) { return gm((i * n + j) * n + k); };
  auto dG = [&](int d, int i, int j, int k) { return dgamma[d]((i * n + j) * n + k); };

  std::vector<double> r(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = dG(k, i, l, j) - dG(l, i, k, j);
          for (int m = 0; m < n; ++m) v += G(i, k, m) * G(m, l, j) - G(i, l, m) * G(m, k, j);
          r[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)] = v;
        }
  return r;
}

Eigen::MatrixXd jacobi_operator(const MetricFn& g, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const auto n = static_cast<int>(x.size());
  const auto r = riemann(g, x);
  // R(v, y) y = v^j y^k y^l R(d_j, d_k) d_l = v^j y^k y^l R^i_ljk d_i.
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          out(i, j) += r[static_cast<std::size_t>(((i * n + l) * n + j) * n + k)] * y(k) * y(l);
        }
  return out;
}

double sectional_curvature(const MetricFn& g, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v) {
  const Eigen::MatrixXd gx = g(x);
  const Eigen::VectorXd ru = jacobi_operator(g, x, v) * u;  // R(u, v) v
  const double num = u.dot(gx * ru);
  const double den = u.dot(gx * u) * v.dot(gx * v) - std::pow(u.dot(gx * v), 2);
  return num / den;
}

Eigen::VectorXd spray_coefficients(const MetricFn& g, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const auto gamma = christoffel(g, x);
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = 0.5 * y.dot(gamma[static_cast<std::size_t>(i)] * y);
  return out;
}

}  // namespace oracle
