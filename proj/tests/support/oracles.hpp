#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace oracle {

/// A Riemannian metric given only by its matrix-valued function g(x).
using MetricFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// g = 4 I / (1 + |x|^2)^2.
Eigen::MatrixXd sphere_g(const Eigen::VectorXd& x);
/// g_ij = delta_ij / (1 - |x|^2) + x_i x_j / (1 - |x|^2)^2.
Eigen::MatrixXd klein_g(const Eigen::VectorXd& x);

/// Christoffel symbols Gamma^i_jk by fourth-order differences of g, indexed
/// [i](j, k).
std::vector<Eigen::MatrixXd> christoffel(const MetricFn& g, const Eigen::VectorXd& x, double h = 1e-3);

/// Riemann tensor R^i_jkl with R(d_k, d_l) d_j = R^i_jkl d_i, by nested
/// fourth-order differences. Flat index ((i * n + j) * n + k) * n + l.
std::vector<double> riemann(const MetricFn& g, const Eigen::VectorXd& x, double h = 1e-3);

/// Jacobi operator v -> R(v, y) y as a matrix.
Eigen::MatrixXd jacobi_operator(const MetricFn& g, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Sectional curvature of the plane spanned by u, v.
double sectional_curvature(const MetricFn& g, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v);

/// Geodesic spray coefficients G^i = 1/2 Gamma^i_jk y^j y^k.
Eigen::VectorXd spray_coefficients(const MetricFn& g, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace oracle
