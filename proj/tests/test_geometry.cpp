#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "funk/catalog.hpp"
#include "funk/errors.hpp"
#include "funk/geometry.hpp"
#include "funk/sampling.hpp"
#include "oracles.hpp"

using namespace funk;

namespace {

Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

Eigen::VectorXd spray_values(const Spray& s, const PhasePoint& p) {
  const auto g = s.coefficients(p, 0);
  Eigen::VectorXd out(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) out(static_cast<Eigen::Index>(i)) = g[i].value();
  return out;
}

ScalarField y1_field() {
  return ScalarField("y1", [](const JetVars& v) { return v.y[0]; }, 1);
}

}  // namespace

TEST(MetricTensor, Examples) {
  const auto p = make_phase_point({0.3, -0.2}, {1.0, 2.0});
  EXPECT_LT(max_abs(metric_tensor(euclidean_metric(), p).g - Eigen::MatrixXd::Identity(2, 2)), 1e-14);
  const auto origin = make_phase_point({0, 0}, {-0.7, 1.3});
  EXPECT_LT(max_abs(metric_tensor(sphere_metric(), origin).g - 4.0 * Eigen::MatrixXd::Identity(2, 2)), 1e-13);
}

TEST(MetricTensor, KleinMatchesFiniteDifferenceHessian) {
  const auto p = make_phase_point({0.3, 0}, {1, 1});
  const auto F = klein_metric();
  const ScalarField half_e("F^2/2", [F](const JetVars& v) {
    const Jet f = F.evaluate(v);
    return 0.5 * f * f;
  });
  const auto g = metric_tensor(F, p).g;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      std::array<int, 4> mu{};
      mu[static_cast<std::size_t>(2 + a)] += 1;
      mu[static_cast<std::size_t>(2 + b)] += 1;
      EXPECT_NEAR(fd_oracle(half_e, p, mu), g(a, b), 1e-6 * std::max(1.0, std::abs(g(a, b))));
    }
  }
  // Riemannian: the fiber Hessian is the oracle metric itself.
  EXPECT_LT(max_abs(g - oracle::klein_g(vec(p.x))), 1e-13);
}

TEST(MetricTensor, SingularMetric) {
  const ScalarField degenerate("|y1|", [](const JetVars& v) { return sqrt(v.y[0] * v.y[0]); }, 1);
  EXPECT_THROW(metric_tensor(degenerate, make_phase_point({0, 0}, {1, 1})), SingularMetric);
}

TEST(GeodesicSpray, Examples) {
  const auto samples = draw_samples(SamplingDomain{}, 2, 20, 3);
  const auto euclid = geodesic_spray(euclidean_metric(), 2);
  for (const auto& p : samples.points) EXPECT_LT(spray_values(euclid, p).cwiseAbs().maxCoeff(), 1e-14);
  const auto sphere = geodesic_spray(sphere_metric(), 2);
  for (const auto& y : {std::vector<double>{1, 0}, {0.3, -2}, {1.5, 1.5}}) {
    EXPECT_LT(spray_values(sphere, make_phase_point({0, 0}, y)).cwiseAbs().maxCoeff(), 1e-14);
  }
  const auto funk = geodesic_spray(funk_ball_metric(), 2);
  const auto dh = d_on_function(Derivation::h, funk, funk_ball_metric(), make_phase_point({0.2, 0.1}, {1, 0.5}));
  EXPECT_LT(dh.components.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(GeodesicSpray, MatchesChristoffelOracle) {
  const struct {
    ScalarField F;
    oracle::MetricFn g;
  } cases[] = {{sphere_metric(), oracle::sphere_g}, {klein_metric(), oracle::klein_g}};
  for (const auto& c : cases) {
    for (int n : {2, 3}) {
      const auto s = geodesic_spray(c.F, n);
      for (const auto& p : draw_samples(SamplingDomain{XDomain::ball(0.6), YAnnulus{}}, n, 10, 8).points) {
        const Eigen::VectorXd expect = oracle::spray_coefficients(c.g, vec(p.x), vec(p.y));
        EXPECT_LT((spray_values(s, p) - expect).cwiseAbs().maxCoeff(), 1e-9) << c.F.name();
      }
    }
  }
}

TEST(GeodesicSpray, TwoHomogeneous) {
  const auto s = geodesic_spray(funk_ball_metric(), 3);
  const auto p = make_phase_point({0.1, -0.2, 0.3}, {1.0, 0.4, -0.6});
  const auto q = make_phase_point(p.x, {2.5, 1.0, -1.5});
  EXPECT_LT((spray_values(s, q) - 6.25 * spray_values(s, p)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FlatSpray, EverythingVanishes) {
  const auto s = flat_spray(2);
  const auto euclid = geodesic_spray(euclidean_metric(), 2);
  for (const auto& p : draw_samples(SamplingDomain{}, 2, 10, 4).points) {
    EXPECT_EQ(max_abs(connection(s, p).N), 0.0);
    EXPECT_EQ(max_abs(jacobi(s, p).phi), 0.0);
    for (double r : curvature_R(s, p).components) EXPECT_EQ(r, 0.0);
    EXPECT_LT((spray_values(s, p) - spray_values(euclid, p)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Connection, Examples) {
  const auto sphere = geodesic_spray(sphere_metric(), 2);
  EXPECT_LT(max_abs(connection(sphere, make_phase_point({0, 0}, {0.4, 1.2})).N), 1e-14);

  // N = dG/dy against central differences of the spray values.
  const auto p = make_phase_point({0.1, 0}, {1, 0});
  const auto N = connection(sphere, p).N;
  const double h = 1e-5;
  for (int j = 0; j < 2; ++j) {
    auto yp = p.y, ym = p.y;
    yp[static_cast<std::size_t>(j)] += h;
    ym[static_cast<std::size_t>(j)] -= h;
    const Eigen::VectorXd fd =
        (spray_values(sphere, make_phase_point(p.x, yp)) - spray_values(sphere, make_phase_point(p.x, ym))) /
        (2 * h);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(N(i, j), fd(i), 1e-5 * std::max(1.0, std::abs(fd(i))));
  }
}

TEST(Connection, HorizontalProjector) {
  const auto s = geodesic_spray(klein_metric(), 3);
  for (const auto& p : draw_samples(SamplingDomain{XDomain::ball(0.6), YAnnulus{}}, 3, 20, 2).points) {
    const auto c = connection(s, p);
    const Eigen::MatrixXd& h = c.horizontal_projector;
    EXPECT_LT(max_abs(h * h - h), 1e-10);
    // S = (y, -2G) is horizontal.
    Eigen::VectorXd S(6);
    S << vec(p.y), -2.0 * spray_values(s, p);
    EXPECT_LT((h * S - S).cwiseAbs().maxCoeff(), 1e-10);
    // N is 1-homogeneous: N y = 2 G.
    EXPECT_LT((c.N * vec(p.y) - 2.0 * spray_values(s, p)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Jacobi, SphereAtOrigin) {
  const auto phi = jacobi(geodesic_spray(sphere_metric(), 2), make_phase_point({0, 0}, {1, 0})).phi;
  Eigen::Matrix2d expect;
  expect << 0, 0, 0, 4;
  EXPECT_LT(max_abs(phi - expect), 1e-12);
}

TEST(Jacobi, DeformedFlatSpray) {
  const auto s = projective_deform(flat_spray(2), euclidean_metric());
  Eigen::Matrix2d expect;
  expect << 0, 0, 0, 1;
  for (const auto& x : {std::vector<double>{0, 0}, {0.5, -0.3}}) {
    EXPECT_LT(max_abs(jacobi(s, make_phase_point(x, {1, 0})).phi - expect), 1e-12);
  }
}

TEST(Jacobi, MatchesRiemannOracle) {
  const struct {
    ScalarField F;
    oracle::MetricFn g;
  } cases[] = {{sphere_metric(), oracle::sphere_g}, {klein_metric(), oracle::klein_g}};
  for (const auto& c : cases) {
    for (int n : {2, 3}) {
      const auto s = geodesic_spray(c.F, n);
      for (const auto& p : draw_samples(SamplingDomain{XDomain::ball(0.6), YAnnulus{}}, n, 8, 11).points) {
        const Eigen::MatrixXd expect = oracle::jacobi_operator(c.g, vec(p.x), vec(p.y));
        const Eigen::MatrixXd phi = jacobi(s, p).phi;
        EXPECT_LT(max_abs(phi - expect), 1e-6 * (1.0 + max_abs(phi))) << c.F.name() << " n=" << n;
        // Phi(S) = 0.
        EXPECT_LT((phi * vec(p.y)).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + max_abs(phi)));
      }
    }
  }
}

TEST(Curvature, ContractionGivesJacobi) {
  for (const auto& m : metric_catalog()) {
    const auto s = m.spray(2);
    for (const auto& p : draw_samples(m.domain, 2, 100, 42).points) {
      const auto R = curvature_R(s, p);
      const auto phi = jacobi(s, p).phi;
      double err = 0.0;
      for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 2; ++k) {
          double acc = 0.0;
          for (int j = 0; j < 2; ++j) acc += p.y[static_cast<std::size_t>(j)] * R(i, j, k);
          err = std::max(err, std::abs(acc - phi(i, k)));
          for (int j = 0; j < 2; ++j) EXPECT_EQ(R(i, j, k), -R(i, k, j));
        }
      }
      EXPECT_LT(err, 1e-9 * (1.0 + max_abs(phi))) << m.name;
    }
  }
}

TEST(Curvature, SphereMatchesRiemannOracle) {
  const auto p = make_phase_point({0.1, 0.1}, {1, 1});
  const auto R = curvature_R(geodesic_spray(sphere_metric(), 2), p);
  const auto r = oracle::riemann(oracle::sphere_g, vec(p.x));
  double largest = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        // Spray curvature of a Levi-Civita connection: y^m R^i_mkj.
        double expect = 0.0;
        for (int m = 0; m < 2; ++m) {
          expect += p.y[static_cast<std::size_t>(m)] * r[static_cast<std::size_t>(((i * 2 + m) * 2 + k) * 2 + j)];
        }
        EXPECT_NEAR(R(i, j, k), expect, 1e-6);
        largest = std::max(largest, std::abs(R(i, j, k)));
      }
    }
  }
  EXPECT_GT(largest, 0.1);
}

TEST(DOnFunction, Examples) {
  const auto flat = flat_spray(2);
  const auto dj = d_on_function(Derivation::J, flat, euclidean_metric(), make_phase_point({0, 0}, {3, 4}));
  EXPECT_NEAR(dj.components(0), 0.6, 1e-15);
  EXPECT_NEAR(dj.components(1), 0.8, 1e-15);

  for (const auto& m : metric_catalog()) {
    const auto s = m.spray(2);
    for (const auto& p : draw_samples(m.domain, 2, 100, 5).points) {
      EXPECT_LT(d_on_function(Derivation::h, s, m.field(), p).components.cwiseAbs().maxCoeff(), 1e-9) << m.name;
    }
  }
  const ScalarField f("x1*y2^2", [](const JetVars& v) { return v.x[0] * v.y[1] * v.y[1]; });
  EXPECT_EQ(d_on_function(Derivation::Phi, flat, f, make_phase_point({0.2, 0.3}, {1, 2})).components.cwiseAbs().maxCoeff(), 0.0);
}

TEST(DR, FlatVanishesAndSphereMatchesContraction) {
  const ScalarField f("x1*y1*y2", [](const JetVars& v) { return v.x[0] * v.y[0] * v.y[1]; });
  const auto p = make_phase_point({0.2, -0.1}, {0.7, 1.3});
  EXPECT_EQ(max_abs(d_R_on_function(flat_spray(2), f, p).components), 0.0);

  const auto sphere = geodesic_spray(sphere_metric(), 2);
  const auto q = make_phase_point({0.1, 0.1}, {1, 1});
  const auto w = d_R_on_function(sphere, y1_field(), q).components;
  const auto R = curvature_R(sphere, q);
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(w(j, k), R(0, j, k), 1e-14);
  }
  EXPECT_GT(max_abs(w), 0.0);
}

TEST(DR, EqualsHorizontalSquare) {
  const auto sphere = geodesic_spray(sphere_metric(), 2);
  const ScalarField P = 1.7 * sphere_metric();
  for (const auto& p : draw_samples(SamplingDomain{}, 2, 100, 6).points) {
    const auto dr = d_R_on_function(sphere, P, p).components;
    const auto hh = d_h_on_oneform(sphere, [&](const LocalGeometry& g) { return g.d_h(g.field(P)); }, p).components;
    EXPECT_LT(max_abs(dr - hh), 1e-8);
  }
}

TEST(DhOnOneForm, CalibrationAndAnticommutation) {
  const ScalarField f("x1*y1", [](const JetVars& v) { return v.x[0] * v.y[0]; });
  const auto flat = flat_spray(2);
  const auto p = make_phase_point({0.4, 0.2}, {1.1, -0.3});
  const LocalGeometry g(flat, p, 2);
  const auto dh_dj = values(g.d_h(g.d_J(g.field(f))), 2).components;
  const auto dj_dh = values(g.d_J(g.d_h(g.field(f))), 2).components;
  EXPECT_LT(max_abs(dh_dj + dj_dh), 1e-10);

  const auto zero = d_h_on_oneform(flat, [](const LocalGeometry& geo) {
    return JetOneForm(2, geo.vars().constant(0.0));
  }, p);
  EXPECT_EQ(max_abs(zero.components), 0.0);

  for (const auto& m : metric_catalog()) {
    const auto s = m.spray(2);
    for (const auto& q : draw_samples(m.domain, 2, 20, 12).points) {
      const auto lhs = d_h_on_oneform(s, [&](const LocalGeometry& geo) { return geo.d_h(geo.field(y1_field())); }, q);
      EXPECT_LT(max_abs(lhs.components - d_R_on_function(s, y1_field(), q).components), 1e-8) << m.name;
    }
  }
}

TEST(ProjectiveDeform, Examples) {
  const auto base = geodesic_spray(sphere_metric(), 2);
  const auto p = make_phase_point({0.3, 0.1}, {0.5, -1.0});
  EXPECT_LT((spray_values(projective_deform(base, zero_candidate()), p) - spray_values(base, p)).cwiseAbs().maxCoeff(), 1e-15);

  const auto d1 = projective_deform(flat_spray(2), euclidean_metric());
  const double r = std::hypot(p.y[0], p.y[1]);
  EXPECT_NEAR(spray_values(d1, p)(0), r * p.y[0], 1e-14);
  EXPECT_NEAR(spray_values(d1, p)(1), r * p.y[1], 1e-14);

  const auto d2 = projective_deform(flat_spray(2), y1_field());
  EXPECT_NEAR(spray_values(d2, p)(0), p.y[0] * p.y[0], 1e-15);
  EXPECT_NEAR(spray_values(d2, p)(1), p.y[0] * p.y[1], 1e-15);
}

TEST(ProjectiveDeform, RejectsNonHomogeneousFactor) {
  const ScalarField quadratic("y1^2", [](const JetVars& v) { return v.y[0] * v.y[0]; });
  EXPECT_THROW(projective_deform(flat_spray(2), quadratic), HomogeneityError);
  EXPECT_THROW(projective_deform(flat_spray(2), quadratic.with_degree(2)), HomogeneityError);
}

TEST(GeodesicDefect, VanishesOnlyForOwnSpray) {
  const auto p = make_phase_point({0.2, -0.3}, {1.0, 0.5});
  EXPECT_LT(geodesic_defect(geodesic_spray(sphere_metric(), 2), sphere_metric(), p).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT(geodesic_defect(flat_spray(2), sphere_metric(), p).cwiseAbs().maxCoeff(), 1e-3);
}
