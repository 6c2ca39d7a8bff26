#include <gtest/gtest.h>

#include <cmath>

#include "funk/analysis.hpp"
#include "funk/catalog.hpp"
#include "funk/errors.hpp"
#include "funk/expr.hpp"
#include "oracles.hpp"

using namespace funk;

namespace {

SampleSet single(const std::vector<double>& x, const std::vector<double>& y) {
  SampleSet s;
  s.points.push_back(make_phase_point(x, y));
  return s;
}

Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const SamplingDomain kBall{XDomain::ball(0.6), YAnnulus{}};

ScalarField y1_field() {
  return ScalarField("y1", [](const JetVars& v) { return v.y[0]; }, 1);
}

}  // namespace

TEST(FunkResidual, LinearRationalAtOrigin) {
  const auto r = funk_residual(flat_spray(2), linear_rational_candidate(), single({0, 0}, {1, 1}));
  EXPECT_LT(r.residuals[0].cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FunkResidual, EuclideanNormOnFlatSpray) {
  const auto r = funk_residual(flat_spray(2), euclidean_metric(), single({0, 0}, {1, 0}));
  EXPECT_NEAR(r.residuals[0](0), -1.0, 1e-15);
  EXPECT_NEAR(r.residuals[0](1), 0.0, 1e-15);
}

TEST(FunkResidual, FunkBallSolvesFlatEquation) {
  const auto samples = draw_samples(kBall, 2, 500, 42);
  const auto r = funk_residual(flat_spray(2), funk_ball_metric(), samples);
  EXPECT_LT(r.sup_norm, 1e-8);
  EXPECT_EQ(r.sample_count, 500u);
  EXPECT_EQ(r.seed, 42u);
  // First-order expansion at x = 0: F = |y| + <x, y> + O(|x|^2).
  const auto p = make_phase_point({0, 0}, {0.6, -1.7});
  const Jet F = funk_ball_metric().jet(p, 1);
  EXPECT_NEAR(F.derivative(x_var(0)).value(), 0.6, 1e-14);
  EXPECT_NEAR(F.derivative(x_var(1)).value(), -1.7, 1e-14);
}

TEST(FunkResidual, ConstantMultipleOfGeodesicMetric) {
  // With d_hF = 0: residual of aF is -a^2 F d_JF.
  const double a = 0.7;
  for (const auto& m : metric_catalog()) {
    const auto s = m.spray(2);
    const auto samples = draw_samples(m.domain, 2, 50, 42);
    const auto r = funk_residual(s, a * m.field(), samples);
    for (std::size_t k = 0; k < samples.points.size(); ++k) {
      const Jet F = m.field().jet(samples.points[k], 1);
      for (int i = 0; i < 2; ++i) {
        const double expect = -a * a * F.value() * F.derivative(y_var(2, i)).value();
        EXPECT_NEAR(r.residuals[k](i), expect, 1e-9) << m.name;
      }
    }
  }
}

TEST(FunkResidual, RejectsNonHomogeneousCandidate) {
  const ScalarField bad("y1^2", [](const JetVars& v) { return v.y[0] * v.y[0]; });
  EXPECT_THROW(funk_residual(flat_spray(2), bad, draw_samples(kBall, 2, 5, 1)), HomogeneityError);
}

TEST(Isotropy, FlatSprayIsZero) {
  const auto rep = isotropy_decompose(flat_spray(2), draw_samples(SamplingDomain{}, 2, 20, 1));
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.rho, 0.0);
    EXPECT_EQ(row.alpha.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(row.residual, 0.0);
  }
}

TEST(Isotropy, SphereAtOrigin) {
  const auto rep = isotropy_decompose(geodesic_spray(sphere_metric(), 2), single({0, 0}, {1, 0}));
  EXPECT_NEAR(rep.rows[0].rho, 4.0, 1e-12);
  EXPECT_NEAR(rep.rows[0].alpha(0), 4.0, 1e-12);
  EXPECT_NEAR(rep.rows[0].alpha(1), 0.0, 1e-12);
  EXPECT_LT(rep.rows[0].residual, 1e-9);
}

TEST(Isotropy, DeformedFlatSpray) {
  const auto samples = draw_samples(SamplingDomain{}, 3, 100, 42);
  const auto s = projective_deform(flat_spray(3), euclidean_metric());
  const auto rep = isotropy_decompose(s, samples);
  EXPECT_LT(rep.max_residual, 1e-8);
  for (std::size_t k = 0; k < samples.points.size(); ++k) {
    const double F = euclidean_metric().value(samples.points[k]);
    EXPECT_NEAR(rep.rows[k].rho, F * F, 1e-8);
  }
}

TEST(FlagCurvature, EuclideanIsFlat) {
  const auto rep = flag_curvature(euclidean_metric(), 2, draw_samples(SamplingDomain{}, 2, 50, 42));
  EXPECT_EQ(rep.max_kappa, 0.0);
  EXPECT_EQ(rep.min_kappa, 0.0);
  EXPECT_EQ(rep.max_residual, 0.0);
}

TEST(FlagCurvature, RiemannianCasesMatchSectionalCurvatureOracle) {
  const struct {
    ScalarField F;
    oracle::MetricFn g;
    double kappa;
  } cases[] = {{sphere_metric(), oracle::sphere_g, 1.0}, {klein_metric(), oracle::klein_g, -1.0}};
  for (const auto& c : cases) {
    const auto samples = draw_samples(kBall, 2, 200, 42);
    const auto rep = flag_curvature(c.F, 2, samples);
    EXPECT_NEAR(rep.min_kappa, c.kappa, 1e-8);
    EXPECT_NEAR(rep.max_kappa, c.kappa, 1e-8);
    EXPECT_LT(rep.max_residual, 1e-8);
    for (std::size_t k = 0; k < 10; ++k) {
      const auto& p = samples.points[k];
      Eigen::VectorXd flag = Eigen::VectorXd::Zero(2);
      flag(k % 2) = 1.0;
      const double K = oracle::sectional_curvature(c.g, vec(p.x), vec(p.y), flag);
      EXPECT_NEAR(K, c.kappa, 1e-6);
      EXPECT_NEAR(rep.kappa[k], K, 1e-6);
    }
  }
}

TEST(FlagCurvature, FunkBall) {
  const auto rep = flag_curvature(funk_ball_metric(), 3, draw_samples(kBall, 3, 100, 42));
  EXPECT_NEAR(rep.min_kappa, -0.25, 1e-6);
  EXPECT_NEAR(rep.max_kappa, -0.25, 1e-6);
}

TEST(Phiphi0, ZeroFactorIsExact) {
  const auto s = geodesic_spray(klein_metric(), 2);
  const auto samples = draw_samples(kBall, 2, 20, 3);
  const auto rep = verify_phiphi0(s, zero_candidate(), samples);
  for (std::size_t k = 0; k < samples.points.size(); ++k) {
    EXPECT_LT((rep.direct[k] - jacobi(s, samples.points[k]).phi).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((rep.formula[k] - rep.direct[k]).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Phiphi0, FlatWithEuclideanFactor) {
  const auto rep = verify_phiphi0(flat_spray(2), euclidean_metric(), single({0.3, 0.2}, {1, 0}));
  Eigen::Matrix2d expect;
  expect << 0, 0, 0, 1;
  EXPECT_LT((rep.direct[0] - expect).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((rep.formula[0] - expect).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Phiphi0, SphereWithFiberCoordinate) {
  const auto rep = verify_phiphi0(geodesic_spray(sphere_metric(), 2), y1_field(),
                                  draw_samples(SamplingDomain{}, 2, 100, 42));
  EXPECT_LT(rep.max_relative_difference, 1e-7);
}

TEST(Chain, SphereWithOwnMetric) {
  auto samples = draw_samples(SamplingDomain{}, 2, 50, 42);
  samples.points.insert(samples.points.begin(), make_phase_point({0, 0}, {1, 0}));
  const auto F = sphere_metric();
  const auto rep = theorem1_chain(F, 1.0 * F, 2, samples);
  EXPECT_NEAR(rep.min_abs_kappa, 1.0, 1e-8);
  EXPECT_LT(rep.sup_d_J_P_over_F, 1e-10);
  EXPECT_LT(rep.max_fiber_variance, 1e-10);
  EXPECT_FALSE(rep.division_by_zero);
  EXPECT_TRUE(rep.p_over_f_basic);
  for (const auto& row : rep.rows) EXPECT_NEAR(row.fitted_a, 1.0, 1e-10);
  const auto& origin = rep.rows.front();
  EXPECT_NEAR(origin.d_J_F(0), 2.0, 1e-12);
  EXPECT_NEAR(origin.d_J_F(1), 0.0, 1e-12);
  ASSERT_TRUE(origin.dajf_mismatch.has_value());
  EXPECT_GT(*origin.dajf_mismatch, 0.9);
  EXPECT_NEAR(origin.funk_residual(0), -4.0, 1e-9);
  EXPECT_GT(rep.sup_funk_residual, 1.0);
}

TEST(Chain, FiberCoordinateIsNotBasic) {
  const auto rep = theorem1_chain(sphere_metric(), y1_field(), 2, draw_samples(SamplingDomain{}, 2, 30, 42));
  EXPECT_GT(rep.sup_d_J_P_over_F, 0.01);
  EXPECT_FALSE(rep.p_over_f_basic);
}

TEST(Chain, FlatMetricViolatesPrecondition) {
  EXPECT_THROW(theorem1_chain(euclidean_metric(), euclidean_metric(), 2, draw_samples(SamplingDomain{}, 2, 10, 1)),
               PreconditionError);
}

TEST(IdentitySuite, FlatSprayIsExact) {
  const auto fields = {euclidean_metric(), y1_field(),
                       expr::compile(expr::parse("x1*y2^2 + y1^3*x2", 2, false))};
  const auto t = identity_suite(flat_spray(2), fields, draw_samples(SamplingDomain{}, 2, 50, 42));
  for (const auto& row : t.rows) {
    EXPECT_LT(row.j_h_anticommutator, 1e-12);
    EXPECT_LT(row.h_squared_minus_R, 1e-12);
    EXPECT_LT(row.j_phi_minus_3R, 1e-12);
    if (row.spray_contraction) EXPECT_LT(*row.spray_contraction, 1e-12);
  }
  EXPECT_FALSE(t.rows[2].spray_contraction.has_value());
}

TEST(IdentitySuite, CurvedExamples) {
  const auto sphereF = sphere_metric();
  const auto f = expr::compile(expr::parse("x1*y2 + F", 2, true), sphereF, 1);
  const auto t1 = identity_suite(geodesic_spray(sphereF, 2), {f}, draw_samples(SamplingDomain{}, 2, 100, 42));
  const auto t2 = identity_suite(geodesic_spray(klein_metric(), 2), {y1_field()}, draw_samples(kBall, 2, 100, 42));
  for (const auto* t : {&t1, &t2}) {
    const auto& row = t->rows.front();
    EXPECT_LT(row.j_h_anticommutator, 1e-8);
    EXPECT_LT(row.h_squared_minus_R, 1e-8);
    EXPECT_LT(row.j_phi_minus_3R, 1e-8);
    ASSERT_TRUE(row.spray_contraction.has_value());
    EXPECT_LT(*row.spray_contraction, 1e-8);
  }
}

TEST(Json, SamplesAreCappedAndSummariesCarrySeed) {
  const auto samples = draw_samples(kBall, 2, 1200, 9);
  const auto r = funk_residual(flat_spray(2), linear_rational_candidate(), samples);
  EXPECT_EQ(samples_json(r).size(), 1000u);
  EXPECT_EQ(samples_json(r, 10).size(), 10u);
  EXPECT_EQ(summary_json(r)["seed"], 9);
  const auto row = samples_json(r, 1)[0];
  EXPECT_TRUE(row.contains("x"));
  EXPECT_TRUE(row.contains("residual"));
}
