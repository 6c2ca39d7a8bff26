#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "funk/field.hpp"
#include "funk/geometry.hpp"
#include "funk/sampling.hpp"

namespace funk {

/// Residual d_hP - P d_JP of the Funk equation at each sample.
struct FunkResidualReport {
  std::vector<PhasePoint> points;
  std::vector<Eigen::VectorXd> residuals;
  double sup_norm = 0.0;
  double rms = 0.0;
  /// sup over samples of |P| * max_i |dP/dy^i|.
  double relative_scale = 0.0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
};

FunkResidualReport funk_residual(const Spray& s, const ScalarField& P, const SampleSet& samples);

struct IsotropySample {
  double rho = 0.0;
  Eigen::VectorXd alpha;
  double residual = 0.0;
  /// |alpha(y) - rho|, which vanishes whenever Phi(S) = 0.
  double spray_consistency = 0.0;
};

/// Fit of Phi = rho J - alpha (x) C.
struct IsotropyReport {
  std::vector<PhasePoint> points;
  std::vector<IsotropySample> rows;
  double max_residual = 0.0;
  double max_spray_consistency = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  std::uint64_t seed = 0;
};

IsotropySample isotropy_at(const JacobiEndo& phi, const PhasePoint& p);
IsotropyReport isotropy_decompose(const Spray& s, const SampleSet& samples);

/// Fit of Phi = kappa (F^2 J - F d_JF (x) C) for the geodesic spray of F.
struct FlagCurvatureReport {
  std::vector<PhasePoint> points;
  std::vector<double> kappa;
  std::vector<double> residual;
  std::vector<double> metric_value;
  double min_kappa = 0.0;
  double max_kappa = 0.0;
  double mean_kappa = 0.0;
  double max_residual = 0.0;
  std::uint64_t seed = 0;
};

FlagCurvatureReport flag_curvature(const ScalarField& F, int n, const SampleSet& samples);

/// Jacobi endomorphism of S - 2PC from the closed-form deformation formula.
Eigen::MatrixXd deformed_jacobi_formula(const Spray& s, const ScalarField& P, const PhasePoint& p);

struct DeformationReport {
  std::vector<PhasePoint> points;
  std::vector<Eigen::MatrixXd> direct;
  std::vector<Eigen::MatrixXd> formula;
  /// max_ij |direct - formula| / (1 + max_ij |direct|).
  std::vector<double> relative_difference;
  double max_relative_difference = 0.0;
  std::uint64_t seed = 0;
};

DeformationReport verify_phiphi0(const Spray& s, const ScalarField& P, const SampleSet& samples);

struct ChainOptions {
  /// Minimum sampled |kappa| for the non-vanishing curvature precondition.
  double kappa_floor = 0.01;
  int fiber_directions = 8;
  double fiber_variance_tol = 1e-8;
  /// Step of the base-space central differences of the fitted a(x).
  double base_step = 1e-4;
};

struct ChainSample {
  Eigen::VectorXd funk_residual;
  double d_R_P = 0.0;
  double d_Phi_P = 0.0;
  double d_J_P_over_F = 0.0;
  double fitted_a = 0.0;
  double fiber_variance = 0.0;
  /// d(-1/a) from base-point differences; empty when a vanishes nearby.
  std::optional<Eigen::VectorXd> d_inv_a;
  Eigen::VectorXd d_J_F;
  std::optional<double> dajf_mismatch;
  /// |residual - (F da - a^2 F d_JF)|, the Funk residual predicted for P = a(x) F.
  std::optional<double> af_prediction_error;
};

struct ChainReport {
  std::vector<PhasePoint> points;
  std::vector<ChainSample> rows;
  double min_abs_kappa = 0.0;
  double sup_funk_residual = 0.0;
  double sup_d_R_P = 0.0;
  double sup_d_Phi_P = 0.0;
  double sup_d_J_P_over_F = 0.0;
  double max_fiber_variance = 0.0;
  double min_dajf_mismatch = 0.0;
  double max_af_prediction_error = 0.0;
  bool division_by_zero = false;
  bool p_over_f_basic = false;
  std::uint64_t seed = 0;
};

ChainReport theorem1_chain(const ScalarField& F, const ScalarField& P, int n, const SampleSet& samples,
                           const ChainOptions& options = {});

struct IdentityRow {
  std::string field;
  /// Sup-norms over samples, raw and divided by (1 + local term scale).
  double j_h_anticommutator = 0.0;
  double h_squared_minus_R = 0.0;
  double j_phi_minus_3R = 0.0;
  std::optional<double> spray_contraction;  // 1-homogeneous fields only
  double j_h_anticommutator_scaled = 0.0;
  double h_squared_minus_R_scaled = 0.0;
  double j_phi_minus_3R_scaled = 0.0;
  std::optional<double> spray_contraction_scaled;
};

struct IdentityTable {
  std::string spray;
  std::vector<IdentityRow> rows;
  double max_scaled = 0.0;
  std::uint64_t seed = 0;
};

IdentityTable identity_suite(const Spray& s, const std::vector<ScalarField>& fields,
                             const SampleSet& samples);

/// Geodesic-spray contract at the samples: sup of |d_hF| and of
/// |i_S dd_J F^2 + dF^2|.
struct GeodesicContract {
  double d_h_F = 0.0;
  double defect = 0.0;
};

GeodesicContract geodesic_contract(const Spray& s, const ScalarField& F, const SampleSet& samples);

// JSON views: summary objects and per-sample rows (capped).
nlohmann::json summary_json(const FunkResidualReport& r);
nlohmann::json samples_json(const FunkResidualReport& r, std::size_t cap = 1000);
nlohmann::json summary_json(const IsotropyReport& r);
nlohmann::json samples_json(const IsotropyReport& r, std::size_t cap = 1000);
nlohmann::json summary_json(const FlagCurvatureReport& r);
nlohmann::json samples_json(const FlagCurvatureReport& r, std::size_t cap = 1000);
nlohmann::json summary_json(const DeformationReport& r);
nlohmann::json samples_json(const DeformationReport& r, std::size_t cap = 1000);
nlohmann::json summary_json(const ChainReport& r);
nlohmann::json samples_json(const ChainReport& r, std::size_t cap = 1000);
nlohmann::json summary_json(const IdentityTable& t);

nlohmann::json to_json_array(const Eigen::VectorXd& v);
nlohmann::json to_json_array(const Eigen::MatrixXd& m);
nlohmann::json point_json(const PhasePoint& p);

}  // namespace funk
