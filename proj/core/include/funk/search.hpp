#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <vector>

#include "funk/field.hpp"
#include "funk/geometry.hpp"
#include "funk/sampling.hpp"

namespace funk {

/// P(x, y) = sum_i (u_i + V_ij x^j) y^i / (1 + w_k x^k). Linear in y over a
/// y-free denominator, hence 1-homogeneous for every parameter value.
struct Ansatz {
  Eigen::VectorXd u;
  Eigen::MatrixXd V;
  Eigen::VectorXd w;

  static Ansatz zero(int n);
  static int parameter_count(int n) { return n + n * n + n; }
  /// Layout: u, then V row-major, then w.
  static Ansatz from_parameters(int n, const Eigen::VectorXd& theta);
  Eigen::VectorXd parameters() const;

  int dimension() const { return static_cast<int>(u.size()); }
  /// Minimum of 1 + <w, x> over the region.
  double min_denominator(const XDomain& domain) const;
  ScalarField field() const;
};

/// P_theta over lifted variables with jet-valued parameters (same layout as
/// Ansatz::parameters()).
Jet ansatz_value(const JetVars& v, const std::vector<Jet>& theta);

struct ObjectiveOptions {
  double penalty_weight = 1e3;
  double denominator_floor = 0.1;
};

struct ObjectiveValue {
  /// Sum of squared residuals, penalty included.
  double value = 0.0;
  /// Funk residual components per sample (n each), then sqrt(lambda) (P(0, e1) - 1).
  Eigen::VectorXd residuals;
  /// d residuals / d theta; empty unless requested.
  Eigen::MatrixXd jacobian;
};

/// Throws AnsatzDomainError when 1 + <w, x> drops below the floor on the
/// sample domain or at a sample.
ObjectiveValue objective(const Spray& s, const Ansatz& theta, const SampleSet& samples,
                         const ObjectiveOptions& options = {}, bool with_jacobian = false);

struct SearchConfig {
  int restarts = 16;
  int max_iter = 200;
  std::uint64_t seed = 42;
  int samples = 200;
  int validation_samples = 200;
  SamplingDomain domain{XDomain::ball(0.6), YAnnulus{0.5, 2.0}};
  ObjectiveOptions objective;
  double initial_damping = 1e-3;
  double gradient_tol = 1e-12;
  double init_range = 0.5;
};

struct RestartResult {
  int restart = 0;
  Ansatz theta;
  double objective = 0.0;
  double train_rms = 0.0;
  double validation_sup = 0.0;
  double validation_rms = 0.0;
  int iterations = 0;
  int accepted_steps = 0;
  /// Objective after the initial point and after every accepted step.
  std::vector<double> objective_trace;
};

struct SearchResult {
  RestartResult best;
  std::vector<RestartResult> restarts;
  std::uint64_t seed = 0;
  /// Every restart failed to accept a single step.
  bool no_progress = false;
};

SearchResult search_funk(const Spray& s, const SearchConfig& config = {});

nlohmann::json ansatz_json(const Ansatz& a);
nlohmann::json summary_json(const SearchResult& r);
nlohmann::json samples_json(const SearchResult& r);

}  // namespace funk
