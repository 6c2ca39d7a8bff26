#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "funk/field.hpp"
#include "funk/geometry.hpp"
#include "funk/sampling.hpp"

namespace funk {

ScalarField euclidean_metric();
/// 2|y| / (1 + |x|^2): the round sphere of radius 1 in stereographic chart.
ScalarField sphere_metric();
/// sqrt(|y|^2 (1 - |x|^2) + <x,y>^2) / (1 - |x|^2) on the unit ball.
ScalarField klein_metric();
/// (sqrt(|y|^2 (1 - |x|^2) + <x,y>^2) + <x,y>) / (1 - |x|^2) on the unit ball.
ScalarField funk_ball_metric();

ScalarField linear_rational_candidate();  // y1 / (1 - x1)
ScalarField zero_candidate();

struct MetricEntry {
  std::string name;
  std::string formula;
  std::string description;
  /// Expected scalar flag curvature, when constant.
  std::optional<double> kappa;
  SamplingDomain domain;
  /// The flat entry uses the zero spray directly instead of the geodesic
  /// spray of its (euclidean) F.
  bool flat = false;
  std::function<ScalarField()> field;

  Spray spray(int n) const { return flat ? flat_spray(n) : geodesic_spray(field(), n); }
};

struct CandidateOptions {
  double c = 1.0;
  /// a(x) for the aF candidate, in the expression language (x only).
  std::string a = "1";
};

struct CandidateEntry {
  std::string name;
  std::string formula;
  std::string description;
  bool needs_metric = false;
  std::function<ScalarField(int n, const std::optional<ScalarField>& metric, const CandidateOptions&)>
      make;
};

const std::vector<MetricEntry>& metric_catalog();
const std::vector<CandidateEntry>& candidate_catalog();

/// Throws std::out_of_range for unknown names.
const MetricEntry& find_metric(std::string_view name);
const CandidateEntry& find_candidate(std::string_view name);

}  // namespace funk
