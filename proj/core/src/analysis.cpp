#include "funk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "funk/errors.hpp"

namespace funk {
namespace {

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd two_form_values(const JetTwoForm& w, int n) { return values(w, n).components; }
Eigen::VectorXd one_form_values(const JetOneForm& a) { return values(a).components; }

}  // namespace

FunkResidualReport funk_residual(const Spray& s, const ScalarField& P, const SampleSet& samples) {
  check_homogeneity(P, samples.points, 1.0);
  FunkResidualReport out;
  out.seed = samples.seed;
  out.sample_count = samples.points.size();
  double sum_sq = 0.0;
  std::size_t components = 0;
  for (const auto& p : samples.points) {
    const LocalGeometry geo(s, p, 1);
    const Jet pj = geo.field(P);
    const Eigen::VectorXd dh = one_form_values(geo.d_h(pj));
    const Eigen::VectorXd dj = one_form_values(geo.d_J(pj));
    Eigen::VectorXd r = dh - pj.value() * dj;
    out.sup_norm = std::max(out.sup_norm, max_abs(r));
    out.relative_scale = std::max(out.relative_scale, std::abs(pj.value()) * max_abs(dj));
    sum_sq += r.squaredNorm();
    components += static_cast<std::size_t>(r.size());
    out.points.push_back(p);
    out.residuals.push_back(std::move(r));
  }
  out.rms = components == 0 ? 0.0 : std::sqrt(sum_sq / static_cast<double>(components));
  return out;
}

IsotropySample isotropy_at(const JacobiEndo& jac, const PhasePoint& p) {
  const Eigen::MatrixXd& phi = jac.phi;
  const auto n = phi.rows();
  if (n < 2) throw DegenerateInput("isotropy needs dimension at least 2");
  const Eigen::VectorXd y = as_vector(p.y);
  IsotropySample out;
  out.rho = phi.trace() / static_cast<double>(n - 1);
  const Eigen::MatrixXd shifted = phi - out.rho * Eigen::MatrixXd::Identity(n, n);
  // shifted = -y alpha^T; least squares over the row index.
  out.alpha = -(y.transpose() * shifted).transpose() / y.squaredNorm();
  const Eigen::MatrixXd model = out.rho * Eigen::MatrixXd::Identity(n, n) - y * out.alpha.transpose();
  out.residual = max_abs(phi - model);
  out.spray_consistency = std::abs(out.alpha.dot(y) - out.rho);
  return out;
}

IsotropyReport isotropy_decompose(const Spray& s, const SampleSet& samples) {
  if (s.dimension() < 2) throw DegenerateInput("isotropy needs dimension at least 2");
  IsotropyReport out;
  out.seed = samples.seed;
  out.min_rho = std::numeric_limits<double>::infinity();
  out.max_rho = -std::numeric_limits<double>::infinity();
  for (const auto& p : samples.points) {
    IsotropySample row = isotropy_at(jacobi(s, p), p);
    out.max_residual = std::max(out.max_residual, row.residual);
    out.max_spray_consistency = std::max(out.max_spray_consistency, row.spray_consistency);
    out.min_rho = std::min(out.min_rho, row.rho);
    out.max_rho = std::max(out.max_rho, row.rho);
    out.points.push_back(p);
    out.rows.push_back(std::move(row));
  }
  return out;
}

FlagCurvatureReport flag_curvature(const ScalarField& F, int n, const SampleSet& samples) {
  const Spray s = geodesic_spray(F, n);
  FlagCurvatureReport out;
  out.seed = samples.seed;
  out.min_kappa = std::numeric_limits<double>::infinity();
  out.max_kappa = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const auto& p : samples.points) {
    const LocalGeometry geo(s, p, 2);
    const Jet fj = geo.field(F);
    const double f = fj.value();
    const Eigen::VectorXd dj = one_form_values(geo.d_J(fj));
    const Eigen::VectorXd y = as_vector(p.y);
    Eigen::MatrixXd phi(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) phi(i, j) = geo.Phi(i, j).value();
    }
    const double kappa = phi.trace() / ((n - 1) * f * f);
    const Eigen::MatrixXd model =
        kappa * (f * f * Eigen::MatrixXd::Identity(n, n) - f * y * dj.transpose());
    const double residual = max_abs(phi - model);
    out.points.push_back(p);
    out.kappa.push_back(kappa);
    out.residual.push_back(residual);
    out.metric_value.push_back(f);
    out.min_kappa = std::min(out.min_kappa, kappa);
    out.max_kappa = std::max(out.max_kappa, kappa);
    out.max_residual = std::max(out.max_residual, residual);
    sum += kappa;
  }
  out.mean_kappa = out.kappa.empty() ? 0.0 : sum / static_cast<double>(out.kappa.size());
  return out;
}

Eigen::MatrixXd deformed_jacobi_formula(const Spray& s, const ScalarField& P, const PhasePoint& p) {
  const LocalGeometry geo(s, p, 2);
  const int n = geo.n();
  const Jet pj = geo.field(P);
  const Jet sp = geo.spray_derivative(pj);
  const Jet q = sp - pj * pj;
  const double pv = pj.value();
  const double j_coefficient = pv * pv - sp.value();
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c_part = geo.dy(j, q).value() +
                            3.0 * (pv * geo.dy(j, pj).value() - geo.delta(j, pj).value());
      out(i, j) = geo.Phi(i, j).value() + (i == j ? j_coefficient : 0.0) -
                  c_part * p.y[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

DeformationReport verify_phiphi0(const Spray& s, const ScalarField& P, const SampleSet& samples) {
  const Spray deformed = projective_deform(s, P, samples.points);
  DeformationReport out;
  out.seed = samples.seed;
  for (const auto& p : samples.points) {
    Eigen::MatrixXd direct = jacobi(deformed, p).phi;
    Eigen::MatrixXd formula = deformed_jacobi_formula(s, P, p);
    const double rel = max_abs(direct - formula) / (1.0 + max_abs(direct));
    out.max_relative_difference = std::max(out.max_relative_difference, rel);
    out.points.push_back(p);
    out.direct.push_back(std::move(direct));
    out.formula.push_back(std::move(formula));
    out.relative_difference.push_back(rel);
  }
  return out;
}

namespace {

struct FiberFit {
  double mean = 0.0;
  double variance = 0.0;
};

std::vector<std::vector<double>> fiber_directions(int n, int count) {
  std::vector<std::vector<double>> dirs;
  for (int k = 0; k < count; ++k) {
    SampleRng rng(0xF1BE5EEDULL, 7, static_cast<std::uint64_t>(k));
    std::vector<double> d(static_cast<std::size_t>(n));
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& v : d) {
        v = rng.normal();
        norm += v * v;
      }
    } while (norm == 0.0);
    for (auto& v : d) v /= std::sqrt(norm);
    dirs.push_back(std::move(d));
  }
  return dirs;
}

FiberFit fit_basic(const ScalarField& F, const ScalarField& P, const std::vector<double>& x,
                   const std::vector<std::vector<double>>& dirs) {
  std::vector<double> ratios;
  for (const auto& d : dirs) {
    const PhasePoint q = make_phase_point(x, d);
    ratios.push_back(P.value(q) / F.value(q));
  }
  FiberFit fit;
  for (double r : ratios) fit.mean += r;
  fit.mean /= static_cast<double>(ratios.size());
  for (double r : ratios) fit.variance += (r - fit.mean) * (r - fit.mean);
  fit.variance /= static_cast<double>(ratios.size());
  return fit;
}

}  // namespace

ChainReport theorem1_chain(const ScalarField& F, const ScalarField& P, int n, const SampleSet& samples,
                           const ChainOptions& options) {
  const FlagCurvatureReport curvature = flag_curvature(F, n, samples);
  double min_abs_kappa = std::numeric_limits<double>::infinity();
  for (double k : curvature.kappa) min_abs_kappa = std::min(min_abs_kappa, std::abs(k));
  if (!(min_abs_kappa > options.kappa_floor)) {
    throw PreconditionError("scalar flag curvature vanishes on the samples (min |kappa| = " +
                            std::to_string(min_abs_kappa) + "); the obstruction chain does not apply");
  }
  check_homogeneity(P, samples.points, 1.0);

  const Spray s = geodesic_spray(F, n);
  const auto dirs = fiber_directions(n, options.fiber_directions);
  ChainReport out;
  out.seed = samples.seed;
  out.min_abs_kappa = min_abs_kappa;
  out.min_dajf_mismatch = std::numeric_limits<double>::infinity();
  for (const auto& p : samples.points) {
    const LocalGeometry geo(s, p, 2);
    const Jet pj = geo.field(P);
    const Jet fj = geo.field(F);
    ChainSample row;
    const Eigen::VectorXd dj_p = one_form_values(geo.d_J(pj));
    row.funk_residual = one_form_values(geo.d_h(pj)) - pj.value() * dj_p;
    row.d_R_P = two_form_values(geo.d_R(pj), n).norm();
    row.d_Phi_P = one_form_values(geo.d_Phi(pj)).norm();
    row.d_J_P_over_F = one_form_values(geo.d_J(pj / fj)).norm();
    row.d_J_F = one_form_values(geo.d_J(fj));

    const FiberFit fit = fit_basic(F, P, p.x, dirs);
    row.fitted_a = fit.mean;
    row.fiber_variance = fit.variance;

    Eigen::VectorXd d_inv_a(n);
    Eigen::VectorXd da(n);
    bool singular = std::abs(fit.mean) < 1e-12;
    for (int k = 0; k < n && !singular; ++k) {
      std::vector<double> xp = p.x, xm = p.x;
      xp[static_cast<std::size_t>(k)] += options.base_step;
      xm[static_cast<std::size_t>(k)] -= options.base_step;
      const double ap = fit_basic(F, P, xp, dirs).mean;
      const double am = fit_basic(F, P, xm, dirs).mean;
      if (std::abs(ap) < 1e-12 || std::abs(am) < 1e-12) {
        singular = true;
        break;
      }
      d_inv_a(k) = (-1.0 / ap + 1.0 / am) / (2.0 * options.base_step);
      da(k) = (ap - am) / (2.0 * options.base_step);
    }
    if (singular) {
      out.division_by_zero = true;
    } else {
      row.d_inv_a = d_inv_a;
      row.dajf_mismatch = (d_inv_a - row.d_J_F).norm();
      const double f = fj.value();
      const Eigen::VectorXd predicted = f * da - fit.mean * fit.mean * f * row.d_J_F;
      row.af_prediction_error = (row.funk_residual - predicted).norm();
      out.min_dajf_mismatch = std::min(out.min_dajf_mismatch, *row.dajf_mismatch);
      out.max_af_prediction_error = std::max(out.max_af_prediction_error, *row.af_prediction_error);
    }

    out.sup_funk_residual = std::max(out.sup_funk_residual, max_abs(row.funk_residual));
    out.sup_d_R_P = std::max(out.sup_d_R_P, row.d_R_P);
    out.sup_d_Phi_P = std::max(out.sup_d_Phi_P, row.d_Phi_P);
    out.sup_d_J_P_over_F = std::max(out.sup_d_J_P_over_F, row.d_J_P_over_F);
    out.max_fiber_variance = std::max(out.max_fiber_variance, row.fiber_variance);
    out.points.push_back(p);
    out.rows.push_back(std::move(row));
  }
  if (!std::isfinite(out.min_dajf_mismatch)) out.min_dajf_mismatch = 0.0;
  out.p_over_f_basic = out.max_fiber_variance <= options.fiber_variance_tol;
  return out;
}

IdentityTable identity_suite(const Spray& s, const std::vector<ScalarField>& fields,
                             const SampleSet& samples) {
  IdentityTable table;
  table.spray = s.provenance();
  table.seed = samples.seed;
  const int n = s.dimension();
  for (const auto& f : fields) {
    IdentityRow row;
    row.field = f.name();
    const bool homogeneous = f.degree() && *f.degree() == 1;
    if (homogeneous) {
      row.spray_contraction = 0.0;
      row.spray_contraction_scaled = 0.0;
    }
    auto record = [](double& raw, double& scaled, double residual, double scale) {
      raw = std::max(raw, residual);
      scaled = std::max(scaled, residual / (1.0 + scale));
    };
    for (const auto& p : samples.points) {
      const LocalGeometry geo(s, p, 3);
      const Jet fj = geo.field(f);
      const Eigen::MatrixXd dr = two_form_values(geo.d_R(fj), n);

      const Eigen::MatrixXd jh = two_form_values(geo.d_J(geo.d_h(fj)), n);
      const Eigen::MatrixXd hj = two_form_values(geo.d_h(geo.d_J(fj)), n);
      record(row.j_h_anticommutator, row.j_h_anticommutator_scaled, max_abs(jh + hj),
             std::max(max_abs(jh), max_abs(hj)));

      const Eigen::MatrixXd hh = two_form_values(geo.d_h(geo.d_h(fj)), n);
      record(row.h_squared_minus_R, row.h_squared_minus_R_scaled, max_abs(hh - dr),
             std::max(max_abs(hh), max_abs(dr)));

      const Eigen::MatrixXd jp = two_form_values(geo.d_J(geo.d_Phi(fj)), n);
      const Eigen::MatrixXd pj = two_form_values(geo.d_Phi(geo.d_J(fj)), n);
      record(row.j_phi_minus_3R, row.j_phi_minus_3R_scaled, max_abs(jp + pj - 3.0 * dr),
             std::max({max_abs(jp), max_abs(pj), 3.0 * max_abs(dr)}));

      if (homogeneous) {
        const Eigen::VectorXd isr = one_form_values(geo.contract_spray(geo.d_R(fj)));
        const Eigen::VectorXd dphi = one_form_values(geo.d_Phi(fj));
        record(*row.spray_contraction, *row.spray_contraction_scaled, max_abs(isr - dphi),
               std::max(max_abs(isr), max_abs(dphi)));
      }
    }
    table.max_scaled = std::max({table.max_scaled, row.j_h_anticommutator_scaled,
                                 row.h_squared_minus_R_scaled, row.j_phi_minus_3R_scaled,
                                 row.spray_contraction_scaled.value_or(0.0)});
    table.rows.push_back(std::move(row));
  }
  return table;
}

GeodesicContract geodesic_contract(const Spray& s, const ScalarField& F, const SampleSet& samples) {
  GeodesicContract out;
  for (const auto& p : samples.points) {
    const LocalGeometry geo(s, p, 1);
    out.d_h_F = std::max(out.d_h_F, max_abs(one_form_values(geo.d_h(geo.field(F)))));
    out.defect = std::max(out.defect, max_abs(geodesic_defect(s, F, p)));
  }
  return out;
}

nlohmann::json to_json_array(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

nlohmann::json to_json_array(const Eigen::MatrixXd& m) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

nlohmann::json point_json(const PhasePoint& p) { return {{"x", p.x}, {"y", p.y}}; }

namespace {

template <typename Fn>
nlohmann::json rows_json(std::size_t count, std::size_t cap, Fn&& fn) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < std::min(count, cap); ++k) rows.push_back(fn(k));
  return rows;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json summary_json(const FunkResidualReport& r) {
  return {{"sup_norm", r.sup_norm},
          {"rms", r.rms},
          {"relative_scale", r.relative_scale},
          {"sample_count", r.sample_count},
          {"seed", r.seed}};
}

nlohmann::json samples_json(const FunkResidualReport& r, std::size_t cap) {
  return rows_json(r.points.size(), cap, [&](std::size_t k) {
    nlohmann::json row = point_json(r.points[k]);
    row["residual"] = to_json_array(r.residuals[k]);
    return row;
  });
}

nlohmann::json summary_json(const IsotropyReport& r) {
  return {{"max_residual", r.max_residual},
          {"max_spray_consistency", r.max_spray_consistency},
          {"min_rho", r.min_rho},
          {"max_rho", r.max_rho},
          {"sample_count", r.points.size()},
          {"seed", r.seed}};
}

nlohmann::json samples_json(const IsotropyReport& r, std::size_t cap) {
  return rows_json(r.points.size(), cap, [&](std::size_t k) {
    nlohmann::json row = point_json(r.points[k]);
    row["rho"] = r.rows[k].rho;
    row["alpha"] = to_json_array(r.rows[k].alpha);
    row["residual"] = r.rows[k].residual;
    return row;
  });
}

nlohmann::json summary_json(const FlagCurvatureReport& r) {
  return {{"min_kappa", r.min_kappa},   {"max_kappa", r.max_kappa},
          {"mean_kappa", r.mean_kappa}, {"max_residual", r.max_residual},
          {"sample_count", r.points.size()}, {"seed", r.seed}};
}

nlohmann::json samples_json(const FlagCurvatureReport& r, std::size_t cap) {
  return rows_json(r.points.size(), cap, [&](std::size_t k) {
    nlohmann::json row = point_json(r.points[k]);
    row["kappa"] = r.kappa[k];
    row["F"] = r.metric_value[k];
    row["residual"] = r.residual[k];
    return row;
  });
}

nlohmann::json summary_json(const DeformationReport& r) {
  return {{"max_relative_difference", r.max_relative_difference},
          {"sample_count", r.points.size()},
          {"seed", r.seed}};
}

nlohmann::json samples_json(const DeformationReport& r, std::size_t cap) {
  return rows_json(r.points.size(), cap, [&](std::size_t k) {
    nlohmann::json row = point_json(r.points[k]);
    row["direct"] = to_json_array(r.direct[k]);
    row["formula"] = to_json_array(r.formula[k]);
    row["relative_difference"] = r.relative_difference[k];
    return row;
  });
}

nlohmann::json summary_json(const ChainReport& r) {
  return {{"min_abs_kappa", r.min_abs_kappa},
          {"sup_funk_residual", r.sup_funk_residual},
          {"sup_d_R_P", r.sup_d_R_P},
          {"sup_d_Phi_P", r.sup_d_Phi_P},
          {"sup_d_J_P_over_F", r.sup_d_J_P_over_F},
          {"max_fiber_variance", r.max_fiber_variance},
          {"p_over_f_basic", r.p_over_f_basic},
          {"min_dajf_mismatch", r.min_dajf_mismatch},
          {"max_af_prediction_error", r.max_af_prediction_error},
          {"division_by_zero", r.division_by_zero},
          {"sample_count", r.points.size()},
          {"seed", r.seed}};
}

nlohmann::json samples_json(const ChainReport& r, std::size_t cap) {
  return rows_json(r.points.size(), cap, [&](std::size_t k) {
    const ChainSample& s = r.rows[k];
    nlohmann::json row = point_json(r.points[k]);
    row["funk_residual"] = to_json_array(s.funk_residual);
    row["d_R_P"] = s.d_R_P;
    row["d_Phi_P"] = s.d_Phi_P;
    row["d_J_P_over_F"] = s.d_J_P_over_F;
    row["fitted_a"] = s.fitted_a;
    row["fiber_variance"] = s.fiber_variance;
    row["d_inv_a"] = s.d_inv_a ? to_json_array(*s.d_inv_a) : nlohmann::json(nullptr);
    row["d_J_F"] = to_json_array(s.d_J_F);
    row["dajf_mismatch"] = optional_json(s.dajf_mismatch);
    row["af_prediction_error"] = optional_json(s.af_prediction_error);
    return row;
  });
}

nlohmann::json summary_json(const IdentityTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"field", r.field},
                    {"dJ_dh_plus_dh_dJ", r.j_h_anticommutator},
                    {"dh_dh_minus_dR", r.h_squared_minus_R},
                    {"dJ_dPhi_plus_dPhi_dJ_minus_3dR", r.j_phi_minus_3R},
                    {"iS_dR_minus_dPhi", optional_json(r.spray_contraction)},
                    {"scaled",
                     {{"dJ_dh_plus_dh_dJ", r.j_h_anticommutator_scaled},
                      {"dh_dh_minus_dR", r.h_squared_minus_R_scaled},
                      {"dJ_dPhi_plus_dPhi_dJ_minus_3dR", r.j_phi_minus_3R_scaled},
                      {"iS_dR_minus_dPhi", optional_json(r.spray_contraction_scaled)}}}});
  }
  return {{"spray", t.spray}, {"rows", rows}, {"max_scaled", t.max_scaled}, {"seed", t.seed}};
}

}  // namespace funk
