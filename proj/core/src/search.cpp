#include "funk/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "funk/analysis.hpp"
#include "funk/errors.hpp"

namespace funk {

Ansatz Ansatz::zero(int n) {
  return {Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
}

Ansatz Ansatz::from_parameters(int n, const Eigen::VectorXd& theta) {
  if (theta.size() != parameter_count(n)) throw std::invalid_argument("ansatz parameter count mismatch");
  Ansatz a = zero(n);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) a.u(i) = theta(k++);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a.V(i, j) = theta(k++);
  }
  for (int i = 0; i < n; ++i) a.w(i) = theta(k++);
  return a;
}

Eigen::VectorXd Ansatz::parameters() const {
  const int n = dimension();
  Eigen::VectorXd theta(parameter_count(n));
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) theta(k++) = u(i);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) theta(k++) = V(i, j);
  }
  for (int i = 0; i < n; ++i) theta(k++) = w(i);
  return theta;
}

double Ansatz::min_denominator(const XDomain& domain) const {
  const std::vector<double> wv(w.data(), w.data() + w.size());
  return 1.0 - domain.max_abs_linear(wv);
}

Jet ansatz_value(const JetVars& v, const std::vector<Jet>& theta) {
  const int n = v.n();
  const auto at = [&](int k) -> const Jet& { return theta[static_cast<std::size_t>(k)]; };
  Jet numerator = v.constant(0.0);
  for (int i = 0; i < n; ++i) {
    Jet coeff = at(i);
    for (int j = 0; j < n; ++j) coeff += at(n + i * n + j) * v.x[static_cast<std::size_t>(j)];
    numerator += coeff * v.y[static_cast<std::size_t>(i)];
  }
  Jet denominator = v.constant(1.0);
  for (int k = 0; k < n; ++k) denominator += at(n + n * n + k) * v.x[static_cast<std::size_t>(k)];
  return numerator / denominator;
}

ScalarField Ansatz::field() const {
  const Eigen::VectorXd theta = parameters();
  return ScalarField(
      "ansatz",
      [theta](const JetVars& v) {
        std::vector<Jet> t;
        t.reserve(static_cast<std::size_t>(theta.size()));
        for (Eigen::Index k = 0; k < theta.size(); ++k) t.push_back(v.constant(theta(k)));
        return ansatz_value(v, t);
      },
      1);
}

namespace {

void check_denominator(const Ansatz& a, const SampleSet& samples, double floor) {
  if (a.min_denominator(samples.domain.x) < floor) {
    throw AnsatzDomainError("ansatz denominator drops below " + std::to_string(floor) +
                            " on the sampling domain");
  }
  for (const auto& p : samples.points) {
    double d = 1.0;
    for (int k = 0; k < a.dimension(); ++k) d += a.w(k) * p.x[static_cast<std::size_t>(k)];
    if (d < floor) {
      throw AnsatzDomainError("ansatz denominator drops below " + std::to_string(floor) +
                              " at a sample");
    }
  }
}

// N at each sample; the residual only needs its values.
std::vector<Eigen::MatrixXd> connection_values(const Spray& s, const SampleSet& samples) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(samples.points.size());
  for (const auto& p : samples.points) out.push_back(connection(s, p).N);
  return out;
}

ObjectiveValue evaluate_objective(const std::vector<Eigen::MatrixXd>& nl, const Ansatz& a,
                                  const SampleSet& samples, const ObjectiveOptions& options,
                                  bool with_jacobian) {
  check_denominator(a, samples, options.denominator_floor);
  const int n = a.dimension();
  const int params = Ansatz::parameter_count(n);
  const Eigen::VectorXd theta = a.parameters();
  const auto count = static_cast<Eigen::Index>(samples.points.size());
  ObjectiveValue out;
  out.residuals.resize(count * n + 1);
  if (with_jacobian) out.jacobian.resize(count * n + 1, params);

  // With the Jacobian the parameters join the jet variables (order 2, so
  // the x/y derivatives in the residual keep their theta derivatives).
  const int order = with_jacobian ? 2 : 1;
  const int extra = with_jacobian ? params : 0;
  auto lift_theta = [&](const JetVars& v) {
    std::vector<Jet> t;
    t.reserve(static_cast<std::size_t>(params));
    for (int k = 0; k < params; ++k) {
      t.push_back(with_jacobian ? Jet::variable(v.dim(), v.order(), 2 * n + k, theta(k))
                                : v.constant(theta(k)));
    }
    return t;
  };

  for (Eigen::Index s = 0; s < count; ++s) {
    const PhasePoint& p = samples.points[static_cast<std::size_t>(s)];
    const JetVars v = JetVars::lift(p, order, extra);
    const Jet pj = ansatz_value(v, lift_theta(v));
    const Eigen::MatrixXd& N = nl[static_cast<std::size_t>(s)];
    for (int i = 0; i < n; ++i) {
      Jet r = pj.derivative(x_var(i)) - pj * pj.derivative(y_var(n, i));
      for (int l = 0; l < n; ++l) r -= pj.derivative(y_var(n, l)) * N(l, i);
      const Eigen::Index row = s * n + i;
      out.residuals(row) = r.value();
      if (with_jacobian) {
        for (int k = 0; k < params; ++k) out.jacobian(row, k) = r.derivative(2 * n + k).value();
      }
    }
  }

  // Normalization P(0, e1) = 1 excludes the trivial factor P = 0.
  std::vector<double> x0(static_cast<std::size_t>(n), 0.0), y0(static_cast<std::size_t>(n), 0.0);
  y0[0] = 1.0;
  const JetVars v0 = JetVars::lift(make_phase_point(x0, y0), order, extra);
  const Jet p0 = ansatz_value(v0, lift_theta(v0));
  const double weight = std::sqrt(options.penalty_weight);
  const Eigen::Index last = count * n;
  out.residuals(last) = weight * (p0.value() - 1.0);
  if (with_jacobian) {
    for (int k = 0; k < params; ++k) out.jacobian(last, k) = weight * p0.derivative(2 * n + k).value();
  }
  out.value = out.residuals.squaredNorm();
  return out;
}

double train_rms(const ObjectiveValue& v) {
  const Eigen::Index m = v.residuals.size() - 1;
  if (m <= 0) return 0.0;
  return std::sqrt(v.residuals.head(m).squaredNorm() / static_cast<double>(m));
}

Ansatz random_start(int n, const SearchConfig& config, int restart) {
  SampleRng rng(config.seed, 2, static_cast<std::uint64_t>(restart));
  const int params = Ansatz::parameter_count(n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Eigen::VectorXd theta(params);
    for (int k = 0; k < params; ++k) theta(k) = rng.uniform(-config.init_range, config.init_range);
    Ansatz a = Ansatz::from_parameters(n, theta);
    if (a.min_denominator(config.domain.x) >= config.objective.denominator_floor) return a;
  }
  throw AnsatzDomainError("could not draw a feasible ansatz start");
}

RestartResult run_restart(const std::vector<Eigen::MatrixXd>& nl, const SampleSet& training,
                          const SearchConfig& config, int restart, int n) {
  RestartResult out;
  out.restart = restart;
  Ansatz theta = random_start(n, config, restart);
  ObjectiveValue current = evaluate_objective(nl, theta, training, config.objective, true);
  out.objective_trace.push_back(current.value);
  double mu = config.initial_damping;
  const int params = Ansatz::parameter_count(n);
  for (int iter = 0; iter < config.max_iter; ++iter) {
    out.iterations = iter + 1;
    const Eigen::VectorXd gradient = current.jacobian.transpose() * current.residuals;
    if (gradient.norm() < config.gradient_tol || current.value == 0.0) break;
    const Eigen::MatrixXd jtj = current.jacobian.transpose() * current.jacobian;
    const Eigen::MatrixXd damped = jtj + mu * Eigen::MatrixXd::Identity(params, params);
    const Eigen::VectorXd step = damped.ldlt().solve(-gradient);
    const Ansatz trial = Ansatz::from_parameters(n, theta.parameters() + step);
    bool accepted = false;
    if (step.allFinite() &&
        trial.min_denominator(training.domain.x) >= config.objective.denominator_floor) {
      try {
        const ObjectiveValue probe = evaluate_objective(nl, trial, training, config.objective, false);
        if (probe.value < current.value) {
          theta = trial;
          current = evaluate_objective(nl, theta, training, config.objective, true);
          accepted = true;
        }
      } catch (const AnsatzDomainError&) {
      }
    }
    if (accepted) {
      ++out.accepted_steps;
      out.objective_trace.push_back(current.value);
      mu *= 0.5;
    } else {
      mu *= 10.0;
      if (mu > 1e20) break;
    }
  }
  out.theta = theta;
  out.objective = current.value;
  out.train_rms = train_rms(current);
  return out;
}

}  // namespace

ObjectiveValue objective(const Spray& s, const Ansatz& theta, const SampleSet& samples,
                         const ObjectiveOptions& options, bool with_jacobian) {
  if (theta.dimension() != s.dimension()) throw std::invalid_argument("ansatz/spray dimension mismatch");
  check_denominator(theta, samples, options.denominator_floor);
  return evaluate_objective(connection_values(s, samples), theta, samples, options, with_jacobian);
}

SearchResult search_funk(const Spray& s, const SearchConfig& config) {
  if (config.restarts < 1) throw std::invalid_argument("search needs at least one restart");
  const int n = s.dimension();
  const SampleSet training = draw_samples(config.domain, n, config.samples, config.seed, 0);
  const SampleSet validation = draw_samples(config.domain, n, config.validation_samples, config.seed, 1);
  const auto nl = connection_values(s, training);

  SearchResult result;
  result.seed = config.seed;
  bool any_progress = false;
  for (int r = 0; r < config.restarts; ++r) {
    RestartResult rr = run_restart(nl, training, config, r, n);
    const FunkResidualReport check = funk_residual(s, rr.theta.field(), validation);
    rr.validation_sup = check.sup_norm;
    rr.validation_rms = check.rms;
    any_progress = any_progress || rr.accepted_steps > 0;
    result.restarts.push_back(std::move(rr));
  }
  auto key = [](const RestartResult& r) {
    return std::isnan(r.validation_rms) ? std::numeric_limits<double>::infinity() : r.validation_rms;
  };
  const auto best = std::min_element(
      result.restarts.begin(), result.restarts.end(), [&](const RestartResult& a, const RestartResult& b) {
        return key(a) < key(b) || (key(a) == key(b) && a.restart < b.restart);
      });
  result.best = *best;
  result.no_progress = !any_progress;
  return result;
}

nlohmann::json ansatz_json(const Ansatz& a) {
  return {{"u", to_json_array(a.u)}, {"V", to_json_array(a.V)}, {"w", to_json_array(a.w)}};
}

nlohmann::json summary_json(const SearchResult& r) {
  return {{"theta", ansatz_json(r.best.theta)},
          {"objective", r.best.objective},
          {"train_rms", r.best.train_rms},
          {"validation_sup", r.best.validation_sup},
          {"validation_rms", r.best.validation_rms},
          {"restart", r.best.restart},
          {"iterations", r.best.iterations},
          {"accepted_steps", r.best.accepted_steps},
          {"restarts", r.restarts.size()},
          {"no_progress", r.no_progress},
          {"seed", r.seed}};
}

nlohmann::json samples_json(const SearchResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& rr : r.restarts) {
    rows.push_back({{"restart", rr.restart},
                    {"theta", ansatz_json(rr.theta)},
                    {"objective", rr.objective},
                    {"train_rms", rr.train_rms},
                    {"validation_sup", rr.validation_sup},
                    {"validation_rms", rr.validation_rms},
                    {"iterations", rr.iterations},
                    {"accepted_steps", rr.accepted_steps}});
  }
  return rows;
}

}  // namespace funk
