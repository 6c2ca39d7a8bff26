#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "funk/errors.hpp"
#include "funk/field.hpp"

namespace funk {
namespace {

// Central difference weights (offset in steps, weight) for the first three
// derivatives, all second-order accurate.
std::vector<std::pair<int, double>> stencil(int derivative) {
  switch (derivative) {
    case 1:
      return {{-1, -0.5}, {1, 0.5}};
    case 2:
      return {{-1, 1.0}, {0, -2.0}, {1, 1.0}};
    case 3:
      return {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
    default:
      throw std::invalid_argument("fd_oracle supports derivative orders up to 3");
  }
}

double difference(const ScalarField& f, const PhasePoint& p, std::span<const int> mu,
                  std::span<const double> steps) {
  const int n = p.dimension();
  std::map<std::vector<int>, double> offsets{{std::vector<int>(mu.size(), 0), 1.0}};
  for (std::size_t v = 0; v < mu.size(); ++v) {
    if (mu[v] == 0) continue;
    std::map<std::vector<int>, double> next;
    for (const auto& [off, w] : offsets) {
      for (const auto& [k, wk] : stencil(mu[v])) {
        auto o = off;
        o[v] += k;
        next[o] += w * wk / std::pow(steps[v], mu[v]);
      }
    }
    offsets = std::move(next);
  }
  double acc = 0.0;
  for (const auto& [off, w] : offsets) {
    if (w == 0.0) continue;
    PhasePoint q = p;
    for (int v = 0; v < 2 * n; ++v) {
      const double shift = off[static_cast<std::size_t>(v)] * steps[static_cast<std::size_t>(v)];
      if (v < n) {
        q.x[static_cast<std::size_t>(v)] += shift;
      } else {
        q.y[static_cast<std::size_t>(v - n)] += shift;
      }
    }
    bool nonzero = false;
    for (double c : q.y) nonzero = nonzero || c != 0.0;
    if (!nonzero) throw DomainError("finite-difference stencil reaches y = 0");
    try {
      acc += w * f.value(q);
    } catch (const DomainError& e) {
      throw DomainError(std::string("finite-difference stencil leaves the domain: ") + e.what());
    }
  }
  return acc;
}

}  // namespace

double fd_oracle(const ScalarField& f, const PhasePoint& p, std::span<const int> multi_index,
                 const FdOptions& options) {
  const int n = p.dimension();
  if (multi_index.size() != static_cast<std::size_t>(2 * n)) {
    throw std::invalid_argument("fd_oracle: multi-index length must be 2n");
  }
  int degree = 0;
  for (int e : multi_index) degree += e;
  if (degree > 3) throw std::invalid_argument("fd_oracle supports total degree <= 3");
  if (degree == 0) return f.value(p);

  const double scale = options.scale_with_degree ? std::pow(10.0, degree - 1) : 1.0;
  std::vector<double> steps(static_cast<std::size_t>(2 * n));
  for (int v = 0; v < 2 * n; ++v) {
    const double c = v < n ? p.x[static_cast<std::size_t>(v)] : p.y[static_cast<std::size_t>(v - n)];
    steps[static_cast<std::size_t>(v)] = options.step * scale * (1.0 + std::abs(c));
  }
  std::vector<double> half(steps);
  for (double& h : half) h *= 0.5;
  const double coarse = difference(f, p, multi_index, steps);
  const double fine = difference(f, p, multi_index, half);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace funk
