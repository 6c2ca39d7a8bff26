#include "funk/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "funk/errors.hpp"

namespace funk {
namespace {

// All exponent vectors of total degree `degree` over `dim` variables, in
// lexicographically descending order of the exponent tuple.
void enumerate_degree(int dim, int degree, std::vector<std::uint8_t>& out) {
  std::vector<std::uint8_t> current(static_cast<std::size_t>(dim), 0);
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == dim - 1) {
      current[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(remaining);
      out.insert(out.end(), current.begin(), current.end());
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e);
      self(self, var + 1, remaining - e);
    }
  };
  rec(rec, 0, degree);
}

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace

JetLayout::JetLayout(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || order < 0 || order > kMaxOrder) {
    throw std::invalid_argument("JetLayout: unsupported dimension/order " + std::to_string(dim) +
                                "/" + std::to_string(order));
  }
  const auto d = static_cast<std::size_t>(dim);
  prefix_.reserve(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) {
    enumerate_degree(dim, k, exponents_);
    const std::size_t count = exponents_.size() / d;
    degree_.resize(count, k);
    prefix_.push_back(count);
  }
  const std::size_t m_count = degree_.size();

  std::map<std::vector<std::uint8_t>, std::int32_t> lookup;
  for (std::size_t m = 0; m < m_count; ++m) {
    auto e = exponents(m);
    lookup.emplace(std::vector<std::uint8_t>(e.begin(), e.end()), static_cast<std::int32_t>(m));
  }

  raise_.assign(d * m_count, -1);
  for (int v = 0; v < dim; ++v) {
    for (std::size_t m = 0; m < m_count; ++m) {
      if (degree_[m] == order) continue;
      auto e = exponents(m);
      std::vector<std::uint8_t> key(e.begin(), e.end());
      ++key[static_cast<std::size_t>(v)];
      raise_[static_cast<std::size_t>(v) * m_count + m] = lookup.at(key);
    }
  }

  product_end_.reserve(static_cast<std::size_t>(order) + 1);
  for (int kc = 0; kc <= order; ++kc) {
    for (std::size_t a = 0; a < prefix(kc); ++a) {
      const int kb = kc - degree_[a];
      const std::size_t b_begin = kb == 0 ? 0 : prefix(kb - 1);
      for (std::size_t b = b_begin; b < prefix(kb); ++b) {
        std::int32_t c = static_cast<std::int32_t>(a);
        auto eb = exponents(b);
        for (int v = 0; v < dim; ++v) {
          for (int k = 0; k < eb[static_cast<std::size_t>(v)]; ++k) {
            c = raise(v, static_cast<std::size_t>(c));
          }
        }
        products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                             static_cast<std::uint32_t>(c)});
      }
    }
    product_end_.push_back(products_.size());
  }
}

std::shared_ptr<const JetLayout> JetLayout::get(int dim, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> registry;
  std::lock_guard lock(mutex);
  auto& slot = registry[{dim, order}];
  if (!slot) slot = std::make_shared<const JetLayout>(dim, order);
  return slot;
}

std::ptrdiff_t JetLayout::index_of(std::span<const int> exps) const {
  if (exps.size() != static_cast<std::size_t>(dim_)) {
    throw std::invalid_argument("multi-index length does not match jet dimension");
  }
  int deg = 0;
  for (int e : exps) {
    if (e < 0) throw std::invalid_argument("negative multi-index entry");
    deg += e;
  }
  if (deg > order_) return -1;
  std::ptrdiff_t m = 0;
  for (int v = 0; v < dim_; ++v) {
    for (int k = 0; k < exps[static_cast<std::size_t>(v)]; ++k) {
      m = raise(v, static_cast<std::size_t>(m));
    }
  }
  return m;
}

Jet::Jet(std::shared_ptr<const JetLayout> layout, int order, std::vector<double> coeffs)
    : layout_(std::move(layout)), order_(order), coeffs_(std::move(coeffs)) {}

Jet Jet::constant(int dim, int order, double value) {
  auto layout = JetLayout::get(dim, order);
  std::vector<double> c(layout->size(), 0.0);
  c[0] = value;
  return Jet(std::move(layout), order, std::move(c));
}

Jet Jet::variable(int dim, int order, int var, double value) {
  Jet j = constant(dim, order, value);
  if (var < 0 || var >= dim) throw std::invalid_argument("jet variable index out of range");
  if (order >= 1) j.coeffs_[static_cast<std::size_t>(j.layout_->raise(var, 0))] = 1.0;
  return j;
}

double Jet::coefficient(std::span<const int> multi_index) const {
  const auto m = layout_->index_of(multi_index);
  if (m < 0 || static_cast<std::size_t>(m) >= coeffs_.size()) {
    throw std::out_of_range("multi-index degree exceeds jet order");
  }
  return coeffs_[static_cast<std::size_t>(m)];
}

double Jet::partial(std::span<const int> multi_index) const {
  double scale = 1.0;
  for (int e : multi_index) scale *= factorial(e);
  return coefficient(multi_index) * scale;
}

Jet Jet::derivative(int var) const {
  if (order_ == 0) throw std::out_of_range("cannot differentiate an order-0 jet");
  const std::size_t n = layout_->prefix(order_ - 1);
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto up = static_cast<std::size_t>(layout_->raise(var, m));
    out[m] = (layout_->exponents(m)[static_cast<std::size_t>(var)] + 1.0) * coeffs_[up];
  }
  return Jet(layout_, order_ - 1, std::move(out));
}

Jet Jet::truncated(int order) const {
  Jet r = *this;
  r.truncate_to(order);
  return r;
}

void Jet::truncate_to(int order) {
  if (order >= order_) return;
  order_ = order;
  coeffs_.resize(layout_->prefix(order));
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& c : r.coeffs_) c = -c;
  return r;
}

namespace {
void check_same_dim(const Jet& a, const Jet& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("jet dimension mismatch");
}
}  // namespace

Jet& Jet::operator+=(const Jet& rhs) {
  check_same_dim(*this, rhs);
  truncate_to(rhs.order_);
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] += rhs.coeffs_[m];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  check_same_dim(*this, rhs);
  truncate_to(rhs.order_);
  for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] -= rhs.coeffs_[m];
  return *this;
}

Jet operator*(const Jet& lhs, const Jet& rhs) {
  check_same_dim(lhs, rhs);
  const int order = std::min(lhs.order_, rhs.order_);
  const auto& layout = lhs.layout_->order() >= rhs.layout_->order() ? lhs.layout_ : rhs.layout_;
  std::vector<double> out(layout->prefix(order), 0.0);
  const double* a = lhs.coeffs_.data();
  const double* b = rhs.coeffs_.data();
  for (const auto& t : layout->products(order)) out[t.c] += a[t.a] * b[t.b];
  return Jet(layout, order, std::move(out));
}

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }

Jet operator/(const Jet& lhs, const Jet& rhs) { return lhs * reciprocal(rhs); }

Jet& Jet::operator/=(const Jet& rhs) { return *this = *this / rhs; }

Jet& Jet::operator+=(double rhs) {
  coeffs_[0] += rhs;
  return *this;
}

Jet& Jet::operator-=(double rhs) {
  coeffs_[0] -= rhs;
  return *this;
}

Jet& Jet::operator*=(double rhs) {
  for (double& c : coeffs_) c *= rhs;
  return *this;
}

Jet& Jet::operator/=(double rhs) {
  if (rhs == 0.0) throw DomainError("division by zero");
  for (double& c : coeffs_) c /= rhs;
  return *this;
}

Jet operator/(double lhs, const Jet& rhs) { return reciprocal(rhs) *= lhs; }

Jet Jet::compose(std::span<const double> taylor) const {
  if (taylor.size() < static_cast<std::size_t>(order_) + 1) {
    throw std::invalid_argument("compose: not enough Taylor coefficients");
  }
  Jet t = *this;
  t.coeffs_[0] = 0.0;
  Jet r = constant(dim(), order_, taylor[static_cast<std::size_t>(order_)]);
  for (int k = order_ - 1; k >= 0; --k) {
    r = r * t;
    r.coeffs_[0] += taylor[static_cast<std::size_t>(k)];
  }
  return r;
}

Jet reciprocal(const Jet& a) {
  const double a0 = a.value();
  if (a0 == 0.0 || !std::isfinite(a0)) throw DomainError("division by a jet with zero constant term");
  std::vector<double> taylor(static_cast<std::size_t>(a.order()) + 1);
  double term = 1.0 / a0;
  for (auto& c : taylor) {
    c = term;
    term *= -1.0 / a0;
  }
  return a.compose(taylor);
}

Jet sqrt(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw DomainError("sqrt of a jet with non-positive constant term");
  // sqrt(a0 + t) = sqrt(a0) * sum_k binom(1/2, k) (t / a0)^k
  std::vector<double> taylor(static_cast<std::size_t>(a.order()) + 1);
  double binom = 1.0;
  double scale = std::sqrt(a0);
  for (std::size_t k = 0; k < taylor.size(); ++k) {
    taylor[k] = binom * scale;
    binom *= (0.5 - static_cast<double>(k)) / static_cast<double>(k + 1);
    scale /= a0;
  }
  return a.compose(taylor);
}

Jet pow(const Jet& a, int exponent) {
  if (exponent < 0) return reciprocal(pow(a, -exponent));
  Jet result = Jet::constant(a.dim(), a.order(), 1.0);
  Jet base = a;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    exponent >>= 1;
    if (exponent > 0) base *= base;
  }
  return result;
}

std::vector<Jet> solve(std::vector<Jet> a, std::vector<Jet> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw std::invalid_argument("solve: matrix/vector size mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col].value()) > std::abs(a[pivot * n + col].value())) pivot = r;
    }
    if (a[pivot * n + col].value() == 0.0) throw DomainError("singular jet linear system");
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      std::swap(b[col], b[pivot]);
    }
    const Jet inv = reciprocal(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const Jet factor = a[r * n + col] * inv;
      for (std::size_t k = col + 1; k < n; ++k) a[r * n + k] -= factor * a[col * n + k];
      b[r] -= factor * b[col];
    }
  }
  std::vector<Jet> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Jet acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= a[i * n + k] * x[k];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

}  // namespace funk
