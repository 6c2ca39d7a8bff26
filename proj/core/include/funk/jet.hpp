#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet of order K over d variables stores the Taylor coefficients
// f_mu = (d^mu f)(p) / mu! for every multi-index mu with |mu| <= K. Monomials
// are enumerated in graded order, so the coefficients of the order-k
// truncation form a prefix of the order-K coefficients for k < K. Binary
// operations between jets of different orders truncate to the smaller order.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace funk {

/// Monomial tables shared by all jets of one (dimension, order) pair.
/// Instances are immutable and obtained through JetLayout::get().
class JetLayout {
 public:
  static constexpr int kMaxOrder = 8;

  static std::shared_ptr<const JetLayout> get(int dim, int order);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return degree_.size(); }
  /// Number of monomials of total degree <= k (k <= order).
  std::size_t prefix(int k) const { return prefix_[static_cast<std::size_t>(k)]; }

  int degree(std::size_t m) const { return degree_[m]; }
  std::span<const std::uint8_t> exponents(std::size_t m) const {
    return {exponents_.data() + m * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  /// Index of the monomial with the given exponents, or -1 when it is not
  /// stored (degree above the order).
  std::ptrdiff_t index_of(std::span<const int> exps) const;
  /// Index of m + e_var, or -1 when the degree would exceed the order.
  std::int32_t raise(int var, std::size_t m) const {
    return raise_[static_cast<std::size_t>(var) * size() + m];
  }

  struct Term {
    std::uint32_t a, b, c;
  };
  /// Product terms (a, b, c) with deg a + deg b = deg c <= k, sorted by deg c.
  std::span<const Term> products(int k) const {
    return {products_.data(), product_end_[static_cast<std::size_t>(k)]};
  }

  JetLayout(int dim, int order);

 private:
  int dim_;
  int order_;
  std::vector<std::uint8_t> exponents_;
  std::vector<int> degree_;
  std::vector<std::size_t> prefix_;
  std::vector<std::int32_t> raise_;
  std::vector<Term> products_;
  std::vector<std::size_t> product_end_;
};

class Jet {
 public:
  Jet() = default;

  static Jet constant(int dim, int order, double value);
  /// The coordinate function of variable `var`, expanded at `value`.
  static Jet variable(int dim, int order, int var, double value);

  bool empty() const noexcept { return layout_ == nullptr; }
  int dim() const noexcept { return layout_->dim(); }
  int order() const noexcept { return order_; }
  const JetLayout& layout() const noexcept { return *layout_; }

  double value() const noexcept { return coeffs_[0]; }
  std::span<const double> coefficients() const noexcept { return coeffs_; }
  double coefficient(std::span<const int> multi_index) const;
  /// Mixed partial derivative: coefficient times the multi-index factorial.
  double partial(std::span<const int> multi_index) const;

  /// d/d(var); the result has order one less.
  Jet derivative(int var) const;
  Jet truncated(int order) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);
  Jet& operator+=(double rhs);
  Jet& operator-=(double rhs);
  Jet& operator*=(double rhs);
  Jet& operator/=(double rhs);

  friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
  friend Jet operator*(const Jet& lhs, const Jet& rhs);
  friend Jet operator/(const Jet& lhs, const Jet& rhs);
  friend Jet operator+(Jet lhs, double rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, double rhs) { return lhs -= rhs; }
  friend Jet operator*(Jet lhs, double rhs) { return lhs *= rhs; }
  friend Jet operator/(Jet lhs, double rhs) { return lhs /= rhs; }
  friend Jet operator+(double lhs, Jet rhs) { return rhs += lhs; }
  friend Jet operator-(double lhs, const Jet& rhs) { return (-rhs) += lhs; }
  friend Jet operator*(double lhs, Jet rhs) { return rhs *= lhs; }
  friend Jet operator/(double lhs, const Jet& rhs);

  /// Evaluates sum_k taylor[k] * (this - value())^k, i.e. composes a
  /// univariate function given by its Taylor coefficients at value().
  Jet compose(std::span<const double> taylor) const;

 private:
  Jet(std::shared_ptr<const JetLayout> layout, int order, std::vector<double> coeffs);
  void truncate_to(int order);

  std::shared_ptr<const JetLayout> layout_;
  int order_ = 0;
  std::vector<double> coeffs_;
};

Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, int exponent);

/// Solves A x = b over jets by Gaussian elimination with partial pivoting on
/// the constant terms. A is row-major n x n.
std::vector<Jet> solve(std::vector<Jet> a, std::vector<Jet> b);

}  // namespace funk
