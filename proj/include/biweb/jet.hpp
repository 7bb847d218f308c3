#pragma once

// Truncated multivariate Taylor series ("jets").
//
// A Jet over a JetContext (num_vars, order) stores the Taylor coefficients
// c_alpha = (d^alpha f)(p) / alpha! of a smooth function f at some basepoint p,
// for every multi-index alpha of total degree <= order. Arithmetic and the
// elementary functions act on the coefficients exactly through the truncation
// order, so partial() returns exact derivatives of composed expressions.
//
// Coefficients are stored densely in graded-lexicographic rank order. The
// index tables (ranks, Cauchy-product pairs, derivative maps) are shared by
// every jet of a context and cached process-wide.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace biweb {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);
  MultiIndex(std::initializer_list<int> exponents);

  static MultiIndex zero(int num_vars);
  static MultiIndex unit(int num_vars, int var, int power = 1);

  int num_vars() const noexcept { return static_cast<int>(e_.size()); }
  int degree() const noexcept;
  int operator[](int var) const { return e_.at(static_cast<std::size_t>(var)); }
  const std::vector<int>& exponents() const noexcept { return e_; }

  /// alpha! = prod_i alpha_i!
  double factorial() const;

  MultiIndex operator+(const MultiIndex& other) const;
  bool operator==(const MultiIndex&) const = default;

  std::string to_string() const;

 private:
  std::vector<int> e_;
};

namespace detail {
struct JetTables;
}

/// Handle to the shared index tables of a (num_vars, order) jet space.
class JetContext {
 public:
  static constexpr int kDefaultOrder = 6;

  JetContext(int num_vars, int order = kDefaultOrder);

  int num_vars() const noexcept;
  int order() const noexcept;
  /// Number of stored coefficients, C(num_vars + order, order).
  std::size_t size() const noexcept;

  std::size_t rank(const MultiIndex& alpha) const;
  const MultiIndex& index(std::size_t rank) const;

  /// The same variable count at a different order.
  JetContext with_order(int order) const { return JetContext(num_vars(), order); }

  bool operator==(const JetContext& other) const noexcept { return t_ == other.t_; }

  const detail::JetTables& tables() const noexcept { return *t_; }

 private:
  explicit JetContext(std::shared_ptr<const detail::JetTables> t) : t_(std::move(t)) {}
  std::shared_ptr<const detail::JetTables> t_;
};

class Jet {
 public:
  /// The zero jet.
  explicit Jet(const JetContext& ctx);
  Jet(const JetContext& ctx, double constant);
  Jet(const JetContext& ctx, std::vector<double> coeffs);

  const JetContext& context() const noexcept { return ctx_; }
  int order() const noexcept { return ctx_.order(); }

  double value() const noexcept { return c_[0]; }
  double coeff(const MultiIndex& alpha) const;
  void set_coeff(const MultiIndex& alpha, double v);
  std::span<const double> coeffs() const noexcept { return c_; }
  std::span<double> coeffs() noexcept { return c_; }

  /// Exact partial derivative d^alpha f at the basepoint.
  double partial(const MultiIndex& alpha) const;

  /// Jet of d f / d x_var, one order lower.
  Jet derivative(int var) const;
  /// Drop all coefficients above `order` (order <= this->order()).
  Jet truncate(int order) const;

  Jet& operator+=(const Jet& b);
  Jet& operator-=(const Jet& b);
  Jet& operator*=(const Jet& b);
  Jet& operator/=(const Jet& b);
  Jet& operator+=(double b);
  Jet& operator-=(double b);
  Jet& operator*=(double b);
  Jet& operator/=(double b);

  friend Jet operator-(Jet a);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double b) { return a += b; }
  friend Jet operator-(Jet a, double b) { return a -= b; }
  friend Jet operator*(Jet a, double b) { return a *= b; }
  friend Jet operator/(Jet a, double b) { return a /= b; }
  friend Jet operator+(double a, Jet b) { return b += a; }
  friend Jet operator-(double a, const Jet& b) { return -b + a; }
  friend Jet operator*(double a, Jet b) { return b *= a; }
  friend Jet operator/(double a, const Jet& b);

 private:
  JetContext ctx_;
  std::vector<double> c_;
};

/// Jet of the coordinate function x_index with value `value` at the basepoint.
Jet seed_variable(const JetContext& ctx, int index, double value);

/// 1 / a. Throws DomainError("singular division") when a.value() == 0.
Jet reciprocal(const Jet& a);

Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
/// log|a|, smooth wherever a(p) != 0.
Jet abs_log(const Jet& a);
Jet pow(const Jet& a, int p);
/// a^p for real p; requires a(p) > 0.
Jet pow(const Jet& a, double p);

/// Compose a univariate Taylor series sum_k taylor[k] u^k with the
/// nonconstant part u of `a`. taylor.size() must exceed a.order().
Jet compose(const Jet& a, std::span<const double> taylor);

/// Substitute `args` into the Taylor polynomial `f`: f holds the expansion of some
/// F around the point (args[k].value())_k, and the result is the jet of F(args)
/// in the context of the arguments.
Jet compose_taylor(const Jet& f, std::span<const Jet> args);

double value_of(double x);
inline double value_of(const Jet& j) { return j.value(); }

}  // namespace biweb
