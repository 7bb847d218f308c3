#include "biweb/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "biweb/errors.hpp"

namespace biweb {

// ---------------------------------------------------------------- MultiIndex

MultiIndex::MultiIndex(std::vector<int> exponents) : e_(std::move(exponents)) {
  for (int v : e_) {
    if (v < 0) throw std::invalid_argument("MultiIndex: negative exponent");
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents)
    : MultiIndex(std::vector<int>(exponents)) {}

MultiIndex MultiIndex::zero(int num_vars) {
  return MultiIndex(std::vector<int>(static_cast<std::size_t>(num_vars), 0));
}

MultiIndex MultiIndex::unit(int num_vars, int var, int power) {
  std::vector<int> e(static_cast<std::size_t>(num_vars), 0);
  e.at(static_cast<std::size_t>(var)) = power;
  return MultiIndex(std::move(e));
}

int MultiIndex::degree() const noexcept {
  int d = 0;
  for (int v : e_) d += v;
  return d;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int v : e_) {
    for (int k = 2; k <= v; ++k) f *= k;
  }
  return f;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.e_.size() != e_.size()) {
    throw std::invalid_argument("MultiIndex: variable count mismatch");
  }
  std::vector<int> e(e_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.e_[i];
  return MultiIndex(std::move(e));
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < e_.size(); ++i) {
    if (i) os << ',';
    os << e_[i];
  }
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------- tables

namespace detail {

struct JetTables {
  int num_vars = 0;
  int order = 0;
  std::vector<MultiIndex> indices;  // graded lex
  std::vector<int> degree;          // degree of indices[r]
  std::unordered_map<std::uint64_t, std::size_t> rank_of;

  // Cauchy product in CSR form: result rank r gets
  // sum over k in [pair_start[r], pair_start[r+1]) of a[left[k]] * b[right[k]].
  std::vector<std::uint32_t> pair_start;
  std::vector<std::uint32_t> left;
  std::vector<std::uint32_t> right;

  // For derivative(var): entry r (a rank of the order-1 space) reads
  // coefficient deriv_src[var][r] of this space scaled by deriv_mul[var][r].
  std::vector<std::vector<std::uint32_t>> deriv_src;
  std::vector<std::vector<double>> deriv_mul;

  std::uint64_t key(const std::vector<int>& e) const {
    std::uint64_t k = 0;
    for (int v : e) k = k * static_cast<std::uint64_t>(order + 1) + static_cast<std::uint64_t>(v);
    return k;
  }
};

namespace {

void enumerate_degree(int n, int remaining, std::vector<int>& cur, int pos,
                      std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[static_cast<std::size_t>(pos)] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[static_cast<std::size_t>(pos)] = v;
    enumerate_degree(n, remaining - v, cur, pos + 1, out);
  }
}

std::shared_ptr<const JetTables> build_tables(int n, int order) {
  auto t = std::make_shared<JetTables>();
  t->num_vars = n;
  t->order = order;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  for (int d = 0; d <= order; ++d) enumerate_degree(n, d, cur, 0, t->indices);
  const std::size_t size = t->indices.size();
  t->degree.reserve(size);
  for (std::size_t r = 0; r < size; ++r) {
    t->degree.push_back(t->indices[r].degree());
    t->rank_of.emplace(t->key(t->indices[r].exponents()), r);
  }

  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> by_result(size);
  std::vector<int> sum(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < size; ++i) {
    const auto& ei = t->indices[i].exponents();
    for (std::size_t j = 0; j < size; ++j) {
      if (t->degree[i] + t->degree[j] > order) break;  // graded: later j only grow
      const auto& ej = t->indices[j].exponents();
      for (int v = 0; v < n; ++v) sum[static_cast<std::size_t>(v)] = ei[static_cast<std::size_t>(v)] + ej[static_cast<std::size_t>(v)];
      const std::size_t r = t->rank_of.at(t->key(sum));
      by_result[r].emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
  }
  t->pair_start.reserve(size + 1);
  t->pair_start.push_back(0);
  for (const auto& pairs : by_result) {
    for (const auto& [a, b] : pairs) {
      t->left.push_back(a);
      t->right.push_back(b);
    }
    t->pair_start.push_back(static_cast<std::uint32_t>(t->left.size()));
  }

  if (order >= 1) {
    // Ranks of the order-1 space are a prefix of ours (graded ordering).
    std::size_t lower = 0;
    while (lower < size && t->degree[lower] <= order - 1) ++lower;
    t->deriv_src.assign(static_cast<std::size_t>(n), {});
    t->deriv_mul.assign(static_cast<std::size_t>(n), {});
    for (int v = 0; v < n; ++v) {
      auto& src = t->deriv_src[static_cast<std::size_t>(v)];
      auto& mul = t->deriv_mul[static_cast<std::size_t>(v)];
      src.reserve(lower);
      mul.reserve(lower);
      for (std::size_t r = 0; r < lower; ++r) {
        std::vector<int> e = t->indices[r].exponents();
        e[static_cast<std::size_t>(v)] += 1;
        src.push_back(static_cast<std::uint32_t>(t->rank_of.at(t->key(e))));
        mul.push_back(static_cast<double>(e[static_cast<std::size_t>(v)]));
      }
    }
  }
  return t;
}

std::shared_ptr<const JetTables> cached_tables(int n, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, order}];
  if (!slot) slot = build_tables(n, order);
  return slot;
}

}  // namespace
}  // namespace detail

// ---------------------------------------------------------------- JetContext

JetContext::JetContext(int num_vars, int order) {
  if (num_vars < 1) throw std::invalid_argument("JetContext: num_vars must be >= 1");
  if (order < 0) throw std::invalid_argument("JetContext: order must be >= 0");
  t_ = detail::cached_tables(num_vars, order);
}

int JetContext::num_vars() const noexcept { return t_->num_vars; }
int JetContext::order() const noexcept { return t_->order; }
std::size_t JetContext::size() const noexcept { return t_->indices.size(); }

std::size_t JetContext::rank(const MultiIndex& alpha) const {
  if (alpha.num_vars() != t_->num_vars) {
    throw std::invalid_argument("JetContext: multi-index has wrong variable count");
  }
  if (alpha.degree() > t_->order) {
    throw std::out_of_range("JetContext: multi-index " + alpha.to_string() +
                            " exceeds jet order " + std::to_string(t_->order));
  }
  return t_->rank_of.at(t_->key(alpha.exponents()));
}

const MultiIndex& JetContext::index(std::size_t rank) const { return t_->indices.at(rank); }

// ---------------------------------------------------------------- Jet

namespace {

void require_same(const Jet& a, const Jet& b) {
  if (!(a.context() == b.context())) {
    throw std::invalid_argument("Jet: operands live in different jet spaces");
  }
}

}  // namespace

Jet::Jet(const JetContext& ctx) : ctx_(ctx), c_(ctx.size(), 0.0) {}

Jet::Jet(const JetContext& ctx, double constant) : Jet(ctx) { c_[0] = constant; }

Jet::Jet(const JetContext& ctx, std::vector<double> coeffs) : ctx_(ctx), c_(std::move(coeffs)) {
  if (c_.size() != ctx_.size()) throw std::invalid_argument("Jet: coefficient count mismatch");
}

double Jet::coeff(const MultiIndex& alpha) const { return c_[ctx_.rank(alpha)]; }

void Jet::set_coeff(const MultiIndex& alpha, double v) { c_[ctx_.rank(alpha)] = v; }

double Jet::partial(const MultiIndex& alpha) const { return coeff(alpha) * alpha.factorial(); }

Jet Jet::derivative(int var) const {
  if (var < 0 || var >= ctx_.num_vars()) throw std::out_of_range("Jet::derivative: bad variable");
  if (ctx_.order() == 0) throw std::logic_error("Jet::derivative: order-0 jet has no derivative");
  const auto& t = ctx_.tables();
  JetContext lower = ctx_.with_order(ctx_.order() - 1);
  Jet out(lower);
  const auto& src = t.deriv_src[static_cast<std::size_t>(var)];
  const auto& mul = t.deriv_mul[static_cast<std::size_t>(var)];
  for (std::size_t r = 0; r < src.size(); ++r) out.c_[r] = c_[src[r]] * mul[r];
  return out;
}

Jet Jet::truncate(int order) const {
  if (order > ctx_.order()) throw std::invalid_argument("Jet::truncate: cannot raise order");
  JetContext lower = ctx_.with_order(order);
  return Jet(lower, std::vector<double>(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(lower.size())));
}

Jet& Jet::operator+=(const Jet& b) {
  require_same(*this, b);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += b.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& b) {
  require_same(*this, b);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= b.c_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& b) { return *this = *this * b; }
Jet& Jet::operator/=(const Jet& b) { return *this = *this / b; }

Jet& Jet::operator+=(double b) {
  c_[0] += b;
  return *this;
}

Jet& Jet::operator-=(double b) {
  c_[0] -= b;
  return *this;
}

Jet& Jet::operator*=(double b) {
  for (double& v : c_) v *= b;
  return *this;
}

Jet& Jet::operator/=(double b) {
  if (b == 0.0) throw DomainError("singular division", "division of a jet by zero");
  for (double& v : c_) v /= b;
  return *this;
}

Jet operator-(Jet a) {
  for (double& v : a.c_) v = -v;
  return a;
}

Jet operator*(const Jet& a, const Jet& b) {
  require_same(a, b);
  const auto& t = a.ctx_.tables();
  Jet out(a.ctx_);
  const double* pa = a.c_.data();
  const double* pb = b.c_.data();
  for (std::size_t r = 0; r < out.c_.size(); ++r) {
    double s = 0.0;
    for (std::uint32_t k = t.pair_start[r]; k < t.pair_start[r + 1]; ++k) {
      s += pa[t.left[k]] * pb[t.right[k]];
    }
    out.c_[r] = s;
  }
  return out;
}

// q = a / b solves b * q = a rank by rank; the pair (0, r) holds b_0 q_r.
Jet operator/(const Jet& a, const Jet& b) {
  require_same(a, b);
  const double b0 = b.c_[0];
  if (b0 == 0.0) throw DomainError("singular division", "denominator vanishes at the basepoint");
  const auto& t = a.ctx_.tables();
  Jet q(a.ctx_);
  for (std::size_t r = 0; r < q.c_.size(); ++r) {
    double s = a.c_[r];
    for (std::uint32_t k = t.pair_start[r]; k < t.pair_start[r + 1]; ++k) {
      if (t.left[k] == 0) continue;
      s -= b.c_[t.left[k]] * q.c_[t.right[k]];
    }
    q.c_[r] = s / b0;
  }
  return q;
}

Jet operator/(double a, const Jet& b) { return Jet(b.context(), a) / b; }

Jet seed_variable(const JetContext& ctx, int index, double value) {
  Jet j(ctx, value);
  if (ctx.order() >= 1) j.set_coeff(MultiIndex::unit(ctx.num_vars(), index), 1.0);
  return j;
}

Jet reciprocal(const Jet& a) { return 1.0 / a; }

Jet compose(const Jet& a, std::span<const double> taylor) {
  const int n = a.order();
  if (taylor.size() < static_cast<std::size_t>(n) + 1) {
    throw std::invalid_argument("compose: Taylor series shorter than jet order");
  }
  Jet u = a;
  u.coeffs()[0] = 0.0;
  Jet res(a.context(), taylor[static_cast<std::size_t>(n)]);
  for (int k = n - 1; k >= 0; --k) {
    res = res * u;
    res += taylor[static_cast<std::size_t>(k)];
  }
  return res;
}

namespace {

// Taylor coefficients of log(1 + w) scaled: sum_{k>=1} (-1)^{k+1} w^k / k with w = u / a0.
std::vector<double> log1p_series(double a0, double head, int n) {
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = head;
  double inv = 1.0;
  for (int k = 1; k <= n; ++k) {
    inv /= a0;
    c[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) * inv / k;
  }
  return c;
}

}  // namespace

Jet exp(const Jet& a) {
  const int n = a.order();
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  double v = std::exp(a.value());
  for (int k = 0; k <= n; ++k) {
    c[static_cast<std::size_t>(k)] = v;
    v /= (k + 1);
  }
  return compose(a, c);
}

Jet log(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw DomainError("branch error", "log of a non-positive value");
  return compose(a, log1p_series(a0, std::log(a0), a.order()));
}

Jet abs_log(const Jet& a) {
  const double a0 = a.value();
  if (a0 == 0.0) throw DomainError("singular", "log|f| at a zero of f");
  return compose(a, log1p_series(a0, std::log(std::abs(a0)), a.order()));
}

Jet pow(const Jet& a, double p) {
  const double a0 = a.value();
  if (p == std::round(p) && std::abs(p) < 1e6) return pow(a, static_cast<int>(p));
  if (!(a0 > 0.0)) throw DomainError("branch error", "real power of a non-positive value");
  const int n = a.order();
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  double binom_over = p == 0.5 ? std::sqrt(a0) : std::pow(a0, p);
  for (int k = 0; k <= n; ++k) {
    c[static_cast<std::size_t>(k)] = binom_over;
    binom_over *= (p - k) / ((k + 1) * a0);
  }
  return compose(a, c);
}

Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0)) throw DomainError("branch error", "sqrt of a non-positive value");
  return pow(a, 0.5);
}

namespace {

// Derivatives of sin cycle through (sin, cos, -sin, -cos); cos starts one step later.
Jet trig(const Jet& a, int shift) {
  const int n = a.order();
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cycle[4] = {s, c, -s, -c};
  std::vector<double> coef(static_cast<std::size_t>(n) + 1);
  double fact = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k) fact *= k;
    coef[static_cast<std::size_t>(k)] = cycle[(k + shift) % 4] / fact;
  }
  return compose(a, coef);
}

}  // namespace

Jet sin(const Jet& a) { return trig(a, 0); }
Jet cos(const Jet& a) { return trig(a, 1); }

Jet pow(const Jet& a, int p) {
  if (p < 0) {
    Jet r = reciprocal(pow(a, -p));
    r.coeffs()[0] = std::pow(a.value(), p);
    return r;
  }
  Jet result(a.context(), 1.0);
  Jet base = a;
  unsigned e = static_cast<unsigned>(p);
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  result.coeffs()[0] = std::pow(a.value(), p);
  return result;
}

namespace {

// True when args[k] is exactly (value + variable k) in a context with args.size() variables.
bool is_identity_seed(std::span<const Jet> args) {
  for (std::size_t k = 0; k < args.size(); ++k) {
    const auto c = args[k].coeffs();
    if (c.size() < args.size() + 1) return false;
    for (std::size_t r = 1; r < c.size(); ++r) {
      if (c[r] != (r == k + 1 ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

Jet compose_taylor(const Jet& f, std::span<const Jet> args) {
  const int nv = f.context().num_vars();
  if (args.size() != static_cast<std::size_t>(nv)) {
    throw std::invalid_argument("compose_taylor: argument count does not match variable count");
  }
  const JetContext& out_ctx = args[0].context();
  const int top = std::min(f.order(), out_ctx.order());
  if (out_ctx.num_vars() == nv && is_identity_seed(args)) {
    Jet out(out_ctx);
    const std::size_t count = top == out_ctx.order() ? out_ctx.size() : f.context().size();
    std::copy_n(f.coeffs().begin(), count, out.coeffs().begin());
    return out;
  }
  std::vector<std::vector<Jet>> powers(static_cast<std::size_t>(nv));
  std::vector<bool> constant_arg(static_cast<std::size_t>(nv));
  for (int k = 0; k < nv; ++k) {
    Jet d = args[static_cast<std::size_t>(k)];
    d.coeffs()[0] = 0.0;
    constant_arg[static_cast<std::size_t>(k)] = std::all_of(d.coeffs().begin(), d.coeffs().end(),
                                                            [](double v) { return v == 0.0; });
    auto& pk = powers[static_cast<std::size_t>(k)];
    pk.emplace_back(out_ctx, 1.0);
    for (int e = 1; e <= top; ++e) pk.push_back(pk.back() * d);
  }
  Jet out(out_ctx);
  for (std::size_t r = 0; r < f.context().size(); ++r) {
    const MultiIndex& alpha = f.context().index(r);
    if (alpha.degree() > top) break;
    const double c = f.coeffs()[r];
    if (c == 0.0) continue;
    bool vanishes = false;
    for (int k = 0; k < nv && !vanishes; ++k) vanishes = alpha[k] > 0 && constant_arg[static_cast<std::size_t>(k)];
    if (vanishes) continue;
    Jet term(out_ctx, c);
    for (int k = 0; k < nv; ++k) {
      if (alpha[k]) term = term * powers[static_cast<std::size_t>(k)][static_cast<std::size_t>(alpha[k])];
    }
    out += term;
  }
  return out;
}

double value_of(double x) { return x; }

}  // namespace biweb
