#include "biweb/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "biweb/errors.hpp"

namespace biweb {

struct ExprNode {
  ExprKind kind = ExprKind::Number;
  double number = 0.0;
  int index = 0;  // variable index or integer exponent
  ExprFunc func = ExprFunc::Sqrt;
  Expr a, b;
};

namespace {

const ExprNode& node_of(const std::shared_ptr<const ExprNode>& n) {
  if (!n) throw std::logic_error("Expr: empty expression");
  return *n;
}

}  // namespace

ExprKind Expr::kind() const { return node_of(node_).kind; }
double Expr::number() const { return node_of(node_).number; }
int Expr::variable() const { return node_of(node_).index; }
ExprFunc Expr::func() const { return node_of(node_).func; }
int Expr::exponent() const { return node_of(node_).index; }
Expr Expr::lhs() const { return node_of(node_).a; }
Expr Expr::rhs() const { return node_of(node_).b; }

Expr Expr::make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Number;
  n->number = v;
  return Expr(std::move(n));
}

Expr Expr::make_variable(int index) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Variable;
  n->index = index;
  return Expr(std::move(n));
}

Expr Expr::make_unary(ExprKind kind, Expr operand) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->a = std::move(operand);
  return Expr(std::move(n));
}

Expr Expr::make_func(ExprFunc fn, Expr operand) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Func;
  n->func = fn;
  n->a = std::move(operand);
  return Expr(std::move(n));
}

Expr Expr::make_binary(ExprKind kind, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return Expr(std::move(n));
}

Expr Expr::make_pow(Expr base, int exponent) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Pow;
  n->a = std::move(base);
  n->index = exponent;
  return Expr(std::move(n));
}

const char* func_name(ExprFunc fn) {
  switch (fn) {
    case ExprFunc::Sqrt: return "sqrt";
    case ExprFunc::Exp: return "exp";
    case ExprFunc::Log: return "log";
    case ExprFunc::Sin: return "sin";
    case ExprFunc::Cos: return "cos";
  }
  return "?";
}

// ---------------------------------------------------------------- parser

namespace {

constexpr int kMaxDepth = 256;

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> vars) : src_(src), vars_(vars) {}

  Expr run() {
    skip_ws();
    if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
    Expr e = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return e;
  }

 private:
  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxDepth) throw ParseError("expression nested too deeply", p.pos_);
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    DepthGuard g(*this);
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::make_binary(ExprKind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::make_binary(ExprKind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::make_binary(ExprKind::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = Expr::make_binary(ExprKind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    DepthGuard g(*this);
    if (accept('-')) return Expr::make_unary(ExprKind::Neg, unary());
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
      negative = src_[pos_] == '-';
      ++pos_;
      skip_ws();
    }
    if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      if (pos_ >= src_.size()) throw ParseError("expected integer exponent", pos_);
      throw ParseError("exponent must be an integer literal", start);
    }
    std::size_t end = pos_;
    while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    if (end < src_.size() && (src_[end] == '.' || src_[end] == 'e' || src_[end] == 'E')) {
      throw ParseError("non-integer exponent", start);
    }
    if (end - pos_ > 6) throw ParseError("exponent too large", start);
    int value = std::atoi(std::string(src_.substr(pos_, end - pos_)).c_str());
    pos_ = end;
    return Expr::make_pow(base, negative ? -value : value);
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    std::size_t p = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p, ++n;
      return n;
    };
    std::size_t n = digits();
    if (p < src_.size() && src_[p] == '.') {
      ++p;
      n += digits();
    }
    if (n == 0) throw ParseError("malformed number", start);
    if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
      if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
        p = q;
        digits();
      }
    }
    const std::string text(src_.substr(start, p - start));
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v)) {
      throw ParseError("malformed number", start);
    }
    pos_ = p;
    return Expr::make_number(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(src_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      static const std::pair<const char*, ExprFunc> kFuncs[] = {
          {"sqrt", ExprFunc::Sqrt}, {"exp", ExprFunc::Exp}, {"log", ExprFunc::Log},
          {"sin", ExprFunc::Sin},   {"cos", ExprFunc::Cos}};
      for (const auto& [fname, fn] : kFuncs) {
        if (name == fname) {
          ++pos_;
          Expr arg = expr();
          if (!accept(')')) throw ParseError("expected ')'", pos_);
          return Expr::make_func(fn, arg);
        }
      }
      throw ParseError("unknown function '" + name + "'", start);
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) return Expr::make_variable(static_cast<int>(i));
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  std::string_view src_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

Expr parse(std::string_view source, std::span<const std::string> variables) {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    for (std::size_t j = i + 1; j < variables.size(); ++j) {
      if (variables[i] == variables[j]) {
        throw InputError("duplicate variable name '" + variables[i] + "'");
      }
    }
  }
  return Parser(source, variables).run();
}

Expr parse(std::string_view source, std::initializer_list<std::string> variables) {
  std::vector<std::string> v(variables);
  return parse(source, std::span<const std::string>(v));
}

// ---------------------------------------------------------------- evaluation

namespace {

double real_fn(ExprFunc fn, double x) {
  switch (fn) {
    case ExprFunc::Sqrt:
      if (!(x > 0.0)) throw DomainError("branch error", "sqrt of a non-positive value");
      return std::sqrt(x);
    case ExprFunc::Exp: return std::exp(x);
    case ExprFunc::Log:
      if (!(x > 0.0)) throw DomainError("branch error", "log of a non-positive value");
      return std::log(x);
    case ExprFunc::Sin: return std::sin(x);
    case ExprFunc::Cos: return std::cos(x);
  }
  throw std::logic_error("unknown function");
}

Jet jet_fn(ExprFunc fn, const Jet& x) {
  switch (fn) {
    case ExprFunc::Sqrt: return sqrt(x);
    case ExprFunc::Exp: return exp(x);
    case ExprFunc::Log: return log(x);
    case ExprFunc::Sin: return sin(x);
    case ExprFunc::Cos: return cos(x);
  }
  throw std::logic_error("unknown function");
}

double real_div(double a, double b) {
  if (b == 0.0) throw DomainError("singular division", "division by zero");
  return a / b;
}

double real_pow(double a, int p) {
  if (p < 0 && a == 0.0) throw DomainError("singular division", "negative power of zero");
  return std::pow(a, p);
}

template <class T, class Ops>
T eval_impl(const Expr& e, std::span<const T> values, const Ops& ops) {
  switch (e.kind()) {
    case ExprKind::Number: return ops.constant(e.number());
    case ExprKind::Variable: {
      const auto i = static_cast<std::size_t>(e.variable());
      if (i >= values.size()) throw InputError("binding does not cover variable #" + std::to_string(i));
      return values[i];
    }
    case ExprKind::Neg: return -eval_impl(e.lhs(), values, ops);
    case ExprKind::Func: return ops.fn(e.func(), eval_impl(e.lhs(), values, ops));
    case ExprKind::Add: return eval_impl(e.lhs(), values, ops) + eval_impl(e.rhs(), values, ops);
    case ExprKind::Sub: return eval_impl(e.lhs(), values, ops) - eval_impl(e.rhs(), values, ops);
    case ExprKind::Mul: return eval_impl(e.lhs(), values, ops) * eval_impl(e.rhs(), values, ops);
    case ExprKind::Div: return ops.div(eval_impl(e.lhs(), values, ops), eval_impl(e.rhs(), values, ops));
    case ExprKind::Pow: return ops.pow(eval_impl(e.lhs(), values, ops), e.exponent());
  }
  throw std::logic_error("unknown expression node");
}

struct RealOps {
  double constant(double v) const { return v; }
  double fn(ExprFunc f, double x) const { return real_fn(f, x); }
  double div(double a, double b) const { return real_div(a, b); }
  double pow(double a, int p) const { return real_pow(a, p); }
};

struct JetOps {
  JetContext ctx;
  Jet constant(double v) const { return Jet(ctx, v); }
  Jet fn(ExprFunc f, const Jet& x) const { return jet_fn(f, x); }
  Jet div(const Jet& a, const Jet& b) const { return a / b; }
  Jet pow(const Jet& a, int p) const { return biweb::pow(a, p); }
};

}  // namespace

double eval_real(const Expr& e, std::span<const double> values) {
  return eval_impl<double>(e, values, RealOps{});
}

Jet eval_jet(const Expr& e, std::span<const Jet> values) {
  if (values.empty()) throw InputError("eval_jet needs at least one bound jet to fix the context");
  return eval_impl<Jet>(e, values, JetOps{values[0].context()});
}

// ---------------------------------------------------------------- printing

namespace {

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    case ExprKind::Pow: return 4;
    default: return 5;
  }
}

void print(const Expr& e, std::span<const std::string> vars, std::string& out);

void print_child(const Expr& e, int min_prec, std::span<const std::string> vars, std::string& out) {
  if (precedence(e.kind()) < min_prec) {
    out += '(';
    print(e, vars, out);
    out += ')';
  } else {
    print(e, vars, out);
  }
}

void print(const Expr& e, std::span<const std::string> vars, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.number());
      out += buf;
      return;
    }
    case ExprKind::Variable: {
      const auto i = static_cast<std::size_t>(e.variable());
      out += i < vars.size() ? vars[i] : "$" + std::to_string(i);
      return;
    }
    case ExprKind::Neg:
      out += '-';
      print_child(e.lhs(), 3, vars, out);
      return;
    case ExprKind::Func:
      out += func_name(e.func());
      out += '(';
      print(e.lhs(), vars, out);
      out += ')';
      return;
    case ExprKind::Pow:
      print_child(e.lhs(), 5, vars, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    default: {
      const int p = precedence(e.kind());
      static const char* kOps[] = {"", "", "", "", " + ", " - ", " * ", " / "};
      print_child(e.lhs(), p, vars, out);
      out += kOps[static_cast<int>(e.kind())];
      print_child(e.rhs(), p + 1, vars, out);
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e, std::span<const std::string> variables) {
  std::string out;
  print(e, variables, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::Number: return a.number() == b.number();
    case ExprKind::Variable: return a.variable() == b.variable();
    case ExprKind::Neg: return structurally_equal(a.lhs(), b.lhs());
    case ExprKind::Func: return a.func() == b.func() && structurally_equal(a.lhs(), b.lhs());
    case ExprKind::Pow: return a.exponent() == b.exponent() && structurally_equal(a.lhs(), b.lhs());
    default: return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
  }
}

}  // namespace biweb
