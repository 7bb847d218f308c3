#pragma once

// A small language of smooth expressions used to declare web models.
//
//   expr   := term (("+" | "-") term)*
//   term   := unary (("*" | "/") unary)*
//   unary  := "-" unary | power
//   power  := atom ("^" ["-"] integer)?
//   atom   := number | ident | ident "(" expr ")" | "(" expr ")"
//
// Functions: sqrt exp log sin cos. Identifiers resolve against the variable
// list given to parse(); named parameters are ordinary variables whose values
// are bound as constants at evaluation time.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biweb/jet.hpp"

namespace biweb {

enum class ExprKind { Number, Variable, Neg, Func, Add, Sub, Mul, Div, Pow };
enum class ExprFunc { Sqrt, Exp, Log, Sin, Cos };

struct ExprNode;

class Expr {
 public:
  Expr() = default;

  ExprKind kind() const;
  double number() const;
  int variable() const;
  ExprFunc func() const;
  int exponent() const;
  Expr lhs() const;
  Expr rhs() const;

  bool empty() const noexcept { return !node_; }

  static Expr make_number(double v);
  static Expr make_variable(int index);
  static Expr make_unary(ExprKind kind, Expr operand);
  static Expr make_func(ExprFunc fn, Expr operand);
  static Expr make_binary(ExprKind kind, Expr a, Expr b);
  static Expr make_pow(Expr base, int exponent);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

/// Parse `source` with identifiers resolved against `variables`.
/// Throws ParseError (with a byte offset) or InputError.
Expr parse(std::string_view source, std::span<const std::string> variables);
Expr parse(std::string_view source, std::initializer_list<std::string> variables);

/// Values are positional, matching the variable list used at parse time.
double eval_real(const Expr& e, std::span<const double> values);
Jet eval_jet(const Expr& e, std::span<const Jet> values);

/// Minimal-parenthesis rendering that re-parses to the same tree.
std::string to_string(const Expr& e, std::span<const std::string> variables);

bool structurally_equal(const Expr& a, const Expr& b);

const char* func_name(ExprFunc fn);

/// Names bound to values, in the order the expressions were parsed against.
template <class T>
struct VarBinding {
  std::vector<std::string> names;
  std::vector<T> values;
};

}  // namespace biweb
