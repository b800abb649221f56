#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stabcert/error.hpp"

namespace stabcert::dsl {

enum class Op { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Func { Sin, Cos, Tan, Exp, Ln, Sqrt, Abs };

std::string_view func_name(Func f) noexcept;

// Evaluation hit ln of a non-positive value, division by zero, etc.
// component is the vector-field row when known.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, int component = -1) : Error(what), component_(component) {}
  int component() const noexcept { return component_; }

 private:
  int component_;
};

// The expression has no symbolic derivative (abs nodes).
class DifferentiationError : public Error {
 public:
  using Error::Error;
};

struct Node;

// Immutable expression tree with shared subtrees. Variables refer to a slot in
// an evaluation environment; a system lays out states first, then parameters.
class Expr {
 public:
  Expr() = default;

  static Expr constant(double v);
  static Expr variable(std::string name, std::size_t slot);

  bool valid() const noexcept { return node_ != nullptr; }
  Op op() const noexcept;
  double value() const;                // Constant
  const std::string& name() const;     // Variable
  std::size_t slot() const;            // Variable
  Func func() const;                   // Call
  std::span<const Expr> children() const noexcept;

  bool is_constant() const noexcept { return valid() && op() == Op::Constant; }
  bool is_constant(double v) const noexcept { return is_constant() && value() == v; }
  bool depends_on(std::size_t slot) const;

  double eval(std::span<const double> env) const;
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  friend Expr make_node(Op op, std::vector<Expr> children, Func func);
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Unsimplified node; the parser uses this to keep the tree as written.
Expr make_node(Op op, std::vector<Expr> children, Func func);

// Builders fold constants and drop 0/1 identities; nothing else is rewritten.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
// exponent must be a Constant node.
Expr pow(const Expr& base, const Expr& exponent);
Expr call(Func f, const Expr& arg);

// Exact partial derivative with respect to the variable in `slot`.
Expr differentiate(const Expr& e, std::size_t slot);

}  // namespace stabcert::dsl
