#include "stabcert/expr.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace stabcert::dsl {

struct Node {
  Op op = Op::Constant;
  double value = 0.0;
  std::string name;
  std::size_t slot = 0;
  Func func = Func::Sin;
  std::vector<Expr> children;
};

std::string_view func_name(Func f) noexcept {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
  }
  return "?";
}

Expr make_node(Op op, std::vector<Expr> children, Func func) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->func = func;
  n->children = std::move(children);
  return Expr(std::move(n));
}

Expr Expr::constant(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->value = v;
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name, std::size_t slot) {
  auto n = std::make_shared<Node>();
  n->op = Op::Variable;
  n->name = std::move(name);
  n->slot = slot;
  return Expr(std::move(n));
}

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
std::size_t Expr::slot() const { return node_->slot; }
Func Expr::func() const { return node_->func; }
std::span<const Expr> Expr::children() const noexcept {
  return {node_->children.data(), node_->children.size()};
}

bool Expr::depends_on(std::size_t slot) const {
  if (op() == Op::Variable) return node_->slot == slot;
  for (const Expr& c : children())
    if (c.depends_on(slot)) return true;
  return false;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.valid() || !b.valid()) return false;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.op != y.op || x.children.size() != y.children.size()) return false;
  switch (x.op) {
    case Op::Constant:
      if (x.value != y.value) return false;
      break;
    case Op::Variable:
      if (x.slot != y.slot || x.name != y.name) return false;
      break;
    case Op::Call:
      if (x.func != y.func) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < x.children.size(); ++i)
    if (!(x.children[i] == y.children[i])) return false;
  return true;
}

namespace {

double apply(Func f, double v) {
  switch (f) {
    case Func::Sin: return std::sin(v);
    case Func::Cos: return std::cos(v);
    case Func::Tan: return std::tan(v);
    case Func::Exp: return std::exp(v);
    case Func::Ln:
      if (!(v > 0.0)) throw DomainError("ln of non-positive value");
      return std::log(v);
    case Func::Sqrt:
      if (v < 0.0) throw DomainError("sqrt of negative value");
      return std::sqrt(v);
    case Func::Abs: return std::abs(v);
  }
  return 0.0;
}

double apply_pow(double base, double exponent) {
  if (base == 0.0 && exponent < 0.0) throw DomainError("division by zero in negative power");
  if (base < 0.0 && exponent != std::floor(exponent)) {
    throw DomainError("negative base raised to a non-integer power");
  }
  return std::pow(base, exponent);
}

double apply_div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return a / b;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Folds only when the result is an ordinary finite number.
bool fold(double v, Expr& out) {
  if (!std::isfinite(v)) return false;
  out = Expr::constant(v);
  return true;
}

void print(const Expr& e, std::ostringstream& out) {
  switch (e.op()) {
    case Op::Constant:
      if (std::signbit(e.value())) {
        out << "(-" << format_number(-e.value()) << ")";
      } else {
        out << format_number(e.value());
      }
      return;
    case Op::Variable:
      out << e.name();
      return;
    case Op::Neg:
      out << "(-";
      print(e.children()[0], out);
      out << ")";
      return;
    case Op::Call:
      out << func_name(e.func()) << "(";
      print(e.children()[0], out);
      out << ")";
      return;
    default:
      break;
  }
  const char* sym = "+";
  switch (e.op()) {
    case Op::Add: sym = " + "; break;
    case Op::Sub: sym = " - "; break;
    case Op::Mul: sym = " * "; break;
    case Op::Div: sym = " / "; break;
    case Op::Pow: sym = " ^ "; break;
    default: break;
  }
  out << "(";
  print(e.children()[0], out);
  out << sym;
  print(e.children()[1], out);
  out << ")";
}

}  // namespace

double Expr::eval(std::span<const double> env) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Constant: return n.value;
    case Op::Variable: return env[n.slot];
    case Op::Add: return n.children[0].eval(env) + n.children[1].eval(env);
    case Op::Sub: return n.children[0].eval(env) - n.children[1].eval(env);
    case Op::Mul: return n.children[0].eval(env) * n.children[1].eval(env);
    case Op::Div: return apply_div(n.children[0].eval(env), n.children[1].eval(env));
    case Op::Pow: return apply_pow(n.children[0].eval(env), n.children[1].value());
    case Op::Neg: return -n.children[0].eval(env);
    case Op::Call: return apply(n.func, n.children[0].eval(env));
  }
  return 0.0;
}

std::string Expr::to_string() const {
  std::ostringstream out;
  print(*this, out);
  return out.str();
}

Expr operator+(const Expr& a, const Expr& b) {
  Expr out;
  if (a.is_constant() && b.is_constant() && fold(a.value() + b.value(), out)) return out;
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return make_node(Op::Add, {a, b}, Func::Sin);
}

Expr operator-(const Expr& a, const Expr& b) {
  Expr out;
  if (a.is_constant() && b.is_constant() && fold(a.value() - b.value(), out)) return out;
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return make_node(Op::Sub, {a, b}, Func::Sin);
}

Expr operator*(const Expr& a, const Expr& b) {
  Expr out;
  if (a.is_constant() && b.is_constant() && fold(a.value() * b.value(), out)) return out;
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return make_node(Op::Mul, {a, b}, Func::Sin);
}

Expr operator/(const Expr& a, const Expr& b) {
  Expr out;
  if (a.is_constant() && b.is_constant() && b.value() != 0.0 && fold(a.value() / b.value(), out)) {
    return out;
  }
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
  return make_node(Op::Div, {a, b}, Func::Sin);
}

Expr operator-(const Expr& a) {
  Expr out;
  if (a.is_constant() && fold(-a.value(), out)) return out;
  return make_node(Op::Neg, {a}, Func::Sin);
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (!exponent.is_constant()) throw InvalidArgument("exponent must be a constant");
  if (exponent.value() == 0.0) return Expr::constant(1.0);
  if (exponent.value() == 1.0) return base;
  Expr out;
  if (base.is_constant()) {
    try {
      if (fold(apply_pow(base.value(), exponent.value()), out)) return out;
    } catch (const DomainError&) {
    }
  }
  return make_node(Op::Pow, {base, exponent}, Func::Sin);
}

Expr call(Func f, const Expr& arg) {
  Expr out;
  if (arg.is_constant()) {
    try {
      if (fold(apply(f, arg.value()), out)) return out;
    } catch (const DomainError&) {
    }
  }
  return make_node(Op::Call, {arg}, f);
}

Expr differentiate(const Expr& e, std::size_t slot) {
  if (!e.depends_on(slot)) return Expr::constant(0.0);

  auto kids = e.children();
  switch (e.op()) {
    case Op::Constant: return Expr::constant(0.0);
    case Op::Variable: return Expr::constant(1.0);
    case Op::Add: return differentiate(kids[0], slot) + differentiate(kids[1], slot);
    case Op::Sub: return differentiate(kids[0], slot) - differentiate(kids[1], slot);
    case Op::Neg: return -differentiate(kids[0], slot);
    case Op::Mul: {
      const Expr& a = kids[0];
      const Expr& b = kids[1];
      return differentiate(a, slot) * b + a * differentiate(b, slot);
    }
    case Op::Div: {
      const Expr& a = kids[0];
      const Expr& b = kids[1];
      return (differentiate(a, slot) * b - a * differentiate(b, slot)) / pow(b, Expr::constant(2.0));
    }
    case Op::Pow: {
      const double c = kids[1].value();
      return Expr::constant(c) * pow(kids[0], Expr::constant(c - 1.0)) * differentiate(kids[0], slot);
    }
    case Op::Call: {
      const Expr& u = kids[0];
      const Expr du = differentiate(u, slot);
      switch (e.func()) {
        case Func::Sin: return call(Func::Cos, u) * du;
        case Func::Cos: return -call(Func::Sin, u) * du;
        case Func::Tan: return du / pow(call(Func::Cos, u), Expr::constant(2.0));
        case Func::Exp: return call(Func::Exp, u) * du;
        case Func::Ln: return du / u;
        case Func::Sqrt: return du / (Expr::constant(2.0) * call(Func::Sqrt, u));
        case Func::Abs: throw DifferentiationError("abs has no symbolic derivative");
      }
      break;
    }
  }
  throw DifferentiationError("unsupported expression node");
}

}  // namespace stabcert::dsl
