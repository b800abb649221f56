#include "stabcert/system.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace stabcert {

const char* to_string(TimeDomain d) noexcept { return d == TimeDomain::CT ? "ct" : "dt"; }

TimeDomain parse_time_domain(const std::string& s) {
  if (s == "ct") return TimeDomain::CT;
  if (s == "dt") return TimeDomain::DT;
  throw InvalidArgument("time domain must be 'ct' or 'dt', got '" + s + "'");
}

}  // namespace stabcert

namespace stabcert::dsl {

namespace {

std::string format_parse_error(std::size_t line, std::size_t column, const std::string& message,
                               const std::vector<std::string>& expected) {
  std::ostringstream out;
  out << line << ":" << column << ": " << message;
  if (!expected.empty()) {
    out << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) out << (i + 1 == expected.size() ? " or " : ", ");
      out << expected[i];
    }
    out << ")";
  }
  return out.str();
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

enum class Tok { Ident, Number, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t k) {
    for (std::size_t m = 0; m < k; ++m) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      t.kind = Tok::Number;
      t.text = src.substr(i, j - i);
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (res.ec != std::errc() || !std::isfinite(t.number)) {
        throw ParseError(line, col, "invalid number '" + t.text + "'");
      }
      advance(j - i);
    } else if (std::string_view(";,=+-*/^()").find(c) != std::string_view::npos) {
      t.kind = Tok::Symbol;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

const std::map<std::string, Func, std::less<>>& functions() {
  static const std::map<std::string, Func, std::less<>> table = {
      {"sin", Func::Sin}, {"cos", Func::Cos},   {"tan", Func::Tan}, {"exp", Func::Exp},
      {"ln", Func::Ln},   {"sqrt", Func::Sqrt}, {"abs", Func::Abs}};
  return table;
}

bool reserved(const std::string& word) {
  static const char* const words[] = {"system", "ct", "dt", "sample", "states", "params"};
  for (const char* w : words)
    if (word == w) return true;
  return functions().count(word) > 0;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  SystemDef run() {
    SystemDef sys;
    keyword("system");
    sys.name = identifier("system name").text;
    symbol(";");

    const Token& dom = peek();
    if (dom.kind == Tok::Ident && dom.text == "ct") {
      next();
      sys.domain = TimeDomain::CT;
      if (peek().kind == Tok::Ident && peek().text == "sample") {
        next();
        const Token& at = peek();
        double ts = signed_number("sampling time");
        if (!(ts > 0.0)) throw ParseError(at.line, at.column, "sampling time must be positive");
        sys.sampling_time = ts;
      }
    } else if (dom.kind == Tok::Ident && dom.text == "dt") {
      next();
      sys.domain = TimeDomain::DT;
      if (peek().kind == Tok::Ident && peek().text == "sample") {
        throw ParseError(peek().line, peek().column, "a sampling time applies to ct systems only");
      }
    } else {
      fail(dom, "expected time domain", {"'ct'", "'dt'"});
    }
    symbol(";");

    keyword("states");
    for (;;) {
      const Token& t = identifier("state name");
      declare(t);
      sys.states.push_back(t.text);
      if (!accept(",")) break;
    }
    symbol(";");

    if (peek().kind == Tok::Ident && peek().text == "params") {
      next();
      for (;;) {
        const Token& t = identifier("parameter name");
        declare(t);
        symbol("=");
        sys.params.emplace_back(t.text, signed_number("parameter value"));
        if (!accept(",")) break;
      }
      symbol(";");
    }

    n_states_ = sys.states.size();
    for (std::size_t i = 0; i < sys.states.size(); ++i) slots_[sys.states[i]] = i;
    for (std::size_t i = 0; i < sys.params.size(); ++i) slots_[sys.params[i].first] = n_states_ + i;

    std::vector<Expr> field(n_states_);
    while (peek().kind != Tok::End) {
      const Token& head = peek();
      if (head.kind != Tok::Ident) fail(head, "expected an equation", {"'d <state>'"});
      next();
      const Token* target = &head;
      std::string state;
      if (head.text == "d" && peek().kind == Tok::Ident) {
        target = &peek();
        state = next().text;
      } else if (head.text.size() > 1 && head.text[0] == 'd') {
        state = head.text.substr(1);
      } else {
        fail(head, "expected an equation", {"'d <state>'"});
      }
      auto it = std::find(sys.states.begin(), sys.states.end(), state);
      if (it == sys.states.end()) {
        throw ParseError(target->line, target->column, "equation for undeclared state '" + state + "'");
      }
      const auto idx = static_cast<std::size_t>(it - sys.states.begin());
      if (field[idx].valid()) {
        throw ParseError(target->line, target->column, "duplicate equation for state '" + state + "'");
      }
      symbol("=");
      field[idx] = expression();
      symbol(";");
    }
    for (std::size_t i = 0; i < n_states_; ++i) {
      if (!field[i].valid()) {
        std::ostringstream msg;
        msg << "dimension mismatch: " << n_states_ << " states but no equation for '" << sys.states[i]
            << "'";
        throw ParseError(peek().line, peek().column, msg.str());
      }
    }
    sys.field = std::move(field);
    return sys;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg, std::vector<std::string> expected = {}) {
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.column, msg + ", found " + found, std::move(expected));
  }

  void keyword(const char* word) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || t.text != word) fail(t, std::string("expected '") + word + "'", {std::string("'") + word + "'"});
    next();
  }

  void symbol(const char* s) {
    const Token& t = peek();
    if (t.kind != Tok::Symbol || t.text != s) fail(t, std::string("expected '") + s + "'", {std::string("'") + s + "'"});
    next();
  }

  bool accept(const char* s) {
    if (peek().kind == Tok::Symbol && peek().text == s) {
      next();
      return true;
    }
    return false;
  }

  const Token& identifier(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail(t, std::string("expected ") + what, {"identifier"});
    return next();
  }

  double signed_number(const char* what) {
    bool negative = accept("-");
    if (!negative) accept("+");
    const Token& t = peek();
    if (t.kind != Tok::Number) fail(t, std::string("expected ") + what, {"number"});
    next();
    return negative ? -t.number : t.number;
  }

  void declare(const Token& t) {
    if (reserved(t.text)) throw ParseError(t.line, t.column, "'" + t.text + "' is a reserved word");
    if (!declared_.insert(t.text).second) {
      throw ParseError(t.line, t.column, "'" + t.text + "' is declared more than once");
    }
  }

  Expr expression() {
    Expr lhs = term();
    for (;;) {
      if (accept("+")) {
        lhs = make_node(Op::Add, {lhs, term()}, Func::Sin);
      } else if (accept("-")) {
        lhs = make_node(Op::Sub, {lhs, term()}, Func::Sin);
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept("*")) {
        lhs = make_node(Op::Mul, {lhs, unary()}, Func::Sin);
      } else if (accept("/")) {
        lhs = make_node(Op::Div, {lhs, unary()}, Func::Sin);
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept("-")) {
      Expr operand = unary();
      if (operand.is_constant()) return Expr::constant(-operand.value());
      return make_node(Op::Neg, {operand}, Func::Sin);
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept("^")) return base;
    const Token& at = peek();
    Expr exponent = unary();
    for (const auto& [name, slot] : slots_) {
      if (exponent.depends_on(slot)) {
        throw ParseError(at.line, at.column, "exponent must be a numeric constant, not depend on '" + name + "'");
      }
    }
    double value = 0.0;
    try {
      value = exponent.eval({});
    } catch (const DomainError& e) {
      throw ParseError(at.line, at.column, std::string("exponent: ") + e.what());
    }
    if (!std::isfinite(value)) throw ParseError(at.line, at.column, "exponent is not finite");
    return make_node(Op::Pow, {base, Expr::constant(value)}, Func::Sin);
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      return Expr::constant(t.number);
    }
    if (t.kind == Tok::Symbol && t.text == "(") {
      next();
      Expr inner = expression();
      symbol(")");
      return inner;
    }
    if (t.kind == Tok::Ident) {
      auto fn = functions().find(t.text);
      if (fn != functions().end()) {
        next();
        symbol("(");
        Expr arg = expression();
        symbol(")");
        return make_node(Op::Call, {arg}, fn->second);
      }
      auto it = slots_.find(t.text);
      if (it == slots_.end()) throw ParseError(t.line, t.column, "undeclared identifier '" + t.text + "'");
      next();
      return Expr::variable(t.text, it->second);
    }
    fail(t, "expected an expression", {"number", "identifier", "'('", "'-'"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t n_states_ = 0;
  std::map<std::string, std::size_t> slots_;
  std::set<std::string> declared_;
};

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message,
                       std::vector<std::string> expected)
    : Error(format_parse_error(line, column, message, expected)),
      line_(line),
      column_(column),
      message_(message),
      expected_(std::move(expected)) {}

std::vector<double> SystemDef::environment(std::span<const double> x) const {
  if (x.size() != states.size()) throw InvalidArgument("state vector has the wrong dimension");
  std::vector<double> env(x.begin(), x.end());
  env.reserve(states.size() + params.size());
  for (const auto& [name, value] : params) env.push_back(value);
  return env;
}

SystemDef parse_system(const std::string& text) { return Parser(text).run(); }

SystemDef parse_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open system file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

std::string to_text(const SystemDef& sys) {
  std::ostringstream out;
  out << "system " << sys.name << ";\n" << to_string(sys.domain);
  if (sys.sampling_time) out << " sample " << format_number(*sys.sampling_time);
  out << ";\nstates ";
  for (std::size_t i = 0; i < sys.states.size(); ++i) out << (i ? ", " : "") << sys.states[i];
  out << ";\n";
  if (!sys.params.empty()) {
    out << "params ";
    for (std::size_t i = 0; i < sys.params.size(); ++i) {
      out << (i ? ", " : "") << sys.params[i].first << " = " << format_number(sys.params[i].second);
    }
    out << ";\n";
  }
  for (std::size_t i = 0; i < sys.states.size(); ++i) {
    out << "d " << sys.states[i] << " = " << sys.field[i].to_string() << ";\n";
  }
  return out.str();
}

Vector eval_field(const SystemDef& sys, std::span<const double> x) {
  const std::vector<double> env = sys.environment(x);
  Vector out(sys.dim());
  for (std::size_t i = 0; i < sys.dim(); ++i) {
    try {
      out[i] = sys.field[i].eval(env);
    } catch (const DomainError& e) {
      std::ostringstream msg;
      msg << "component " << i << " (" << sys.states[i] << "): " << e.what();
      throw DomainError(msg.str(), static_cast<int>(i));
    }
  }
  return out;
}

ExprMatrix jacobian_symbolic(const SystemDef& sys) {
  const std::size_t n = sys.dim();
  ExprMatrix jac(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      try {
        jac[i][j] = differentiate(sys.field[i], j);
      } catch (const DifferentiationError& e) {
        std::ostringstream msg;
        msg << "jacobian entry (" << i << ", " << j << "): " << e.what();
        throw DifferentiationError(msg.str());
      }
    }
  }
  return jac;
}

Matrix evaluate(const ExprMatrix& m, std::span<const double> env) {
  const std::size_t n = m.size();
  Matrix out(n, n == 0 ? 1 : m[0].size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) out(i, j) = m[i][j].eval(env);
  return out;
}

}  // namespace stabcert::dsl
