#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stabcert/expr.hpp"
#include "stabcert/system.hpp"

using namespace stabcert;
using namespace stabcert::dsl;

namespace {

const char* const kCstr =
    "system cstr; ct sample 0.01; states x1, x2; params u = 34.288; "
    "d x1 = -50*x1 - 10*x1^2 + (10 - x1)*u; d x2 = 50*x1 - 100*x2 - x2^2;";

ParseError parse_error_of(const std::string& text) {
  try {
    parse_system(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no parse error for: " << text;
  return ParseError(0, 0, "none");
}

}  // namespace

TEST(Parse, Cstr) {
  const SystemDef s = parse_system(kCstr);
  EXPECT_EQ(s.name, "cstr");
  EXPECT_EQ(s.domain, TimeDomain::CT);
  ASSERT_EQ(s.dim(), 2u);
  ASSERT_EQ(s.params.size(), 1u);
  EXPECT_EQ(s.params[0].first, "u");
  EXPECT_EQ(s.params[0].second, 34.288);
  ASSERT_TRUE(s.sampling_time);
  EXPECT_EQ(*s.sampling_time, 0.01);
}

TEST(Parse, MinimalProgram) {
  const SystemDef s = parse_system("system s; ct; states x; dx = -x;");
  ASSERT_EQ(s.dim(), 1u);
  const double x[] = {2.5};
  EXPECT_EQ(eval_field(s, x)[0], -2.5);
  EXPECT_FALSE(s.sampling_time);
}

TEST(Parse, EquationsInAnyOrderAndComments) {
  const SystemDef s = parse_system(
      "# header\nsystem t; dt;\nstates a, b;\nd b = a; # trailing\nd a = 0.5*b;\n");
  EXPECT_EQ(s.domain, TimeDomain::DT);
  const double x[] = {1.0, 4.0};
  const Vector f = eval_field(s, x);
  EXPECT_EQ(f[0], 2.0);
  EXPECT_EQ(f[1], 1.0);
}

TEST(Parse, UndeclaredIdentifierPointsAtToken) {
  const ParseError e = parse_error_of("system s; ct; states x; dx = -y;");
  EXPECT_EQ(e.line(), 1u);
  EXPECT_EQ(e.column(), 31u);
  EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos);
}

TEST(Parse, SyntaxErrorListsExpectedTokens) {
  const ParseError e = parse_error_of("system s;\nct;\nstates x;\nd x = (x + ;");
  EXPECT_EQ(e.line(), 4u);
  EXPECT_FALSE(e.expected().empty());
}

TEST(Parse, Rejections) {
  parse_error_of("system s; ct; states x, y; d x = y;");            // missing equation
  parse_error_of("system s; ct sample 0; states x; d x = -x;");     // non-positive Ts
  parse_error_of("system s; ct sample -1; states x; d x = -x;");
  parse_error_of("system s; dt sample 0.1; states x; d x = x;");    // Ts on dt
  parse_error_of("system s; ct; states x; params x = 1; d x = -x;"); // name clash
  parse_error_of("system s; ct; states x; d x = -x; d x = x;");     // duplicate
  parse_error_of("system s; ct; states x; d x = x^x;");             // variable exponent
  parse_error_of("system s; ct; states x; d z = x;");               // unknown state
  parse_error_of("system s; ct; states x; d x = foo(x);");
}

TEST(Parse, PowerBindsTighterThanUnaryMinus) {
  const SystemDef s = parse_system("system s; ct; states x; d x = -x^2 + 2^-1;");
  const double x[] = {3.0};
  EXPECT_EQ(eval_field(s, x)[0], -9.0 + 0.5);
}

TEST(Parse, RoundTripIsStructural) {
  const char* const programs[] = {
      kCstr,
      "system f; ct; states x, y; params k = -2.5e-3; d x = sin(x)*cos(y) - exp(-x)/sqrt(1 + y^2); d y = ln(2 + x^2) + tan(y) - abs(x);",
      "system g; dt; states p; d p = -(-p)^3 - p/(1 - -p);",
  };
  for (const char* text : programs) {
    const SystemDef a = parse_system(text);
    const SystemDef b = parse_system(to_text(a));
    EXPECT_EQ(a.name, b.name);
    EXPECT_EQ(a.states, b.states);
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.sampling_time, b.sampling_time);
    ASSERT_EQ(a.field.size(), b.field.size());
    for (std::size_t i = 0; i < a.field.size(); ++i) EXPECT_EQ(a.field[i], b.field[i]) << to_text(a);
  }
}

TEST(EvalField, CstrNearEquilibrium) {
  const SystemDef s = parse_system(kCstr);
  const double x[] = {3.0, 1.117};
  const Vector f = eval_field(s, x);
  EXPECT_NEAR(f[0], 0.016, 1e-9);  // -150 - 90 + 7*34.288
}

TEST(EvalField, DomainErrorNamesComponent) {
  const SystemDef s = parse_system("system s; ct; states x, y; d x = -x; d y = ln(x);");
  const double x[] = {-1.0, 0.0};
  try {
    eval_field(s, x);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.component(), 1);
  }
  const SystemDef d = parse_system("system s; ct; states x; d x = 1/x;");
  const double z[] = {0.0};
  EXPECT_THROW(eval_field(d, z), DomainError);
  const SystemDef q = parse_system("system s; ct; states x; d x = sqrt(x);");
  const double m[] = {-1.0};
  EXPECT_THROW(eval_field(q, m), DomainError);
}

TEST(EvalField, Deterministic) {
  const SystemDef s = parse_system("system s; ct; states x, y; d x = sin(x*y) + x^3; d y = exp(y)/(1 + x^2);");
  const double x[] = {0.3, -1.7};
  const Vector a = eval_field(s, x);
  const Vector b = eval_field(s, x);
  EXPECT_EQ(a, b);
}

TEST(Differentiate, HandExamples) {
  const SystemDef s = parse_system(kCstr);
  const ExprMatrix j = jacobian_symbolic(s);
  const double x[] = {3.0, 1.117};
  const auto env = s.environment(x);
  EXPECT_NEAR(j[0][0].eval(env), -50 - 20 * 3.0 - 34.288, 1e-12);
  EXPECT_TRUE(j[0][1].is_constant(0.0));
  EXPECT_TRUE(j[1][0].is_constant(50.0));
  EXPECT_NEAR(j[1][1].eval(env), -100 - 2 * 1.117, 1e-12);

  const Expr x0 = Expr::variable("x", 0);
  EXPECT_TRUE(differentiate(Expr::constant(7.0), 0).is_constant(0.0));
  const Expr cube = differentiate(pow(x0, Expr::constant(3)), 0);
  const double at[] = {2.0};
  EXPECT_EQ(cube.eval(at), 12.0);
}

TEST(Differentiate, LinearFieldGivesConstantMatrix) {
  const SystemDef s = parse_system("system l; ct; states a, b; d a = 2*a - 3*b; d b = -a + 0.5*b;");
  const ExprMatrix j = jacobian_symbolic(s);
  EXPECT_TRUE(j[0][0].is_constant(2.0));
  EXPECT_TRUE(j[0][1].is_constant(-3.0));
  EXPECT_TRUE(j[1][0].is_constant(-1.0));
  EXPECT_TRUE(j[1][1].is_constant(0.5));
}

TEST(Differentiate, AbsRejectedOnlyWhereItMatters) {
  const SystemDef s = parse_system("system s; ct; states x, y; d x = abs(y) - x; d y = -y;");
  const Expr f0 = s.field[0];
  EXPECT_NO_THROW(differentiate(f0, 0));
  EXPECT_THROW(differentiate(f0, 1), DifferentiationError);
  try {
    jacobian_symbolic(s);
    FAIL();
  } catch (const DifferentiationError& e) {
    EXPECT_NE(std::string(e.what()).find("(0, 1)"), std::string::npos) << e.what();
  }
}

TEST(Differentiate, ElementaryFunctionsAgainstFiniteDifferences) {
  const SystemDef s = parse_system(
      "system e; ct; states x; d x = sin(x) + cos(2*x) + tan(x/3) + exp(-x) + ln(1 + x^2) + sqrt(2 + x) + x^-2 + 1/(3 + x);");
  const Expr d = differentiate(s.field[0], 0);
  for (double x : {0.3, 0.9, 1.7, -0.6}) {
    const double h = 1e-6;
    const double xp[] = {x + h}, xm[] = {x - h}, x0[] = {x};
    const double fd = (s.field[0].eval(xp) - s.field[0].eval(xm)) / (2 * h);
    EXPECT_NEAR(d.eval(x0), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

namespace {

// Random polynomial in n variables, total degree <= 4, built from nested
// sums and products so the tree shape varies.
Expr random_poly(std::mt19937_64& rng, std::size_t n, int depth) {
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 4 : 1);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_int_distribution<std::size_t> var(0, n - 1);
  switch (kind(rng)) {
    case 0: return Expr::constant(coef(rng));
    case 1: {
      const std::size_t v = var(rng);
      return Expr::variable("x" + std::to_string(v), v);
    }
    case 2: return random_poly(rng, n, depth - 1) + random_poly(rng, n, depth - 1);
    case 3: return make_node(Op::Mul, {random_poly(rng, n, depth - 1), random_poly(rng, n, depth - 1)}, Func::Sin);
    default: {
      std::uniform_int_distribution<int> e(2, 4);
      return make_node(Op::Pow, {random_poly(rng, n, 0), Expr::constant(e(rng))}, Func::Sin);
    }
  }
}

int degree_bound(const Expr& e) {
  switch (e.op()) {
    case Op::Constant: return 0;
    case Op::Variable: return 1;
    case Op::Add:
    case Op::Sub: return std::max(degree_bound(e.children()[0]), degree_bound(e.children()[1]));
    case Op::Mul: return degree_bound(e.children()[0]) + degree_bound(e.children()[1]);
    case Op::Pow: return degree_bound(e.children()[0]) * static_cast<int>(e.children()[1].value());
    default: return 99;
  }
}

}  // namespace

TEST(Differentiate, RandomPolynomialsMatchCentralDifferences) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pt(-1.5, 1.5);
  int checked = 0;
  while (checked < 1000) {
    const std::size_t n = 1 + rng() % 5;
    const Expr e = random_poly(rng, n, 3);
    if (degree_bound(e) > 4) continue;
    ++checked;
    const std::size_t slot = rng() % n;
    const Expr d = differentiate(e, slot);
    for (int p = 0; p < 100; ++p) {
      std::vector<double> x(n);
      for (double& v : x) v = pt(rng);
      const double h = 1e-6;
      std::vector<double> xp = x, xm = x;
      xp[slot] += h;
      xm[slot] -= h;
      const double fd = (e.eval(xp) - e.eval(xm)) / (2 * h);
      const double sym = d.eval(x);
      ASSERT_LE(std::abs(sym - fd), 1e-5 * std::max(1.0, std::abs(sym))) << e.to_string();
    }
  }
}

TEST(Builders, FoldConstantsAndIdentities) {
  const Expr x = Expr::variable("x", 0);
  EXPECT_TRUE((Expr::constant(2) * Expr::constant(3)).is_constant(6.0));
  EXPECT_EQ(x * Expr::constant(1), x);
  EXPECT_EQ(x + Expr::constant(0), x);
  EXPECT_TRUE((x * Expr::constant(0)).is_constant(0.0));
  EXPECT_EQ(pow(x, Expr::constant(1)), x);
  // Folding that would produce a non-finite value is left symbolic.
  EXPECT_FALSE((Expr::constant(1) / Expr::constant(0)).is_constant());
}
