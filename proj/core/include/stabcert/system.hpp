#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stabcert/error.hpp"
#include "stabcert/expr.hpp"
#include "stabcert/matrix.hpp"

namespace stabcert {

enum class TimeDomain { CT, DT };

const char* to_string(TimeDomain d) noexcept;
TimeDomain parse_time_domain(const std::string& s);

}  // namespace stabcert

namespace stabcert::dsl {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message,
             std::vector<std::string> expected = {});

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
  std::vector<std::string> expected_;
};

// A parsed autonomous system x+ = f(x). Inputs are frozen into params.
// Evaluation environments hold the n states followed by the parameters.
struct SystemDef {
  std::string name;
  TimeDomain domain = TimeDomain::CT;
  std::vector<std::string> states;
  std::vector<std::pair<std::string, double>> params;  // declaration order
  std::vector<Expr> field;                            // field[i] = f_i, ordered like states
  std::optional<double> sampling_time;                // CT only

  std::size_t dim() const noexcept { return states.size(); }
  std::vector<double> environment(std::span<const double> x) const;
};

SystemDef parse_system(const std::string& text);
SystemDef parse_system_file(const std::string& path);

// Canonical text form; parse_system(to_text(s)) reproduces s structurally.
std::string to_text(const SystemDef& sys);

// Throws DomainError tagged with the failing component index.
Vector eval_field(const SystemDef& sys, std::span<const double> x);

using ExprMatrix = std::vector<std::vector<Expr>>;

// Entry (i, j) = d f_i / d x_j. Throws DifferentiationError naming (i, j).
ExprMatrix jacobian_symbolic(const SystemDef& sys);

Matrix evaluate(const ExprMatrix& m, std::span<const double> env);

}  // namespace stabcert::dsl
