#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stabcert/error.hpp"
#include "stabcert/linearization.hpp"
#include "stabcert/lp_stability.hpp"
#include "stabcert/lyapunov.hpp"
#include "stabcert/matrix.hpp"
#include "stabcert/system.hpp"

namespace stabcert::analyzer {

enum class Conclusion { AsymptoticallyStable, UnstableLinearization, Inconclusive };
enum class Method { LP, Lyapunov, Eigen };

const char* to_string(Conclusion c) noexcept;
const char* to_string(Method m) noexcept;

// A kernel failure inside one stage of the cascade.
class MethodError : public Error {
 public:
  MethodError(Method m, const std::string& what);
  Method method() const noexcept { return method_; }

 private:
  Method method_;
};

// Unverified equilibrium, bad domain/discretization combination, ...
class AnalysisError : public Error {
 public:
  using Error::Error;
};

struct AnalyzeOptions {
  bool run_baseline = true;
  bool run_eigen = true;
  bool explain = false;  // run every stage even after a decision
  lyapunov::BaselineMethod baseline_method = lyapunov::BaselineMethod::Schur;
};

struct EigenSummary {
  double value = 0.0;  // spectral abscissa (CT) or radius (DT)
  bool strictly_stable = false;
  bool strictly_unstable = false;
};

struct MethodCost {
  Method method;
  double seconds = 0.0;
  std::size_t memory_bytes = 0;
};

struct LinearizationInfo {
  std::string system;
  Vector equilibrium;
  double residual = 0.0;
  bool verified = false;
  int newton_iterations = 0;
  linearization::JacobianMethod jacobian_method = linearization::JacobianMethod::Symbolic;
  bool jacobian_crosscheck_ok = true;
  std::optional<linearization::Discretization> discretization;
  std::optional<double> sampling_time;
};

struct StabilityVerdict {
  TimeDomain domain = TimeDomain::CT;
  Matrix a;
  std::optional<LinearizationInfo> linearization;
  lp::LpOutcome lp;
  std::optional<lyapunov::BaselineVerdict> baseline;
  std::optional<EigenSummary> eigen;
  Conclusion conclusion = Conclusion::Inconclusive;
  std::optional<Method> concluding_method;
  std::vector<MethodCost> costs;  // in execution order
};

StabilityVerdict analyze_matrix(const Matrix& a, TimeDomain domain, const AnalyzeOptions& opts = {});

struct SystemOptions {
  AnalyzeOptions analyze;
  std::optional<TimeDomain> domain;  // default: the system's own domain
  // CT systems analysed in DT: euler or zoh with the system's sampling time.
  std::optional<linearization::Discretization> discretization;
  bool allow_unverified = false;
};

StabilityVerdict analyze_system(const dsl::SystemDef& sys, std::span<const double> guess,
                                const SystemOptions& opts = {});

// One-line human summary, e.g. "AS via LP (eps=0.0123)".
std::string summary_line(const StabilityVerdict& v);

// Structured report with a fixed field order; see docs/report-schema.md.
nlohmann::ordered_json to_json(const StabilityVerdict& v);

// Replaces every timing field with 0 so reports can be compared byte-wise.
void mask_timings(nlohmann::ordered_json& report);

}  // namespace stabcert::analyzer
