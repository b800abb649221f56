#include "stabcert/analyzer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "stabcert/embedding.hpp"
#include "stabcert/linalg.hpp"
#include "stabcert/memory.hpp"
#include "stabcert/settings.hpp"

namespace stabcert::analyzer {

const char* to_string(Conclusion c) noexcept {
  switch (c) {
    case Conclusion::AsymptoticallyStable: return "asymptotically_stable";
    case Conclusion::UnstableLinearization: return "unstable_linearization";
    case Conclusion::Inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::LP: return "LP";
    case Method::Lyapunov: return "Lyapunov";
    case Method::Eigen: return "eigen";
  }
  return "?";
}

MethodError::MethodError(Method m, const std::string& what)
    : Error(std::string(to_string(m)) + ": " + what), method_(m) {}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
auto tagged(Method m, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const MethodError&) {
    throw;
  } catch (const Error& e) {
    throw MethodError(m, e.what());
  }
}

EigenSummary eigen_summary(const Matrix& a, TimeDomain domain) {
  const double margin = settings().eigen_margin;
  EigenSummary s;
  if (domain == TimeDomain::CT) {
    s.value = linalg::spectral_abscissa(a);
    s.strictly_stable = s.value < -margin;
    s.strictly_unstable = s.value > margin;
  } else {
    s.value = linalg::spectral_radius(a);
    s.strictly_stable = s.value < 1.0 - margin;
    s.strictly_unstable = s.value > 1.0 + margin;
  }
  return s;
}

}  // namespace

StabilityVerdict analyze_matrix(const Matrix& a, TimeDomain domain, const AnalyzeOptions& opts) {
  if (a.empty() || !a.square()) throw InvalidArgument("analyze_matrix: matrix must be square");
  StabilityVerdict v;
  v.domain = domain;
  v.a = a;

  auto decide = [&](Conclusion c, Method m) {
    if (v.concluding_method) return;
    v.conclusion = c;
    v.concluding_method = m;
  };
  auto decided = [&] { return v.concluding_method.has_value() && !opts.explain; };

  {
    const auto t0 = Clock::now();
    v.lp = tagged(Method::LP, [&] {
      memory::PeakScope mem;
      const embedding::EmbeddingPair pair = embedding::build_ahat(a, domain);
      lp::LpOutcome out = lp::lp_stability_test(pair);
      out.memory_bytes = mem.peak_bytes();
      return out;
    });
    v.costs.push_back({Method::LP, seconds_since(t0), v.lp.memory_bytes});
    if (v.lp.status == lp::StabilityLpStatus::StrictlyFeasible) decide(Conclusion::AsymptoticallyStable, Method::LP);
  }

  if (opts.run_baseline && !decided()) {
    const auto t0 = Clock::now();
    v.baseline = tagged(Method::Lyapunov, [&] { return lyapunov::sdp_stability_test(a, domain, opts.baseline_method); });
    v.costs.push_back({Method::Lyapunov, seconds_since(t0), v.baseline->memory_bytes});
    if (v.baseline->stable) decide(Conclusion::AsymptoticallyStable, Method::Lyapunov);
  }

  if (opts.run_eigen && !decided()) {
    const auto t0 = Clock::now();
    std::size_t bytes = 0;
    v.eigen = tagged(Method::Eigen, [&] {
      memory::PeakScope mem;
      EigenSummary s = eigen_summary(a, domain);
      bytes = mem.peak_bytes();
      return s;
    });
    v.costs.push_back({Method::Eigen, seconds_since(t0), bytes});
    if (v.eigen->strictly_stable) {
      decide(Conclusion::AsymptoticallyStable, Method::Eigen);
    } else if (v.eigen->strictly_unstable) {
      decide(Conclusion::UnstableLinearization, Method::Eigen);
    }
  }
  return v;
}

StabilityVerdict analyze_system(const dsl::SystemDef& sys, std::span<const double> guess, const SystemOptions& opts) {
  TimeDomain target = opts.domain.value_or(opts.discretization ? TimeDomain::DT : sys.domain);
  if (sys.domain == TimeDomain::DT && target == TimeDomain::CT) {
    throw AnalysisError("system '" + sys.name + "' is discrete-time; ct analysis is not available");
  }
  if (sys.domain == TimeDomain::DT && opts.discretization) {
    throw AnalysisError("only continuous-time systems can be discretized");
  }
  const bool discretize = sys.domain == TimeDomain::CT && target == TimeDomain::DT;
  if (discretize && !sys.sampling_time) {
    throw AnalysisError("system '" + sys.name + "' has no sampling time; declare 'ct sample <Ts>' for dt analysis");
  }

  const linearization::LinearizationResult lin = linearization::linearize(sys, guess);
  if (!lin.verified && !opts.allow_unverified) {
    std::ostringstream msg;
    msg << "equilibrium not verified: residual " << lin.residual << " after " << lin.newton_iterations
        << " Newton iterations";
    throw AnalysisError(msg.str());
  }

  LinearizationInfo info;
  info.system = sys.name;
  info.equilibrium = lin.x_e;
  info.residual = lin.residual;
  info.verified = lin.verified;
  info.newton_iterations = lin.newton_iterations;
  info.jacobian_method = lin.jacobian_method;
  info.jacobian_crosscheck_ok = lin.jacobian_crosscheck_ok;

  Matrix a = lin.a;
  if (discretize) {
    const auto method = opts.discretization.value_or(linearization::Discretization::Zoh);
    info.discretization = method;
    info.sampling_time = sys.sampling_time;
    a = linearization::discretize(a, *sys.sampling_time, method);
  }
  StabilityVerdict v = analyze_matrix(a, target, opts.analyze);
  v.linearization = std::move(info);
  return v;
}

std::string summary_line(const StabilityVerdict& v) {
  char buf[64];
  std::string s;
  if (v.conclusion == Conclusion::AsymptoticallyStable) {
    s = "AS via ";
    s += to_string(*v.concluding_method);
    if (*v.concluding_method == Method::LP) {
      std::snprintf(buf, sizeof buf, " (eps=%.6g)", v.lp.margin);
      s += buf;
    } else if (*v.concluding_method == Method::Eigen) {
      std::snprintf(buf, sizeof buf, " (%s=%.6g)", v.domain == TimeDomain::CT ? "abscissa" : "radius", v.eigen->value);
      s += buf;
    } else {
      s += " (P > 0)";
    }
  } else if (v.conclusion == Conclusion::UnstableLinearization) {
    std::snprintf(buf, sizeof buf, "UNSTABLE linearization (%s=%.6g)", v.domain == TimeDomain::CT ? "abscissa" : "radius",
                  v.eigen->value);
    s = buf;
  } else {
    s = "INCONCLUSIVE";
    if (v.eigen) {
      std::snprintf(buf, sizeof buf, " (marginal: %s=%.6g)", v.domain == TimeDomain::CT ? "abscissa" : "radius",
                    v.eigen->value);
      s += buf;
    }
  }
  return s;
}

namespace {

using nlohmann::ordered_json;

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (double x : m.row(i)) r.push_back(x);
    rows.push_back(std::move(r));
  }
  return rows;
}

// JSON has no infinities.
ordered_json number_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

}  // namespace

ordered_json to_json(const StabilityVerdict& v) {
  ordered_json j;
  j["format"] = "stabcert-report/1";
  j["domain"] = to_string(v.domain);
  j["dimension"] = v.a.rows();

  if (v.linearization) {
    const LinearizationInfo& li = *v.linearization;
    ordered_json l;
    l["system"] = li.system;
    l["equilibrium"] = li.equilibrium;
    l["residual"] = li.residual;
    l["verified"] = li.verified;
    l["newton_iterations"] = li.newton_iterations;
    l["jacobian_method"] = linearization::to_string(li.jacobian_method);
    l["jacobian_crosscheck_ok"] = li.jacobian_crosscheck_ok;
    l["discretization"] = li.discretization ? ordered_json(linearization::to_string(*li.discretization)) : ordered_json(nullptr);
    l["sampling_time"] = li.sampling_time && li.discretization ? ordered_json(*li.sampling_time) : ordered_json(nullptr);
    j["linearization"] = std::move(l);
  } else {
    j["linearization"] = nullptr;
  }
  j["matrix"] = matrix_json(v.a);

  ordered_json lp;
  lp["status"] = lp::to_string(v.lp.status);
  lp["margin"] = number_or_null(v.lp.margin);
  lp["iterations"] = v.lp.iterations;
  lp["certificate"] = v.lp.p;
  j["lp"] = std::move(lp);

  if (v.baseline) {
    const auto& b = *v.baseline;
    ordered_json bj;
    bj["status"] = b.stable ? "stable" : "not_certified";
    bj["reason"] = b.stable ? ordered_json(nullptr) : ordered_json(lyapunov::to_string(b.reason));
    if (b.solution) {
      bj["residual"] = b.solution->residual;
      bj["residual_bound"] = b.solution->residual_bound;
      bj["pd"] = b.solution->pd;
      bj["p"] = matrix_json(b.solution->p);
    } else {
      bj["residual"] = nullptr;
      bj["residual_bound"] = nullptr;
      bj["pd"] = nullptr;
      bj["p"] = nullptr;
    }
    j["baseline"] = std::move(bj);
  } else {
    j["baseline"] = nullptr;
  }

  if (v.eigen) {
    ordered_json e;
    e["quantity"] = v.domain == TimeDomain::CT ? "spectral_abscissa" : "spectral_radius";
    e["value"] = v.eigen->value;
    j["eigen"] = std::move(e);
  } else {
    j["eigen"] = nullptr;
  }

  j["conclusion"] = to_string(v.conclusion);
  j["concluding_method"] = v.concluding_method ? ordered_json(to_string(*v.concluding_method)) : ordered_json(nullptr);

  ordered_json timings = ordered_json::object();
  ordered_json memory = ordered_json::object();
  for (const MethodCost& c : v.costs) {
    timings[to_string(c.method)] = c.seconds;
    memory[to_string(c.method)] = c.memory_bytes;
  }
  j["timings_s"] = std::move(timings);
  j["memory_bytes"] = std::move(memory);
  return j;
}

void mask_timings(ordered_json& report) {
  if (auto it = report.find("timings_s"); it != report.end()) {
    for (auto& [key, value] : it->items()) value = 0;
  }
}

}  // namespace stabcert::analyzer
