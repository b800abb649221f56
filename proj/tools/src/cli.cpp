#include "stabcert/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "stabcert/analyzer.hpp"
#include "stabcert/bench.hpp"
#include "stabcert/embedding.hpp"
#include "stabcert/linearization.hpp"
#include "stabcert/settings.hpp"
#include "stabcert/system.hpp"

namespace stabcert::cli {

namespace {

struct UsageError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) throw UsageError("empty token in list '" + s + "'");
    out.push_back(tok);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const std::string& tok : split_tokens(s)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(v)) throw UsageError("not a finite number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::size_t parse_size(const std::string& tok) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty() || tok[0] == '-' || v == 0) throw UsageError("invalid size '" + tok + "'");
  return static_cast<std::size_t>(v);
}

TimeDomain domain_flag(const std::string& s) {
  if (s == "ct") return TimeDomain::CT;
  if (s == "dt") return TimeDomain::DT;
  throw UsageError("--domain must be ct or dt (got '" + s + "')");
}

linearization::Discretization discretization_flag(const std::string& s) {
  if (s == "euler") return linearization::Discretization::Euler;
  if (s == "zoh") return linearization::Discretization::Zoh;
  throw UsageError("--discretize must be euler or zoh (got '" + s + "')");
}

dsl::SystemDef load_system(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("cannot open system file: " + path);
  return dsl::parse_system_file(path);
}

std::vector<double> guess_vector(const std::string& text, const dsl::SystemDef& sys) {
  std::vector<double> g = parse_doubles(text);
  if (g.size() != sys.dim()) {
    throw UsageError("--guess has " + std::to_string(g.size()) + " entries, system '" + sys.name + "' has " +
                     std::to_string(sys.dim()) + " states");
  }
  return g;
}

void write_vector(std::ostream& out, std::span<const double> v) {
  std::ostringstream line;
  line.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) line << (i ? " " : "") << v[i];
  out << line.str() << '\n';
}

int exit_for(analyzer::Conclusion c) {
  switch (c) {
    case analyzer::Conclusion::AsymptoticallyStable: return kAsymptoticallyStable;
    case analyzer::Conclusion::UnstableLinearization: return kUnstable;
    case analyzer::Conclusion::Inconclusive: return kInconclusive;
  }
  return kInconclusive;
}

struct AnalyzeArgs {
  std::string file, guess, domain, discretize, out;
  bool no_baseline = false, no_eigen = false, explain = false, allow_unverified = false, kronecker = false;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const dsl::SystemDef sys = load_system(a.file);
  const std::vector<double> guess = guess_vector(a.guess, sys);
  analyzer::SystemOptions opts;
  if (!a.domain.empty()) opts.domain = domain_flag(a.domain);
  if (!a.discretize.empty()) opts.discretization = discretization_flag(a.discretize);
  opts.allow_unverified = a.allow_unverified;
  opts.analyze.run_baseline = !a.no_baseline;
  opts.analyze.run_eigen = !a.no_eigen;
  opts.analyze.explain = a.explain;
  if (a.kronecker) opts.analyze.baseline_method = lyapunov::BaselineMethod::Kronecker;

  const analyzer::StabilityVerdict v = analyzer::analyze_system(sys, guess, opts);
  out << analyzer::summary_line(v) << '\n';
  if (a.explain) {
    out << "  lp: " << lp::to_string(v.lp.status) << " eps=" << v.lp.margin << " iterations=" << v.lp.iterations << '\n';
    if (v.baseline) {
      out << "  lyapunov: " << (v.baseline->stable ? "stable" : "not_certified");
      if (!v.baseline->stable) out << " (" << lyapunov::to_string(v.baseline->reason) << ")";
      out << '\n';
    }
    if (v.eigen) {
      out << "  eigen: " << (v.domain == TimeDomain::CT ? "abscissa=" : "radius=") << v.eigen->value << '\n';
    }
  }
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw IoError("cannot write report: " + a.out);
    f << analyzer::to_json(v).dump(2) << '\n';
    if (!f) throw IoError("cannot write report: " + a.out);
  }
  return exit_for(v.conclusion);
}

struct LinearizeArgs {
  std::string file, guess, discretize;
  bool allow_unverified = false;
};

int cmd_linearize(const LinearizeArgs& a, std::ostream& out, std::ostream& err) {
  const dsl::SystemDef sys = load_system(a.file);
  const std::vector<double> guess = guess_vector(a.guess, sys);
  std::optional<linearization::Discretization> disc;
  if (!a.discretize.empty()) {
    disc = discretization_flag(a.discretize);
    if (sys.domain == TimeDomain::DT) throw analyzer::AnalysisError("only continuous-time systems can be discretized");
    if (!sys.sampling_time) {
      throw analyzer::AnalysisError("system '" + sys.name + "' has no sampling time; declare 'ct sample <Ts>'");
    }
  }
  const linearization::LinearizationResult lin = linearization::linearize(sys, guess);
  if (!lin.verified) {
    if (!a.allow_unverified) {
      std::ostringstream msg;
      msg << "equilibrium not verified: residual " << lin.residual;
      throw analyzer::AnalysisError(msg.str());
    }
    err << "warning: equilibrium not verified (residual " << lin.residual << ")\n";
  }
  out << "system: " << sys.name << " (" << to_string(sys.domain) << ")\n";
  out << "equilibrium: ";
  write_vector(out, lin.x_e);
  out << "residual: " << lin.residual << '\n';
  out << "jacobian: " << linearization::to_string(lin.jacobian_method)
      << (lin.jacobian_crosscheck_ok ? "" : " (finite-difference cross-check disagrees)") << '\n';
  out << "A:\n";
  write_matrix(out, lin.a);
  if (disc) {
    out << "A_d (" << linearization::to_string(*disc) << ", Ts=" << *sys.sampling_time << "):\n";
    write_matrix(out, linearization::discretize(lin.a, *sys.sampling_time, *disc));
  }
  return 0;
}

struct EmbedArgs {
  std::string file, domain;
  bool verify = false;
};

int cmd_embed(const EmbedArgs& a, std::ostream& out) {
  if (!std::filesystem::is_regular_file(a.file)) throw IoError("cannot open matrix file: " + a.file);
  const Matrix m = read_matrix_file(a.file);
  if (!m.square()) throw UsageError("embed: matrix must be square");
  const TimeDomain domain = domain_flag(a.domain);
  const embedding::EmbeddingPair pair = embedding::build_ahat(m, domain);
  out << (domain == TimeDomain::CT ? "A_up (Metzler part):\n" : "A_plus:\n");
  write_matrix(out, pair.up);
  out << (domain == TimeDomain::CT ? "A_down:\n" : "A_minus:\n");
  write_matrix(out, pair.down);
  out << "A_hat:\n";
  write_matrix(out, pair.hat);
  if (!a.verify) return 0;
  const embedding::SimilarityReport rep = embedding::verify_similarity(pair, m);
  for (const embedding::CheckLine& l : rep.lines) {
    out << (l.pass ? "PASS " : "FAIL ") << l.name;
    if (!l.detail.empty()) out << " (" << l.detail << ")";
    out << '\n';
  }
  return rep.pass() ? 0 : kNumericError;
}

struct BenchArgs {
  std::string sizes = "20,50,100,200";
  std::string methods = "lp,lyap";
  std::string domains = "ct,dt";
  std::uint64_t seed = 7;
  double timeout = 300.0;
  std::string out = "sweep.csv";
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  bench::BenchConfig cfg;
  for (const std::string& t : split_tokens(a.sizes)) cfg.sizes.push_back(parse_size(t));
  cfg.methods.clear();
  for (const std::string& t : split_tokens(a.methods)) {
    try {
      cfg.methods.push_back(bench::parse_bench_method(t));
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  cfg.domains.clear();
  for (const std::string& t : split_tokens(a.domains)) cfg.domains.push_back(domain_flag(t));
  for (std::size_t n : cfg.sizes) {
    if (n % 2 != 0) throw UsageError("bench sizes must be even (got " + std::to_string(n) + ")");
  }
  if (!(a.timeout > 0.0)) throw UsageError("--timeout must be positive");
  cfg.seed = a.seed;
  cfg.timeout_s = a.timeout;

  std::ofstream csv(a.out);
  if (!csv) throw IoError("cannot write " + a.out);
  const std::vector<bench::BenchRecord> records = bench::run_benchmark(cfg);
  bench::write_csv(csv, records);
  csv.close();
  if (!csv) throw IoError("cannot write " + a.out);
  std::vector<std::string> plots;
  try {
    plots = bench::write_plot_files(a.out, records);
  } catch (const Error& e) {
    throw IoError(e.what());
  }
  bench::print_summary(out, records);
  out << "wrote " << a.out;
  for (const std::string& p : plots) out << ", " << p;
  out << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ScopedSettings restore(settings());

  CLI::App app{"Local asymptotic stability certificates via linear programming", "stabcert"};
  app.require_subcommand(0, 1);
  std::string settings_file;
  app.add_option("--settings", settings_file, "JSON numeric-settings overrides (also STABCERT_NUMERIC_SETTINGS)");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Certify local asymptotic stability of an equilibrium");
  analyze->add_option("system", an.file, "System file")->required();
  analyze->add_option("--guess", an.guess, "Equilibrium guess, comma separated")->required();
  analyze->add_option("--domain", an.domain, "Analysis domain: ct or dt");
  analyze->add_option("--discretize", an.discretize, "Discretize a ct system for dt analysis: euler or zoh");
  analyze->add_flag("--no-baseline", an.no_baseline, "Skip the Lyapunov baseline");
  analyze->add_flag("--no-eigen", an.no_eigen, "Skip the eigenvalue fallback");
  analyze->add_flag("--kronecker", an.kronecker, "Use the vectorized Kronecker solve for the baseline");
  analyze->add_flag("--explain", an.explain, "Run every stage and print each outcome");
  analyze->add_flag("--allow-unverified", an.allow_unverified, "Continue when the equilibrium residual is too large");
  analyze->add_option("--out", an.out, "Write the JSON report here");

  LinearizeArgs li;
  auto* linearize = app.add_subcommand("linearize", "Refine an equilibrium and print the Jacobian");
  linearize->add_option("system", li.file, "System file")->required();
  linearize->add_option("--guess", li.guess, "Equilibrium guess, comma separated")->required();
  linearize->add_option("--discretize", li.discretize, "Also print the discretized matrix: euler or zoh");
  linearize->add_flag("--allow-unverified", li.allow_unverified, "Print even if the residual is too large");

  EmbedArgs em;
  auto* embed = app.add_subcommand("embed", "Print the embedding blocks of a matrix");
  embed->add_option("matrix", em.file, "Matrix file")->required();
  embed->add_option("--domain", em.domain, "ct or dt")->required();
  embed->add_flag("--verify", em.verify, "Check the similarity structure and spectrum");

  BenchArgs be;
  auto* benchcmd = app.add_subcommand("bench", "Time LP vs Lyapunov baselines on swing networks");
  benchcmd->add_option("--sizes", be.sizes, "Comma separated even dimensions")->capture_default_str();
  benchcmd->add_option("--methods", be.methods, "Comma separated: lp, lyap, kron")->capture_default_str();
  benchcmd->add_option("--domains", be.domains, "Comma separated: ct, dt")->capture_default_str();
  benchcmd->add_option("--seed", be.seed, "Generator seed")->capture_default_str();
  benchcmd->add_option("--timeout", be.timeout, "Per-run timeout in seconds")->capture_default_str();
  benchcmd->add_option("--out", be.out, "CSV output path")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run 'stabcert --help' for usage\n";
    return kUsageError;
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return kUsageError;
  }

  try {
    apply_settings_from_env();
    if (!settings_file.empty()) set_settings(load_settings_file(settings_file));
  } catch (const std::exception& e) {
    err << "error: numeric settings: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(an, out);
    if (linearize->parsed()) return cmd_linearize(li, out, err);
    if (embed->parsed()) return cmd_embed(em, out);
    if (benchcmd->parsed()) return cmd_bench(be, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const dsl::ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const analyzer::MethodError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const analyzer::AnalysisError& e) {
    err << "linearization error: " << e.what() << '\n';
    return kLinearizationError;
  } catch (const dsl::DomainError& e) {
    err << "linearization error: " << e.what() << '\n';
    return kLinearizationError;
  } catch (const dsl::DifferentiationError& e) {
    err << "linearization error: " << e.what() << '\n';
    return kLinearizationError;
  } catch (const SingularMatrix& e) {
    err << "linearization error: " << e.what() << '\n';
    return kLinearizationError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  }
  return kUsageError;
}

}  // namespace stabcert::cli
