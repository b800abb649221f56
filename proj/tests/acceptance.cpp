// Acceptance suite: one PASS/FAIL line per criterion; exits 1 if any fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stabcert/analyzer.hpp"
#include "stabcert/bench.hpp"
#include "stabcert/embedding.hpp"
#include "stabcert/linalg.hpp"
#include "stabcert/linearization.hpp"
#include "stabcert/lp_stability.hpp"
#include "stabcert/lyapunov.hpp"
#include "stabcert/system.hpp"
#ifdef STABCERT_HAVE_CLI
#include "stabcert/cli.hpp"
#endif

using namespace stabcert;

namespace {

std::string fixture(const char* name) { return std::string(STABCERT_FIXTURE_DIR) + "/" + name; }
std::string golden(const char* name) { return std::string(STABCERT_GOLDEN_DIR) + "/" + name; }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %2d %s (%.2f s / %.0f s budget)%s -- %s\n", pass ? "PASS" : "FAIL", id, title, secs, budget_s,
              in_time ? "" : " OVER BUDGET", o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double oracle_margin(const Matrix& a, TimeDomain d) {
  return d == TimeDomain::CT ? oracle::abscissa(a) : oracle::radius(a) - 1.0;
}

double embedding_oracle(const Matrix& a, TimeDomain d) {
  return d == TimeDomain::CT ? oracle::abscissa(oracle::metzlerized(a)) : oracle::radius(oracle::absolute(a)) - 1.0;
}

// Random dense matrix whose stability under the given oracle is roughly a
// coin flip: CT shifts the diagonal, DT rescales.
Matrix mixed_draw(std::mt19937_64& rng, std::size_t n, TimeDomain d) {
  Matrix a = oracle::random_matrix(rng, n, n, -1, 1);
  const double c = std::uniform_real_distribution<double>(0.5, 1.5)(rng);
  const double scale = 0.5 * static_cast<double>(n) + 0.5;
  if (d == TimeDomain::DT) {
    a *= c / scale;
  } else {
    for (std::size_t i = 0; i < n; ++i) a(i, i) -= c * (scale - 0.5);
  }
  return a;
}

std::string random_system(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  std::ostringstream s;
  s.precision(17);
  s << "system r; ct; states ";
  for (std::size_t i = 0; i < n; ++i) s << (i ? ", " : "") << "x" << i;
  s << ";\n";
  for (std::size_t i = 0; i < n; ++i) {
    s << "d x" << i << " = " << c(rng);
    const int terms = 1 + static_cast<int>(rng() % 4);
    for (int t = 0; t < terms; ++t) {
      s << " + " << c(rng);
      if (rng() % 3 == 0) s << "*sin(x" << rng() % n << ")";
      const int deg = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < deg; ++k) s << "*x" << rng() % n;
    }
    s << ";\n";
  }
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome c1_cstr_linearization() {
  const auto sys = dsl::parse_system_file(fixture("cstr.sys"));
  const double guess[] = {3.0, 1.117};
  const auto lin = linearization::linearize(sys, guess);
  const double e11 = lin.a(0, 0), e21 = lin.a(1, 0), e22 = lin.a(1, 1);
  const Matrix ad = linearization::discretize(read_matrix_file(fixture("cstr_ac.mat")), 0.01,
                                              linearization::Discretization::Zoh);
  const double zoh_err = max_abs_diff(ad, read_matrix_file(fixture("cstr_ad.mat")));
  const bool ok = lin.verified && std::abs(e11 - -144.286) <= 5e-3 && e21 == 50.0 && zoh_err <= 4e-4;
  std::ostringstream d;
  d.precision(9);
  d << "J11=" << e11 << " (|d|=" << std::abs(e11 + 144.286) << "), J21=" << e21 << ", ZOH max err=" << zoh_err
    << "; recorded discrepancy: J22=" << e22 << " vs reference -134.286";
  return {ok, d.str()};
}

Outcome c2_oscillator_euler() {
  const Matrix ad = linearization::discretize(read_matrix_file(fixture("osc_ac.mat")), 0.1,
                                              linearization::Discretization::Euler);
  const Matrix ref = read_matrix_file(fixture("osc_ad.mat"));
  // Exact up to the rounding of I + 0.1 A: every entry must be the printed
  // decimal's double or its immediate neighbour.
  int off = 0;
  for (std::size_t i = 0; i < ref.rows(); ++i)
    for (std::size_t j = 0; j < ref.cols(); ++j) {
      const double r = ref(i, j), g = ad(i, j);
      if (g != r && g != std::nextafter(r, 1e300) && g != std::nextafter(r, -1e300)) ++off;
    }
  return {off == 0, "entries beyond 1 ulp of printed A_d: " + std::to_string(off) +
                        ", max |diff| " + fmt("%.3g", max_abs_diff(ad, ref))};
}

Outcome c3_lp_oracle() {
  std::mt19937_64 rng(20240101);
  int mismatches = 0, feasible = 0, resampled = 0, checked = 0;
  for (int k = 0; k < 2000; ++k) {
    const std::size_t n = 1 + rng() % 12;
    for (TimeDomain d : {TimeDomain::CT, TimeDomain::DT}) {
      Matrix a;
      double ref;
      do {
        a = mixed_draw(rng, n, d);
        ref = embedding_oracle(a, d);
      } while (std::abs(ref) < 1e-6 && ++resampled);
      const auto out = lp::lp_stability_test(embedding::build_ahat(a, d));
      const bool lp_stable = out.status == lp::StabilityLpStatus::StrictlyFeasible;
      const bool lp_unstable = out.status == lp::StabilityLpStatus::Infeasible;
      if (ref < 0 ? !lp_stable : !lp_unstable) ++mismatches;
      feasible += lp_stable;
      ++checked;
    }
  }
  return {mismatches == 0, std::to_string(checked) + " LPs, " + std::to_string(feasible) + " feasible, " +
                               std::to_string(resampled) + " resampled, mismatches " + std::to_string(mismatches)};
}

Outcome c4_soundness() {
  int violations = 0, stable = 0, total = 0;
  auto check = [&](const analyzer::StabilityVerdict& v) {
    ++total;
    if (v.conclusion != analyzer::Conclusion::AsymptoticallyStable) return;
    ++stable;
    if (!(oracle_margin(v.a, v.domain) < 0)) ++violations;
  };
  const std::pair<const char*, TimeDomain> mats[] = {
      {"cstr_ac.mat", TimeDomain::CT}, {"cstr_ad.mat", TimeDomain::DT}, {"osc_ac.mat", TimeDomain::CT},
      {"osc_ad.mat", TimeDomain::DT},  {"mixed.mat", TimeDomain::CT},   {"mixed.mat", TimeDomain::DT}};
  for (const auto& [f, d] : mats) check(analyzer::analyze_matrix(read_matrix_file(fixture(f)), d));
  const double cstr_g[] = {3.0, 1.117};
  const double osc_g[] = {0, 0, 0, 0, 0};
  const auto cstr = dsl::parse_system_file(fixture("cstr.sys"));
  const auto osc = dsl::parse_system_file(fixture("osc.sys"));
  for (auto disc : {std::optional<linearization::Discretization>{}, std::optional{linearization::Discretization::Zoh},
                    std::optional{linearization::Discretization::Euler}}) {
    analyzer::SystemOptions o;
    o.discretization = disc;
    check(analyzer::analyze_system(cstr, cstr_g, o));
    check(analyzer::analyze_system(osc, osc_g, o));
  }
  std::mt19937_64 rng(4);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 1 + rng() % 12;
    const TimeDomain d = k % 2 ? TimeDomain::DT : TimeDomain::CT;
    // Draw around the true stability boundary of A, not of its embedding.
    Matrix a = oracle::random_matrix(rng, n, n, -1, 1);
    const double m = oracle_margin(a, d);
    if (d == TimeDomain::CT) {
      const double shift = m + std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
      for (std::size_t i = 0; i < n; ++i) a(i, i) -= shift;
    } else if (m + 1.0 > 0) {
      a *= std::uniform_real_distribution<double>(0.6, 1.4)(rng) / (m + 1.0);
    }
    check(analyzer::analyze_matrix(a, d));
  }
  return {violations == 0, std::to_string(total) + " verdicts, " + std::to_string(stable) +
                               " asymptotically_stable, oracle violations " + std::to_string(violations)};
}

Outcome c5_baseline_iff() {
  std::mt19937_64 rng(5);
  int mismatches = 0, stable = 0, checked = 0;
  while (checked < 1000) {
    const std::size_t n = 1 + rng() % 12;
    const TimeDomain d = rng() % 2 ? TimeDomain::DT : TimeDomain::CT;
    Matrix a = oracle::random_matrix(rng, n, n, -1, 1);
    const double m = oracle_margin(a, d);
    if (d == TimeDomain::CT) {
      const double shift = m + std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
      for (std::size_t i = 0; i < n; ++i) a(i, i) -= shift;
    } else if (m + 1.0 > 0) {
      a *= std::uniform_real_distribution<double>(0.6, 1.4)(rng) / (m + 1.0);
    }
    const double ref = oracle_margin(a, d);
    if (std::abs(ref) < 1e-4) continue;
    ++checked;
    const auto v = lyapunov::sdp_stability_test(a, d);
    if (v.stable != (ref < 0)) ++mismatches;
    stable += v.stable;
  }
  return {mismatches == 0, std::to_string(checked) + " matrices, " + std::to_string(stable) +
                               " certified, mismatches " + std::to_string(mismatches)};
}

Outcome c6_similarity() {
  std::mt19937_64 rng(6);
  int bad = 0;
  double worst = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng() % 12;
    const Matrix a = oracle::random_matrix(rng, n, n, -2, 2);
    for (TimeDomain d : {TimeDomain::CT, TimeDomain::DT}) {
      const auto pair = embedding::build_ahat(a, d);
      const auto r = embedding::verify_similarity(pair, a);
      // Independent spectrum check with the reference eigensolver.
      auto want = oracle::eig(pair.up + pair.down);
      const auto ea = oracle::eig(a);
      want.insert(want.end(), ea.begin(), ea.end());
      auto got = oracle::eig(pair.hat);
      double err = 0;
      for (const auto& g : got) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < want.size(); ++i)
          if (std::abs(want[i] - g) < std::abs(want[best] - g)) best = i;
        err = std::max(err, std::abs(want[best] - g));
        want.erase(want.begin() + static_cast<long>(best));
      }
      worst = std::max({worst, err, r.spectral_error});
      if (!r.pass() || err > 1e-7 * std::max(1.0, pair.hat.max_abs())) ++bad;
    }
  }
  return {bad == 0, "400 embeddings, failures " + std::to_string(bad) + ", worst eigenvalue distance " +
                        fmt("%.3g", worst)};
}

Outcome c7_cone_necessity() {
  std::mt19937_64 rng(7);
  int mismatches = 0, feasible = 0, collapsed = 0;
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 1 + rng() % 12;
    for (TimeDomain d : {TimeDomain::CT, TimeDomain::DT}) {
      Matrix a;
      double ref;
      do {
        a = mixed_draw(rng, n, d);
        a = d == TimeDomain::CT ? oracle::metzlerized(a) : oracle::absolute(a);
        ref = oracle_margin(a, d);
      } while (std::abs(ref) < 1e-6);
      const auto pair = embedding::build_ahat(a, d);
      collapsed += pair.down.max_abs() == 0.0;
      const bool lp_stable = lp::lp_stability_test(pair).status == lp::StabilityLpStatus::StrictlyFeasible;
      if (lp_stable != (ref < 0)) ++mismatches;
      feasible += lp_stable;
    }
  }
  return {mismatches == 0 && collapsed == 1000,
          "1000 cone matrices, down part zero in " + std::to_string(collapsed) + ", " + std::to_string(feasible) +
              " feasible, mismatches " + std::to_string(mismatches)};
}

Outcome c8_scaling() {
  bench::BenchConfig cfg;
  cfg.sizes = {20, 50, 100, 200, 400};
  cfg.methods = {bench::BenchMethod::LP, bench::BenchMethod::Lyapunov, bench::BenchMethod::KroneckerSDP};
  cfg.timeout_s = 300;
  const auto records = bench::run_benchmark(cfg);
  auto find = [&](std::size_t n, TimeDomain d, bench::BenchMethod m) -> const bench::BenchRecord* {
    for (const auto& r : records)
      if (r.n == n && r.domain == d && r.method == m) return &r;
    return nullptr;
  };
  bool ok = true;
  std::ostringstream detail;
  detail.precision(3);
  for (TimeDomain d : {TimeDomain::CT, TimeDomain::DT}) {
    const auto* lp100 = find(100, d, bench::BenchMethod::LP);
    const auto* lp400 = find(400, d, bench::BenchMethod::LP);
    if (!lp100 || !lp400 || !lp100->time_mean_s || !lp400->time_mean_s) {
      ok = false;
      detail << to_string(d) << ": LP incomplete; ";
      continue;
    }
    const double ratio = *lp400->time_mean_s / *lp100->time_mean_s;
    const bool lp_ok = ratio < 10.0;
    detail << to_string(d) << ": LP t400/t100=" << ratio << (lp_ok ? "" : " (>=10)");

    bool kron_ok = false;
    std::size_t largest = 0;
    bool kron_timed_out = false;
    for (std::size_t n : cfg.sizes) {
      const auto* k = find(n, d, bench::BenchMethod::KroneckerSDP);
      const auto* l = find(n, d, bench::BenchMethod::LP);
      if (k && k->status == "timeout") kron_timed_out = true;
      if (k && l && k->time_mean_s && l->time_mean_s) largest = n;
    }
    if (largest) {
      const double kr = *find(largest, d, bench::BenchMethod::KroneckerSDP)->time_mean_s /
                        *find(largest, d, bench::BenchMethod::LP)->time_mean_s;
      kron_ok = kron_timed_out || kr >= 10.0;
      detail << ", Kronecker/LP at n=" << largest << " = " << kr;
    } else {
      kron_ok = kron_timed_out;
    }
    if (kron_timed_out) detail << ", Kronecker timed out";
    detail << "; ";
    ok = ok && lp_ok && kron_ok;
  }
  std::ofstream csv("acceptance_sweep.csv");
  bench::write_csv(csv, records);
  detail << "records in acceptance_sweep.csv";
  return {ok, detail.str()};
}

Outcome c9_kernels() {
  std::mt19937_64 rng(9);
  int jac_bad = 0, expm_bad = 0, res_bad = 0, chol_bad = 0;
  std::uniform_real_distribution<double> pt(-1.5, 1.5);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + k % 6;
    const auto sys = dsl::parse_system(random_system(rng, n));
    std::vector<double> x(n);
    for (double& v : x) v = pt(rng);
    const auto j = linearization::jacobian_at(sys, x);
    const Matrix fd = linearization::finite_difference_jacobian(sys, x);
    if (!j.crosscheck_ok || max_abs_diff(j.a, fd) > 1e-4 * std::max(1.0, j.a.max_abs())) ++jac_bad;
  }
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + k % 12;
    const Matrix a = oracle::random_matrix(rng, n, n, -2, 2);
    const Matrix prod = linalg::expm(a) * linalg::expm(a * -1.0);
    if (max_abs_diff(prod, Matrix::identity(n)) > 1e-8) ++expm_bad;
  }
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + k % 12;
    const TimeDomain d = k % 2 ? TimeDomain::DT : TimeDomain::CT;
    const Matrix a = mixed_draw(rng, n, d);
    try {
      const auto s = d == TimeDomain::CT ? lyapunov::solve_ct_lyapunov(a, Matrix::identity(n))
                                         : lyapunov::solve_dt_stein(a, Matrix::identity(n));
      const double replay = d == TimeDomain::CT ? lyapunov::ct_residual(a, s.p, Matrix::identity(n))
                                                : lyapunov::dt_residual(a, s.p, Matrix::identity(n));
      if (!s.residual_ok || replay != s.residual || replay > s.residual_bound) ++res_bad;
    } catch (const lyapunov::NoUniqueSolution&) {
    }
  }
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + k % 12;
    const Matrix g = oracle::random_matrix(rng, n, n, -1, 1);
    const Matrix s = g.transpose() * g + Matrix::identity(n) * 0.1;
    const auto l = linalg::cholesky(s);
    if (!l || max_abs_diff(*l * l->transpose(), s) > 1e-9 * std::max(1.0, s.max_abs())) ++chol_bad;
  }
  const int bad = jac_bad + expm_bad + res_bad + chol_bad;
  return {bad == 0, "jacobian " + std::to_string(jac_bad) + "/200, expm " + std::to_string(expm_bad) +
                        "/200, lyapunov replay " + std::to_string(res_bad) + "/200, cholesky " +
                        std::to_string(chol_bad) + "/200 failures"};
}

#ifdef STABCERT_HAVE_CLI
std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome c10_cli_golden() {
  const auto dir = std::filesystem::temp_directory_path() / "stabcert_acceptance";
  std::filesystem::create_directories(dir);
  std::ostringstream detail;
  bool ok = true;
  struct Case {
    const char* sys;
    const char* guess;
    const char* golden;
    int code;
  };
  for (const Case& c : {Case{"cstr.sys", "3,1.117", "cstr_report.json", 0},
                        Case{"osc.sys", "0,0,0,0,0", "osc_report.json", 0}}) {
    const std::string out = (dir / c.golden).string();
    std::ostringstream so, se;
    const int code = cli::run_cli({"analyze", fixture(c.sys), "--guess", c.guess, "--out", out}, so, se);
    auto j = nlohmann::ordered_json::parse(slurp(out));
    analyzer::mask_timings(j);
    const bool same = j.dump(2) + "\n" == slurp(golden(c.golden));
    ok = ok && same && code == c.code;
    detail << c.sys << ": exit " << code << (same ? ", golden match" : ", GOLDEN MISMATCH") << "; ";
  }
  std::ostringstream so, se;
  const int usage = cli::run_cli({"analyze", fixture("cstr.sys")}, so, se);
  ok = ok && usage >= 10;
  detail << "missing --guess: exit " << usage;
  std::filesystem::remove_all(dir);
  return {ok, detail.str()};
}
#endif

}  // namespace

int main() {
  criterion(1, "CSTR linearization and ZOH", 1, c1_cstr_linearization);
  criterion(2, "Oscillator Euler discretization", 1, c2_oscillator_euler);
  criterion(3, "LP <=> embedding oracle", 60, c3_lp_oracle);
  criterion(4, "Verdict soundness", 60, c4_soundness);
  criterion(5, "Lyapunov baseline iff eigenvalues", 60, c5_baseline_iff);
  criterion(6, "Similarity structure", 30, c6_similarity);
  criterion(7, "Cone-class necessity", 30, c7_cone_necessity);
  criterion(8, "Scaling trend", 900, c8_scaling);
  criterion(9, "Numerical kernels", 60, c9_kernels);
#ifdef STABCERT_HAVE_CLI
  criterion(10, "CLI golden reports", 5, c10_cli_golden);
#else
  criterion(10, "CLI golden reports", 5, [] { return Outcome{false, "built without the CLI"}; });
#endif
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
