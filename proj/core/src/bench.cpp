#include "stabcert/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "stabcert/deadline.hpp"
#include "stabcert/embedding.hpp"
#include "stabcert/linearization.hpp"
#include "stabcert/lp_stability.hpp"
#include "stabcert/lyapunov.hpp"
#include "stabcert/memory.hpp"
#include "stabcert/settings.hpp"

namespace stabcert::bench {

const char* to_string(BenchMethod m) noexcept {
  switch (m) {
    case BenchMethod::LP: return "LP";
    case BenchMethod::Lyapunov: return "Lyapunov";
    case BenchMethod::KroneckerSDP: return "KroneckerSDP";
  }
  return "?";
}

BenchMethod parse_bench_method(const std::string& s) {
  if (s == "lp" || s == "LP") return BenchMethod::LP;
  if (s == "lyap" || s == "lyapunov" || s == "Lyapunov") return BenchMethod::Lyapunov;
  if (s == "kron" || s == "kronecker" || s == "KroneckerSDP") return BenchMethod::KroneckerSDP;
  throw InvalidArgument("unknown bench method '" + s + "' (expected lp, lyap or kron)");
}

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t SplitMix64::below(std::size_t n) noexcept { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

Matrix gen_swing_network(std::size_t n_gen, std::size_t n_load, std::uint64_t seed) {
  if (n_gen == 0) throw InvalidArgument("gen_swing_network: need at least one generator");
  SplitMix64 rng(seed);
  const std::size_t n = 2 * n_gen + 2 * n_load;
  Matrix a(n, n);

  std::vector<double> m(n_gen), d(n_gen), k(n_gen);
  for (std::size_t i = 0; i < n_gen; ++i) {
    m[i] = rng.uniform(2.0, 10.0);
    d[i] = rng.uniform(1.0, 5.0);
    k[i] = rng.uniform(0.5, 3.0);
  }

  // Ring plus about n_gen/4 random chords; duplicates merge.
  std::map<std::pair<std::size_t, std::size_t>, double> edges;
  auto add_edge = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    const auto key = std::minmax(i, j);
    if (edges.count(key)) return;
    edges[key] = rng.uniform(0.1, 1.0);
  };
  if (n_gen >= 2) {
    for (std::size_t i = 0; i + 1 < n_gen; ++i) add_edge(i, i + 1);
    if (n_gen >= 3) add_edge(n_gen - 1, 0);
    for (std::size_t c = 0; c < n_gen / 4; ++c) add_edge(rng.below(n_gen), rng.below(n_gen));
  }

  for (std::size_t i = 0; i < n_gen; ++i) {
    const std::size_t di = 2 * i, wi = 2 * i + 1;
    a(di, wi) = 1.0;
    a(wi, di) = -k[i] / m[i];
    a(wi, wi) = -d[i] / m[i];
  }
  for (const auto& [e, c] : edges) {
    const auto [i, j] = e;
    a(2 * i + 1, 2 * i) -= c / m[i];
    a(2 * i + 1, 2 * j) += c / m[i];
    a(2 * j + 1, 2 * j) -= c / m[j];
    a(2 * j + 1, 2 * i) += c / m[j];
  }
  for (std::size_t l = 0; l < 2 * n_load; ++l) {
    const std::size_t s = 2 * n_gen + l;
    a(s, s) = rng.uniform(-5.0, -1.0);
  }
  return a;
}

NetworkShape shape_for_dimension(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw InvalidArgument("bench sizes must be even and at least 2 (got " + std::to_string(n) + ")");
  const std::size_t n_load = n / 8;
  return {(n - 2 * n_load) / 2, n_load};
}

namespace {

using Clock = std::chrono::steady_clock;

// One complete method invocation; returns the tracked peak.
std::size_t run_once(BenchMethod method, const Matrix& a, TimeDomain domain) {
  memory::PeakScope mem;
  switch (method) {
    case BenchMethod::LP: {
      const embedding::EmbeddingPair pair = embedding::build_ahat(a, domain);
      const lp::LpOutcome out = lp::lp_stability_test(pair);
      // Only the solve is attributed to the method; the embedding is input.
      return out.memory_bytes;
    }
    case BenchMethod::Lyapunov:
      lyapunov::sdp_stability_test(a, domain, lyapunov::BaselineMethod::Schur);
      break;
    case BenchMethod::KroneckerSDP: {
      const auto v = lyapunov::sdp_stability_test(a, domain, lyapunov::BaselineMethod::Kronecker);
      if (!v.solution && v.reason == lyapunov::NotCertifiedReason::None) throw Error("kronecker solve failed");
      break;
    }
  }
  return mem.peak_bytes();
}

void run_cell(BenchRecord& rec, const Matrix& a, double timeout_s) {
  if (rec.method == BenchMethod::KroneckerSDP && rec.n > static_cast<std::size_t>(settings().kronecker_max_dim)) {
    rec.status = "error:kronecker-cap-n>" + std::to_string(settings().kronecker_max_dim);
    return;
  }
  try {
    {
      ScopedDeadline deadline{std::chrono::duration<double>(timeout_s)};
      run_once(rec.method, a, rec.domain);  // warm-up
    }
    double total = 0.0;
    for (std::size_t r = 0; r < kRuns; ++r) {
      ScopedDeadline deadline{std::chrono::duration<double>(timeout_s)};
      const auto t0 = Clock::now();
      const std::size_t bytes = run_once(rec.method, a, rec.domain);
      const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
      rec.time_runs[r] = dt;
      rec.memory_bytes = std::max(rec.memory_bytes, bytes);
      total += dt;
    }
    rec.time_mean_s = total / static_cast<double>(kRuns);
  } catch (const Timeout&) {
    rec.status = "timeout";
  } catch (const std::exception& e) {
    std::string what = e.what();
    std::replace(what.begin(), what.end(), ',', ';');
    std::replace(what.begin(), what.end(), '\n', ' ');
    rec.status = "error:" + what;
  }
}

}  // namespace

std::vector<BenchRecord> run_benchmark(const BenchConfig& cfg) {
  if (cfg.sizes.empty()) throw InvalidArgument("run_benchmark: no sizes given");
  if (cfg.methods.empty()) throw InvalidArgument("run_benchmark: no methods given");
  if (cfg.domains.empty()) throw InvalidArgument("run_benchmark: no domains given");
  if (!(cfg.timeout_s > 0.0)) throw InvalidArgument("run_benchmark: timeout must be positive");

  std::vector<BenchRecord> out;
  for (std::size_t n : cfg.sizes) {
    std::optional<Matrix> ac;
    std::string gen_error;
    NetworkShape shape{0, 0};
    try {
      shape = shape_for_dimension(n);
      ac = gen_swing_network(shape.n_gen, shape.n_load, cfg.seed);
    } catch (const std::exception& e) {
      gen_error = e.what();
    }
    std::ostringstream name;
    name << "swing-g" << shape.n_gen << "-l" << shape.n_load;

    for (TimeDomain domain : cfg.domains) {
      std::optional<Matrix> a;
      std::string prep_error = gen_error;
      if (ac) {
        try {
          a = domain == TimeDomain::CT ? *ac : linearization::discretize(*ac, kSamplingTime, linearization::Discretization::Zoh);
        } catch (const std::exception& e) {
          prep_error = e.what();
        }
      }
      for (BenchMethod method : cfg.methods) {
        BenchRecord rec;
        rec.case_name = name.str();
        rec.n = n;
        rec.domain = domain;
        rec.method = method;
        rec.seed = cfg.seed;
        if (!a) {
          std::replace(prep_error.begin(), prep_error.end(), ',', ';');
          rec.status = "error:" + prep_error;
        } else {
          run_cell(rec, *a, cfg.timeout_s);
        }
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << kCsvHeader << '\n';
  for (const BenchRecord& r : records) {
    os << r.case_name << ',' << r.n << ',' << to_string(r.domain) << ',' << to_string(r.method);
    for (const auto& t : r.time_runs) os << ',' << (t ? fmt(*t) : "");
    os << ',' << (r.time_mean_s ? fmt(*r.time_mean_s) : "") << ',' << r.memory_bytes << ',' << r.status << ','
       << r.seed << '\n';
  }
}

std::vector<std::string> write_plot_files(const std::string& csv_path, const std::vector<BenchRecord>& records) {
  namespace fs = std::filesystem;
  const fs::path csv(csv_path);
  std::vector<std::string> paths;
  std::set<std::pair<TimeDomain, BenchMethod>> done;
  for (const BenchRecord& r : records) {
    const auto key = std::make_pair(r.domain, r.method);
    if (!done.insert(key).second) continue;
    const fs::path dat =
        csv.parent_path() / (csv.stem().string() + "_" + to_string(r.domain) + "_" + to_string(r.method) + ".dat");
    std::ofstream os(dat);
    if (!os) throw Error("cannot write " + dat.string());
    os << "# n mean_s (" << to_string(r.domain) << ", " << to_string(r.method) << ")\n";
    for (const BenchRecord& s : records) {
      if (s.domain != r.domain || s.method != r.method || !s.time_mean_s) continue;
      os << s.n << ' ' << fmt(*s.time_mean_s) << '\n';
    }
    paths.push_back(dat.string());
  }
  return paths;
}

void print_summary(std::ostream& os, const std::vector<BenchRecord>& records) {
  char line[160];
  std::snprintf(line, sizeof line, "%6s %-3s %-13s %14s %14s  %s\n", "n", "dom", "method", "mean_s", "memory_bytes",
                "status");
  os << line;
  for (const BenchRecord& r : records) {
    std::snprintf(line, sizeof line, "%6zu %-3s %-13s %14s %14zu  %s\n", r.n, to_string(r.domain), to_string(r.method),
                  r.time_mean_s ? fmt(*r.time_mean_s).c_str() : "-", r.memory_bytes, r.status.c_str());
    os << line;
  }
}

}  // namespace stabcert::bench
