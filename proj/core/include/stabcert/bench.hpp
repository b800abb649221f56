#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stabcert/matrix.hpp"
#include "stabcert/system.hpp"

namespace stabcert::bench {

enum class BenchMethod { LP, Lyapunov, KroneckerSDP };
const char* to_string(BenchMethod m) noexcept;
BenchMethod parse_bench_method(const std::string& s);  // lp | lyap | kron

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept;
  double uniform() noexcept;  // [0, 1)
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) noexcept;

 private:
  std::uint64_t state_;
};

// Linearized swing-equation network of dimension 2 n_gen + 2 n_load:
// per generator (delta_i, omega_i) with
//   delta_i' = omega_i
//   omega_i' = -(k_i delta_i + sum_j c_ij (delta_i - delta_j) + D_i omega_i) / M_i
// over a ring-plus-chords graph, followed by n_load stable first-order pairs.
Matrix gen_swing_network(std::size_t n_gen, std::size_t n_load, std::uint64_t seed);

// Split of an even dimension into generators and loads (n_load = n / 8).
struct NetworkShape {
  std::size_t n_gen;
  std::size_t n_load;
};
NetworkShape shape_for_dimension(std::size_t n);

inline constexpr std::size_t kRuns = 5;
inline constexpr double kSamplingTime = 0.01;

struct BenchRecord {
  std::string case_name;
  std::size_t n = 0;
  TimeDomain domain = TimeDomain::CT;
  BenchMethod method = BenchMethod::LP;
  std::array<std::optional<double>, kRuns> time_runs{};
  std::optional<double> time_mean_s;  // set only when all runs completed
  std::size_t memory_bytes = 0;
  std::string status = "ok";  // ok | timeout | error:<detail>
  std::uint64_t seed = 0;
};

struct BenchConfig {
  std::vector<std::size_t> sizes;
  std::vector<TimeDomain> domains{TimeDomain::CT, TimeDomain::DT};
  std::vector<BenchMethod> methods;
  std::uint64_t seed = 7;
  double timeout_s = 300.0;
};

// Runs every (size, domain, method) cell sequentially: one warm-up run, then
// kRuns timed runs. A run exceeding timeout_s stops that cell with status
// "timeout"; kernel errors become "error:..." records. Never throws for
// per-cell failures.
std::vector<BenchRecord> run_benchmark(const BenchConfig& cfg);

inline constexpr const char* kCsvHeader = "case,n,domain,method,run1,run2,run3,run4,run5,mean_s,memory_bytes,status,seed";

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records);

// Two-column "n mean_s" files, one per (domain, method) present in records,
// written next to the CSV as <stem>_<domain>_<method>.dat. Returns the paths.
std::vector<std::string> write_plot_files(const std::string& csv_path, const std::vector<BenchRecord>& records);

void print_summary(std::ostream& os, const std::vector<BenchRecord>& records);

}  // namespace stabcert::bench
