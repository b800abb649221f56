#pragma once

#include <string>

namespace stabcert {

// Every numeric tolerance used by the library. The defaults are the contract
// values; a settings file can override individual fields.
struct NumericSettings {
  // linalg
  double lu_pivot_rel = 1e-13;          // singular if |pivot| < lu_pivot_rel * max|A|
  double symmetry_rel = 1e-10;          // Cholesky input symmetry check
  int qr_iterations_per_dim = 30;       // eigen iteration cap = this * n
  double expm_theta13 = 5.4;            // scaling target for degree-13 Pade

  // linearization
  double equilibrium_tol = 1e-8;        // verified if residual <= tol * (1 + |x_e|_inf)
  double newton_tol = 1e-10;            // Newton stops at |g|_inf <= tol * (1 + |x|_inf)
  int newton_max_iterations = 100;
  int newton_max_halvings = 30;
  double fd_step_rel = 1e-6;            // central-difference step 1e-6 * (1 + |x_j|)
  double jacobian_crosscheck_rel = 1e-4;

  // lp
  double lp_margin_tol = 1e-9;
  double simplex_tol = 1e-9;            // reduced-cost / feasibility tolerance
  int bland_switch_factor = 5;          // Dantzig pricing for 5 * (k + m) iterations
  int simplex_cap_factor = 50;          // hard cap 50 * (k + m)

  // lyapunov baseline
  double lyapunov_residual_rel = 1e-7;  // residual <= rel * n * |A|max * |P|max
  int kronecker_max_dim = 60;

  // analyzer
  double eigen_margin = 1e-9;           // strict stability / instability margin
};

const NumericSettings& settings() noexcept;
void set_settings(const NumericSettings& s);

// Reads a JSON object whose keys are field names of NumericSettings; missing
// keys keep their current values and unknown keys are rejected.
NumericSettings load_settings_file(const std::string& path, NumericSettings base = settings());

// Applies the file named by STABCERT_NUMERIC_SETTINGS, if set. Returns true if
// a file was loaded.
bool apply_settings_from_env();

// Restores defaults on destruction; for tests that override settings.
class ScopedSettings {
 public:
  explicit ScopedSettings(const NumericSettings& s) : saved_(settings()) { set_settings(s); }
  ~ScopedSettings() { set_settings(saved_); }
  ScopedSettings(const ScopedSettings&) = delete;
  ScopedSettings& operator=(const ScopedSettings&) = delete;

 private:
  NumericSettings saved_;
};

}  // namespace stabcert
