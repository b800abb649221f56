#include "stabcert/settings.hpp"

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>

#include "stabcert/error.hpp"

namespace stabcert {

namespace {

NumericSettings& mutable_settings() noexcept {
  static NumericSettings s;
  return s;
}

template <class T>
bool take(const nlohmann::json& j, const char* key, T& field) {
  auto it = j.find(key);
  if (it == j.end()) return false;
  field = it->get<T>();
  return true;
}

}  // namespace

const NumericSettings& settings() noexcept { return mutable_settings(); }

void set_settings(const NumericSettings& s) { mutable_settings() = s; }

NumericSettings load_settings_file(const std::string& path, NumericSettings base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open numeric settings file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("numeric settings file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("numeric settings file must hold a JSON object");

  std::size_t used = 0;
  try {
    used += take(j, "lu_pivot_rel", base.lu_pivot_rel);
    used += take(j, "symmetry_rel", base.symmetry_rel);
    used += take(j, "qr_iterations_per_dim", base.qr_iterations_per_dim);
    used += take(j, "expm_theta13", base.expm_theta13);
    used += take(j, "equilibrium_tol", base.equilibrium_tol);
    used += take(j, "newton_tol", base.newton_tol);
    used += take(j, "newton_max_iterations", base.newton_max_iterations);
    used += take(j, "newton_max_halvings", base.newton_max_halvings);
    used += take(j, "fd_step_rel", base.fd_step_rel);
    used += take(j, "jacobian_crosscheck_rel", base.jacobian_crosscheck_rel);
    used += take(j, "lp_margin_tol", base.lp_margin_tol);
    used += take(j, "simplex_tol", base.simplex_tol);
    used += take(j, "bland_switch_factor", base.bland_switch_factor);
    used += take(j, "simplex_cap_factor", base.simplex_cap_factor);
    used += take(j, "lyapunov_residual_rel", base.lyapunov_residual_rel);
    used += take(j, "kronecker_max_dim", base.kronecker_max_dim);
    used += take(j, "eigen_margin", base.eigen_margin);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("numeric settings file " + path + ": " + e.what());
  }
  if (used != j.size()) throw InvalidArgument("numeric settings file " + path + " has unknown keys");
  return base;
}

bool apply_settings_from_env() {
  const char* path = std::getenv("STABCERT_NUMERIC_SETTINGS");
  if (path == nullptr || *path == '\0') return false;
  set_settings(load_settings_file(path));
  return true;
}

}  // namespace stabcert
