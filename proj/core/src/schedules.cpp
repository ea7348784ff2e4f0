#include "eveopt/schedules.hpp"

#include <cmath>

#include "eveopt/error.hpp"

namespace eveopt::schedules {

std::string_view to_string(DecayKind kind) {
  switch (kind) {
    case DecayKind::constant: return "constant";
    case DecayKind::exponential: return "exp";
    case DecayKind::inv_t: return "inv-t";
    case DecayKind::inv_sqrt_t: return "inv-sqrt-t";
  }
  return "unknown";
}

std::optional<DecayKind> parse_decay(std::string_view name) {
  for (auto kind : {DecayKind::constant, DecayKind::exponential, DecayKind::inv_t, DecayKind::inv_sqrt_t}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

double schedule_alpha(const DecayPolicy& policy, std::uint64_t t) {
  const double x = policy.gamma * static_cast<double>(t);
  switch (policy.kind) {
    case DecayKind::constant: return policy.alpha1;
    case DecayKind::exponential: return policy.alpha1 * std::exp(-x);
    case DecayKind::inv_t: return policy.alpha1 / (1.0 + x);
    case DecayKind::inv_sqrt_t: return policy.alpha1 / std::sqrt(1.0 + x);
  }
  return policy.alpha1;
}

double gamma_for_final_ratio(DecayKind kind, double k, std::uint64_t steps) {
  if (!(k >= 1.0) || !std::isfinite(k)) throw ContractError("final ratio k must be >= 1");
  if (steps == 0) throw ContractError("step count must be >= 1");
  const double T = static_cast<double>(steps);
  switch (kind) {
    case DecayKind::constant: return 0.0;
    case DecayKind::exponential: return std::log(k) / T;
    case DecayKind::inv_t: return (k - 1.0) / T;
    case DecayKind::inv_sqrt_t: return (k * k - 1.0) / T;
  }
  return 0.0;
}

}  // namespace eveopt::schedules
