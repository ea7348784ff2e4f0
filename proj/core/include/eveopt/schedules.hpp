#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace eveopt::schedules {

enum class DecayKind { constant, exponential, inv_t, inv_sqrt_t };

/// Config strings: "constant", "exp", "inv-t", "inv-sqrt-t".
std::string_view to_string(DecayKind kind);
std::optional<DecayKind> parse_decay(std::string_view name);

inline constexpr std::array<DecayKind, 3> kDecayingKinds = {DecayKind::exponential, DecayKind::inv_t,
                                                            DecayKind::inv_sqrt_t};

/// Final-decay ratios k (final rate = alpha1 / k) searched for each policy.
inline constexpr std::array<double, 8> kFinalRatioGrid = {1e4, 5e3, 1e3, 5e2, 1e2, 5e1, 1e1, 5e0};

struct DecayPolicy {
  DecayKind kind = DecayKind::constant;
  double gamma = 0.0;  // per-step decay strength, >= 0
  double alpha1 = 1e-3;

  bool operator==(const DecayPolicy&) const = default;
};

/// Global rate after t optimizer steps:
///   constant     alpha1
///   exponential  alpha1 * exp(-gamma t)
///   inv_t        alpha1 / (1 + gamma t)
///   inv_sqrt_t   alpha1 / sqrt(1 + gamma t)
double schedule_alpha(const DecayPolicy& policy, std::uint64_t t);

/// gamma such that schedule_alpha(policy, steps) == alpha1 / k.
/// Throws ContractError for k < 1 or steps == 0. Returns 0 for constant.
double gamma_for_final_ratio(DecayKind kind, double k, std::uint64_t steps);

}  // namespace eveopt::schedules
