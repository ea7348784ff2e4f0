#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "eveopt/optim.hpp"

namespace eveopt::optim {

enum class OptimizerKind { eve, adam, adamax, rmsprop, adagrad, adadelta, sgd_nesterov };

inline constexpr std::array<OptimizerKind, 7> kAllOptimizers = {
    OptimizerKind::eve,     OptimizerKind::adam,     OptimizerKind::adamax,      OptimizerKind::rmsprop,
    OptimizerKind::adagrad, OptimizerKind::adadelta, OptimizerKind::sgd_nesterov};

/// Stable names used in configs and CSV output: "eve", "adam", "adamax",
/// "rmsprop", "adagrad", "adadelta", "sgd-nesterov".
std::string_view to_string(OptimizerKind kind);
std::optional<OptimizerKind> parse_optimizer(std::string_view name);

/// Learning rate each method's authors prescribe, for the methods that
/// have one distinct from the common grid (Adagrad 1e-2, Adamax 2e-3,
/// Adadelta 1).
std::optional<double> prescribed_learning_rate(OptimizerKind kind);

/// Hyperparameters for any of the seven optimizers. Fields a method does
/// not use are ignored; empty optionals take the method's default.
struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::eve;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double beta3 = 0.999;
  double c = 10.0;
  double momentum = 0.9;
  std::optional<double> eps;
  std::optional<double> rho;

  bool operator==(const OptimizerSettings&) const = default;
};

/// What one step did, for telemetry.
struct StepInfo {
  std::optional<double> d;
  std::optional<double> d_hat;
  std::optional<double> d_tilde;
  double alpha_t = 0.0;
};

/// Type-erased optimizer over the functional kernels. Holds the state of
/// exactly one method. step() commits the new state only when the kernel
/// succeeds, so a rejected step leaves the optimizer unchanged.
class Optimizer {
 public:
  /// `f_star` is only read by Eve. `allow_zero_eps` admits eps = 0 for Eve
  /// and Adam.
  Optimizer(const OptimizerSettings& settings, std::size_t dim, double f_star,
            Feedback feedback = Feedback::objective, bool allow_zero_eps = false);

  OptimizerKind kind() const noexcept { return settings_.kind; }
  std::string_view name() const noexcept { return to_string(settings_.kind); }

  /// Advances `params` in place. `alpha_t` is the scheduled global rate;
  /// Eve ignores it and derives its own from the loss feedback.
  StepInfo step(Vector& params, std::span<const double> grad, double loss, double alpha_t);

 private:
  using State = std::variant<EveState, AdamState, AdamaxState, RmspropState, AdagradState,
                             AdadeltaState, NesterovState>;

  OptimizerSettings settings_;
  EveHyper eve_hyper_;
  Feedback feedback_;
  State state_;
};

}  // namespace eveopt::optim
