#pragma once

// Update kernels for Eve, Adam and the baseline optimizers.
//
// Every kernel is functional: it takes the current state, parameters and
// gradient by const reference / span and returns fresh copies. Nothing is
// mutated in place, so repeating a step from the same inputs reproduces the
// same outputs bit for bit. All arithmetic is double precision.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace eveopt::optim {

using Vector = std::vector<double>;

/// Scalar hyperparameters of Eve. The first six defaults are those of the
/// reference algorithm; f_star is the objective's known minimum (0 for
/// unregularized cross-entropy and squared losses).
struct EveHyper {
  double alpha1 = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double beta3 = 0.999;
  double c = 10.0;
  double eps = 1e-8;
  double f_star = 0.0;

  /// Throws ContractError unless 0 <= beta1,beta2,beta3 < 1, c > 1,
  /// alpha1 > 0, eps > 0 and f_star is finite. eps = 0 is accepted only
  /// through validate(true) for the scale-invariance experiments.
  void validate(bool allow_zero_eps = false) const;
};

struct AdamState {
  std::uint64_t t = 0;
  Vector m;  // first-moment EMA
  Vector v;  // second-moment EMA, every component >= 0

  static AdamState zeros(std::size_t dim);
};

struct EveState {
  AdamState adam;
  double d_tilde = 1.0;
  double f_prev = 0.0;
  bool started = false;

  static EveState zeros(std::size_t dim);
};

template <class State>
struct StepResult {
  Vector params;
  State state;
};

// -- primitives --------------------------------------------------------------

/// beta * prev + (1 - beta) * x
double ema_update(double prev, double x, double beta);
Vector ema_update(std::span<const double> prev, std::span<const double> x, double beta);

/// x / (1 - beta^t); t must be >= 1.
double bias_correct(double x, double beta, std::uint64_t t);
Vector bias_correct(std::span<const double> x, double beta, std::uint64_t t);

/// Floor on the sub-optimality min(f_t, f_prev) - f_star below which the
/// coefficient saturates (returns c*c, which clip_d maps to c).
inline constexpr double kSubOptimalityFloor = 1e-12;

/// Raw feedback coefficient |f_t - f_prev| / (min(f_t, f_prev) - f_star).
/// Returns c*c when the denominator is <= kSubOptimalityFloor.
double eve_d(double f_t, double f_prev, double f_star, double c);

/// Clamp to [1/c, c].
double clip_d(double d, double c);

// -- Adam / Eve --------------------------------------------------------------

/// One Adam update with global step size alpha_t. Only beta1, beta2 and
/// eps are read from `hyper`.
StepResult<AdamState> adam_step(const EveHyper& hyper, const AdamState& state,
                                std::span<const double> params, std::span<const double> grad,
                                double alpha_t);

/// Per-step telemetry of the feedback pipeline. d and d_hat are empty on
/// the first step, where the coefficient is initialized rather than computed.
struct EveCoefficients {
  std::optional<double> d;
  std::optional<double> d_hat;
  double d_tilde = 1.0;
  double alpha_t = 0.0;
};

struct EveStepResult {
  Vector params;
  EveState state;
  EveCoefficients coefficients;
};

enum class Feedback {
  objective,  // normal operation
  pinned,     // d_hat forced to 1; trajectory reduces to Adam at alpha1
};

/// One Eve update. `f_t` is the loss at `params` on the minibatch that
/// produced `grad`. On later steps the smoothed coefficient is updated
/// first and the parameter update uses the new value.
EveStepResult eve_step(const EveHyper& hyper, const EveState& state,
                       std::span<const double> params, std::span<const double> grad, double f_t,
                       Feedback feedback = Feedback::objective);

// -- baselines ---------------------------------------------------------------
//
// SGD with Nesterov momentum, in the look-ahead parameterization: the
// stored iterate is the look-ahead point, so the gradient handed in is the
// gradient at the look-ahead point.
//     v'     = mu * v - alpha * g
//     theta' = theta - alpha * g + mu * v'
// mu = 0 reduces to plain SGD.

struct NesterovState {
  Vector velocity;
  static NesterovState zeros(std::size_t dim);
};

StepResult<NesterovState> nesterov_step(std::span<const double> params, std::span<const double> grad,
                                        const NesterovState& state, double mu, double alpha);

// Adagrad:  G' = G + g^2;  theta' = theta - alpha * g / (sqrt(G') + eps)
struct AdagradHyper {
  double eps = 1e-8;
};
struct AdagradState {
  Vector accumulator;
  static AdagradState zeros(std::size_t dim);
};
StepResult<AdagradState> adagrad_step(std::span<const double> params, std::span<const double> grad,
                                      const AdagradState& state, double alpha,
                                      const AdagradHyper& hyper = {});

// RMSprop:  r' = rho r + (1 - rho) g^2;  theta' = theta - alpha * g / (sqrt(r') + eps)
struct RmspropHyper {
  double rho = 0.9;
  double eps = 1e-8;
};
struct RmspropState {
  Vector mean_square;
  static RmspropState zeros(std::size_t dim);
};
StepResult<RmspropState> rmsprop_step(std::span<const double> params, std::span<const double> grad,
                                      const RmspropState& state, double alpha,
                                      const RmspropHyper& hyper = {});

// Adadelta:
//   Eg'  = rho Eg + (1 - rho) g^2
//   dx   = -sqrt(Edx + eps) / sqrt(Eg' + eps) * g
//   Edx' = rho Edx + (1 - rho) dx^2
//   theta' = theta + alpha * dx        (alpha = 1 is the original method)
struct AdadeltaHyper {
  double rho = 0.95;
  double eps = 1e-6;
};
struct AdadeltaState {
  Vector mean_square_grad;
  Vector mean_square_update;
  static AdadeltaState zeros(std::size_t dim);
};
StepResult<AdadeltaState> adadelta_step(std::span<const double> params, std::span<const double> grad,
                                        const AdadeltaState& state, double alpha,
                                        const AdadeltaHyper& hyper = {});

// Adamax:
//   m' = beta1 m + (1 - beta1) g
//   u' = max(beta2 u, |g|)
//   theta' = theta - alpha / (1 - beta1^t) * m' / u'    (0 where u' = 0)
struct AdamaxHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
};
struct AdamaxState {
  std::uint64_t t = 0;
  Vector m;
  Vector u;
  static AdamaxState zeros(std::size_t dim);
};
StepResult<AdamaxState> adamax_step(std::span<const double> params, std::span<const double> grad,
                                    const AdamaxState& state, double alpha,
                                    const AdamaxHyper& hyper = {});

using BaselineState =
    std::variant<NesterovState, AdagradState, RmspropState, AdadeltaState, AdamaxState>;

}  // namespace eveopt::optim
