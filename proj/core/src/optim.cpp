#include "eveopt/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eveopt/error.hpp"

namespace eveopt::optim {
namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ContractError(std::string(what) + ": size mismatch (" + std::to_string(a) + " vs " +
                        std::to_string(b) + ")");
  }
}

void require_finite(std::span<const double> x, const char* what) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw NonFiniteError(std::string(what) + ": non-finite component at index " + std::to_string(i),
                           i);
    }
  }
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw NonFiniteError(std::string(what) + ": non-finite value");
}

void require_unit_interval(double beta, const char* name) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw ContractError(std::string(name) + " must lie in [0, 1), got " + std::to_string(beta));
  }
}

void check_step_inputs(std::span<const double> params, std::span<const double> grad,
                       std::size_t state_dim, const char* what) {
  require_same_size(params.size(), grad.size(), what);
  require_same_size(params.size(), state_dim, what);
  require_finite(grad, what);
}

}  // namespace

void EveHyper::validate(bool allow_zero_eps) const {
  if (!(alpha1 > 0.0) || !std::isfinite(alpha1)) throw ContractError("alpha1 must be positive");
  require_unit_interval(beta1, "beta1");
  require_unit_interval(beta2, "beta2");
  require_unit_interval(beta3, "beta3");
  if (!(c > 1.0) || !std::isfinite(c)) throw ContractError("c must be > 1");
  if (allow_zero_eps ? !(eps >= 0.0) : !(eps > 0.0)) throw ContractError("eps must be positive");
  if (!std::isfinite(f_star)) throw ContractError("f_star must be finite");
}

AdamState AdamState::zeros(std::size_t dim) { return {0, Vector(dim, 0.0), Vector(dim, 0.0)}; }

EveState EveState::zeros(std::size_t dim) { return {AdamState::zeros(dim), 1.0, 0.0, false}; }

double ema_update(double prev, double x, double beta) { return beta * prev + (1.0 - beta) * x; }

Vector ema_update(std::span<const double> prev, std::span<const double> x, double beta) {
  require_same_size(prev.size(), x.size(), "ema_update");
  Vector out(prev.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ema_update(prev[i], x[i], beta);
  return out;
}

double bias_correct(double x, double beta, std::uint64_t t) {
  if (t == 0) throw ContractError("bias_correct: t must be >= 1");
  return x / (1.0 - std::pow(beta, static_cast<double>(t)));
}

Vector bias_correct(std::span<const double> x, double beta, std::uint64_t t) {
  if (t == 0) throw ContractError("bias_correct: t must be >= 1");
  const double denom = 1.0 - std::pow(beta, static_cast<double>(t));
  Vector out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] / denom;
  return out;
}

double eve_d(double f_t, double f_prev, double f_star, double c) {
  if (!std::isfinite(f_t) || !std::isfinite(f_prev) || !std::isfinite(f_star)) {
    throw ContractError("eve_d: non-finite loss");
  }
  const double sub_optimality = std::min(f_t, f_prev) - f_star;
  if (sub_optimality <= kSubOptimalityFloor) return c * c;
  return std::abs(f_t - f_prev) / sub_optimality;
}

double clip_d(double d, double c) { return std::min(std::max(d, 1.0 / c), c); }

StepResult<AdamState> adam_step(const EveHyper& hyper, const AdamState& state,
                                std::span<const double> params, std::span<const double> grad,
                                double alpha_t) {
  check_step_inputs(params, grad, state.m.size(), "adam_step");
  require_same_size(state.m.size(), state.v.size(), "adam_step");

  StepResult<AdamState> out{Vector(params.begin(), params.end()), state};
  AdamState& next = out.state;
  next.t = state.t + 1;
  const double m_correction = 1.0 - std::pow(hyper.beta1, static_cast<double>(next.t));
  const double v_correction = 1.0 - std::pow(hyper.beta2, static_cast<double>(next.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    next.m[i] = ema_update(state.m[i], g, hyper.beta1);
    next.v[i] = ema_update(state.v[i], g * g, hyper.beta2);
    const double m_hat = next.m[i] / m_correction;
    const double v_hat = next.v[i] / v_correction;
    out.params[i] = params[i] - alpha_t * m_hat / (std::sqrt(v_hat) + hyper.eps);
  }
  return out;
}

EveStepResult eve_step(const EveHyper& hyper, const EveState& state, std::span<const double> params,
                       std::span<const double> grad, double f_t, Feedback feedback) {
  require_finite(f_t, "eve_step: loss");
  check_step_inputs(params, grad, state.adam.m.size(), "eve_step");

  EveCoefficients coeff;
  if (!state.started) {
    coeff.d_tilde = 1.0;
    coeff.alpha_t = hyper.alpha1;
  } else {
    const double d = eve_d(f_t, state.f_prev, hyper.f_star, hyper.c);
    const double d_hat = feedback == Feedback::pinned ? 1.0 : clip_d(d, hyper.c);
    // The clamps only bite at the last ulp, where rounding in the EMA or
    // the division could otherwise step outside the closed bounds.
    const double d_tilde = std::clamp(ema_update(state.d_tilde, d_hat, hyper.beta3), 1.0 / hyper.c, hyper.c);
    coeff.d = d;
    coeff.d_hat = d_hat;
    coeff.d_tilde = d_tilde;
    coeff.alpha_t = std::clamp(hyper.alpha1 / d_tilde, hyper.alpha1 / hyper.c, hyper.c * hyper.alpha1);
  }

  auto adam = adam_step(hyper, state.adam, params, grad, coeff.alpha_t);
  EveStepResult out{std::move(adam.params), EveState{std::move(adam.state), coeff.d_tilde, f_t, true},
                    coeff};
  return out;
}

NesterovState NesterovState::zeros(std::size_t dim) { return {Vector(dim, 0.0)}; }

StepResult<NesterovState> nesterov_step(std::span<const double> params, std::span<const double> grad,
                                        const NesterovState& state, double mu, double alpha) {
  check_step_inputs(params, grad, state.velocity.size(), "nesterov_step");
  require_unit_interval(mu, "momentum");
  StepResult<NesterovState> out{Vector(params.size()), NesterovState{Vector(params.size())}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double step = alpha * grad[i];
    const double v = mu * state.velocity[i] - step;
    out.state.velocity[i] = v;
    out.params[i] = params[i] - step + mu * v;
  }
  return out;
}

AdagradState AdagradState::zeros(std::size_t dim) { return {Vector(dim, 0.0)}; }

StepResult<AdagradState> adagrad_step(std::span<const double> params, std::span<const double> grad,
                                      const AdagradState& state, double alpha,
                                      const AdagradHyper& hyper) {
  check_step_inputs(params, grad, state.accumulator.size(), "adagrad_step");
  StepResult<AdagradState> out{Vector(params.size()), AdagradState{Vector(params.size())}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    const double acc = state.accumulator[i] + g * g;
    out.state.accumulator[i] = acc;
    out.params[i] = params[i] - alpha * g / (std::sqrt(acc) + hyper.eps);
  }
  return out;
}

RmspropState RmspropState::zeros(std::size_t dim) { return {Vector(dim, 0.0)}; }

StepResult<RmspropState> rmsprop_step(std::span<const double> params, std::span<const double> grad,
                                      const RmspropState& state, double alpha,
                                      const RmspropHyper& hyper) {
  check_step_inputs(params, grad, state.mean_square.size(), "rmsprop_step");
  require_unit_interval(hyper.rho, "rho");
  StepResult<RmspropState> out{Vector(params.size()), RmspropState{Vector(params.size())}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    const double r = ema_update(state.mean_square[i], g * g, hyper.rho);
    out.state.mean_square[i] = r;
    out.params[i] = params[i] - alpha * g / (std::sqrt(r) + hyper.eps);
  }
  return out;
}

AdadeltaState AdadeltaState::zeros(std::size_t dim) { return {Vector(dim, 0.0), Vector(dim, 0.0)}; }

StepResult<AdadeltaState> adadelta_step(std::span<const double> params, std::span<const double> grad,
                                        const AdadeltaState& state, double alpha,
                                        const AdadeltaHyper& hyper) {
  check_step_inputs(params, grad, state.mean_square_grad.size(), "adadelta_step");
  require_same_size(state.mean_square_grad.size(), state.mean_square_update.size(), "adadelta_step");
  require_unit_interval(hyper.rho, "rho");
  StepResult<AdadeltaState> out{Vector(params.size()),
                                AdadeltaState{Vector(params.size()), Vector(params.size())}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    const double eg = ema_update(state.mean_square_grad[i], g * g, hyper.rho);
    const double dx = -std::sqrt(state.mean_square_update[i] + hyper.eps) / std::sqrt(eg + hyper.eps) * g;
    out.state.mean_square_grad[i] = eg;
    out.state.mean_square_update[i] = ema_update(state.mean_square_update[i], dx * dx, hyper.rho);
    out.params[i] = params[i] + alpha * dx;
  }
  return out;
}

AdamaxState AdamaxState::zeros(std::size_t dim) { return {0, Vector(dim, 0.0), Vector(dim, 0.0)}; }

StepResult<AdamaxState> adamax_step(std::span<const double> params, std::span<const double> grad,
                                    const AdamaxState& state, double alpha, const AdamaxHyper& hyper) {
  check_step_inputs(params, grad, state.m.size(), "adamax_step");
  require_same_size(state.m.size(), state.u.size(), "adamax_step");
  require_unit_interval(hyper.beta1, "beta1");
  require_unit_interval(hyper.beta2, "beta2");
  StepResult<AdamaxState> out{Vector(params.size()), state};
  AdamaxState& next = out.state;
  next.t = state.t + 1;
  const double step = alpha / (1.0 - std::pow(hyper.beta1, static_cast<double>(next.t)));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    next.m[i] = ema_update(state.m[i], g, hyper.beta1);
    next.u[i] = std::max(hyper.beta2 * state.u[i], std::abs(g));
    out.params[i] = next.u[i] > 0.0 ? params[i] - step * next.m[i] / next.u[i] : params[i];
  }
  return out;
}

}  // namespace eveopt::optim
