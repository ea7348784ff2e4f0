#include "eveopt/optimizer.hpp"

#include <cmath>

#include "eveopt/error.hpp"

namespace eveopt::optim {

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::eve: return "eve";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adamax: return "adamax";
    case OptimizerKind::rmsprop: return "rmsprop";
    case OptimizerKind::adagrad: return "adagrad";
    case OptimizerKind::adadelta: return "adadelta";
    case OptimizerKind::sgd_nesterov: return "sgd-nesterov";
  }
  return "unknown";
}

std::optional<OptimizerKind> parse_optimizer(std::string_view name) {
  for (auto kind : kAllOptimizers) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::optional<double> prescribed_learning_rate(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::adagrad: return 1e-2;
    case OptimizerKind::adamax: return 2e-3;
    case OptimizerKind::adadelta: return 1.0;
    default: return std::nullopt;
  }
}

Optimizer::Optimizer(const OptimizerSettings& settings, std::size_t dim, double f_star,
                     Feedback feedback, bool allow_zero_eps)
    : settings_(settings), feedback_(feedback) {
  if (!(settings.lr > 0.0) || !std::isfinite(settings.lr)) {
    throw ContractError("learning rate must be positive");
  }
  eve_hyper_ = EveHyper{settings.lr,  settings.beta1, settings.beta2,         settings.beta3,
                        settings.c,   settings.eps.value_or(1e-8), f_star};
  switch (settings.kind) {
    case OptimizerKind::eve:
      eve_hyper_.validate(allow_zero_eps);
      state_ = EveState::zeros(dim);
      break;
    case OptimizerKind::adam:
      // Adam ignores beta3, c and f_star; validate with neutral values.
      EveHyper{eve_hyper_.alpha1, eve_hyper_.beta1, eve_hyper_.beta2, 0.0, 2.0, eve_hyper_.eps, 0.0}
          .validate(allow_zero_eps);
      state_ = AdamState::zeros(dim);
      break;
    case OptimizerKind::adamax: state_ = AdamaxState::zeros(dim); break;
    case OptimizerKind::rmsprop: state_ = RmspropState::zeros(dim); break;
    case OptimizerKind::adagrad: state_ = AdagradState::zeros(dim); break;
    case OptimizerKind::adadelta: state_ = AdadeltaState::zeros(dim); break;
    case OptimizerKind::sgd_nesterov:
      if (!(settings.momentum >= 0.0 && settings.momentum < 1.0)) {
        throw ContractError("momentum must lie in [0, 1)");
      }
      state_ = NesterovState::zeros(dim);
      break;
  }
}

StepInfo Optimizer::step(Vector& params, std::span<const double> grad, double loss, double alpha_t) {
  if (!std::isfinite(loss)) throw NonFiniteError("non-finite loss");
  StepInfo info;
  info.alpha_t = alpha_t;

  auto commit = [&](auto&& result) {
    params = std::move(result.params);
    state_ = std::move(result.state);
  };

  switch (settings_.kind) {
    case OptimizerKind::eve: {
      auto result = eve_step(eve_hyper_, std::get<EveState>(state_), params, grad, loss, feedback_);
      info.d = result.coefficients.d;
      info.d_hat = result.coefficients.d_hat;
      info.d_tilde = result.coefficients.d_tilde;
      info.alpha_t = result.coefficients.alpha_t;
      commit(result);
      break;
    }
    case OptimizerKind::adam:
      commit(adam_step(eve_hyper_, std::get<AdamState>(state_), params, grad, alpha_t));
      break;
    case OptimizerKind::adamax:
      commit(adamax_step(params, grad, std::get<AdamaxState>(state_), alpha_t,
                         AdamaxHyper{settings_.beta1, settings_.beta2}));
      break;
    case OptimizerKind::rmsprop:
      commit(rmsprop_step(params, grad, std::get<RmspropState>(state_), alpha_t,
                          RmspropHyper{settings_.rho.value_or(0.9), settings_.eps.value_or(1e-8)}));
      break;
    case OptimizerKind::adagrad:
      commit(adagrad_step(params, grad, std::get<AdagradState>(state_), alpha_t,
                          AdagradHyper{settings_.eps.value_or(1e-8)}));
      break;
    case OptimizerKind::adadelta:
      commit(adadelta_step(params, grad, std::get<AdadeltaState>(state_), alpha_t,
                           AdadeltaHyper{settings_.rho.value_or(0.95), settings_.eps.value_or(1e-6)}));
      break;
    case OptimizerKind::sgd_nesterov:
      commit(nesterov_step(params, grad, std::get<NesterovState>(state_), settings_.momentum, alpha_t));
      break;
  }
  return info;
}

}  // namespace eveopt::optim
