#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "eveopt/error.hpp"
#include "eveopt/optim.hpp"
#include "eveopt/rng.hpp"

using namespace eveopt;
using namespace eveopt::optim;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

}  // namespace

TEST(EmaUpdate, FixedPointAndZero) {
  EXPECT_EQ(ema_update(1.0, 1.0, 0.9), 1.0);
  EXPECT_EQ(ema_update(0.0, 0.0, 0.999), 0.0);
}

TEST(EmaUpdate, HandEvaluation) { EXPECT_NEAR(ema_update(0.0, 0.1, 0.9), 0.01, 1e-17); }

TEST(EmaUpdate, VectorShapeMismatchIsContractViolation) {
  const Vector a{1.0, 2.0};
  const Vector b{1.0};
  EXPECT_THROW(ema_update(a, b, 0.5), ContractError);
}

TEST(BiasCorrect, Examples) {
  EXPECT_NEAR(bias_correct(0.01, 0.9, 1), 0.1, 1e-16);
  EXPECT_EQ(bias_correct(3.75, 0.0, 1), 3.75);
  EXPECT_EQ(bias_correct(-2.5, 0.0, 17), -2.5);
  EXPECT_THROW(bias_correct(1.0, 0.9, 0), ContractError);
}

TEST(BiasCorrect, ConstantGradientTwoSteps) {
  const double m1 = ema_update(0.0, 0.1, 0.9);
  const double m2 = ema_update(m1, 0.1, 0.9);
  EXPECT_NEAR(m2, 0.019, 1e-17);
  EXPECT_NEAR(bias_correct(m2, 0.9, 2), 0.1, 1e-16);
}

// Mathematically exact; in binary64 the recurrence accumulates at most a
// few ulps of rounding.
TEST(BiasCorrect, ConstantGradientIsRecoveredForEveryStep) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const double g = rng.uniform(-10.0, 10.0);
    const double beta = rng.uniform(0.0, 0.9999);
    double m = 0.0;
    for (std::uint64_t t = 1; t <= 500; ++t) {
      m = ema_update(m, g, beta);
      ASSERT_LT(rel_err(bias_correct(m, beta, t), g), 1e-12) << "t=" << t << " beta=" << beta;
    }
  }
}

TEST(AdamStep, FirstStepMovesByAlpha) {
  const EveHyper hyper;
  const auto out = adam_step(hyper, AdamState::zeros(1), Vector{0.0}, Vector{0.1}, 1e-3);
  EXPECT_NEAR(out.params[0], -9.999999e-4, 1e-12);
  EXPECT_EQ(out.state.t, 1u);
  EXPECT_NEAR(out.state.m[0], 0.01, 1e-17);
  EXPECT_NEAR(out.state.v[0], 1e-5, 1e-19);
}

TEST(AdamStep, ZeroGradientLeavesParams) {
  const Vector params{1.5, -2.0, 0.0};
  const auto out = adam_step(EveHyper{}, AdamState::zeros(3), params, Vector(3, 0.0), 1e-2);
  EXPECT_EQ(out.params, params);
}

TEST(AdamStep, SignSymmetry) {
  const auto out = adam_step(EveHyper{}, AdamState::zeros(2), Vector{0.0, 0.0}, Vector{0.37, -0.37}, 1e-3);
  EXPECT_LT(out.params[0], 0.0);
  EXPECT_EQ(out.params[0], -out.params[1]);
}

TEST(AdamStep, NonFiniteGradientReportsIndex) {
  const AdamState state = AdamState::zeros(3);
  const Vector grad{0.1, std::numeric_limits<double>::quiet_NaN(), 0.2};
  try {
    adam_step(EveHyper{}, state, Vector(3, 0.0), grad, 1e-3);
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    ASSERT_TRUE(e.index().has_value());
    EXPECT_EQ(*e.index(), 1u);
  }
}

TEST(AdamStep, ShapeMismatch) {
  EXPECT_THROW(adam_step(EveHyper{}, AdamState::zeros(2), Vector(3, 0.0), Vector(3, 0.0), 1e-3), ContractError);
  EXPECT_THROW(adam_step(EveHyper{}, AdamState::zeros(2), Vector(2, 0.0), Vector(3, 0.0), 1e-3), ContractError);
}

TEST(EveHyper, DefaultsAndValidation) {
  const EveHyper h;
  EXPECT_EQ(h.alpha1, 1e-3);
  EXPECT_EQ(h.beta1, 0.9);
  EXPECT_EQ(h.beta2, 0.999);
  EXPECT_EQ(h.beta3, 0.999);
  EXPECT_EQ(h.c, 10.0);
  EXPECT_EQ(h.eps, 1e-8);
  EXPECT_EQ(h.f_star, 0.0);
  EXPECT_NO_THROW(h.validate());

  auto bad = h;
  bad.c = 1.0;
  EXPECT_THROW(bad.validate(), ContractError);
  bad = h;
  bad.beta3 = 1.0;
  EXPECT_THROW(bad.validate(), ContractError);
  bad = h;
  bad.alpha1 = 0.0;
  EXPECT_THROW(bad.validate(), ContractError);
  bad = h;
  bad.eps = 0.0;
  EXPECT_THROW(bad.validate(), ContractError);
  EXPECT_NO_THROW(bad.validate(/*allow_zero_eps=*/true));
}

TEST(EveD, Examples) {
  EXPECT_NEAR(eve_d(0.8, 1.0, 0.0, 10.0), 0.25, 1e-15);
  EXPECT_EQ(eve_d(0.42, 0.42, 0.0, 10.0), 0.0);
  EXPECT_EQ(eve_d(100.0, 1.0, 0.0, 10.0), 99.0);
}

TEST(EveD, DegenerateDenominatorSaturates) {
  EXPECT_EQ(eve_d(0.0, 1.0, 0.0, 10.0), 100.0);
  EXPECT_EQ(eve_d(1e-13, 1.0, 0.0, 10.0), 100.0);
  EXPECT_EQ(eve_d(-0.5, 1.0, 0.0, 10.0), 100.0);  // stochastic loss below f*
  EXPECT_EQ(clip_d(eve_d(-0.5, 1.0, 0.0, 10.0), 10.0), 10.0);
  EXPECT_EQ(eve_d(2.0, 3.0, 2.0, 4.0), 16.0);
}

TEST(EveD, NonFiniteIsContractViolation) {
  EXPECT_THROW(eve_d(std::nan(""), 1.0, 0.0, 10.0), ContractError);
  EXPECT_THROW(eve_d(1.0, HUGE_VAL, 0.0, 10.0), ContractError);
}

TEST(ClipD, Examples) {
  EXPECT_EQ(clip_d(0.25, 10.0), 0.25);
  EXPECT_EQ(clip_d(0.0, 10.0), 0.1);
  EXPECT_EQ(clip_d(99.0, 10.0), 10.0);
}

TEST(EveD, Symmetric) {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(-1.0, 100.0);
    const double b = rng.uniform(-1.0, 100.0);
    const double fs = rng.uniform(-2.0, 1.0);
    ASSERT_EQ(eve_d(a, b, fs, 10.0), eve_d(b, a, fs, 10.0));
  }
}

TEST(EveD, ScaleInvariantUnderPowerOfTwoScaling) {
  Rng rng(12);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(0.0, 50.0);
    const double b = rng.uniform(0.0, 50.0);
    const double k = std::ldexp(1.0, static_cast<int>(rng.below(41)) - 20);
    ASSERT_EQ(eve_d(k * a, k * b, 0.0, 10.0), eve_d(a, b, 0.0, 10.0));
  }
}

TEST(EveD, ScaleInvariantUpToRoundingForGeneralFactors) {
  Rng rng(13);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(1.0, 50.0);
    const double b = a * rng.uniform(1.01, 3.0);  // no catastrophic cancellation
    const double k = rng.uniform(1e-3, 1e3);
    ASSERT_LT(rel_err(eve_d(k * a, k * b, 0.0, 10.0), eve_d(a, b, 0.0, 10.0)), 1e-13);
  }
}

TEST(EveStep, FirstStepIsAdamAtAlpha1) {
  const EveHyper hyper;
  const Vector params{0.3, -1.2, 2.0};
  const Vector grad{0.5, 0.01, -3.0};
  const auto eve = eve_step(hyper, EveState::zeros(3), params, grad, 7.5);
  const auto adam = adam_step(hyper, AdamState::zeros(3), params, grad, hyper.alpha1);
  EXPECT_EQ(eve.params, adam.params);
  EXPECT_EQ(eve.state.d_tilde, 1.0);
  EXPECT_EQ(eve.state.f_prev, 7.5);
  EXPECT_TRUE(eve.state.started);
  EXPECT_FALSE(eve.coefficients.d.has_value());
  EXPECT_EQ(eve.coefficients.alpha_t, hyper.alpha1);
}

TEST(EveStep, SecondStepHandTrace) {
  const EveHyper hyper;
  const Vector grad{0.1};
  const auto s1 = eve_step(hyper, EveState::zeros(1), Vector{0.0}, grad, 1.0);
  const auto s2 = eve_step(hyper, s1.state, s1.params, grad, 0.8);
  EXPECT_NEAR(*s2.coefficients.d, 0.25, 1e-15);
  EXPECT_NEAR(*s2.coefficients.d_hat, 0.25, 1e-15);
  EXPECT_LT(rel_err(s2.state.d_tilde, 0.99925), 1e-15);
  EXPECT_LT(rel_err(s2.coefficients.alpha_t, 1e-3 / 0.99925), 1e-15);
  const auto adam = adam_step(hyper, s1.state.adam, s1.params, grad, s2.coefficients.alpha_t);
  EXPECT_EQ(s2.params, adam.params);
}

TEST(EveStep, FlatLossRaisesLearningRate) {
  const EveHyper hyper;
  const auto s1 = eve_step(hyper, EveState::zeros(1), Vector{0.0}, Vector{0.1}, 1.0);
  const auto s2 = eve_step(hyper, s1.state, s1.params, Vector{0.1}, 1.0);
  EXPECT_EQ(*s2.coefficients.d, 0.0);
  EXPECT_EQ(*s2.coefficients.d_hat, 0.1);
  EXPECT_LT(rel_err(s2.state.d_tilde, 0.9991), 1e-15);
  EXPECT_GT(s2.coefficients.alpha_t, hyper.alpha1);
}

TEST(EveStep, RejectsNonFiniteLossAndGradient) {
  const EveHyper hyper;
  const auto state = EveState::zeros(2);
  EXPECT_THROW(eve_step(hyper, state, Vector(2, 0.0), Vector(2, 0.1), std::nan("")), NonFiniteError);
  EXPECT_THROW(eve_step(hyper, state, Vector(2, 0.0), Vector{0.1, HUGE_VAL}, 1.0), NonFiniteError);
}

TEST(EveStep, BetaThreeZeroDisablesSmoothing) {
  EveHyper hyper;
  hyper.beta3 = 0.0;
  auto s = eve_step(hyper, EveState::zeros(1), Vector{0.0}, Vector{0.1}, 1.0);
  for (double f : {0.9, 0.95, 0.2, 0.2, 5.0}) {
    s = eve_step(hyper, s.state, s.params, Vector{0.1}, f);
    EXPECT_EQ(s.state.d_tilde, *s.coefficients.d_hat);
  }
}

// Random loss streams, including losses below f*, repeats and x1e4 spikes.
TEST(EveStep, CoefficientAndRateStayInBounds) {
  Rng rng(2024);
  for (int seq = 0; seq < 2000; ++seq) {
    EveHyper hyper;
    hyper.c = 1.0 + rng.uniform() * 30.0 + 1e-9;
    hyper.beta3 = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.0, 0.99999);
    hyper.alpha1 = std::pow(10.0, rng.uniform(-6.0, 0.0));
    hyper.f_star = rng.uniform() < 0.5 ? 0.0 : rng.uniform(-1.0, 1.0);
    auto state = EveState::zeros(2);
    Vector params{rng.normal(), rng.normal()};
    double f = rng.uniform(0.0, 5.0);
    for (int t = 0; t < 20; ++t) {
      const double u = rng.uniform();
      if (u < 0.1) {
        f *= 1e4;
      } else if (u < 0.2) {
        // repeat
      } else if (u < 0.3) {
        f = hyper.f_star - rng.uniform(0.0, 1.0);
      } else {
        f = std::abs(f * rng.uniform(0.5, 1.5)) + hyper.f_star;
      }
      const Vector grad{rng.normal(), rng.normal()};
      auto out = eve_step(hyper, state, params, grad, f);
      const auto& co = out.coefficients;
      if (co.d_hat) {
        ASSERT_GE(*co.d_hat, 1.0 / hyper.c);
        ASSERT_LE(*co.d_hat, hyper.c);
      }
      ASSERT_GE(co.d_tilde, 1.0 / hyper.c);
      ASSERT_LE(co.d_tilde, hyper.c);
      ASSERT_GE(co.alpha_t, hyper.alpha1 / hyper.c);
      ASSERT_LE(co.alpha_t, hyper.c * hyper.alpha1);
      state = std::move(out.state);
      params = std::move(out.params);
    }
  }
}

TEST(EveStep, PinnedFeedbackReproducesAdamBitwise) {
  const EveHyper hyper;
  Rng rng(5);
  auto eve = EveState::zeros(4);
  auto adam = AdamState::zeros(4);
  Vector pe(4, 1.0), pa(4, 1.0);
  for (int t = 0; t < 300; ++t) {
    Vector grad(4);
    for (double& g : grad) g = rng.normal();
    const double loss = rng.uniform(0.0, 3.0);
    auto e = eve_step(hyper, eve, pe, grad, loss, Feedback::pinned);
    auto a = adam_step(hyper, adam, pa, grad, hyper.alpha1);
    ASSERT_EQ(e.params, a.params);
    ASSERT_EQ(e.coefficients.alpha_t, hyper.alpha1);
    eve = std::move(e.state);
    adam = std::move(a.state);
    pe = std::move(e.params);
    pa = std::move(a.params);
  }
}

TEST(EveStep, RepeatingAStepIsDeterministic) {
  const EveHyper hyper;
  auto s = eve_step(hyper, EveState::zeros(3), Vector{1.0, 2.0, 3.0}, Vector{0.1, -0.2, 0.3}, 2.0);
  const EveState before = s.state;
  const Vector params = s.params;
  const auto a = eve_step(hyper, s.state, params, Vector{0.3, 0.2, 0.1}, 1.7);
  const auto b = eve_step(hyper, s.state, params, Vector{0.3, 0.2, 0.1}, 1.7);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.state.adam.m, b.state.adam.m);
  EXPECT_EQ(a.state.adam.v, b.state.adam.v);
  EXPECT_EQ(a.state.d_tilde, b.state.d_tilde);
  EXPECT_EQ(s.state.adam.m, before.adam.m);
  EXPECT_EQ(s.state.d_tilde, before.d_tilde);
  EXPECT_EQ(params, s.params);
}

// -- baselines -------------------------------------------------------------------

TEST(Nesterov, ZeroMomentumIsSgd) {
  const Vector params{1.0, -2.0};
  const Vector grad{0.5, 0.25};
  const auto out = nesterov_step(params, grad, NesterovState::zeros(2), 0.0, 0.1);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(out.params[i], params[i] - 0.1 * grad[i]);
}

TEST(Nesterov, ZeroGradientNeverMoves) {
  Vector params{0.7, 0.3};
  auto state = NesterovState::zeros(2);
  for (int i = 0; i < 10; ++i) {
    auto out = nesterov_step(params, Vector(2, 0.0), state, 0.9, 0.1);
    params = out.params;
    state = out.state;
  }
  EXPECT_EQ(params, (Vector{0.7, 0.3}));
}

TEST(Nesterov, OneStepHandEvaluation) {
  // v' = 0.9*0 - 0.1*1 = -0.1;  theta' = 0 - 0.1 + 0.9*(-0.1) = -0.19
  const auto out = nesterov_step(Vector{0.0}, Vector{1.0}, NesterovState::zeros(1), 0.9, 0.1);
  EXPECT_NEAR(out.state.velocity[0], -0.1, 1e-17);
  EXPECT_NEAR(out.params[0], -0.19, 1e-16);
}

TEST(Baselines, ZeroGradientOnFreshStateLeavesParams) {
  const Vector params{1.0, -0.5, 3.0};
  const Vector zero(3, 0.0);
  EXPECT_EQ(adagrad_step(params, zero, AdagradState::zeros(3), 0.1).params, params);
  EXPECT_EQ(rmsprop_step(params, zero, RmspropState::zeros(3), 0.1).params, params);
  EXPECT_EQ(adadelta_step(params, zero, AdadeltaState::zeros(3), 1.0).params, params);
  EXPECT_EQ(adamax_step(params, zero, AdamaxState::zeros(3), 0.1).params, params);
}

TEST(Baselines, ZeroGradientWithWarmSecondMomentsLeavesParams) {
  const Vector params{1.0, -0.5};
  const Vector zero(2, 0.0);
  EXPECT_EQ(adam_step(EveHyper{}, AdamState{5, {0.0, 0.0}, {0.3, 0.7}}, params, zero, 0.1).params, params);
  EXPECT_EQ(adagrad_step(params, zero, AdagradState{{2.0, 4.0}}, 0.1).params, params);
  EXPECT_EQ(rmsprop_step(params, zero, RmspropState{{2.0, 4.0}}, 0.1).params, params);
  EXPECT_EQ(adadelta_step(params, zero, AdadeltaState{{2.0, 4.0}, {0.1, 0.2}}, 1.0).params, params);
  EXPECT_EQ(adamax_step(params, zero, AdamaxState{3, {0.0, 0.0}, {1.0, 2.0}}, 0.1).params, params);
}

TEST(Adagrad, ConstantGradientAccumulatesLinearly) {
  const double g = 0.3;
  Vector params{0.0};
  auto state = AdagradState::zeros(1);
  double prev = 0.0;
  for (int t = 1; t <= 50; ++t) {
    auto out = adagrad_step(params, Vector{g}, state, 0.01);
    EXPECT_NEAR(out.state.accumulator[0], t * g * g, 1e-14);
    EXPECT_GT(out.state.accumulator[0], prev);
    prev = out.state.accumulator[0];
    params = out.params;
    state = out.state;
  }
}

TEST(Adagrad, AccumulatorNeverDecreases) {
  Rng rng(3);
  auto state = AdagradState::zeros(5);
  Vector params(5, 0.0);
  for (int t = 0; t < 1000; ++t) {
    Vector grad(5);
    for (double& g : grad) g = rng.uniform() < 0.3 ? 0.0 : rng.normal() * 10.0;
    auto out = adagrad_step(params, grad, state, 0.01);
    for (std::size_t i = 0; i < 5; ++i) ASSERT_GE(out.state.accumulator[i], state.accumulator[i]);
    state = out.state;
    params = out.params;
  }
}

TEST(Adamax, InfinityNormTracksConstantGradient) {
  const double g = -0.4;
  Vector params{1.0};
  auto state = AdamaxState::zeros(1);
  for (int t = 1; t <= 20; ++t) {
    auto out = adamax_step(params, Vector{g}, state, 2e-3);
    EXPECT_EQ(out.state.u[0], std::abs(g));  // max(0.999 * 0.4, 0.4) = 0.4
    params = out.params;
    state = out.state;
  }
}

TEST(Adamax, FirstStepMovesByAlpha) {
  // m1 = 0.1 g, correction 0.1, u1 = |g|  =>  step = alpha * sign(g)
  const auto out = adamax_step(Vector{0.0}, Vector{2.5}, AdamaxState::zeros(1), 2e-3);
  EXPECT_NEAR(out.params[0], -2e-3, 1e-17);
}

TEST(Rmsprop, FirstStepHandEvaluation) {
  // r = 0.1 g^2; step = alpha g / (sqrt(0.1) |g| + eps)
  const double g = 0.5;
  const auto out = rmsprop_step(Vector{0.0}, Vector{g}, RmspropState::zeros(1), 1e-3);
  EXPECT_NEAR(out.params[0], -1e-3 * g / (std::sqrt(0.1) * g + 1e-8), 1e-17);
}

TEST(Adadelta, FirstStepHandEvaluation) {
  const double g = 2.0;
  const auto out = adadelta_step(Vector{0.0}, Vector{g}, AdadeltaState::zeros(1), 1.0);
  const double eg = 0.05 * g * g;
  const double dx = -std::sqrt(1e-6) / std::sqrt(eg + 1e-6) * g;
  EXPECT_NEAR(out.params[0], dx, 1e-15 * std::abs(dx));
  EXPECT_NEAR(out.state.mean_square_update[0], 0.05 * dx * dx, 1e-15 * dx * dx);
}

TEST(Baselines, RejectNonFiniteGradients) {
  const Vector params(2, 0.0);
  const Vector bad{0.0, std::nan("")};
  EXPECT_THROW(nesterov_step(params, bad, NesterovState::zeros(2), 0.9, 0.1), NonFiniteError);
  EXPECT_THROW(adagrad_step(params, bad, AdagradState::zeros(2), 0.1), NonFiniteError);
  EXPECT_THROW(rmsprop_step(params, bad, RmspropState::zeros(2), 0.1), NonFiniteError);
  EXPECT_THROW(adadelta_step(params, bad, AdadeltaState::zeros(2), 1.0), NonFiniteError);
  EXPECT_THROW(adamax_step(params, bad, AdamaxState::zeros(2), 0.1), NonFiniteError);
}
