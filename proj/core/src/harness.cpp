#include "eveopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>

#include "eveopt/error.hpp"
#include "eveopt/optimizer.hpp"
#include "eveopt/rng.hpp"
#include "eveopt/text.hpp"

namespace eveopt::harness {
namespace {

using optim::OptimizerKind;

double l2_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

void abort_trace(Trace& trace, std::string message) {
  trace.summary.status = RunStatus::aborted;
  trace.summary.message = std::move(message);
  trace.summary.final_loss = std::nan("");
}

}  // namespace

std::unique_ptr<problems::Problem> make_problem(const RunConfig& config) {
  const ProblemSpec& p = config.problem;
  std::unique_ptr<problems::Problem> problem;
  switch (p.kind) {
    case ProblemKind::quadratic:
      problem = std::make_unique<problems::Quadratic>(p.diagonal, p.noise, config.seed);
      break;
    case ProblemKind::rosenbrock: problem = std::make_unique<problems::Rosenbrock>(); break;
    case ProblemKind::logreg:
    case ProblemKind::mlp: {
      auto data = std::make_shared<const problems::Dataset>(
          problems::make_blobs(p.data_seed, p.n, p.d, p.classes, p.separation));
      if (p.kind == ProblemKind::logreg) {
        problem = std::make_unique<problems::LogisticRegression>(std::move(data));
      } else {
        std::vector<std::size_t> layers{p.d};
        layers.insert(layers.end(), p.hidden.begin(), p.hidden.end());
        layers.push_back(p.classes);
        problem = std::make_unique<problems::Mlp>(problems::MlpArch{layers, p.activation}, std::move(data));
      }
      break;
    }
  }
  if (p.f_star) problem->set_f_star(*p.f_star);
  return problem;
}

Trace run(const RunConfig& config, const RunOptions& options) {
  validate(config);
  const auto problem = make_problem(config);

  Trace trace;
  trace.config = config;

  std::vector<double> params =
      config.problem.init ? *config.problem.init : problem->initial_params(derive_seed(config.seed, streams::init));
  optim::Optimizer optimizer(config.optimizer, problem->dim(), problem->f_star(),
                             config.force_d1 ? optim::Feedback::pinned : optim::Feedback::objective,
                             /*allow_zero_eps=*/true);
  const schedules::DecayPolicy policy{config.decay, effective_gamma(config), config.optimizer.lr};

  const double initial = problem->evaluate_full(params).loss;
  trace.summary.initial_loss = initial;
  trace.summary.best_loss = initial;
  if (!std::isfinite(initial)) {
    abort_trace(trace, "non-finite initial loss");
    return trace;
  }

  const std::size_t n = problem->num_examples();
  const std::size_t batch_size = is_data_free(config.problem.kind) ? 1 : config.batch_size;
  trace.records.reserve(static_cast<std::size_t>(total_steps(config)));

  std::uint64_t t = 0;
  for (std::uint64_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto batches = problems::epoch_batches(config.seed, n, batch_size, epoch);
    for (const auto& indices : batches) {
      ++t;
      const auto start = std::chrono::steady_clock::now();
      auto eval = problem->evaluate(params, problems::Batch{indices, t});
      if (!std::isfinite(eval.loss)) {
        abort_trace(trace, "non-finite loss at step " + std::to_string(t));
        return trace;
      }
      StepRecord record;
      record.t = t;
      record.epoch = epoch;
      record.f_t = eval.loss;
      record.grad_norm = l2_norm(eval.grad);
      try {
        const auto info = optimizer.step(params, eval.grad, eval.loss, schedules::schedule_alpha(policy, t));
        record.d = info.d;
        record.d_hat = info.d_hat;
        record.d_tilde = info.d_tilde;
        record.alpha_t = info.alpha_t;
      } catch (const NonFiniteError& e) {
        abort_trace(trace, "step " + std::to_string(t) + " rejected: " + e.what());
        return trace;
      }
      record.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      trace.summary.best_loss = std::min(trace.summary.best_loss, record.f_t);
      trace.summary.steps = t;
      trace.records.push_back(record);
      if (options.record_params) trace.params_history.push_back(params);
    }
  }

  if (!all_finite(params)) {
    abort_trace(trace, "non-finite parameters after step " + std::to_string(t));
    return trace;
  }
  trace.summary.final_loss = problem->evaluate_full(params).loss;
  if (!std::isfinite(trace.summary.final_loss)) abort_trace(trace, "non-finite final loss");
  return trace;
}

unsigned default_threads() {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EVE_OPT_THREADS")) {
    if (auto cap = text::parse_uint(env); cap && *cap > 0) threads = std::min<unsigned>(threads, static_cast<unsigned>(*cap));
  }
  return threads;
}

std::vector<Trace> run_all(const std::vector<RunConfig>& configs, const ExecutionOptions& exec) {
  for (const auto& c : configs) validate(c);
  std::vector<Trace> traces(configs.size());
  const unsigned threads =
      std::min<unsigned>(exec.threads ? exec.threads : default_threads(), static_cast<unsigned>(configs.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) traces[i] = run(configs[i]);
    return traces;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(configs.size());
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
          try {
            traces[i] = run(configs[i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return traces;
}

bool ranks_before(const RankKey& a, const RankKey& b) {
  if (a.status != b.status) return a.status == RunStatus::ok;
  if (a.status == RunStatus::ok && a.final_loss != b.final_loss) return a.final_loss < b.final_loss;
  if (a.lr != b.lr) return a.lr < b.lr;
  return a.id < b.id;
}

bool ranks_before(const Cell& a, const Cell& b) {
  return ranks_before(RankKey{a.id, a.trace.config.optimizer.lr, a.trace.summary.final_loss, a.trace.summary.status},
                      RankKey{b.id, b.trace.config.optimizer.lr, b.trace.summary.final_loss, b.trace.summary.status});
}

void rank_cells(std::vector<Cell>& cells) {
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return ranks_before(a, b); });
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::vector<double> learning_rates_for(OptimizerKind kind, std::span<const double> grid, bool with_prescribed) {
  std::vector<double> lrs(grid.begin(), grid.end());
  if (with_prescribed) {
    if (auto lr = optim::prescribed_learning_rate(kind); lr && std::find(lrs.begin(), lrs.end(), *lr) == lrs.end()) {
      lrs.push_back(*lr);
    }
  }
  return lrs;
}

namespace {

std::vector<Cell> run_cells(std::vector<std::string> ids, const std::vector<RunConfig>& configs,
                            const ExecutionOptions& exec) {
  auto traces = run_all(configs, exec);
  std::vector<Cell> cells;
  cells.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) cells.push_back(Cell{std::move(ids[i]), std::move(traces[i])});
  return cells;
}

}  // namespace

std::vector<Cell> compare_optimizers(const RunConfig& base, std::span<const OptimizerKind> kinds,
                                     std::span<const double> lr_grid, bool with_prescribed,
                                     const ExecutionOptions& exec) {
  if (lr_grid.empty()) throw ConfigError("learning-rate grid must be nonempty");
  std::vector<std::string> ids;
  std::vector<RunConfig> configs;
  for (auto kind : kinds) {
    for (double lr : learning_rates_for(kind, lr_grid, with_prescribed)) {
      RunConfig c = base;
      c.optimizer.kind = kind;
      c.optimizer.lr = lr;
      c.force_d1 = base.force_d1 && kind == OptimizerKind::eve;
      if (kind == OptimizerKind::eve) {
        c.decay = schedules::DecayKind::constant;
        c.decay_gamma = 0.0;
        c.decay_k.reset();
      }
      c.trace.reset();
      ids.push_back(std::string(optim::to_string(kind)) + "_lr" + short_number(lr));
      configs.push_back(std::move(c));
    }
  }
  auto cells = run_cells(std::move(ids), configs, exec);
  rank_cells(cells);
  return cells;
}

std::vector<Cell> grid_search(const RunConfig& base, std::span<const double> lr_grid, const ExecutionOptions& exec,
                              bool with_prescribed) {
  const OptimizerKind kind = base.optimizer.kind;
  return compare_optimizers(base, std::span<const OptimizerKind>(&kind, 1), lr_grid, with_prescribed, exec);
}

DecaySweepResult decay_sweep(const RunConfig& base, std::span<const schedules::DecayKind> kinds,
                             std::span<const double> k_grid, std::span<const double> lr_grid,
                             const ExecutionOptions& exec) {
  if (base.optimizer.kind != OptimizerKind::adam) throw ConfigError("decay sweep requires optimizer = adam");
  if (kinds.empty() || k_grid.empty() || lr_grid.empty()) throw ConfigError("decay sweep grids must be nonempty");
  std::vector<std::string> ids;
  std::vector<RunConfig> configs;
  for (auto kind : kinds) {
    for (double k : k_grid) {
      for (double lr : lr_grid) {
        RunConfig c = base;
        c.optimizer.lr = lr;
        c.decay = kind;
        c.decay_gamma = 0.0;
        c.decay_k = k;
        c.trace.reset();
        ids.push_back("adam_" + std::string(schedules::to_string(kind)) + "_k" + short_number(k) + "_lr" +
                      short_number(lr));
        configs.push_back(std::move(c));
      }
    }
  }
  DecaySweepResult result;
  result.ranked = run_cells(std::move(ids), configs, exec);
  rank_cells(result.ranked);
  for (auto kind : kinds) {
    auto it = std::find_if(result.ranked.begin(), result.ranked.end(),
                           [&](const Cell& cell) { return cell.trace.config.decay == kind; });
    if (it != result.ranked.end()) result.best.emplace_back(kind, it->id);
  }
  return result;
}

HyperGridResult hyper_grid(const RunConfig& base, std::span<const double> beta3_grid, std::span<const double> c_grid,
                           const ExecutionOptions& exec) {
  if (base.optimizer.kind != OptimizerKind::eve) throw ConfigError("hyper grid requires optimizer = eve");
  if (beta3_grid.empty() || c_grid.empty()) throw ConfigError("hyper grid axes must be nonempty");
  std::vector<std::string> ids;
  std::vector<RunConfig> configs;
  for (double beta3 : beta3_grid) {
    for (double c : c_grid) {
      RunConfig cfg = base;
      cfg.optimizer.beta3 = beta3;
      cfg.optimizer.c = c;
      cfg.trace.reset();
      ids.push_back("eve_b" + short_number(beta3) + "_c" + short_number(c));
      configs.push_back(std::move(cfg));
    }
  }
  RunConfig adam = base;
  adam.optimizer.kind = OptimizerKind::adam;
  adam.force_d1 = false;
  adam.trace.reset();
  ids.push_back("adam_ref");
  configs.push_back(std::move(adam));

  auto cells = run_cells(std::move(ids), configs, exec);
  HyperGridResult result;
  result.beta3_grid.assign(beta3_grid.begin(), beta3_grid.end());
  result.c_grid.assign(c_grid.begin(), c_grid.end());
  result.adam_reference = std::move(cells.back());
  cells.pop_back();
  result.cells = std::move(cells);
  return result;
}

}  // namespace eveopt::harness
