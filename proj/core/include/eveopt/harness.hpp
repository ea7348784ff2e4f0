#pragma once

// Seeded experiment runner and the three comparison protocols built on it:
// learning-rate grid search, decay sweep for Adam, and the (beta3, c) grid
// for Eve.
//
// Seeds: the master seed drives parameter initialization, minibatch order
// and gradient noise through independent derived streams; data.seed alone
// drives dataset generation, so every optimizer in a comparison sees the
// same data, the same initialization and the same minibatch splits.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "eveopt/config.hpp"
#include "eveopt/problems.hpp"
#include "eveopt/trace.hpp"

namespace eveopt::harness {

std::unique_ptr<problems::Problem> make_problem(const RunConfig& config);

struct RunOptions {
  bool record_params = false;
};

/// Executes epochs x steps_per_epoch steps. A non-finite loss or gradient
/// stops the run: the records so far are kept and the summary status is
/// `aborted`. Throws ConfigError for an invalid config before any work.
Trace run(const RunConfig& config, const RunOptions& options = {});

/// Sweep parallelism. threads == 0 means default_threads().
struct ExecutionOptions {
  unsigned threads = 0;
};

/// Hardware concurrency, capped by the EVE_OPT_THREADS environment variable
/// when it holds a positive integer.
unsigned default_threads();

/// Runs every config, possibly concurrently; output order matches input.
std::vector<Trace> run_all(const std::vector<RunConfig>& configs, const ExecutionOptions& exec = {});

struct Cell {
  std::string id;
  Trace trace;
};

/// Ranking order: completed runs by ascending final loss, ties to the
/// smaller learning rate, then by id; aborted runs last, by learning rate
/// then id.
bool ranks_before(const Cell& a, const Cell& b);
void rank_cells(std::vector<Cell>& cells);

/// The same order computed from persisted (id, lr, final loss, status).
struct RankKey {
  std::string id;
  double lr = 0.0;
  double final_loss = 0.0;
  RunStatus status = RunStatus::ok;
};
bool ranks_before(const RankKey& a, const RankKey& b);

/// Learning rates searched for `kind`: the grid plus, when requested, the
/// method's prescribed default if the grid lacks it.
std::vector<double> learning_rates_for(optim::OptimizerKind kind, std::span<const double> grid,
                                       bool with_prescribed);

/// One run per learning rate of the base optimizer; ranked.
std::vector<Cell> grid_search(const RunConfig& base, std::span<const double> lr_grid,
                              const ExecutionOptions& exec = {}, bool with_prescribed = false);

/// Grid search for several optimizers on a shared seed; one ranking over
/// all cells.
std::vector<Cell> compare_optimizers(const RunConfig& base, std::span<const optim::OptimizerKind> kinds,
                                     std::span<const double> lr_grid, bool with_prescribed,
                                     const ExecutionOptions& exec = {});

struct DecaySweepResult {
  std::vector<Cell> ranked;
  /// Best cell id per decay kind, in the order kinds were given.
  std::vector<std::pair<schedules::DecayKind, std::string>> best;
};

/// Adam with every (kind, k, lr): gamma solved so the rate after the last
/// step is lr / k. Throws ConfigError unless base uses Adam.
DecaySweepResult decay_sweep(const RunConfig& base, std::span<const schedules::DecayKind> kinds,
                             std::span<const double> k_grid, std::span<const double> lr_grid,
                             const ExecutionOptions& exec = {});

struct HyperGridResult {
  std::vector<double> beta3_grid;
  std::vector<double> c_grid;
  std::vector<Cell> cells;  // row-major: beta3 index major, c index minor
  Cell adam_reference;

  const Cell& at(std::size_t beta3_index, std::size_t c_index) const {
    return cells[beta3_index * c_grid.size() + c_index];
  }
};

/// One Eve run per (beta3, c) plus an Adam run with the same seed and
/// shared hyperparameters. Throws ConfigError unless base uses Eve.
HyperGridResult hyper_grid(const RunConfig& base, std::span<const double> beta3_grid,
                           std::span<const double> c_grid, const ExecutionOptions& exec = {});

/// Short label for a number in cell ids ("%g").
std::string short_number(double x);

}  // namespace eveopt::harness
