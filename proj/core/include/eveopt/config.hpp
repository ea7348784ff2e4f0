#pragma once

// Experiment configuration and its flat "key = value" text form.
//
// One key per line, '#' starts a comment, blank lines are ignored. Lists
// are comma separated. serialize() writes every key of a RunConfig in a
// fixed order with 17 significant digits, so parse(serialize(c)) == c.
// See README.md for the key reference.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eveopt/optimizer.hpp"
#include "eveopt/problems.hpp"
#include "eveopt/schedules.hpp"

namespace eveopt::harness {

enum class ProblemKind { quadratic, rosenbrock, logreg, mlp };

std::string_view to_string(ProblemKind kind);
std::optional<ProblemKind> parse_problem(std::string_view name);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::quadratic;

  // quadratic
  std::vector<double> diagonal = {1.0, 1.0};
  double noise = 0.0;

  // classifiers (logreg, mlp)
  std::size_t n = 1024;
  std::size_t d = 8;
  std::size_t classes = 4;
  double separation = problems::kDefaultSeparation;
  std::uint64_t data_seed = 1;
  std::vector<std::size_t> hidden = {32};
  problems::Activation activation = problems::Activation::tanh;

  std::optional<std::vector<double>> init;
  std::optional<double> f_star;

  bool operator==(const ProblemSpec&) const = default;
};

struct RunConfig {
  ProblemSpec problem;
  optim::OptimizerSettings optimizer;
  schedules::DecayKind decay = schedules::DecayKind::constant;
  double decay_gamma = 0.0;
  /// When set, gamma is solved so the rate after the last step is lr / k.
  std::optional<double> decay_k;
  std::uint64_t epochs = 100;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
  bool force_d1 = false;
  std::optional<std::string> trace;

  bool operator==(const RunConfig&) const = default;
};

/// Grids for the sweep subcommands; read from "sweep.*" keys.
struct SweepSpec {
  std::vector<double> lr_grid;
  std::vector<optim::OptimizerKind> optimizers;  // empty: the run's optimizer
  bool prescribed_lrs = true;
  std::vector<schedules::DecayKind> decay_kinds;
  std::vector<double> k_grid;
  std::vector<double> beta3_grid;
  std::vector<double> c_grid;

  SweepSpec();
  bool operator==(const SweepSpec&) const = default;
};

struct ExperimentConfig {
  RunConfig run;
  SweepSpec sweep;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Learning rates 1e-6, 5e-6, ..., 5e-2, 1e-1.
std::vector<double> default_lr_grid();
std::vector<double> default_beta3_grid();
std::vector<double> default_c_grid();

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// Throws ConfigError on malformed lines or duplicate keys.
KeyValues parse_key_values(std::string_view text);

/// Builds a RunConfig from the keys it recognizes, erasing them from `kv`.
RunConfig take_run_config(KeyValues& kv);
SweepSpec take_sweep_spec(KeyValues& kv);

/// Whole-file parsers: unknown keys are an error. Both validate.
RunConfig parse_run_config(std::string_view text);
ExperimentConfig parse_experiment(std::string_view text);

std::string serialize(const RunConfig& config);
std::string serialize(const ExperimentConfig& config);

/// Throws ConfigError describing the first problem found.
void validate(const RunConfig& config);

/// The data-free problems have one virtual example: one step per epoch.
bool is_data_free(ProblemKind kind);
std::uint64_t steps_per_epoch(const RunConfig& config);
std::uint64_t total_steps(const RunConfig& config);

/// Decay strength actually applied (solved from decay_k if present).
double effective_gamma(const RunConfig& config);

}  // namespace eveopt::harness
