#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eveopt/config.hpp"

namespace eveopt::harness {

enum class RunStatus { ok, aborted };

std::string_view to_string(RunStatus status);
std::optional<RunStatus> parse_status(std::string_view s);

struct StepRecord {
  std::uint64_t t = 0;      // 1-based step index
  std::uint64_t epoch = 0;  // 0-based
  double f_t = 0.0;         // minibatch loss before the update
  std::optional<double> d;  // Eve only
  std::optional<double> d_hat;
  std::optional<double> d_tilde;
  double alpha_t = 0.0;
  double grad_norm = 0.0;
  double wall_ms = 0.0;

  bool operator==(const StepRecord&) const = default;
};

struct TraceSummary {
  double initial_loss = 0.0;  // full training set, before the first step
  double final_loss = 0.0;    // full training set, after the last step (NaN when aborted)
  double best_loss = 0.0;     // min of initial_loss and every recorded f_t
  std::uint64_t steps = 0;
  RunStatus status = RunStatus::ok;
  std::string message;

  bool operator==(const TraceSummary&) const = default;
};

struct Trace {
  RunConfig config;
  std::vector<StepRecord> records;
  TraceSummary summary;
  /// Parameters after each step; filled only when requested.
  std::vector<std::vector<double>> params_history;
};

inline constexpr std::string_view kTraceCsvHeader = "t,epoch,f_t,d_t,d_hat_t,d_tilde_t,alpha_t,grad_norm,wall_ms";

/// One row per record. Empty fields mark non-applicable Eve columns. With
/// include_wall = false the wall_ms column is dropped entirely, which makes
/// the output a pure function of the configuration.
void write_trace_csv(const std::vector<StepRecord>& records, std::ostream& out, bool include_wall = true);
std::string trace_csv(const std::vector<StepRecord>& records, bool include_wall = true);

/// Accepts the full header, or the header without wall_ms.
std::vector<StepRecord> read_trace_csv(std::istream& in);

/// Sidecar "<cell>.meta": the run configuration followed by summary.* keys.
std::string serialize_meta(const RunConfig& config, const TraceSummary& summary);

struct TraceMeta {
  RunConfig config;
  TraceSummary summary;
};
TraceMeta parse_meta(std::string_view text);

}  // namespace eveopt::harness
