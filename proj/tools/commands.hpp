#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eveopt/harness.hpp"

namespace eveopt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAborted = 1;
inline constexpr int kExitUsage = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  bool force_d1 = false;
};

/// Each command reads a config file, writes only under `out_dir`, prints a
/// summary to `out` and diagnostics to `err`. Exit codes: 0 when every run
/// completed, 1 when any run aborted, 2 for unreadable or invalid config
/// (in which case nothing is written).
int cmd_run(const std::filesystem::path& config, const std::filesystem::path& out_dir, const Overrides& overrides,
            std::ostream& out, std::ostream& err);
int cmd_sweep(const std::filesystem::path& config, const std::filesystem::path& out_dir,
              const Overrides& overrides, std::ostream& out, std::ostream& err);
int cmd_decay(const std::filesystem::path& config, const std::filesystem::path& out_dir,
              const Overrides& overrides, std::ostream& out, std::ostream& err);
int cmd_hyper(const std::filesystem::path& config, const std::filesystem::path& out_dir,
              const Overrides& overrides, std::ostream& out, std::ostream& err);

struct PlotOptions {
  bool log_y = false;
  std::string title;
};

/// Loss-vs-epoch chart, one polyline per trace CSV (per-epoch mean of
/// f_t). A sibling "<name>.meta" supplies the legend name and final loss;
/// series are ordered by final loss, best first.
int cmd_plot(const std::vector<std::filesystem::path>& traces, const std::filesystem::path& out_svg,
             const PlotOptions& options, std::ostream& out, std::ostream& err);

/// ranking.csv: rank,cell,optimizer,lr,final_loss,status in ranked order.
std::string ranking_csv(const std::vector<harness::Cell>& ranked);

/// Full command-line entry point.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace eveopt::cli
