#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "eveopt/error.hpp"
#include "eveopt/text.hpp"
#include "svg_chart.hpp"

namespace eveopt::cli {
namespace fs = std::filesystem;
using harness::Cell;
using harness::ExperimentConfig;
using harness::RunStatus;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out.flush()) throw std::runtime_error("write failed for " + path.string());
}

ExperimentConfig load(const fs::path& path, const Overrides& overrides) {
  auto config = harness::parse_experiment(read_file(path));
  if (overrides.seed) config.run.seed = *overrides.seed;
  if (overrides.force_d1) config.run.force_d1 = true;
  harness::validate(config.run);
  return config;
}

void write_cell(const fs::path& dir, const std::string& stem, const harness::Trace& trace) {
  write_file(dir / (stem + ".csv"), harness::trace_csv(trace.records));
  write_file(dir / (stem + ".meta"), harness::serialize_meta(trace.config, trace.summary));
}

int write_cells(const fs::path& dir, const std::vector<Cell>& ranked, std::ostream& out) {
  bool aborted = false;
  for (const auto& cell : ranked) {
    write_cell(dir, cell.id, cell.trace);
    aborted |= cell.trace.summary.status == RunStatus::aborted;
  }
  write_file(dir / "ranking.csv", ranking_csv(ranked));
  out << "cells: " << ranked.size() << ", ranking: " << (dir / "ranking.csv").string() << '\n';
  if (!ranked.empty()) {
    out << "best: " << ranked.front().id << " final_loss=" << text::format_double(ranked.front().trace.summary.final_loss)
        << '\n';
  }
  return aborted ? kExitAborted : kExitOk;
}

// Shared shell: load config, then execute `body` with errors mapped to exit
// codes. Output directory is created only after the config validated.
template <class Body>
int guarded(const fs::path& config_path, const fs::path& out_dir, const Overrides& overrides, std::ostream& err,
            Body&& body) {
  ExperimentConfig config;
  try {
    config = load(config_path, overrides);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    fs::create_directories(out_dir);
    return body(config);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitAborted;
  }
}

}  // namespace

std::string ranking_csv(const std::vector<Cell>& ranked) {
  std::ostringstream out;
  out << "rank,cell,optimizer,lr,final_loss,status\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& cell = ranked[i];
    out << i + 1 << ',' << cell.id << ',' << optim::to_string(cell.trace.config.optimizer.kind) << ','
        << text::format_double(cell.trace.config.optimizer.lr) << ','
        << text::format_double(cell.trace.summary.final_loss) << ',' << harness::to_string(cell.trace.summary.status)
        << '\n';
  }
  return out.str();
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir, const Overrides& overrides, std::ostream& out,
            std::ostream& err) {
  return guarded(config_path, out_dir, overrides, err, [&](const ExperimentConfig& config) {
    const auto trace = harness::run(config.run);
    const std::string stem =
        config.run.trace ? fs::path(*config.run.trace).filename().replace_extension().string() : "run";
    write_cell(out_dir, stem, trace);
    const auto& s = trace.summary;
    out << "run: optimizer=" << optim::to_string(config.run.optimizer.kind) << " steps=" << s.steps
        << " initial_loss=" << text::format_double(s.initial_loss)
        << " final_loss=" << text::format_double(s.final_loss) << " status=" << harness::to_string(s.status);
    if (!s.message.empty()) out << " (" << s.message << ")";
    out << '\n';
    return s.status == RunStatus::ok ? kExitOk : kExitAborted;
  });
}

int cmd_sweep(const fs::path& config_path, const fs::path& out_dir, const Overrides& overrides, std::ostream& out,
              std::ostream& err) {
  return guarded(config_path, out_dir, overrides, err, [&](const ExperimentConfig& config) {
    std::vector<optim::OptimizerKind> kinds = config.sweep.optimizers;
    if (kinds.empty()) kinds.push_back(config.run.optimizer.kind);
    const auto ranked =
        harness::compare_optimizers(config.run, kinds, config.sweep.lr_grid, config.sweep.prescribed_lrs);
    for (auto kind : kinds) {
      auto it = std::find_if(ranked.begin(), ranked.end(),
                             [&](const Cell& c) { return c.trace.config.optimizer.kind == kind; });
      if (it != ranked.end()) {
        out << "selected " << optim::to_string(kind) << ": lr=" << text::format_double(it->trace.config.optimizer.lr)
            << " final_loss=" << text::format_double(it->trace.summary.final_loss) << '\n';
      }
    }
    return write_cells(out_dir, ranked, out);
  });
}

int cmd_decay(const fs::path& config_path, const fs::path& out_dir, const Overrides& overrides, std::ostream& out,
              std::ostream& err) {
  return guarded(config_path, out_dir, overrides, err, [&](const ExperimentConfig& config) {
    const auto result =
        harness::decay_sweep(config.run, config.sweep.decay_kinds, config.sweep.k_grid, config.sweep.lr_grid);
    for (const auto& [kind, id] : result.best) out << "best " << schedules::to_string(kind) << ": " << id << '\n';
    return write_cells(out_dir, result.ranked, out);
  });
}

int cmd_hyper(const fs::path& config_path, const fs::path& out_dir, const Overrides& overrides, std::ostream& out,
              std::ostream& err) {
  return guarded(config_path, out_dir, overrides, err, [&](const ExperimentConfig& config) {
    auto result = harness::hyper_grid(config.run, config.sweep.beta3_grid, config.sweep.c_grid);
    std::vector<Cell> ranked = std::move(result.cells);
    ranked.push_back(std::move(result.adam_reference));
    harness::rank_cells(ranked);
    return write_cells(out_dir, ranked, out);
  });
}

int cmd_plot(const std::vector<fs::path>& traces, const fs::path& out_svg, const PlotOptions& options,
             std::ostream& out, std::ostream& err) {
  if (traces.empty()) {
    err << "error: plot needs at least one trace\n";
    return kExitUsage;
  }
  struct Entry {
    Series series;
    double final_loss;
    std::size_t order;
  };
  std::vector<Entry> entries;
  try {
    for (std::size_t k = 0; k < traces.size(); ++k) {
      std::ifstream in(traces[k]);
      if (!in) throw UsageError("cannot read " + traces[k].string());
      const auto records = harness::read_trace_csv(in);
      if (records.empty()) throw UsageError(traces[k].string() + ": trace has no rows");

      std::map<std::uint64_t, std::pair<double, std::size_t>> per_epoch;
      for (const auto& r : records) {
        auto& [sum, count] = per_epoch[r.epoch];
        sum += r.f_t;
        ++count;
      }
      Entry entry{{traces[k].stem().string(), {}, {}}, HUGE_VAL, k};
      for (const auto& [epoch, acc] : per_epoch) {
        entry.series.x.push_back(static_cast<double>(epoch + 1));
        entry.series.y.push_back(acc.first / static_cast<double>(acc.second));
      }
      entry.final_loss = entry.series.y.back();

      auto meta_path = traces[k];
      meta_path.replace_extension(".meta");
      if (fs::exists(meta_path)) {
        const auto meta = harness::parse_meta(read_file(meta_path));
        entry.series.label = std::string(optim::to_string(meta.config.optimizer.kind)) +
                             " (lr=" + harness::short_number(meta.config.optimizer.lr) + ")";
        entry.final_loss = meta.summary.status == RunStatus::ok ? meta.summary.final_loss : HUGE_VAL;
      }
      entries.push_back(std::move(entry));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.final_loss != b.final_loss) return a.final_loss < b.final_loss;
    return a.order < b.order;
  });
  std::vector<Series> series;
  for (auto& e : entries) series.push_back(std::move(e.series));

  ChartOptions chart;
  chart.log_y = options.log_y;
  chart.title = options.title;
  try {
    const auto svg = render_line_chart(series, chart);
    if (out_svg.has_parent_path()) fs::create_directories(out_svg.parent_path());
    write_file(out_svg, svg);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitAborted;
  }
  out << "plot: " << series.size() << " series -> " << out_svg.string() << '\n';
  return kExitOk;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"eve-opt: Eve / Adam-family optimizer experiments"};
  app.require_subcommand(1);

  fs::path config_path;
  fs::path out_path;
  std::uint64_t seed = 0;
  bool force_d1 = false;
  bool log_y = false;
  std::string title;
  std::vector<std::string> trace_files;

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const fs::path&, const fs::path&, const Overrides&, std::ostream&, std::ostream&);
  };
  const Sub subs[] = {
      {"run", "Run one experiment and write its trace", &cmd_run},
      {"sweep", "Learning-rate grid search (optionally over several optimizers)", &cmd_sweep},
      {"decay", "Adam decay-policy sweep over (kind, k, lr)", &cmd_decay},
      {"hyper", "Eve (beta3, c) grid plus an Adam reference", &cmd_hyper},
  };
  std::vector<CLI::App*> experiment_cmds;
  CLI::Option* seed_opt = nullptr;
  std::vector<CLI::Option*> seed_opts;
  for (const auto& sub : subs) {
    auto* cmd = app.add_subcommand(sub.name, sub.help);
    cmd->add_option("--config", config_path, "Experiment config file")->required();
    cmd->add_option("--out", out_path, "Output directory")->required();
    seed_opts.push_back(cmd->add_option("--seed", seed, "Override the master seed"));
    cmd->add_flag("--force-d1", force_d1, "Pin Eve's clipped coefficient to 1 (reduces to Adam)");
    experiment_cmds.push_back(cmd);
  }
  auto* plot = app.add_subcommand("plot", "Render trace CSVs as an SVG loss chart");
  plot->add_option("traces", trace_files, "Trace CSV files")->required();
  plot->add_option("--out", out_path, "Output SVG path")->required();
  plot->add_flag("--log-y", log_y, "Logarithmic loss axis");
  plot->add_option("--title", title, "Chart title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  for (std::size_t i = 0; i < experiment_cmds.size(); ++i) {
    if (experiment_cmds[i]->parsed()) {
      seed_opt = seed_opts[i];
      Overrides overrides;
      if (seed_opt->count() > 0) overrides.seed = seed;
      overrides.force_d1 = force_d1;
      return subs[i].fn(config_path, out_path, overrides, out, err);
    }
  }
  std::vector<fs::path> paths(trace_files.begin(), trace_files.end());
  return cmd_plot(paths, out_path, PlotOptions{log_y, title}, out, err);
}

}  // namespace eveopt::cli
