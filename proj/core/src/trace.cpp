#include "eveopt/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "eveopt/error.hpp"
#include "eveopt/text.hpp"

namespace eveopt::harness {
namespace {

std::string optional_field(const std::optional<double>& x) { return x ? text::format_double(*x) : std::string(); }

double required_double(std::string_view s, std::string_view column) {
  auto v = text::parse_double(s);
  if (!v) throw ConfigError("trace csv: bad value in column " + std::string(column));
  return *v;
}

std::optional<double> optional_double(std::string_view s, std::string_view column) {
  if (text::trim(s).empty()) return std::nullopt;
  return required_double(s, column);
}

}  // namespace

std::string_view to_string(RunStatus status) { return status == RunStatus::ok ? "ok" : "aborted"; }

std::optional<RunStatus> parse_status(std::string_view s) {
  if (s == "ok") return RunStatus::ok;
  if (s == "aborted") return RunStatus::aborted;
  return std::nullopt;
}

void write_trace_csv(const std::vector<StepRecord>& records, std::ostream& out, bool include_wall) {
  if (include_wall) {
    out << kTraceCsvHeader << '\n';
  } else {
    out << kTraceCsvHeader.substr(0, kTraceCsvHeader.rfind(',')) << '\n';
  }
  for (const auto& r : records) {
    out << r.t << ',' << r.epoch << ',' << text::format_double(r.f_t) << ',' << optional_field(r.d) << ','
        << optional_field(r.d_hat) << ',' << optional_field(r.d_tilde) << ',' << text::format_double(r.alpha_t)
        << ',' << text::format_double(r.grad_norm);
    if (include_wall) out << ',' << text::format_double(r.wall_ms);
    out << '\n';
  }
}

std::string trace_csv(const std::vector<StepRecord>& records, bool include_wall) {
  std::ostringstream out;
  write_trace_csv(records, out, include_wall);
  return out.str();
}

std::vector<StepRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace csv: empty file");
  const auto header = text::trim(line);
  const auto no_wall = kTraceCsvHeader.substr(0, kTraceCsvHeader.rfind(','));
  bool has_wall;
  if (header == kTraceCsvHeader) {
    has_wall = true;
  } else if (header == no_wall) {
    has_wall = false;
  } else {
    throw ConfigError("trace csv: unexpected header");
  }

  std::vector<StepRecord> records;
  while (std::getline(in, line)) {
    const auto row = text::trim(line);
    if (row.empty()) continue;
    const auto f = text::split(row, ',');
    if (f.size() != (has_wall ? 9u : 8u)) throw ConfigError("trace csv: wrong field count");
    StepRecord r;
    auto t = text::parse_uint(f[0]);
    auto epoch = text::parse_uint(f[1]);
    if (!t || !epoch) throw ConfigError("trace csv: bad step index");
    r.t = *t;
    r.epoch = *epoch;
    r.f_t = required_double(f[2], "f_t");
    r.d = optional_double(f[3], "d_t");
    r.d_hat = optional_double(f[4], "d_hat_t");
    r.d_tilde = optional_double(f[5], "d_tilde_t");
    r.alpha_t = required_double(f[6], "alpha_t");
    r.grad_norm = required_double(f[7], "grad_norm");
    if (has_wall) r.wall_ms = required_double(f[8], "wall_ms");
    if (!records.empty() && r.t <= records.back().t) throw ConfigError("trace csv: steps out of order");
    records.push_back(r);
  }
  return records;
}

std::string serialize_meta(const RunConfig& config, const TraceSummary& s) {
  std::ostringstream out;
  out << serialize(config) << "summary.initial_loss = " << text::format_double(s.initial_loss) << '\n'
      << "summary.final_loss = " << text::format_double(s.final_loss) << '\n'
      << "summary.best_loss = " << text::format_double(s.best_loss) << '\n'
      << "summary.steps = " << s.steps << '\n'
      << "summary.status = " << to_string(s.status) << '\n';
  // Messages are single-line by construction; keep '#' out of the value.
  std::string message = s.message;
  for (char& ch : message) {
    if (ch == '\n' || ch == '#') ch = ' ';
  }
  out << "summary.message = " << message << '\n';
  return out.str();
}

TraceMeta parse_meta(std::string_view text) {
  auto kv = parse_key_values(text);
  TraceMeta meta;
  auto take_required = [&](std::string_view key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("meta: missing " + std::string(key));
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto number = [&](std::string_view key) {
    auto v = text::parse_double(take_required(key));
    if (!v) throw ConfigError("meta: bad " + std::string(key));
    return *v;
  };
  meta.summary.initial_loss = number("summary.initial_loss");
  meta.summary.final_loss = number("summary.final_loss");
  meta.summary.best_loss = number("summary.best_loss");
  auto steps = text::parse_uint(take_required("summary.steps"));
  auto status = parse_status(take_required("summary.status"));
  if (!steps || !status) throw ConfigError("meta: bad summary");
  meta.summary.steps = *steps;
  meta.summary.status = *status;
  meta.summary.message = take_required("summary.message");
  meta.config = take_run_config(kv);
  if (!kv.empty()) throw ConfigError("meta: unknown key " + kv.begin()->first);
  return meta;
}

}  // namespace eveopt::harness
