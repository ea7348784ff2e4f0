#include "eveopt/config.hpp"

#include <cmath>
#include <sstream>

#include "eveopt/error.hpp"
#include "eveopt/text.hpp"

namespace eveopt::harness {
namespace {

using optim::OptimizerKind;
using schedules::DecayKind;

[[noreturn]] void fail(std::string_view key, std::string_view why) {
  throw ConfigError("config key '" + std::string(key) + "': " + std::string(why));
}

std::optional<std::string> take(KeyValues& kv, std::string_view key) {
  auto it = kv.find(key);
  if (it == kv.end()) return std::nullopt;
  std::string value = std::move(it->second);
  kv.erase(it);
  return value;
}

double to_double(std::string_view key, std::string_view value) {
  auto v = text::parse_double(value);
  if (!v) fail(key, "expected a number, got '" + std::string(value) + "'");
  return *v;
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
  auto v = text::parse_uint(value);
  if (!v) fail(key, "expected a non-negative integer, got '" + std::string(value) + "'");
  return *v;
}

bool to_bool(std::string_view key, std::string_view value) {
  value = text::trim(value);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(key, "expected true or false");
}

template <class T, class Fn>
std::vector<T> to_list(std::string_view value, Fn&& convert) {
  std::vector<T> out;
  value = text::trim(value);
  if (value.empty()) return out;
  for (auto item : text::split(value, ',')) out.push_back(convert(text::trim(item)));
  return out;
}

std::vector<double> to_doubles(std::string_view key, std::string_view value) {
  return to_list<double>(value, [&](std::string_view s) { return to_double(key, s); });
}

template <class T>
void set_double(KeyValues& kv, std::string_view key, T& field) {
  if (auto v = take(kv, key)) field = to_double(key, *v);
}

template <class T>
void set_uint(KeyValues& kv, std::string_view key, T& field) {
  if (auto v = take(kv, key)) field = static_cast<T>(to_uint(key, *v));
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += text::format_double(xs[i]);
  }
  return out;
}

template <class T, class Fn>
std::string join(const std::vector<T>& xs, Fn&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

void reject_leftovers(const KeyValues& kv) {
  if (!kv.empty()) fail(kv.begin()->first, "unknown key");
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::quadratic: return "quadratic";
    case ProblemKind::rosenbrock: return "rosenbrock";
    case ProblemKind::logreg: return "logreg";
    case ProblemKind::mlp: return "mlp";
  }
  return "unknown";
}

std::optional<ProblemKind> parse_problem(std::string_view name) {
  for (auto kind : {ProblemKind::quadratic, ProblemKind::rosenbrock, ProblemKind::logreg, ProblemKind::mlp}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::vector<double> default_lr_grid() {
  return {1e-6, 5e-6, 1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1};
}
std::vector<double> default_beta3_grid() { return {0.0, 0.9, 0.99, 0.999, 0.9999}; }
std::vector<double> default_c_grid() { return {1.5, 2.0, 5.0, 10.0, 20.0}; }

SweepSpec::SweepSpec()
    : lr_grid(default_lr_grid()),
      decay_kinds(schedules::kDecayingKinds.begin(), schedules::kDecayingKinds.end()),
      k_grid(schedules::kFinalRatioGrid.begin(), schedules::kFinalRatioGrid.end()),
      beta3_grid(default_beta3_grid()),
      c_grid(default_c_grid()) {}

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  for (auto raw : text::split(text, '\n')) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = std::string(text::trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, std::string(text::trim(line.substr(eq + 1)))).second) fail(key, "duplicate key");
  }
  return kv;
}

RunConfig take_run_config(KeyValues& kv) {
  RunConfig c;
  ProblemSpec& p = c.problem;
  if (auto v = take(kv, "problem")) {
    auto kind = parse_problem(text::trim(*v));
    if (!kind) fail("problem", "unknown problem '" + *v + "'");
    p.kind = *kind;
  }
  if (auto v = take(kv, "problem.diagonal")) p.diagonal = to_doubles("problem.diagonal", *v);
  set_double(kv, "problem.noise", p.noise);
  if (auto v = take(kv, "problem.init")) p.init = to_doubles("problem.init", *v);
  if (auto v = take(kv, "problem.f_star")) p.f_star = to_double("problem.f_star", *v);
  set_uint(kv, "data.n", p.n);
  set_uint(kv, "data.d", p.d);
  set_uint(kv, "data.classes", p.classes);
  set_double(kv, "data.separation", p.separation);
  set_uint(kv, "data.seed", p.data_seed);
  if (auto v = take(kv, "mlp.hidden")) {
    p.hidden = to_list<std::size_t>(*v, [](std::string_view s) {
      return static_cast<std::size_t>(to_uint("mlp.hidden", s));
    });
  }
  if (auto v = take(kv, "mlp.activation")) {
    auto act = problems::parse_activation(text::trim(*v));
    if (!act) fail("mlp.activation", "expected tanh or relu");
    p.activation = *act;
  }

  optim::OptimizerSettings& o = c.optimizer;
  if (auto v = take(kv, "optimizer")) {
    auto kind = optim::parse_optimizer(text::trim(*v));
    if (!kind) fail("optimizer", "unknown optimizer '" + *v + "'");
    o.kind = *kind;
  }
  set_double(kv, "optimizer.lr", o.lr);
  set_double(kv, "optimizer.beta1", o.beta1);
  set_double(kv, "optimizer.beta2", o.beta2);
  set_double(kv, "optimizer.beta3", o.beta3);
  set_double(kv, "optimizer.c", o.c);
  set_double(kv, "optimizer.momentum", o.momentum);
  if (auto v = take(kv, "optimizer.eps")) o.eps = to_double("optimizer.eps", *v);
  if (auto v = take(kv, "optimizer.rho")) o.rho = to_double("optimizer.rho", *v);

  if (auto v = take(kv, "decay")) {
    auto kind = schedules::parse_decay(text::trim(*v));
    if (!kind) fail("decay", "expected constant, exp, inv-t or inv-sqrt-t");
    c.decay = *kind;
  }
  set_double(kv, "decay.gamma", c.decay_gamma);
  if (auto v = take(kv, "decay.k")) c.decay_k = to_double("decay.k", *v);

  set_uint(kv, "epochs", c.epochs);
  set_uint(kv, "batch_size", c.batch_size);
  set_uint(kv, "seed", c.seed);
  if (auto v = take(kv, "force_d1")) c.force_d1 = to_bool("force_d1", *v);
  if (auto v = take(kv, "trace")) c.trace = *v;
  return c;
}

SweepSpec take_sweep_spec(KeyValues& kv) {
  SweepSpec s;
  if (auto v = take(kv, "sweep.lr_grid")) s.lr_grid = to_doubles("sweep.lr_grid", *v);
  if (auto v = take(kv, "sweep.optimizers")) {
    s.optimizers = to_list<OptimizerKind>(*v, [](std::string_view name) {
      auto kind = optim::parse_optimizer(name);
      if (!kind) fail("sweep.optimizers", "unknown optimizer '" + std::string(name) + "'");
      return *kind;
    });
  }
  if (auto v = take(kv, "sweep.prescribed_lrs")) s.prescribed_lrs = to_bool("sweep.prescribed_lrs", *v);
  if (auto v = take(kv, "sweep.decay_kinds")) {
    s.decay_kinds = to_list<DecayKind>(*v, [](std::string_view name) {
      auto kind = schedules::parse_decay(name);
      if (!kind) fail("sweep.decay_kinds", "unknown decay '" + std::string(name) + "'");
      return *kind;
    });
  }
  if (auto v = take(kv, "sweep.k_grid")) s.k_grid = to_doubles("sweep.k_grid", *v);
  if (auto v = take(kv, "sweep.beta3_grid")) s.beta3_grid = to_doubles("sweep.beta3_grid", *v);
  if (auto v = take(kv, "sweep.c_grid")) s.c_grid = to_doubles("sweep.c_grid", *v);

  if (s.lr_grid.empty()) fail("sweep.lr_grid", "grid must be nonempty");
  for (double lr : s.lr_grid) {
    if (!(lr > 0.0) || !std::isfinite(lr)) fail("sweep.lr_grid", "learning rates must be positive");
  }
  for (double k : s.k_grid) {
    if (!(k >= 1.0) || !std::isfinite(k)) fail("sweep.k_grid", "ratios must be >= 1");
  }
  for (double b : s.beta3_grid) {
    if (!(b >= 0.0 && b < 1.0)) fail("sweep.beta3_grid", "values must lie in [0, 1)");
  }
  for (double c : s.c_grid) {
    if (!(c > 1.0) || !std::isfinite(c)) fail("sweep.c_grid", "values must be > 1");
  }
  return s;
}

RunConfig parse_run_config(std::string_view text) {
  auto kv = parse_key_values(text);
  auto config = take_run_config(kv);
  reject_leftovers(kv);
  validate(config);
  return config;
}

ExperimentConfig parse_experiment(std::string_view text) {
  auto kv = parse_key_values(text);
  ExperimentConfig config{take_run_config(kv), take_sweep_spec(kv)};
  reject_leftovers(kv);
  validate(config.run);
  return config;
}

std::string serialize(const RunConfig& c) {
  const ProblemSpec& p = c.problem;
  const optim::OptimizerSettings& o = c.optimizer;
  std::ostringstream out;
  out << "problem = " << to_string(p.kind) << '\n'
      << "problem.diagonal = " << join_doubles(p.diagonal) << '\n'
      << "problem.noise = " << text::format_double(p.noise) << '\n';
  if (p.init) out << "problem.init = " << join_doubles(*p.init) << '\n';
  if (p.f_star) out << "problem.f_star = " << text::format_double(*p.f_star) << '\n';
  out << "data.n = " << p.n << '\n'
      << "data.d = " << p.d << '\n'
      << "data.classes = " << p.classes << '\n'
      << "data.separation = " << text::format_double(p.separation) << '\n'
      << "data.seed = " << p.data_seed << '\n'
      << "mlp.hidden = " << join(p.hidden, [](std::size_t w) { return std::to_string(w); }) << '\n'
      << "mlp.activation = " << problems::to_string(p.activation) << '\n'
      << "optimizer = " << optim::to_string(o.kind) << '\n'
      << "optimizer.lr = " << text::format_double(o.lr) << '\n'
      << "optimizer.beta1 = " << text::format_double(o.beta1) << '\n'
      << "optimizer.beta2 = " << text::format_double(o.beta2) << '\n'
      << "optimizer.beta3 = " << text::format_double(o.beta3) << '\n'
      << "optimizer.c = " << text::format_double(o.c) << '\n'
      << "optimizer.momentum = " << text::format_double(o.momentum) << '\n';
  if (o.eps) out << "optimizer.eps = " << text::format_double(*o.eps) << '\n';
  if (o.rho) out << "optimizer.rho = " << text::format_double(*o.rho) << '\n';
  out << "decay = " << schedules::to_string(c.decay) << '\n'
      << "decay.gamma = " << text::format_double(c.decay_gamma) << '\n';
  if (c.decay_k) out << "decay.k = " << text::format_double(*c.decay_k) << '\n';
  out << "epochs = " << c.epochs << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "seed = " << c.seed << '\n'
      << "force_d1 = " << (c.force_d1 ? "true" : "false") << '\n';
  if (c.trace) out << "trace = " << *c.trace << '\n';
  return out.str();
}

std::string serialize(const ExperimentConfig& config) {
  const SweepSpec& s = config.sweep;
  std::ostringstream out;
  out << serialize(config.run) << "sweep.lr_grid = " << join_doubles(s.lr_grid) << '\n';
  if (!s.optimizers.empty()) {
    out << "sweep.optimizers = "
        << join(s.optimizers, [](OptimizerKind k) { return std::string(optim::to_string(k)); }) << '\n';
  }
  out << "sweep.prescribed_lrs = " << (s.prescribed_lrs ? "true" : "false") << '\n'
      << "sweep.decay_kinds = "
      << join(s.decay_kinds, [](DecayKind k) { return std::string(schedules::to_string(k)); }) << '\n'
      << "sweep.k_grid = " << join_doubles(s.k_grid) << '\n'
      << "sweep.beta3_grid = " << join_doubles(s.beta3_grid) << '\n'
      << "sweep.c_grid = " << join_doubles(s.c_grid) << '\n';
  return out.str();
}

bool is_data_free(ProblemKind kind) { return kind == ProblemKind::quadratic || kind == ProblemKind::rosenbrock; }

std::uint64_t steps_per_epoch(const RunConfig& c) {
  if (is_data_free(c.problem.kind)) return 1;
  return (c.problem.n + c.batch_size - 1) / c.batch_size;
}

std::uint64_t total_steps(const RunConfig& c) { return c.epochs * steps_per_epoch(c); }

double effective_gamma(const RunConfig& c) {
  if (!c.decay_k) return c.decay_gamma;
  const auto steps = total_steps(c);
  return steps == 0 ? 0.0 : schedules::gamma_for_final_ratio(c.decay, *c.decay_k, steps);
}

void validate(const RunConfig& c) {
  const ProblemSpec& p = c.problem;
  std::size_t dim = 0;
  switch (p.kind) {
    case ProblemKind::quadratic:
      if (p.diagonal.empty()) fail("problem.diagonal", "must be nonempty");
      for (double a : p.diagonal) {
        if (!(a > 0.0) || !std::isfinite(a)) fail("problem.diagonal", "entries must be positive");
      }
      if (!(p.noise >= 0.0) || !std::isfinite(p.noise)) fail("problem.noise", "must be >= 0");
      dim = p.diagonal.size();
      break;
    case ProblemKind::rosenbrock: dim = 2; break;
    case ProblemKind::logreg:
    case ProblemKind::mlp:
      if (p.n == 0 || p.d == 0) fail("data.n", "n and d must be positive");
      if (p.classes < 2 || p.classes > 2 * p.d) fail("data.classes", "need 2 <= classes <= 2 * d");
      if (p.n % p.classes != 0) fail("data.n", "must be divisible by data.classes");
      if (!(p.separation >= 0.0) || !std::isfinite(p.separation)) fail("data.separation", "must be >= 0");
      if (c.batch_size == 0 || c.batch_size > p.n) fail("batch_size", "need 0 < batch_size <= data.n");
      if (p.kind == ProblemKind::logreg) {
        dim = p.classes * (p.d + 1);
      } else {
        for (auto w : p.hidden) {
          if (w == 0) fail("mlp.hidden", "widths must be positive");
        }
        std::vector<std::size_t> layers{p.d};
        layers.insert(layers.end(), p.hidden.begin(), p.hidden.end());
        layers.push_back(p.classes);
        dim = problems::mlp_param_count({layers, p.activation});
      }
      break;
  }
  if (p.init && p.init->size() != dim) {
    fail("problem.init", "expected " + std::to_string(dim) + " values");
  }
  if (p.init) {
    for (double x : *p.init) {
      if (!std::isfinite(x)) fail("problem.init", "values must be finite");
    }
  }
  if (p.f_star && !std::isfinite(*p.f_star)) fail("problem.f_star", "must be finite");

  const optim::OptimizerSettings& o = c.optimizer;
  if (!(o.lr > 0.0) || !std::isfinite(o.lr)) fail("optimizer.lr", "must be positive");
  auto unit = [](double x) { return x >= 0.0 && x < 1.0; };
  if (!unit(o.beta1)) fail("optimizer.beta1", "must lie in [0, 1)");
  if (!unit(o.beta2)) fail("optimizer.beta2", "must lie in [0, 1)");
  if (!unit(o.beta3)) fail("optimizer.beta3", "must lie in [0, 1)");
  if (!(o.c > 1.0) || !std::isfinite(o.c)) fail("optimizer.c", "must be > 1");
  if (!unit(o.momentum)) fail("optimizer.momentum", "must lie in [0, 1)");
  if (o.rho && !unit(*o.rho)) fail("optimizer.rho", "must lie in [0, 1)");
  if (o.eps) {
    const bool zero_ok = o.kind == OptimizerKind::eve || o.kind == OptimizerKind::adam;
    if (!std::isfinite(*o.eps) || (zero_ok ? *o.eps < 0.0 : !(*o.eps > 0.0))) {
      fail("optimizer.eps", zero_ok ? "must be >= 0" : "must be positive");
    }
  }

  if (!(c.decay_gamma >= 0.0) || !std::isfinite(c.decay_gamma)) fail("decay.gamma", "must be >= 0");
  if (c.decay_k && (!(*c.decay_k >= 1.0) || !std::isfinite(*c.decay_k))) fail("decay.k", "must be >= 1");
  if (c.decay_k && c.decay_gamma != 0.0) fail("decay.k", "give either decay.k or decay.gamma, not both");
  const bool decaying = c.decay != DecayKind::constant && (c.decay_gamma > 0.0 || c.decay_k);
  if (o.kind == OptimizerKind::eve && decaying) fail("decay", "eve adapts its own global rate; use constant");
  if (c.force_d1 && o.kind != OptimizerKind::eve) fail("force_d1", "only meaningful for eve");
  if (c.batch_size == 0) fail("batch_size", "must be positive");
}

}  // namespace eveopt::harness
