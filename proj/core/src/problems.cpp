#include "eveopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eveopt/error.hpp"
#include "eveopt/rng.hpp"

namespace eveopt::problems {
namespace {

void require_dim(std::span<const double> params, std::size_t dim, std::string_view who) {
  if (params.size() != dim) {
    throw ContractError(std::string(who) + ": expected " + std::to_string(dim) + " parameters, got " +
                        std::to_string(params.size()));
  }
}

void require_nonempty(const Batch& batch, std::size_t n, std::string_view who) {
  if (batch.indices.empty()) throw ContractError(std::string(who) + ": empty batch");
  for (auto i : batch.indices) {
    if (i >= n) throw ContractError(std::string(who) + ": example index out of range");
  }
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

}  // namespace

Evaluation Problem::evaluate_full(std::span<const double> params) const {
  const auto idx = all_indices(num_examples());
  return evaluate(params, Batch{idx, 0});
}

// -- quadratic -------------------------------------------------------------------

Quadratic::Quadratic(Vector diagonal, double noise_sigma, std::uint64_t noise_seed)
    : diagonal_(std::move(diagonal)), noise_sigma_(noise_sigma), noise_seed_(noise_seed) {
  if (diagonal_.empty()) throw ContractError("quadratic: empty diagonal");
  for (double a : diagonal_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ContractError("quadratic: diagonal must be positive (SPD)");
  }
  if (!(noise_sigma_ >= 0.0) || !std::isfinite(noise_sigma_)) {
    throw ContractError("quadratic: noise sigma must be >= 0");
  }
}

Evaluation Quadratic::evaluate_full(std::span<const double> params) const {
  require_dim(params, dim(), "quadratic");
  Evaluation out{0.0, Vector(dim())};
  for (std::size_t i = 0; i < dim(); ++i) {
    out.loss += 0.5 * diagonal_[i] * params[i] * params[i];
    out.grad[i] = diagonal_[i] * params[i];
  }
  return out;
}

Evaluation Quadratic::evaluate(std::span<const double> params, const Batch& batch) const {
  Evaluation out = evaluate_full(params);
  if (noise_sigma_ > 0.0) {
    Rng rng(derive_seed(noise_seed_, streams::gradient_noise, batch.step));
    for (double& g : out.grad) g += noise_sigma_ * rng.normal();
  }
  return out;
}

Vector Quadratic::initial_params(std::uint64_t) const { return Vector(dim(), 1.0); }

// -- rosenbrock ------------------------------------------------------------------

Evaluation Rosenbrock::evaluate(std::span<const double> params, const Batch&) const {
  require_dim(params, 2, "rosenbrock");
  const double x = params[0];
  const double y = params[1];
  const double a = 1.0 - x;
  const double b = y - x * x;
  return {a * a + 100.0 * b * b, {-2.0 * a - 400.0 * x * b, 200.0 * b}};
}

Vector Rosenbrock::initial_params(std::uint64_t) const { return {-1.2, 1.0}; }

// -- softmax cross-entropy -------------------------------------------------------

SoftmaxXent softmax_xent(std::span<const double> logits, std::size_t label) {
  if (logits.empty() || label >= logits.size()) throw ContractError("softmax_xent: label out of range");
  const double shift = *std::max_element(logits.begin(), logits.end());
  SoftmaxXent out{0.0, Vector(logits.size())};
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out.dlogits[k] = std::exp(logits[k] - shift);
    sum += out.dlogits[k];
  }
  out.loss = std::log(sum) - (logits[label] - shift);
  for (double& p : out.dlogits) p /= sum;
  out.dlogits[label] -= 1.0;
  return out;
}

// -- logistic regression -----------------------------------------------------------

LogisticRegression::LogisticRegression(std::shared_ptr<const Dataset> data) : data_(std::move(data)) {
  if (!data_ || data_->n == 0 || data_->classes < 2) throw ContractError("logreg: invalid dataset");
}

std::size_t LogisticRegression::dim() const { return data_->classes * (data_->d + 1); }

Evaluation LogisticRegression::evaluate(std::span<const double> params, const Batch& batch) const {
  require_dim(params, dim(), "logreg");
  require_nonempty(batch, data_->n, "logreg");
  const std::size_t d = data_->d;
  const std::size_t K = data_->classes;
  const double* W = params.data();
  const double* b = params.data() + K * d;

  Evaluation out{0.0, Vector(dim(), 0.0)};
  double* gW = out.grad.data();
  double* gb = out.grad.data() + K * d;
  Vector logits(K);
  for (auto i : batch.indices) {
    const auto x = data_->row(i);
    for (std::size_t k = 0; k < K; ++k) {
      double z = b[k];
      for (std::size_t j = 0; j < d; ++j) z += W[k * d + j] * x[j];
      logits[k] = z;
    }
    const auto xent = softmax_xent(logits, data_->labels[i]);
    out.loss += xent.loss;
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t j = 0; j < d; ++j) gW[k * d + j] += xent.dlogits[k] * x[j];
      gb[k] += xent.dlogits[k];
    }
  }
  const double scale = 1.0 / static_cast<double>(batch.indices.size());
  out.loss *= scale;
  for (double& g : out.grad) g *= scale;
  return out;
}

Vector LogisticRegression::initial_params(std::uint64_t seed) const {
  return glorot_init(MlpArch{{data_->d, data_->classes}, Activation::tanh}, seed);
}

double LogisticRegression::accuracy(std::span<const double> params) const {
  require_dim(params, dim(), "logreg");
  const std::size_t d = data_->d;
  const std::size_t K = data_->classes;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data_->n; ++i) {
    const auto x = data_->row(i);
    std::size_t best = 0;
    double best_score = -HUGE_VAL;
    for (std::size_t k = 0; k < K; ++k) {
      double z = params[K * d + k];
      for (std::size_t j = 0; j < d; ++j) z += params[k * d + j] * x[j];
      if (z > best_score) {
        best_score = z;
        best = k;
      }
    }
    if (best == data_->labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data_->n);
}

// -- multilayer perceptron -----------------------------------------------------------

std::string_view to_string(Activation activation) {
  return activation == Activation::tanh ? "tanh" : "relu";
}

std::optional<Activation> parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  return std::nullopt;
}

std::size_t mlp_param_count(const MlpArch& arch) {
  std::size_t count = 0;
  for (std::size_t l = 1; l < arch.layers.size(); ++l) count += arch.layers[l] * (arch.layers[l - 1] + 1);
  return count;
}

Vector glorot_init(const MlpArch& arch, std::uint64_t seed) {
  Vector params(mlp_param_count(arch), 0.0);
  Rng rng(seed);
  std::size_t offset = 0;
  for (std::size_t l = 1; l < arch.layers.size(); ++l) {
    const std::size_t fan_in = arch.layers[l - 1];
    const std::size_t fan_out = arch.layers[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < fan_in * fan_out; ++i) params[offset + i] = rng.uniform(-bound, bound);
    offset += fan_out * (fan_in + 1);  // biases stay zero
  }
  return params;
}

Evaluation mlp_eval(const MlpArch& arch, std::span<const double> params, const Dataset& data,
                    std::span<const std::size_t> indices) {
  const auto& layers = arch.layers;
  if (layers.size() < 2) throw ContractError("mlp: need at least input and output layers");
  if (layers.front() != data.d || layers.back() != data.classes) {
    throw ContractError("mlp: architecture does not match dataset shape");
  }
  require_dim(params, mlp_param_count(arch), "mlp");
  if (indices.empty()) throw ContractError("mlp: empty batch");

  const std::size_t L = layers.size() - 1;
  std::vector<std::size_t> offsets(L);
  for (std::size_t l = 0, off = 0; l < L; ++l) {
    offsets[l] = off;
    off += layers[l + 1] * (layers[l] + 1);
  }

  Evaluation out{0.0, Vector(params.size(), 0.0)};
  // acts[l] is the input to layer l (acts[0] = x); acts[L] holds logits.
  std::vector<Vector> acts(L + 1);
  for (std::size_t l = 0; l <= L; ++l) acts[l].resize(layers[l]);
  std::vector<Vector> deltas(L);
  for (std::size_t l = 0; l < L; ++l) deltas[l].resize(layers[l + 1]);

  for (auto idx : indices) {
    if (idx >= data.n) throw ContractError("mlp: example index out of range");
    const auto x = data.row(idx);
    std::copy(x.begin(), x.end(), acts[0].begin());

    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t in = layers[l];
      const std::size_t outw = layers[l + 1];
      const double* W = params.data() + offsets[l];
      const double* b = W + in * outw;
      for (std::size_t r = 0; r < outw; ++r) {
        double z = b[r];
        for (std::size_t c = 0; c < in; ++c) z += W[r * in + c] * acts[l][c];
        if (l + 1 < L) z = arch.activation == Activation::tanh ? std::tanh(z) : std::max(z, 0.0);
        acts[l + 1][r] = z;
      }
    }

    const auto xent = softmax_xent(acts[L], data.labels[idx]);
    out.loss += xent.loss;
    deltas[L - 1] = xent.dlogits;

    for (std::size_t l = L; l-- > 0;) {
      const std::size_t in = layers[l];
      const std::size_t outw = layers[l + 1];
      const double* W = params.data() + offsets[l];
      double* gW = out.grad.data() + offsets[l];
      double* gb = gW + in * outw;
      const Vector& delta = deltas[l];
      for (std::size_t r = 0; r < outw; ++r) {
        for (std::size_t c = 0; c < in; ++c) gW[r * in + c] += delta[r] * acts[l][c];
        gb[r] += delta[r];
      }
      if (l == 0) break;
      Vector& prev = deltas[l - 1];
      for (std::size_t c = 0; c < in; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < outw; ++r) s += W[r * in + c] * delta[r];
        const double a = acts[l][c];
        // Post-activation values suffice: tanh' = 1 - a^2, relu' = [a > 0].
        prev[c] = s * (arch.activation == Activation::tanh ? 1.0 - a * a : (a > 0.0 ? 1.0 : 0.0));
      }
    }
  }

  const double scale = 1.0 / static_cast<double>(indices.size());
  out.loss *= scale;
  for (double& g : out.grad) g *= scale;
  return out;
}

Mlp::Mlp(MlpArch arch, std::shared_ptr<const Dataset> data) : arch_(std::move(arch)), data_(std::move(data)) {
  if (!data_) throw ContractError("mlp: null dataset");
  if (arch_.layers.size() < 2 || arch_.layers.front() != data_->d || arch_.layers.back() != data_->classes) {
    throw ContractError("mlp: architecture does not match dataset shape");
  }
  for (auto width : arch_.layers) {
    if (width == 0) throw ContractError("mlp: zero-width layer");
  }
}

Evaluation Mlp::evaluate(std::span<const double> params, const Batch& batch) const {
  return mlp_eval(arch_, params, *data_, batch.indices);
}

Vector Mlp::initial_params(std::uint64_t seed) const { return glorot_init(arch_, seed); }

// -- finite differences -----------------------------------------------------------

Vector finite_diff_grad(const ScalarFn& f, std::span<const double> params, double h, StepScaling scaling) {
  if (!(h > 0.0)) throw ContractError("finite_diff_grad: h must be positive");
  Vector probe(params.begin(), params.end());
  Vector grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double hi = scaling == StepScaling::relative ? h * (1.0 + std::abs(params[i])) : h;
    probe[i] = params[i] + hi;
    const double up = f(probe);
    probe[i] = params[i] - hi;
    const double down = f(probe);
    probe[i] = params[i];
    grad[i] = (up - down) / (2.0 * hi);
  }
  return grad;
}

Vector finite_diff_grad(const Problem& problem, std::span<const double> params, const Batch& batch, double h,
                        StepScaling scaling) {
  return finite_diff_grad([&](std::span<const double> p) { return problem.evaluate(p, batch).loss; }, params,
                          h, scaling);
}

// -- minibatching ------------------------------------------------------------------

IndexBatches epoch_batches(std::uint64_t seed, std::size_t n, std::size_t batch_size, std::uint64_t epoch) {
  if (n == 0 || batch_size == 0 || batch_size > n) {
    throw ContractError("minibatch: need 0 < batch_size <= n");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(derive_seed(seed, streams::batches, epoch));
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);

  IndexBatches out;
  out.reserve((n + batch_size - 1) / batch_size);
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t stop = std::min(n, start + batch_size);
    out.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                     perm.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  return out;
}

IndexBatches minibatch_schedule(std::uint64_t seed, std::size_t n, std::size_t batch_size, std::uint64_t epochs) {
  IndexBatches out;
  for (std::uint64_t e = 0; e < epochs; ++e) {
    auto batches = epoch_batches(seed, n, batch_size, e);
    std::move(batches.begin(), batches.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace eveopt::problems
