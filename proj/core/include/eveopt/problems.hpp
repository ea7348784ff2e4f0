#pragma once

// Desk-scale stochastic objectives with exact analytic gradients.
//
// Every objective reports the mean loss over the examples of a batch. The
// data-free objectives (quadratic, Rosenbrock) expose a single virtual
// example, so each epoch is one step.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace eveopt::problems {

using Vector = std::vector<double>;

/// Example indices of one minibatch, plus the global step that drew it
/// (seeds per-step gradient noise).
struct Batch {
  std::span<const std::size_t> indices;
  std::uint64_t step = 0;
};

struct Evaluation {
  double loss = 0.0;
  Vector grad;
};

class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t num_examples() const = 0;

  virtual Evaluation evaluate(std::span<const double> params, const Batch& batch) const = 0;

  /// Noise-free loss and gradient over the whole training set.
  virtual Evaluation evaluate_full(std::span<const double> params) const;

  virtual Vector initial_params(std::uint64_t seed) const = 0;

  /// Known global minimum of the loss; 0 unless overridden.
  double f_star() const noexcept { return f_star_; }
  void set_f_star(double f_star) noexcept { f_star_ = f_star; }

 private:
  double f_star_ = 0.0;
};

// -- data-free objectives ------------------------------------------------------

/// f(theta) = 1/2 sum_i a_i theta_i^2 with positive diagonal a. With
/// noise_sigma > 0 the minibatch gradient carries additive N(0, sigma^2)
/// noise drawn from (noise_seed, batch.step); the loss stays exact.
class Quadratic final : public Problem {
 public:
  explicit Quadratic(Vector diagonal, double noise_sigma = 0.0, std::uint64_t noise_seed = 0);

  std::string_view name() const override { return "quadratic"; }
  std::size_t dim() const override { return diagonal_.size(); }
  std::size_t num_examples() const override { return 1; }
  Evaluation evaluate(std::span<const double> params, const Batch& batch) const override;
  Evaluation evaluate_full(std::span<const double> params) const override;
  /// All ones.
  Vector initial_params(std::uint64_t seed) const override;

  const Vector& diagonal() const noexcept { return diagonal_; }

 private:
  Vector diagonal_;
  double noise_sigma_;
  std::uint64_t noise_seed_;
};

/// f(x, y) = (1 - x)^2 + 100 (y - x^2)^2, minimum 0 at (1, 1).
class Rosenbrock final : public Problem {
 public:
  std::string_view name() const override { return "rosenbrock"; }
  std::size_t dim() const override { return 2; }
  std::size_t num_examples() const override { return 1; }
  Evaluation evaluate(std::span<const double> params, const Batch& batch) const override;
  /// The customary start (-1.2, 1).
  Vector initial_params(std::uint64_t seed) const override;
};

// -- classification data -------------------------------------------------------

struct Dataset {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t classes = 0;
  std::uint64_t seed = 0;
  Vector features;                  // n x d, row-major
  std::vector<std::size_t> labels;  // n entries in [0, classes)

  std::span<const double> row(std::size_t i) const { return {features.data() + i * d, d}; }
  bool operator==(const Dataset&) const = default;
};

/// Default blob separation; large enough that the blobs are linearly
/// separable (see make_blobs).
inline constexpr double kDefaultSeparation = 8.0;

/// K Gaussian blobs in R^d. Example i has label i mod K. Class k is centred
/// at separation * s * e_{k mod d}, with s = +1 for k < d and -1 otherwise
/// (so K <= 2d). Offsets are N(0, 1) per coordinate, truncated to
/// |x| <= 3 by rejection. For separation > 6 the score x . (s e_j) of a
/// point's own class exceeds every other class's score, so the data are
/// linearly separable and the cross-entropy infimum is 0.
Dataset make_blobs(std::uint64_t seed, std::size_t n, std::size_t d, std::size_t classes,
                   double separation = kDefaultSeparation);

/// CSV with header x0,...,x{d-1},label. Values printed with 17 significant
/// digits so read_dataset_csv(write_dataset_csv(x)) reproduces x.
void write_dataset_csv(const Dataset& data, std::ostream& out);
Dataset read_dataset_csv(std::istream& in);

// -- softmax models ------------------------------------------------------------

struct SoftmaxXent {
  double loss = 0.0;
  Vector dlogits;
};

/// -log softmax(logits)[label] via the max-shift trick, and its gradient
/// softmax(logits) - onehot(label).
SoftmaxXent softmax_xent(std::span<const double> logits, std::size_t label);

/// Multinomial logistic regression. Parameters: W (K x d, row-major), then
/// b (K). Glorot-uniform W, zero b.
class LogisticRegression final : public Problem {
 public:
  explicit LogisticRegression(std::shared_ptr<const Dataset> data);

  std::string_view name() const override { return "logreg"; }
  std::size_t dim() const override;
  std::size_t num_examples() const override { return data_->n; }
  Evaluation evaluate(std::span<const double> params, const Batch& batch) const override;
  Vector initial_params(std::uint64_t seed) const override;

  /// Fraction of the training set classified correctly.
  double accuracy(std::span<const double> params) const;

 private:
  std::shared_ptr<const Dataset> data_;
};

enum class Activation { tanh, relu };

std::string_view to_string(Activation activation);
std::optional<Activation> parse_activation(std::string_view name);

/// Layer sizes include input and output: {d, h1, ..., K}.
struct MlpArch {
  std::vector<std::size_t> layers;
  Activation activation = Activation::tanh;
};

/// Flat layout, per layer l = 1..L in order: W_l (out x in, row-major),
/// then b_l (out).
std::size_t mlp_param_count(const MlpArch& arch);

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
Vector glorot_init(const MlpArch& arch, std::uint64_t seed);

/// Mean softmax cross-entropy over `indices` and its gradient w.r.t. the
/// flat parameter vector.
Evaluation mlp_eval(const MlpArch& arch, std::span<const double> params, const Dataset& data,
                    std::span<const std::size_t> indices);

class Mlp final : public Problem {
 public:
  Mlp(MlpArch arch, std::shared_ptr<const Dataset> data);

  std::string_view name() const override { return "mlp"; }
  std::size_t dim() const override { return mlp_param_count(arch_); }
  std::size_t num_examples() const override { return data_->n; }
  Evaluation evaluate(std::span<const double> params, const Batch& batch) const override;
  Vector initial_params(std::uint64_t seed) const override;

  const MlpArch& arch() const noexcept { return arch_; }

 private:
  MlpArch arch_;
  std::shared_ptr<const Dataset> data_;
};

// -- gradient oracle -----------------------------------------------------------

enum class StepScaling {
  absolute,  // h_i = h
  relative,  // h_i = h * (1 + |theta_i|)
};

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central differences: (f(theta + h_i e_i) - f(theta - h_i e_i)) / (2 h_i).
Vector finite_diff_grad(const ScalarFn& f, std::span<const double> params, double h,
                        StepScaling scaling = StepScaling::absolute);

/// Same, on a fixed batch of `problem`.
Vector finite_diff_grad(const Problem& problem, std::span<const double> params, const Batch& batch,
                        double h, StepScaling scaling = StepScaling::absolute);

// -- minibatching --------------------------------------------------------------

using IndexBatches = std::vector<std::vector<std::size_t>>;

/// Batches of one epoch: a Fisher-Yates permutation of [0, n) seeded by
/// (seed, epoch) only, cut into ceil(n / batch_size) consecutive batches
/// (the last one may be short).
IndexBatches epoch_batches(std::uint64_t seed, std::size_t n, std::size_t batch_size,
                           std::uint64_t epoch);

/// Concatenation of epoch_batches for epochs 0..epochs-1.
IndexBatches minibatch_schedule(std::uint64_t seed, std::size_t n, std::size_t batch_size,
                                std::uint64_t epochs);

}  // namespace eveopt::problems
