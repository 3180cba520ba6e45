#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bnn {

enum class Activation { ReLU, Tanh };

std::string_view to_string(Activation a);
/// Accepts "relu" / "tanh" (case-insensitive). Throws InvalidInput otherwise.
Activation parse_activation(std::string_view name);

/// Fully connected classifier layout: input -> hidden... -> n_classes logits.
struct NetworkSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims;
  std::size_t n_classes = 2;
  Activation activation = Activation::ReLU;

  /// Throws InvalidInput when any width is zero or n_classes < 2.
  void validate() const;

  /// Layer widths [input_dim, hidden..., n_classes].
  std::vector<std::size_t> layer_widths() const;

  bool operator==(const NetworkSpec&) const = default;
};

/// Number of weights plus biases: sum over layers of (n_in + 1) * n_out.
std::size_t param_count(const NetworkSpec& spec);

/// Flat parameter vector. Layer-major; inside a layer the n_out x n_in weight
/// matrix comes first (row-major, one row per output unit), then n_out biases.
using WeightVector = std::vector<double>;

/// Zero-mean isotropic Gaussian prior on every parameter.
struct PriorSpec {
  double variance = 1.0;

  void validate() const;
  /// Equivalent L2 penalty strength: lambda = 1 / (2 variance).
  double weight_decay() const { return 0.5 / variance; }
  static PriorSpec from_weight_decay(double lambda);
};

/// Labelled feature matrix (row-major, n x d).
class Dataset {
 public:
  Dataset() = default;
  /// Validates: n >= 1, labels < n_classes, features finite, sizes consistent.
  Dataset(std::size_t dim, std::size_t n_classes, std::vector<double> features,
          std::vector<std::size_t> labels);

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  std::size_t n_classes() const { return n_classes_; }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  std::size_t label(std::size_t i) const { return labels_[i]; }
  const std::vector<double>& features() const { return features_; }
  const std::vector<std::size_t>& labels() const { return labels_; }

  /// Rows at `indices`, in that order. Keeps n_classes.
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Per-class counts, length n_classes.
  std::vector<std::size_t> class_counts() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::size_t dim_ = 0;
  std::size_t n_classes_ = 0;
  std::vector<double> features_;
  std::vector<std::size_t> labels_;
};

/// Rows of `a` followed by rows of `b`. Dims and class counts must agree.
Dataset concat(const Dataset& a, const Dataset& b);

/// Class logits for one input.
std::vector<double> logits(const NetworkSpec& spec, std::span<const double> w,
                           std::span<const double> x);

/// Log-softmax of the logits, computed as logit - logsumexp.
std::vector<double> log_probabilities(const NetworkSpec& spec,
                                      std::span<const double> w,
                                      std::span<const double> x);

/// Softmax class probabilities for one input.
std::vector<double> forward(const NetworkSpec& spec, std::span<const double> w,
                            std::span<const double> x);

/// Categorical log-likelihood summed over the dataset.
double log_likelihood(const NetworkSpec& spec, std::span<const double> w,
                      const Dataset& data);

/// Gaussian log-density: -D/2 ln(2 pi var) - |w|^2 / (2 var).
double log_prior(std::span<const double> w, const PriorSpec& prior);

/// log p(D|w) + log p(w). The evidence term is omitted.
double log_posterior_unnorm(const NetworkSpec& spec, std::span<const double> w,
                            const Dataset& data, const PriorSpec& prior);

/// Gradient of the categorical log-likelihood, by backpropagation.
std::vector<double> grad_log_likelihood(const NetworkSpec& spec,
                                        std::span<const double> w,
                                        const Dataset& data);

std::vector<double> grad_log_posterior(const NetworkSpec& spec,
                                       std::span<const double> w,
                                       const Dataset& data,
                                       const PriorSpec& prior);

/// Log-posterior and its gradient in one pass. `grad` must have length |w|.
double log_posterior_with_grad(const NetworkSpec& spec,
                               std::span<const double> w, const Dataset& data,
                               const PriorSpec& prior, std::span<double> grad);

}  // namespace bnn
