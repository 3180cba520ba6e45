#include "bnn/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "bnn/error.hpp"

namespace bnn {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::ReLU:
      return "relu";
    case Activation::Tanh:
      return "tanh";
  }
  return "relu";
}

Activation parse_activation(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "relu") return Activation::ReLU;
  if (lower == "tanh") return Activation::Tanh;
  throw InvalidInput("unknown activation '" + std::string(name) +
                     "' (expected relu or tanh)");
}

void NetworkSpec::validate() const {
  if (input_dim == 0) throw InvalidInput("network input_dim must be >= 1");
  if (n_classes < 2) throw InvalidInput("network n_classes must be >= 2");
  for (std::size_t i = 0; i < hidden_dims.size(); ++i) {
    if (hidden_dims[i] == 0) {
      throw InvalidInput("network hidden_dims[" + std::to_string(i) +
                         "] must be >= 1");
    }
  }
}

std::vector<std::size_t> NetworkSpec::layer_widths() const {
  std::vector<std::size_t> widths;
  widths.reserve(hidden_dims.size() + 2);
  widths.push_back(input_dim);
  widths.insert(widths.end(), hidden_dims.begin(), hidden_dims.end());
  widths.push_back(n_classes);
  return widths;
}

std::size_t param_count(const NetworkSpec& spec) {
  const auto widths = spec.layer_widths();
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    total += (widths[l] + 1) * widths[l + 1];
  }
  return total;
}

void PriorSpec::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw InvalidInput("prior variance must be a positive finite number");
  }
}

PriorSpec PriorSpec::from_weight_decay(double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("weight decay must be positive");
  return PriorSpec{0.5 / lambda};
}

Dataset::Dataset(std::size_t dim, std::size_t n_classes,
                 std::vector<double> features, std::vector<std::size_t> labels)
    : dim_(dim),
      n_classes_(n_classes),
      features_(std::move(features)),
      labels_(std::move(labels)) {
  if (labels_.empty()) throw InvalidInput("dataset must contain >= 1 sample");
  if (dim_ == 0) throw InvalidInput("dataset feature dimension must be >= 1");
  if (n_classes_ < 1) throw InvalidInput("dataset n_classes must be >= 1");
  if (features_.size() != labels_.size() * dim_) {
    throw InvalidInput("dataset has " + std::to_string(features_.size()) +
                       " feature values, expected " +
                       std::to_string(labels_.size() * dim_));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= n_classes_) {
      throw InvalidInput("label " + std::to_string(labels_[i]) + " at row " +
                         std::to_string(i) + " is not < n_classes " +
                         std::to_string(n_classes_));
    }
  }
  for (double v : features_) {
    if (!std::isfinite(v)) throw InvalidInput("dataset features must be finite");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> feats;
  feats.reserve(indices.size() * dim_);
  std::vector<std::size_t> labs;
  labs.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= size()) throw InvalidInput("subset index out of range");
    const auto r = row(idx);
    feats.insert(feats.end(), r.begin(), r.end());
    labs.push_back(labels_[idx]);
  }
  return Dataset(dim_, n_classes_, std::move(feats), std::move(labs));
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(n_classes_, 0);
  for (std::size_t y : labels_) ++counts[y];
  return counts;
}

Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.dim() != b.dim() || a.n_classes() != b.n_classes()) {
    throw InvalidInput("cannot concatenate datasets with different shapes");
  }
  std::vector<double> feats = a.features();
  feats.insert(feats.end(), b.features().begin(), b.features().end());
  std::vector<std::size_t> labs = a.labels();
  labs.insert(labs.end(), b.labels().begin(), b.labels().end());
  return Dataset(a.dim(), a.n_classes(), std::move(feats), std::move(labs));
}

namespace {

void check_dims(const NetworkSpec& spec, std::span<const double> w,
                std::size_t input_dim) {
  const std::size_t expected = param_count(spec);
  if (w.size() != expected) {
    throw InvalidInput("weight vector has " + std::to_string(w.size()) +
                       " entries, network expects " + std::to_string(expected));
  }
  if (input_dim != spec.input_dim) {
    throw InvalidInput("input has dimension " + std::to_string(input_dim) +
                       ", network expects " + std::to_string(spec.input_dim));
  }
}

double activate(Activation a, double z) {
  return a == Activation::ReLU ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// Derivative expressed through the pre-activation z and output h.
double activate_deriv(Activation a, double z, double h) {
  return a == Activation::ReLU ? (z > 0.0 ? 1.0 : 0.0) : 1.0 - h * h;
}

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Activations of every layer for one input. acts[0] = x, acts[l] = output of
// layer l (after activation for hidden layers, raw logits for the last one).
// pre[l] holds the pre-activations of layer l+1's inputs for hidden layers.
struct Trace {
  std::vector<std::vector<double>> acts;
  std::vector<std::vector<double>> pre;
};

void affine(std::span<const double> w, std::size_t offset, std::size_t n_in,
            std::size_t n_out, std::span<const double> in,
            std::vector<double>& out) {
  out.assign(n_out, 0.0);
  const double* weights = w.data() + offset;
  const double* biases = weights + n_in * n_out;
  for (std::size_t j = 0; j < n_out; ++j) {
    const double* row = weights + j * n_in;
    double s = biases[j];
    for (std::size_t i = 0; i < n_in; ++i) s += row[i] * in[i];
    out[j] = s;
  }
}

void run_forward(const NetworkSpec& spec, const std::vector<std::size_t>& widths,
                 std::span<const double> w, std::span<const double> x,
                 Trace& trace) {
  const std::size_t n_layers = widths.size() - 1;
  trace.acts.resize(n_layers + 1);
  trace.pre.resize(n_layers);
  trace.acts[0].assign(x.begin(), x.end());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t n_in = widths[l];
    const std::size_t n_out = widths[l + 1];
    affine(w, offset, n_in, n_out, trace.acts[l], trace.pre[l]);
    offset += (n_in + 1) * n_out;
    auto& out = trace.acts[l + 1];
    out = trace.pre[l];
    if (l + 1 < n_layers) {
      for (double& v : out) v = activate(spec.activation, v);
    }
  }
}

}  // namespace

std::vector<double> logits(const NetworkSpec& spec, std::span<const double> w,
                           std::span<const double> x) {
  check_dims(spec, w, x.size());
  Trace trace;
  run_forward(spec, spec.layer_widths(), w, x, trace);
  return trace.acts.back();
}

std::vector<double> log_probabilities(const NetworkSpec& spec,
                                      std::span<const double> w,
                                      std::span<const double> x) {
  auto z = logits(spec, w, x);
  const double lse = log_sum_exp(z);
  for (double& v : z) v -= lse;
  return z;
}

std::vector<double> forward(const NetworkSpec& spec, std::span<const double> w,
                            std::span<const double> x) {
  auto z = logits(spec, w, x);
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : z) v /= s;
  return z;
}

double log_likelihood(const NetworkSpec& spec, std::span<const double> w,
                      const Dataset& data) {
  check_dims(spec, w, data.dim());
  if (data.n_classes() > spec.n_classes) {
    throw InvalidInput("dataset has more classes than the network outputs");
  }
  const auto widths = spec.layer_widths();
  Trace trace;
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    run_forward(spec, widths, w, data.row(i), trace);
    const auto& z = trace.acts.back();
    total += z[data.label(i)] - log_sum_exp(z);
  }
  return total;
}

double log_prior(std::span<const double> w, const PriorSpec& prior) {
  prior.validate();
  double sq = 0.0;
  for (double v : w) sq += v * v;
  const double d = static_cast<double>(w.size());
  return -0.5 * d * std::log(2.0 * std::numbers::pi * prior.variance) -
         sq / (2.0 * prior.variance);
}

double log_posterior_unnorm(const NetworkSpec& spec, std::span<const double> w,
                            const Dataset& data, const PriorSpec& prior) {
  return log_likelihood(spec, w, data) + log_prior(w, prior);
}

namespace {

// Accumulates d log p(D|w) / dw into grad; returns log p(D|w).
double accumulate_likelihood_grad(const NetworkSpec& spec,
                                  std::span<const double> w,
                                  const Dataset& data, std::span<double> grad) {
  check_dims(spec, w, data.dim());
  if (data.n_classes() > spec.n_classes) {
    throw InvalidInput("dataset has more classes than the network outputs");
  }
  if (grad.size() != w.size()) {
    throw InvalidInput("gradient buffer length does not match weights");
  }
  const auto widths = spec.layer_widths();
  const std::size_t n_layers = widths.size() - 1;

  std::vector<std::size_t> offsets(n_layers);
  for (std::size_t l = 0, off = 0; l < n_layers; ++l) {
    offsets[l] = off;
    off += (widths[l] + 1) * widths[l + 1];
  }

  Trace trace;
  std::vector<double> delta;
  std::vector<double> prev_delta;
  double total = 0.0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    run_forward(spec, widths, w, data.row(s), trace);
    const auto& z = trace.acts.back();
    const double lse = log_sum_exp(z);
    const std::size_t y = data.label(s);
    total += z[y] - lse;

    // d/dlogits of log softmax[y] = onehot(y) - softmax.
    delta.resize(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
      delta[k] = (k == y ? 1.0 : 0.0) - std::exp(z[k] - lse);
    }

    for (std::size_t l = n_layers; l-- > 0;) {
      const std::size_t n_in = widths[l];
      const std::size_t n_out = widths[l + 1];
      const auto& in = trace.acts[l];
      double* g_w = grad.data() + offsets[l];
      double* g_b = g_w + n_in * n_out;
      for (std::size_t j = 0; j < n_out; ++j) {
        const double d = delta[j];
        double* g_row = g_w + j * n_in;
        for (std::size_t i = 0; i < n_in; ++i) g_row[i] += d * in[i];
        g_b[j] += d;
      }
      if (l == 0) break;
      const double* weights = w.data() + offsets[l];
      prev_delta.assign(n_in, 0.0);
      for (std::size_t j = 0; j < n_out; ++j) {
        const double d = delta[j];
        const double* row = weights + j * n_in;
        for (std::size_t i = 0; i < n_in; ++i) prev_delta[i] += row[i] * d;
      }
      const auto& pre = trace.pre[l - 1];
      for (std::size_t i = 0; i < n_in; ++i) {
        prev_delta[i] *= activate_deriv(spec.activation, pre[i], in[i]);
      }
      delta.swap(prev_delta);
    }
  }
  return total;
}

}  // namespace

std::vector<double> grad_log_likelihood(const NetworkSpec& spec,
                                        std::span<const double> w,
                                        const Dataset& data) {
  std::vector<double> grad(w.size(), 0.0);
  accumulate_likelihood_grad(spec, w, data, grad);
  return grad;
}

double log_posterior_with_grad(const NetworkSpec& spec,
                               std::span<const double> w, const Dataset& data,
                               const PriorSpec& prior, std::span<double> grad) {
  prior.validate();
  std::fill(grad.begin(), grad.end(), 0.0);
  const double ll = accumulate_likelihood_grad(spec, w, data, grad);
  for (std::size_t i = 0; i < w.size(); ++i) grad[i] -= w[i] / prior.variance;
  return ll + log_prior(w, prior);
}

std::vector<double> grad_log_posterior(const NetworkSpec& spec,
                                       std::span<const double> w,
                                       const Dataset& data,
                                       const PriorSpec& prior) {
  std::vector<double> grad(w.size(), 0.0);
  log_posterior_with_grad(spec, w, data, prior, grad);
  return grad;
}

}  // namespace bnn
