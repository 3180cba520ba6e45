#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the code paths being checked.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bnn/model.hpp"
#include "bnn/random.hpp"

namespace bnn::oracles {

/// Central finite differences of f at x with step h.
inline std::vector<double> central_difference(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = f(probe);
    probe[i] = orig - h;
    const double down = f(probe);
    probe[i] = orig;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

/// Random features N(0, 1) and uniform labels.
inline Dataset random_dataset(std::size_t n, std::size_t dim, std::size_t k,
                              Rng& rng) {
  std::vector<double> f(n * dim);
  for (double& v : f) v = rng.normal();
  std::vector<std::size_t> y(n);
  for (auto& v : y) v = rng.uniform_index(k);
  return Dataset(dim, k, std::move(f), std::move(y));
}

/// Stationary AR(1): x_t = phi x_{t-1} + sqrt(1 - phi^2) e_t.
inline std::vector<double> ar1_series(std::size_t n, double phi, Rng& rng) {
  std::vector<double> x(n);
  const double innov = std::sqrt(1.0 - phi * phi);
  x[0] = rng.normal();
  for (std::size_t t = 1; t < n; ++t) x[t] = phi * x[t - 1] + innov * rng.normal();
  return x;
}

/// Integrated autocorrelation time of AR(1): (1 + phi) / (1 - phi).
inline double ar1_tau(double phi) { return (1.0 + phi) / (1.0 - phi); }

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Mann-Whitney AUC over all positive/negative pairs, ties counted 1/2.
inline double pairwise_auc(std::span<const double> s,
                           std::span<const std::size_t> y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1.0;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
    }
  }
  return wins / pairs;
}

}  // namespace bnn::oracles
