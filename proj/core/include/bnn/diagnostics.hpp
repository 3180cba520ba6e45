#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bnn/samplers.hpp"

namespace bnn {

/// n_accepted / n_proposed. Throws InvalidInput when nothing was proposed.
double acceptance_rate(const Chain& chain);

struct EssResult {
  double value = 1.0;
  bool degenerate = false;  // constant series
};

/// Minimum series length accepted by ess().
inline constexpr std::size_t kMinEssSamples = 10;

/// Effective sample size N / (1 + 2 sum_t rho_t).
///
/// Autocorrelations use the biased (1/N) autocovariance. They are summed in
/// pairs Gamma_k = rho_{2k} + rho_{2k+1} and the sum stops before the first
/// negative pair (Geyer's initial positive sequence). The result is clamped
/// to [1, N]. A constant series returns 1 with `degenerate` set.
EssResult ess(std::span<const double> series);

/// Autocorrelation at lags 0..max_lag (biased estimator). Constant series
/// give rho_0 = 1 and zeros elsewhere.
std::vector<double> autocorrelation(std::span<const double> series,
                                    std::size_t max_lag);

struct RhatResult {
  double value = 1.0;
  bool degenerate = false;  // zero within-chain variance
};

/// Split R-hat over m chains of equal length n >= 4.
///
/// Each chain is cut into a first and last half of n' = floor(n / 2) draws
/// (the middle draw is dropped for odd n). With W the mean within-half
/// variance and B / n' the variance of the half-chain means,
///   R = sqrt((n' - 1) / n' + B / (n' W)).
/// Zero W yields value +inf (1 if B is also zero) with `degenerate` set.
RhatResult split_rhat(std::span<const std::vector<double>> chains);

struct DimensionSummary {
  double mean = 0.0;
  double sd = 0.0;
  EssResult ess;
};

/// Diagnostics for one chain; all statistics on retained samples. Rates are
/// NaN when the chain carries no proposal counters. ESS is left at its
/// default for chains shorter than kMinEssSamples.
struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  double divergence_rate = 0.0;
  std::vector<DimensionSummary> dims;
};

ChainDiagnostics diagnose_chain(const Chain& chain);

/// Per-dimension split R-hat across chains. Chains must share dim and length.
std::vector<RhatResult> split_rhat_per_dim(std::span<const Chain> chains);

}  // namespace bnn
