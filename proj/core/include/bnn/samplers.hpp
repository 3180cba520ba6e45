#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bnn/model.hpp"
#include "bnn/random.hpp"

namespace bnn {

/// Unnormalized log-density over R^dim.
///
/// log_density may return -infinity; samplers treat it as zero density and
/// never move there. grad_log_density is required by HMC only. When
/// log_density_with_grad is set HMC uses it to get both in one pass.
struct TargetDensity {
  std::size_t dim = 0;
  std::function<double(std::span<const double>)> log_density;
  std::function<void(std::span<const double>, std::span<double>)>
      grad_log_density;
  std::function<double(std::span<const double>, std::span<double>)>
      log_density_with_grad;

  bool has_gradient() const {
    return static_cast<bool>(grad_log_density) ||
           static_cast<bool>(log_density_with_grad);
  }
  /// Evaluates log density and fills grad. Throws InvalidInput without one.
  double value_and_grad(std::span<const double> x, std::span<double> grad) const;
};

/// BNN posterior p(w | D) up to the evidence, with analytic gradient.
/// Holds copies of spec, data and prior; safe to share across threads.
TargetDensity posterior_target(NetworkSpec spec, Dataset data, PriorSpec prior);

/// Isotropic Gaussian random-walk proposal, w* = w + step_scale * N(0, I).
struct RandomWalkProposal {
  double step_scale = 0.1;
  void validate() const;
};

/// Fixed-parameter HMC with identity mass matrix.
struct HmcConfig {
  double step_size = 0.05;
  std::size_t n_leapfrog = 20;
  void validate() const;
};

using Kernel = std::variant<RandomWalkProposal, HmcConfig>;

std::string kernel_name(const Kernel& kernel);

/// Energy change above which an HMC trajectory counts as divergent.
inline constexpr double kDivergenceThreshold = 1000.0;

/// Retained draws of one chain plus its acceptance bookkeeping.
///
/// samples is row-major (n_retained x dim); log_posts[i] is the target
/// log-density at row i. Counters cover all n_iter steps, burn-in included.
struct Chain {
  std::size_t dim = 0;
  std::vector<double> samples;
  std::vector<double> log_posts;
  std::size_t n_proposed = 0;
  std::size_t n_accepted = 0;
  std::size_t n_divergent = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::size_t size() const { return log_posts.size(); }
  std::span<const double> sample(std::size_t i) const {
    return {samples.data() + i * dim, dim};
  }
  /// Values of coordinate d across retained samples.
  std::vector<double> coordinate(std::size_t d) const;
  /// Retained samples as separate weight vectors.
  std::vector<WeightVector> sample_vectors() const;

  bool operator==(const Chain&) const = default;
};

/// log of the MH acceptance probability, in (-inf, 0]:
/// min(0, (log_target_candidate - log_target_current) + (log_q_rev - log_q_fwd)).
/// log_q_fwd = log q(candidate | current), log_q_rev = log q(current | candidate).
/// Throws NumericError when the current state has zero density.
double mh_acceptance_log_prob(double log_target_current,
                              double log_target_candidate, double log_q_fwd,
                              double log_q_rev);

struct MhStepResult {
  bool accepted = false;
  double log_target = 0.0;
};

/// One random-walk MH step. `state` is updated in place only on acceptance;
/// on rejection it is left bit-identical. `log_target_current` is the cached
/// log-density at `state`.
MhStepResult mh_step(std::vector<double>& state, double log_target_current,
                     const TargetDensity& target,
                     const RandomWalkProposal& proposal, Rng& rng);

/// U + |p|^2 / 2.
double hamiltonian(double potential, std::span<const double> momentum);

/// Gradient of the potential U at a position, written into the output span.
using PotentialGradient =
    std::function<void(std::span<const double>, std::span<double>)>;

/// Kick-drift-kick leapfrog, n_steps steps of size step_size, in place.
/// Throws DivergenceError (carrying the 1-based step) on a non-finite
/// gradient. n_steps = 0 leaves (position, momentum) untouched.
void leapfrog(const PotentialGradient& grad_u, std::span<double> position,
              std::span<double> momentum, double step_size,
              std::size_t n_steps);

struct HmcStepResult {
  bool accepted = false;
  bool divergent = false;
  /// H(end) - H(start); +infinity for divergent trajectories.
  double delta_h = 0.0;
  double log_target = 0.0;
};

/// One HMC transition with momentum ~ N(0, I). Divergent trajectories
/// (delta_h > kDivergenceThreshold or non-finite) are rejected and flagged.
HmcStepResult hmc_step(std::vector<double>& state, double log_target_current,
                       const TargetDensity& target, const HmcConfig& cfg,
                       Rng& rng);

struct ChainControls {
  std::size_t n_iter = 1000;
  std::size_t burn_in = 200;
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  /// Stream index passed to Rng(seed, stream); one per chain.
  std::uint64_t stream = 0;

  void validate() const;
  /// floor((n_iter - burn_in) / thin).
  std::size_t n_retained() const;
};

/// Runs n_iter kernel steps from init and keeps every thin-th state after
/// burn-in. Deterministic given (seed, stream).
Chain run_chain(const TargetDensity& target, const Kernel& kernel,
                std::span<const double> init, const ChainControls& controls);

struct PosteriorPrediction {
  std::vector<double> mean_probs;
  double entropy = 0.0;
  std::size_t predicted_class = 0;
};

/// Averages softmax outputs over posterior samples. Entropy of the mean
/// distribution measures predictive uncertainty; ties in argmax go to the
/// lowest class index.
PosteriorPrediction posterior_predict(const NetworkSpec& spec,
                                      std::span<const WeightVector> samples,
                                      std::span<const double> x);

/// Same, over every retained sample of every chain.
PosteriorPrediction posterior_predict(const NetworkSpec& spec,
                                      std::span<const Chain> chains,
                                      std::span<const double> x);

/// -sum p ln p, with 0 ln 0 = 0.
double entropy(std::span<const double> probs);

}  // namespace bnn
