#include "bnn/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "bnn/error.hpp"

namespace bnn {

double TargetDensity::value_and_grad(std::span<const double> x,
                                     std::span<double> grad) const {
  if (log_density_with_grad) return log_density_with_grad(x, grad);
  if (!grad_log_density) {
    throw InvalidInput("target density provides no gradient");
  }
  grad_log_density(x, grad);
  return log_density(x);
}

TargetDensity posterior_target(NetworkSpec spec, Dataset data,
                               PriorSpec prior) {
  spec.validate();
  prior.validate();
  if (data.dim() != spec.input_dim) {
    throw InvalidInput("dataset dimension " + std::to_string(data.dim()) +
                       " does not match network input_dim " +
                       std::to_string(spec.input_dim));
  }
  struct Model {
    NetworkSpec spec;
    Dataset data;
    PriorSpec prior;
  };
  auto model = std::make_shared<const Model>(
      Model{std::move(spec), std::move(data), prior});

  TargetDensity target;
  target.dim = param_count(model->spec);
  target.log_density = [model](std::span<const double> w) {
    return log_posterior_unnorm(model->spec, w, model->data, model->prior);
  };
  target.grad_log_density = [model](std::span<const double> w,
                                    std::span<double> g) {
    log_posterior_with_grad(model->spec, w, model->data, model->prior, g);
  };
  target.log_density_with_grad = [model](std::span<const double> w,
                                         std::span<double> g) {
    return log_posterior_with_grad(model->spec, w, model->data, model->prior,
                                   g);
  };
  return target;
}

void RandomWalkProposal::validate() const {
  if (!(step_scale > 0.0) || !std::isfinite(step_scale)) {
    throw InvalidInput("random-walk step_scale must be positive and finite");
  }
}

void HmcConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw InvalidInput("HMC step_size must be positive and finite");
  }
  if (n_leapfrog < 1) throw InvalidInput("HMC n_leapfrog must be >= 1");
}

std::string kernel_name(const Kernel& kernel) {
  return std::holds_alternative<HmcConfig>(kernel) ? "hmc" : "mh";
}

std::vector<double> Chain::coordinate(std::size_t d) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = samples[i * dim + d];
  return out;
}

std::vector<WeightVector> Chain::sample_vectors() const {
  std::vector<WeightVector> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto s = sample(i);
    out.emplace_back(s.begin(), s.end());
  }
  return out;
}

double mh_acceptance_log_prob(double log_target_current,
                              double log_target_candidate, double log_q_fwd,
                              double log_q_rev) {
  if (std::isinf(log_target_current) && log_target_current < 0.0) {
    throw NumericError("chain occupies a zero-density state");
  }
  if (std::isnan(log_target_current) || std::isnan(log_target_candidate)) {
    throw NumericError("log target is NaN");
  }
  if (log_target_candidate == -std::numeric_limits<double>::infinity()) {
    return -std::numeric_limits<double>::infinity();
  }
  const double log_ratio =
      (log_target_candidate - log_target_current) + (log_q_rev - log_q_fwd);
  return std::min(0.0, log_ratio);
}

MhStepResult mh_step(std::vector<double>& state, double log_target_current,
                     const TargetDensity& target,
                     const RandomWalkProposal& proposal, Rng& rng) {
  std::vector<double> candidate(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    candidate[i] = state[i] + proposal.step_scale * rng.normal();
  }
  double log_candidate = target.log_density(candidate);
  if (std::isnan(log_candidate)) {
    log_candidate = -std::numeric_limits<double>::infinity();
  }
  // Symmetric proposal: forward and reverse densities cancel.
  const double log_alpha =
      mh_acceptance_log_prob(log_target_current, log_candidate, 0.0, 0.0);
  const double u = rng.uniform();
  if (std::log(u) < log_alpha) {
    state.swap(candidate);
    return {true, log_candidate};
  }
  return {false, log_target_current};
}

double hamiltonian(double potential, std::span<const double> momentum) {
  double kinetic = 0.0;
  for (double p : momentum) kinetic += p * p;
  return potential + 0.5 * kinetic;
}

void leapfrog(const PotentialGradient& grad_u, std::span<double> position,
              std::span<double> momentum, double step_size,
              std::size_t n_steps) {
  if (n_steps == 0) return;
  if (position.size() != momentum.size()) {
    throw InvalidInput("leapfrog position and momentum lengths differ");
  }
  const std::size_t n = position.size();
  std::vector<double> grad(n);
  auto eval_grad = [&](std::size_t step) {
    grad_u(position, grad);
    for (double g : grad) {
      if (!std::isfinite(g)) {
        throw DivergenceError(step, "non-finite gradient at leapfrog step " +
                                        std::to_string(step));
      }
    }
  };
  const double half = 0.5 * step_size;
  eval_grad(0);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    for (std::size_t i = 0; i < n; ++i) momentum[i] -= half * grad[i];
    for (std::size_t i = 0; i < n; ++i) position[i] += step_size * momentum[i];
    eval_grad(step);
    for (std::size_t i = 0; i < n; ++i) momentum[i] -= half * grad[i];
  }
}

HmcStepResult hmc_step(std::vector<double>& state, double log_target_current,
                       const TargetDensity& target, const HmcConfig& cfg,
                       Rng& rng) {
  const std::size_t n = state.size();
  std::vector<double> momentum(n);
  rng.fill_normal(momentum);
  const double h_start = hamiltonian(-log_target_current, momentum);

  std::vector<double> position = state;
  double last_log_target = log_target_current;
  const PotentialGradient grad_u = [&](std::span<const double> q,
                                       std::span<double> g) {
    last_log_target = target.value_and_grad(q, g);
    for (double& v : g) v = -v;
  };

  HmcStepResult result;
  // The accept draw is taken even for divergent trajectories so that every
  // step consumes the same number of random numbers.
  const double u = rng.uniform();
  try {
    leapfrog(grad_u, position, momentum, cfg.step_size, cfg.n_leapfrog);
  } catch (const DivergenceError&) {
    result.divergent = true;
  }
  double delta_h = std::numeric_limits<double>::infinity();
  if (!result.divergent) {
    delta_h = hamiltonian(-last_log_target, momentum) - h_start;
    if (!std::isfinite(delta_h) || delta_h > kDivergenceThreshold) {
      result.divergent = true;
      delta_h = std::numeric_limits<double>::infinity();
    }
  }
  result.delta_h = delta_h;
  if (!result.divergent && std::log(u) < -delta_h) {
    state.swap(position);
    result.accepted = true;
    result.log_target = last_log_target;
  } else {
    result.log_target = log_target_current;
  }
  return result;
}

void ChainControls::validate() const {
  if (n_iter == 0) throw ConfigError("n_iter must be >= 1");
  if (burn_in >= n_iter) throw ConfigError("burn_in must be < n_iter");
  if (thin < 1) throw ConfigError("thin must be >= 1");
}

std::size_t ChainControls::n_retained() const {
  return (n_iter - burn_in) / thin;
}

Chain run_chain(const TargetDensity& target, const Kernel& kernel,
                std::span<const double> init, const ChainControls& controls) {
  controls.validate();
  if (init.size() != target.dim) {
    throw ConfigError("initial state has length " + std::to_string(init.size()) +
                      ", target dimension is " + std::to_string(target.dim));
  }
  std::visit([](const auto& k) { k.validate(); }, kernel);
  if (std::holds_alternative<HmcConfig>(kernel) && !target.has_gradient()) {
    throw ConfigError("HMC requires a target with gradients");
  }

  std::vector<double> state(init.begin(), init.end());
  double log_target = target.log_density(state);
  if (!std::isfinite(log_target)) {
    throw ConfigError("initial state has zero or undefined target density");
  }

  Chain chain;
  chain.dim = target.dim;
  chain.seed = controls.seed;
  chain.stream = controls.stream;
  const std::size_t n_keep = controls.n_retained();
  chain.samples.reserve(n_keep * target.dim);
  chain.log_posts.reserve(n_keep);

  Rng rng(controls.seed, controls.stream);
  for (std::size_t t = 1; t <= controls.n_iter; ++t) {
    bool accepted = false;
    if (const auto* mh = std::get_if<RandomWalkProposal>(&kernel)) {
      const auto r = mh_step(state, log_target, target, *mh, rng);
      accepted = r.accepted;
      log_target = r.log_target;
    } else {
      const auto r =
          hmc_step(state, log_target, target, std::get<HmcConfig>(kernel), rng);
      accepted = r.accepted;
      log_target = r.log_target;
      if (r.divergent) ++chain.n_divergent;
    }
    ++chain.n_proposed;
    if (accepted) ++chain.n_accepted;
    if (t > controls.burn_in && (t - controls.burn_in) % controls.thin == 0) {
      chain.samples.insert(chain.samples.end(), state.begin(), state.end());
      chain.log_posts.push_back(log_target);
    }
  }
  return chain;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

namespace {

PosteriorPrediction finish_prediction(std::vector<double> sum,
                                      std::size_t count) {
  for (double& v : sum) v /= static_cast<double>(count);
  PosteriorPrediction out;
  out.predicted_class = static_cast<std::size_t>(
      std::max_element(sum.begin(), sum.end()) - sum.begin());
  out.entropy = entropy(sum);
  out.mean_probs = std::move(sum);
  return out;
}

}  // namespace

PosteriorPrediction posterior_predict(const NetworkSpec& spec,
                                      std::span<const WeightVector> samples,
                                      std::span<const double> x) {
  if (samples.empty()) throw InvalidInput("posterior_predict needs >= 1 sample");
  std::vector<double> sum(spec.n_classes, 0.0);
  for (const auto& w : samples) {
    const auto p = forward(spec, w, x);
    for (std::size_t k = 0; k < p.size(); ++k) sum[k] += p[k];
  }
  return finish_prediction(std::move(sum), samples.size());
}

PosteriorPrediction posterior_predict(const NetworkSpec& spec,
                                      std::span<const Chain> chains,
                                      std::span<const double> x) {
  std::vector<double> sum(spec.n_classes, 0.0);
  std::size_t count = 0;
  for (const auto& chain : chains) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const auto p = forward(spec, chain.sample(i), x);
      for (std::size_t k = 0; k < p.size(); ++k) sum[k] += p[k];
      ++count;
    }
  }
  if (count == 0) throw InvalidInput("posterior_predict needs >= 1 sample");
  return finish_prediction(std::move(sum), count);
}

}  // namespace bnn
