#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "bnn/diagnostics.hpp"
#include "bnn/error.hpp"
#include "bnn/samplers.hpp"
#include "oracles.hpp"

namespace bnn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TargetDensity standard_normal(std::size_t dim) {
  TargetDensity t;
  t.dim = dim;
  t.log_density = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return -0.5 * s;
  };
  t.grad_log_density = [](std::span<const double> x, std::span<double> g) {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = -x[i];
  };
  return t;
}

TEST(MhAcceptance, EqualTargetsSymmetric) {
  EXPECT_EQ(mh_acceptance_log_prob(-3.0, -3.0, 0.0, 0.0), 0.0);
}

TEST(MhAcceptance, DownhillByLn2) {
  EXPECT_NEAR(mh_acceptance_log_prob(0.0, -std::log(2.0), 0.0, 0.0),
              -std::log(2.0), 1e-15);
}

TEST(MhAcceptance, AsymmetricProposal) {
  // target ratio 2, q(cur|cand) / q(cand|cur) = 0.25 -> alpha = 0.5
  const double v = mh_acceptance_log_prob(0.0, std::log(2.0), 0.0, std::log(0.25));
  EXPECT_NEAR(v, -0.693147, 1e-6);
  EXPECT_NEAR(v, -std::log(2.0), 1e-15);
}

TEST(MhAcceptance, UphillAlwaysAccepted) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const double cur = rng.normal();
    EXPECT_EQ(mh_acceptance_log_prob(cur, cur + std::abs(rng.normal()), 0, 0), 0.0);
  }
}

TEST(MhAcceptance, ZeroDensityStates) {
  EXPECT_THROW(mh_acceptance_log_prob(-kInf, 0.0, 0.0, 0.0), NumericError);
  EXPECT_EQ(mh_acceptance_log_prob(0.0, -kInf, 0.0, 0.0), -kInf);
}

TEST(MhStep, VanishingStepAlwaysAccepted) {
  const auto target = standard_normal(3);
  Rng rng(2);
  std::vector<double> state{0.4, -1.0, 2.0};
  const RandomWalkProposal tiny{1e-300};
  for (int i = 0; i < 200; ++i) {
    const double lp = target.log_density(state);
    EXPECT_TRUE(mh_step(state, lp, target, tiny, rng).accepted);
  }
}

TEST(MhStep, ZeroDensityCandidateRejectedAndStateUntouched) {
  TargetDensity wall;
  wall.dim = 2;
  wall.log_density = [](std::span<const double> x) {
    return (x[0] == 0.25 && x[1] == -0.5) ? 0.0 : -kInf;
  };
  Rng rng(3);
  std::vector<double> state{0.25, -0.5};
  const auto before = state;
  for (int i = 0; i < 100; ++i) {
    const auto r = mh_step(state, 0.0, wall, RandomWalkProposal{0.5}, rng);
    EXPECT_FALSE(r.accepted);
    EXPECT_EQ(r.log_target, 0.0);
    ASSERT_EQ(state, before);
  }
}

TEST(MhStep, DiscreteTargetOccupancy) {
  // Piecewise-constant density on [-0.5, 2.5) with mass pi_k on cell k.
  const std::vector<double> pi{0.2, 0.5, 0.3};
  TargetDensity t;
  t.dim = 1;
  t.log_density = [&](std::span<const double> x) {
    const double r = std::round(x[0]);
    if (!(x[0] >= -0.5 && x[0] < 2.5)) return -kInf;
    return std::log(pi[static_cast<std::size_t>(r)]);
  };
  Rng rng(4);
  std::vector<double> state{1.0};
  double lp = t.log_density(state);
  std::vector<double> counts(3, 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    lp = mh_step(state, lp, t, RandomWalkProposal{1.0}, rng).log_target;
    counts[static_cast<std::size_t>(std::round(state[0]))] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t k = 0; k < 3; ++k) tv += std::abs(counts[k] / n - pi[k]);
  EXPECT_LT(0.5 * tv, 0.02);
}

TEST(Hamiltonian, Values) {
  EXPECT_DOUBLE_EQ(hamiltonian(2.0, std::vector<double>{3.0, 4.0}), 14.5);
  EXPECT_DOUBLE_EQ(hamiltonian(-1.25, std::vector<double>{0.0, 0.0, 0.0}), -1.25);
  std::vector<double> unit(7, 0.0);
  unit[3] = 1.0;
  EXPECT_DOUBLE_EQ(hamiltonian(0.0, unit), 0.5);
}

PotentialGradient harmonic_grad() {
  return [](std::span<const double> q, std::span<double> g) {
    for (std::size_t i = 0; i < q.size(); ++i) g[i] = q[i];
  };
}

TEST(Leapfrog, ZeroStepsIsIdentity) {
  std::vector<double> q{1.0, 2.0};
  std::vector<double> p{-0.5, 0.25};
  leapfrog(harmonic_grad(), q, p, 0.1, 0);
  EXPECT_EQ(q, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(p, (std::vector<double>{-0.5, 0.25}));
}

TEST(Leapfrog, HarmonicSingleStepByHand) {
  // p: 0 - 0.05*1 = -0.05; q: 1 + 0.1*(-0.05) = 0.995;
  // p: -0.05 - 0.05*0.995 = -0.09975
  std::vector<double> q{1.0};
  std::vector<double> p{0.0};
  leapfrog(harmonic_grad(), q, p, 0.1, 1);
  EXPECT_NEAR(q[0], 0.995, 1e-15);
  EXPECT_NEAR(p[0], -0.09975, 1e-15);
}

TEST(Leapfrog, ReversibleOnHarmonic) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> q(4), p(4);
    rng.fill_normal(q);
    rng.fill_normal(p);
    const auto q0 = q, p0 = p;
    leapfrog(harmonic_grad(), q, p, 0.05, 30);
    for (double& v : p) v = -v;
    leapfrog(harmonic_grad(), q, p, 0.05, 30);
    for (double& v : p) v = -v;
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_NEAR(q[i], q0[i], 1e-10);
      EXPECT_NEAR(p[i], p0[i], 1e-10);
    }
  }
}

TEST(Leapfrog, NonFiniteGradientReportsStep) {
  // Gradient blows up once q leaves [-2, 2].
  const PotentialGradient grad = [](std::span<const double> q, std::span<double> g) {
    g[0] = std::abs(q[0]) > 2.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  std::vector<double> q{0.0};
  std::vector<double> p{1.0};
  try {
    leapfrog(grad, q, p, 1.0, 10);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.step(), 3u);  // q = 1, 2, 3
  }
}

TEST(HmcStep, TinyStepConservesEnergy) {
  const auto target = standard_normal(3);
  Rng rng(6);
  std::vector<double> state{0.3, -0.2, 1.1};
  const HmcConfig cfg{1e-6, 5};
  for (int i = 0; i < 50; ++i) {
    const auto r = hmc_step(state, target.log_density(state), target, cfg, rng);
    EXPECT_LT(std::abs(r.delta_h), 1e-9);
    EXPECT_TRUE(r.accepted);
  }
}

TEST(HmcStep, StandardNormalMoments) {
  const auto target = standard_normal(1);
  const auto chain = run_chain(target, HmcConfig{0.3, 10}, std::vector<double>{2.0},
                               ChainControls{20000, 1000, 1, 7, 0});
  const auto x = chain.coordinate(0);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  const double se = 1.0 / std::sqrt(ess(x).value);
  EXPECT_LT(std::abs(mean), 3.0 * se);
}

TEST(HmcStep, DivergentTrajectoryRejected) {
  // Steep quadratic: step 10 is far beyond the stability limit.
  TargetDensity steep;
  steep.dim = 1;
  steep.log_density = [](std::span<const double> x) { return -50.0 * x[0] * x[0]; };
  steep.grad_log_density = [](std::span<const double> x, std::span<double> g) {
    g[0] = -100.0 * x[0];
  };
  Rng rng(8);
  std::vector<double> state{0.1};
  const auto r = hmc_step(state, steep.log_density(state), steep, HmcConfig{10.0, 20}, rng);
  EXPECT_TRUE(r.divergent);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(state[0], 0.1);
}

TEST(RunChain, RetainedCount) {
  const auto chain = run_chain(standard_normal(2), RandomWalkProposal{0.5},
                               std::vector<double>{0.0, 0.0},
                               ChainControls{1000, 200, 4, 1, 0});
  EXPECT_EQ(chain.size(), 200u);
  EXPECT_EQ(chain.samples.size(), 400u);
  EXPECT_EQ(chain.n_proposed, 1000u);
  EXPECT_LE(chain.n_accepted, chain.n_proposed);
}

TEST(RunChain, DeterministicPerSeed) {
  const auto t = standard_normal(3);
  const std::vector<double> init{0.1, 0.2, 0.3};
  for (const Kernel k : {Kernel{RandomWalkProposal{0.4}}, Kernel{HmcConfig{0.2, 5}}}) {
    const auto a = run_chain(t, k, init, {500, 100, 2, 42, 3});
    const auto b = run_chain(t, k, init, {500, 100, 2, 42, 3});
    const auto c = run_chain(t, k, init, {500, 100, 2, 42, 4});
    EXPECT_EQ(a, b);
    EXPECT_NE(a.samples, c.samples);
  }
}

TEST(RunChain, StandardNormalWithRandomWalk) {
  const auto chain = run_chain(standard_normal(1), RandomWalkProposal{1.0},
                               std::vector<double>{0.0},
                               ChainControls{50000, 5000, 1, 99, 0});
  const auto x = chain.coordinate(0);
  double mean = 0.0, var = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size() - 1);
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(var, 1.0, 0.1);
}

TEST(RunChain, LogPostsReproduceTarget) {
  Rng rng(10);
  const NetworkSpec spec{2, {3}, 2, Activation::Tanh};
  const Dataset d = oracles::random_dataset(10, 2, 2, rng);
  const PriorSpec prior{1.0};
  const auto target = posterior_target(spec, d, prior);
  const std::vector<double> init(target.dim, 0.0);
  for (const Kernel k : {Kernel{RandomWalkProposal{0.05}}, Kernel{HmcConfig{0.05, 10}}}) {
    const auto chain = run_chain(target, k, init, {300, 50, 5, 1, 0});
    for (std::size_t i = 0; i < chain.size(); ++i) {
      EXPECT_NEAR(log_posterior_unnorm(spec, chain.sample(i), d, prior),
                  chain.log_posts[i], 1e-10);
    }
  }
}

TEST(RunChain, RejectsBadConfiguration) {
  const auto t = standard_normal(1);
  const std::vector<double> init{0.0};
  EXPECT_THROW(run_chain(t, RandomWalkProposal{1.0}, init, {100, 100, 1, 0, 0}),
               ConfigError);
  EXPECT_THROW(run_chain(t, RandomWalkProposal{1.0}, init, {100, 10, 0, 0, 0}),
               ConfigError);
  TargetDensity half;
  half.dim = 1;
  half.log_density = [](std::span<const double> x) { return x[0] > 0 ? 0.0 : -kInf; };
  EXPECT_THROW(run_chain(half, RandomWalkProposal{1.0}, init, {100, 10, 1, 0, 0}),
               ConfigError);
  EXPECT_THROW(run_chain(half, HmcConfig{0.1, 5}, std::vector<double>{1.0},
                         {100, 10, 1, 0, 0}),
               ConfigError);
}

TEST(PosteriorPredict, SingleSampleEqualsForward) {
  const NetworkSpec spec{2, {}, 3, Activation::ReLU};
  Rng rng(12);
  WeightVector w(param_count(spec));
  rng.fill_normal(w);
  const std::vector<double> x{0.4, -0.9};
  const std::vector<WeightVector> samples{w};
  const auto pred = posterior_predict(spec, samples, x);
  const auto p = forward(spec, w, x);
  EXPECT_EQ(pred.mean_probs, p);
  double h = 0.0;
  for (double v : p) h -= v * std::log(v);
  EXPECT_NEAR(pred.entropy, h, 1e-15);
}

TEST(PosteriorPredict, OpposingSamplesGiveMaximalEntropy) {
  // One input, logits +/- 50 make outputs [1,0] and [0,1] to double precision.
  const NetworkSpec spec{1, {}, 2, Activation::ReLU};
  const std::vector<WeightVector> samples{{50.0, -50.0, 0.0, 0.0},
                                          {-50.0, 50.0, 0.0, 0.0}};
  const auto pred = posterior_predict(spec, samples, std::vector<double>{1.0});
  EXPECT_NEAR(pred.mean_probs[0], 0.5, 1e-15);
  EXPECT_NEAR(pred.mean_probs[1], 0.5, 1e-15);
  EXPECT_NEAR(pred.entropy, 0.693147, 1e-6);
  EXPECT_EQ(pred.predicted_class, 0u);  // tie -> lowest index
}

TEST(PosteriorPredict, UniformSamplesGiveLnK) {
  const NetworkSpec spec{2, {}, 5, Activation::ReLU};
  const std::vector<WeightVector> samples(3, WeightVector(param_count(spec), 0.0));
  const auto pred = posterior_predict(spec, samples, std::vector<double>{1.0, 2.0});
  EXPECT_NEAR(pred.entropy, std::log(5.0), 1e-12);
}

TEST(PosteriorPredict, EntropyBoundsOnRandomNets) {
  Rng rng(13);
  const NetworkSpec spec{3, {4}, 4, Activation::Tanh};
  for (int t = 0; t < 30; ++t) {
    std::vector<WeightVector> samples(5, WeightVector(param_count(spec)));
    for (auto& w : samples) rng.fill_normal(w);
    std::vector<double> x(3);
    rng.fill_normal(x);
    const auto pred = posterior_predict(spec, samples, x);
    double s = 0.0;
    for (double v : pred.mean_probs) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_GE(pred.entropy, 0.0);
    EXPECT_LE(pred.entropy, std::log(4.0) + 1e-12);
  }
}

TEST(PosteriorPredict, EmptySamplesRejected) {
  const NetworkSpec spec{1, {}, 2, Activation::ReLU};
  const std::vector<WeightVector> none;
  EXPECT_THROW(posterior_predict(spec, none, std::vector<double>{1.0}), InvalidInput);
}

}  // namespace
}  // namespace bnn
