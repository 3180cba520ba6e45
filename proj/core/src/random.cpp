#include "bnn/random.hpp"

#include <cmath>
#include <numbers>

namespace bnn {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t extra) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed),   hi(seed),  lo(stream),
                    hi(stream), lo(extra), hi(extra),
                    0x626e6eu};
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(seeded_engine(seed, stream, 0)) {}

Rng Rng::substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  Rng rng(0);
  rng.engine_ = seeded_engine(seed, a, b + 1);
  return rng;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // Rejection keeps the draw unbiased for any n.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

void Rng::fill_normal(std::span<double> out) {
  for (double& v : out) v = normal();
}

}  // namespace bnn
