#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace bnn {

/// Portable random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are not portable across library
/// implementations, so uniforms and normals are derived here directly:
///
///  - uniform(): top 53 bits of one engine word, scaled to [0, 1).
///  - normal(): Box-Muller on two uniforms, both outputs used in order.
///
/// Stream splitting: the engine for (seed, stream) is seeded through
/// std::seed_seq{seed_lo, seed_hi, stream_lo, stream_hi, 0x626e6e}, so chain
/// `i` of a run with master seed `s` owns Rng(s, i). Sub-tasks that need their
/// own stream (per-class shuffles, per-image augmentation) derive it with
/// Rng::substream(seed, a, b).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Stream for a two-level key, e.g. (split seed, class index).
  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  void fill_normal(std::span<double> out);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace bnn

namespace bnn {

/// Fisher-Yates shuffle driven by Rng::uniform_index.
template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace bnn
