#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bnn/image.hpp"

namespace bnn {

/// Square k x k convolution kernel, row-major.
struct Kernel2d {
  std::size_t size = 0;
  std::vector<double> values;
};

/// Valid cross-correlation (no padding, stride 1, no kernel flip).
/// Throws InvalidInput when the kernel is larger than the image.
Image conv2d_valid(const Image& image, const Kernel2d& kernel);

std::vector<double> relu(std::span<const double> values);
Image relu(const Image& image);

/// Non-overlapping pool x pool max pooling; rows and columns that do not fill
/// a whole window are dropped.
Image max_pool(const Image& image, std::size_t pool);

struct ConvStage {
  std::size_t n_kernels = 8;
  std::size_t kernel_size = 3;
  std::size_t pool_size = 2;

  bool operator==(const ConvStage&) const = default;
};

/// Layout of the fixed random convolutional feature extractor.
struct ConvStackSpec {
  std::vector<ConvStage> stages{{8, 3, 2}, {4, 3, 2}};
  std::size_t output_dim = 256;
  std::uint64_t kernel_seed = 0;

  void validate() const;
  bool operator==(const ConvStackSpec&) const = default;
};

/// Materialized kernels for a ConvStackSpec.
///
/// Stage s maps C_in channels to n_kernels channels; output channel j is the
/// sum over input channels c of conv2d_valid(in_c, kernel(s, j, c)), followed
/// by ReLU and max pooling. Kernel entries are N(0, 1) / kernel_size drawn in
/// (stage, out, in, row, col) order from Rng(kernel_seed).
class ConvStack {
 public:
  explicit ConvStack(ConvStackSpec spec);

  const ConvStackSpec& spec() const { return spec_; }
  const Kernel2d& kernel(std::size_t stage, std::size_t out,
                         std::size_t in) const;

  /// Flattened size before binning for an input of the given dims.
  /// Throws InvalidInput naming the stage where the image becomes too small.
  std::size_t flattened_size(std::size_t height, std::size_t width) const;

  /// Conv/ReLU/pool per stage, flatten channel-major, then average into
  /// output_dim contiguous bins (bin b covers [b*M/D, (b+1)*M/D)).
  std::vector<double> extract(const Image& image) const;

 private:
  ConvStackSpec spec_;
  std::vector<std::size_t> in_channels_;
  // kernels_[stage][out * in_channels + in]
  std::vector<std::vector<Kernel2d>> kernels_;
};

std::vector<double> extract_features(const Image& image,
                                     const ConvStackSpec& spec);

/// Averages `values` into `bins` contiguous bins. Requires values.size() >= bins.
std::vector<double> average_bins(std::span<const double> values,
                                 std::size_t bins);

}  // namespace bnn
