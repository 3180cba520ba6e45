#include "bnn/features.hpp"

#include <algorithm>
#include <string>

#include "bnn/error.hpp"
#include "bnn/random.hpp"

namespace bnn {

Image::Image(std::size_t h, std::size_t w, std::vector<double> values)
    : height(h), width(w), pixels(std::move(values)) {
  if (pixels.size() != h * w) {
    throw InvalidInput("image has " + std::to_string(pixels.size()) +
                       " pixels, expected " + std::to_string(h * w));
  }
}

Image conv2d_valid(const Image& image, const Kernel2d& kernel) {
  const std::size_t k = kernel.size;
  if (k == 0 || kernel.values.size() != k * k) {
    throw InvalidInput("kernel values do not form a square");
  }
  if (k > image.height || k > image.width) {
    throw InvalidInput("kernel size " + std::to_string(k) +
                       " exceeds image dims " + std::to_string(image.height) +
                       "x" + std::to_string(image.width));
  }
  Image out(image.height - k + 1, image.width - k + 1);
  for (std::size_t i = 0; i < out.height; ++i) {
    for (std::size_t j = 0; j < out.width; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        const double* src = &image.pixels[(i + a) * image.width + j];
        const double* ker = &kernel.values[a * k];
        for (std::size_t b = 0; b < k; ++b) s += src[b] * ker[b];
      }
      out.at(i, j) = s;
    }
  }
  return out;
}

std::vector<double> relu(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v = std::max(v, 0.0);
  return out;
}

Image relu(const Image& image) {
  Image out = image;
  for (double& v : out.pixels) v = std::max(v, 0.0);
  return out;
}

Image max_pool(const Image& image, std::size_t pool) {
  if (pool == 0) throw InvalidInput("pool size must be >= 1");
  Image out(image.height / pool, image.width / pool);
  for (std::size_t i = 0; i < out.height; ++i) {
    for (std::size_t j = 0; j < out.width; ++j) {
      double m = image.at(i * pool, j * pool);
      for (std::size_t a = 0; a < pool; ++a) {
        for (std::size_t b = 0; b < pool; ++b) {
          m = std::max(m, image.at(i * pool + a, j * pool + b));
        }
      }
      out.at(i, j) = m;
    }
  }
  return out;
}

void ConvStackSpec::validate() const {
  if (stages.empty()) throw InvalidInput("conv stack needs >= 1 stage");
  if (output_dim == 0) throw InvalidInput("conv stack output_dim must be >= 1");
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const auto& st = stages[s];
    const std::string where = "conv stage " + std::to_string(s) + ": ";
    if (st.n_kernels == 0) throw InvalidInput(where + "n_kernels must be >= 1");
    if (st.kernel_size == 0 || st.kernel_size % 2 == 0) {
      throw InvalidInput(where + "kernel_size must be odd");
    }
    if (st.pool_size == 0) throw InvalidInput(where + "pool_size must be >= 1");
  }
}

ConvStack::ConvStack(ConvStackSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  Rng rng(spec_.kernel_seed);
  std::size_t channels = 1;
  for (const auto& stage : spec_.stages) {
    in_channels_.push_back(channels);
    const std::size_t k = stage.kernel_size;
    const double scale = 1.0 / static_cast<double>(k);
    std::vector<Kernel2d> kernels;
    kernels.reserve(stage.n_kernels * channels);
    for (std::size_t o = 0; o < stage.n_kernels; ++o) {
      for (std::size_t c = 0; c < channels; ++c) {
        Kernel2d ker{k, std::vector<double>(k * k)};
        for (double& v : ker.values) v = rng.normal() * scale;
        kernels.push_back(std::move(ker));
      }
    }
    kernels_.push_back(std::move(kernels));
    channels = stage.n_kernels;
  }
}

const Kernel2d& ConvStack::kernel(std::size_t stage, std::size_t out,
                                  std::size_t in) const {
  return kernels_.at(stage).at(out * in_channels_.at(stage) + in);
}

std::size_t ConvStack::flattened_size(std::size_t height,
                                      std::size_t width) const {
  std::size_t h = height;
  std::size_t w = width;
  for (std::size_t s = 0; s < spec_.stages.size(); ++s) {
    const auto& st = spec_.stages[s];
    if (h < st.kernel_size || w < st.kernel_size) {
      throw InvalidInput("image too small for conv stage " + std::to_string(s) +
                         ": " + std::to_string(h) + "x" + std::to_string(w) +
                         " input, kernel " + std::to_string(st.kernel_size));
    }
    h = (h - st.kernel_size + 1) / st.pool_size;
    w = (w - st.kernel_size + 1) / st.pool_size;
    if (h == 0 || w == 0) {
      throw InvalidInput("image too small for conv stage " + std::to_string(s) +
                         ": pooling leaves an empty map");
    }
  }
  const std::size_t total = h * w * spec_.stages.back().n_kernels;
  if (total < spec_.output_dim) {
    throw InvalidInput("image too small: conv stack yields " +
                       std::to_string(total) + " values, output_dim is " +
                       std::to_string(spec_.output_dim));
  }
  return total;
}

std::vector<double> average_bins(std::span<const double> values,
                                 std::size_t bins) {
  const std::size_t m = values.size();
  if (bins == 0 || m < bins) {
    throw InvalidInput("cannot average " + std::to_string(m) + " values into " +
                       std::to_string(bins) + " bins");
  }
  std::vector<double> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = b * m / bins;
    const std::size_t hi = (b + 1) * m / bins;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    out[b] = s / static_cast<double>(hi - lo);
  }
  return out;
}

std::vector<double> ConvStack::extract(const Image& image) const {
  flattened_size(image.height, image.width);
  std::vector<Image> maps{image};
  for (std::size_t s = 0; s < spec_.stages.size(); ++s) {
    const auto& st = spec_.stages[s];
    std::vector<Image> next;
    next.reserve(st.n_kernels);
    for (std::size_t o = 0; o < st.n_kernels; ++o) {
      Image acc;
      for (std::size_t c = 0; c < maps.size(); ++c) {
        Image part = conv2d_valid(maps[c], kernel(s, o, c));
        if (c == 0) {
          acc = std::move(part);
        } else {
          for (std::size_t i = 0; i < acc.size(); ++i) {
            acc.pixels[i] += part.pixels[i];
          }
        }
      }
      next.push_back(max_pool(relu(acc), st.pool_size));
    }
    maps = std::move(next);
  }
  std::vector<double> flat;
  flat.reserve(maps.size() * maps.front().size());
  for (const auto& m : maps) {
    flat.insert(flat.end(), m.pixels.begin(), m.pixels.end());
  }
  return average_bins(flat, spec_.output_dim);
}

std::vector<double> extract_features(const Image& image,
                                     const ConvStackSpec& spec) {
  return ConvStack(spec).extract(image);
}

}  // namespace bnn
