#pragma once

#include <cstddef>
#include <vector>

namespace bnn {

/// Single-channel image, row-major. Pixel values are intensities; images
/// produced by ingestion and augmentation stay in [0, 1], intermediate
/// convolution maps are unbounded.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(std::size_t h, std::size_t w, double fill = 0.0)
      : height(h), width(w), pixels(h * w, fill) {}
  Image(std::size_t h, std::size_t w, std::vector<double> values);

  double& at(std::size_t i, std::size_t j) { return pixels[i * width + j]; }
  double at(std::size_t i, std::size_t j) const { return pixels[i * width + j]; }
  std::size_t size() const { return pixels.size(); }

  bool operator==(const Image&) const = default;
};

}  // namespace bnn
