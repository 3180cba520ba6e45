#include "bnn/augmentation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "bnn/error.hpp"
#include "bnn/random.hpp"

namespace bnn {

std::string_view to_string(FlipAxis axis) {
  return axis == FlipAxis::Horizontal ? "horizontal" : "vertical";
}

FlipAxis parse_flip_axis(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "horizontal" || lower == "h") return FlipAxis::Horizontal;
  if (lower == "vertical" || lower == "v") return FlipAxis::Vertical;
  throw InvalidInput("unknown flip axis '" + std::string(name) + "'");
}

Image rotate(const Image& image, int degrees) {
  const std::size_t h = image.height;
  const std::size_t w = image.width;
  switch (degrees) {
    case 0:
      return image;
    case 90: {
      Image out(w, h);
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) out.at(j, h - 1 - i) = image.at(i, j);
      return out;
    }
    case 180: {
      Image out(h, w);
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j)
          out.at(h - 1 - i, w - 1 - j) = image.at(i, j);
      return out;
    }
    case 270: {
      Image out(w, h);
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) out.at(w - 1 - j, i) = image.at(i, j);
      return out;
    }
    default:
      throw InvalidInput("unsupported rotation angle " + std::to_string(degrees) +
                         " (expected 0, 90, 180 or 270)");
  }
}

Image flip(const Image& image, FlipAxis axis) {
  Image out(image.height, image.width);
  for (std::size_t i = 0; i < image.height; ++i) {
    for (std::size_t j = 0; j < image.width; ++j) {
      if (axis == FlipAxis::Horizontal) {
        out.at(i, image.width - 1 - j) = image.at(i, j);
      } else {
        out.at(image.height - 1 - i, j) = image.at(i, j);
      }
    }
  }
  return out;
}

namespace {

constexpr double kEdgeTol = 1e-9;

// Maps an output coordinate back into the source; false if it falls outside.
bool source_coord(double dst, double center, double factor, double extent,
                  double& src) {
  src = center + (dst - center) / factor;
  if (src < -kEdgeTol || src > extent - 1.0 + kEdgeTol) return false;
  src = std::clamp(src, 0.0, extent - 1.0);
  return true;
}

}  // namespace

Image scale(const Image& image, double factor) {
  if (!(factor >= kMinScale && factor <= kMaxScale)) {
    throw InvalidInput("scale factor " + std::to_string(factor) +
                       " outside [0.5, 2.0]");
  }
  const std::size_t h = image.height;
  const std::size_t w = image.width;
  Image out(h, w, 0.0);
  const double ci = (static_cast<double>(h) - 1.0) / 2.0;
  const double cj = (static_cast<double>(w) - 1.0) / 2.0;
  for (std::size_t i = 0; i < h; ++i) {
    double si;
    if (!source_coord(static_cast<double>(i), ci, factor, static_cast<double>(h), si))
      continue;
    const std::size_t i0 = static_cast<std::size_t>(std::floor(si));
    const std::size_t i1 = std::min(i0 + 1, h - 1);
    const double ti = si - static_cast<double>(i0);
    for (std::size_t j = 0; j < w; ++j) {
      double sj;
      if (!source_coord(static_cast<double>(j), cj, factor, static_cast<double>(w), sj))
        continue;
      const std::size_t j0 = static_cast<std::size_t>(std::floor(sj));
      const std::size_t j1 = std::min(j0 + 1, w - 1);
      const double tj = sj - static_cast<double>(j0);
      const double top = image.at(i0, j0) + (image.at(i0, j1) - image.at(i0, j0)) * tj;
      const double bot = image.at(i1, j0) + (image.at(i1, j1) - image.at(i1, j0)) * tj;
      out.at(i, j) = std::clamp(top + (bot - top) * ti, 0.0, 1.0);
    }
  }
  return out;
}

void AugmentPolicy::validate() const {
  for (int r : rotations) {
    if (r != 90 && r != 180 && r != 270) {
      throw InvalidInput("policy rotation " + std::to_string(r) +
                         " not in {90, 180, 270}");
    }
  }
  for (double s : scales) {
    if (!(s >= kMinScale && s <= kMaxScale)) {
      throw InvalidInput("policy scale " + std::to_string(s) +
                         " outside [0.5, 2.0]");
    }
  }
}

AugmentDraw draw_augmentation(const AugmentPolicy& policy, std::size_t index,
                              std::size_t copy, bool square) {
  Rng rng = Rng::substream(policy.seed, index, copy);
  AugmentDraw draw;

  std::vector<int> angles;
  for (int r : policy.rotations) {
    if (square || r == 180) angles.push_back(r);
  }
  if (!angles.empty()) draw.rotation = angles[rng.uniform_index(angles.size())];

  const std::size_t flip_choice = rng.uniform_index(policy.flips.size() + 1);
  if (flip_choice > 0) {
    draw.flipped = true;
    draw.axis = policy.flips[flip_choice - 1];
  }

  if (!policy.scales.empty()) {
    draw.scale = policy.scales[rng.uniform_index(policy.scales.size())];
  }
  return draw;
}

Image apply_augmentation(const Image& image, const AugmentDraw& draw) {
  Image out = rotate(image, draw.rotation);
  if (draw.flipped) out = flip(out, draw.axis);
  if (draw.scale != 1.0) out = scale(out, draw.scale);
  return out;
}

LabelledImages augment_dataset(const LabelledImages& input,
                               const AugmentPolicy& policy) {
  policy.validate();
  if (input.images.size() != input.labels.size()) {
    throw InvalidInput("augment_dataset: images and labels differ in length");
  }
  LabelledImages out = input;
  const std::size_t n = input.images.size();
  out.images.reserve(n * (policy.per_image_count + 1));
  out.labels.reserve(n * (policy.per_image_count + 1));
  for (std::size_t i = 0; i < n; ++i) {
    const Image& img = input.images[i];
    const bool square = img.height == img.width;
    for (std::size_t c = 0; c < policy.per_image_count; ++c) {
      out.images.push_back(
          apply_augmentation(img, draw_augmentation(policy, i, c, square)));
      out.labels.push_back(input.labels[i]);
    }
  }
  return out;
}

}  // namespace bnn
