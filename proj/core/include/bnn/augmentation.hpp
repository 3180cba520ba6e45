#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bnn/image.hpp"

namespace bnn {

enum class FlipAxis {
  Horizontal,  // mirror columns (left <-> right)
  Vertical,    // mirror rows (top <-> bottom)
};

std::string_view to_string(FlipAxis axis);
FlipAxis parse_flip_axis(std::string_view name);

/// Exact right-angle rotation by pixel permutation. 90 maps source pixel
/// (i, j) to (j, H-1-i), a clockwise quarter turn; output dims are swapped
/// for 90 and 270. Throws InvalidInput for any other angle.
Image rotate(const Image& image, int degrees);

Image flip(const Image& image, FlipAxis axis);

/// Smallest and largest accepted scale factors (both inclusive).
inline constexpr double kMinScale = 0.5;
inline constexpr double kMaxScale = 2.0;

/// Zoom about the image center by `factor` with bilinear resampling, keeping
/// the canvas size: factor > 1 crops, factor < 1 pads with zeros. Output is
/// clamped to [0, 1].
Image scale(const Image& image, double factor);

struct AugmentPolicy {
  std::vector<int> rotations{90, 180, 270};
  std::vector<FlipAxis> flips{FlipAxis::Horizontal, FlipAxis::Vertical};
  std::vector<double> scales{0.9, 1.1};
  std::size_t per_image_count = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabelledImages {
  std::vector<Image> images;
  std::vector<std::size_t> labels;
};

/// The transform drawn for one augmented copy.
struct AugmentDraw {
  int rotation = 0;
  bool flipped = false;
  FlipAxis axis = FlipAxis::Horizontal;
  double scale = 1.0;
};

/// Draw for copy `copy` of image `index`. Rotation is uniform over the
/// policy's rotations (0 if none; 90/270 are skipped for non-square images),
/// flip uniform over {none} + policy flips, scale uniform over policy scales
/// (1.0 if none). Uses Rng::substream(seed, index, copy).
AugmentDraw draw_augmentation(const AugmentPolicy& policy, std::size_t index,
                              std::size_t copy, bool square);

Image apply_augmentation(const Image& image, const AugmentDraw& draw);

/// Originals first, in input order, followed by per_image_count transformed
/// copies per image (image-major). Labels are copied unchanged.
LabelledImages augment_dataset(const LabelledImages& input,
                               const AugmentPolicy& policy);

}  // namespace bnn
