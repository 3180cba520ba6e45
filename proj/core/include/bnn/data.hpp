#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bnn/image.hpp"
#include "bnn/model.hpp"

namespace bnn {

// ---------------------------------------------------------------------------
// Delimited tables
// ---------------------------------------------------------------------------

/// Reads `label,f0,f1,...` with one sample per row. K is max label + 1.
/// Throws DataError naming the line for ragged rows, non-numeric cells and
/// negative labels; an empty body is rejected.
Dataset load_csv(const std::filesystem::path& path);

/// Inverse of load_csv; values written with 17 significant digits.
void save_csv(const std::filesystem::path& path, const Dataset& data);

// ---------------------------------------------------------------------------
// Grayscale images
// ---------------------------------------------------------------------------

/// Binary 8-bit PGM (P5, maxval 1..255). Pixels are divided by maxval, so a
/// byte equal to maxval reads as exactly 1.0.
Image read_pgm(const std::filesystem::path& path);

/// Writes P5 with maxval 255; pixel v becomes round(255 * clamp(v, 0, 1)).
void write_pgm(const std::filesystem::path& path, const Image& image);

struct ImageDataset {
  std::vector<Image> images;
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;
  std::vector<std::filesystem::path> files;
};

/// Loads root/<class>/*.pgm. Class indices follow the sorted class-directory
/// names and files are read in sorted path order.
ImageDataset load_image_dir(const std::filesystem::path& root);

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

struct SplitSpec {
  double test_fraction = 0.25;
  std::uint64_t seed = 0;
  bool stratified = true;

  void validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Index-level split over labels in [0, n_classes).
///
/// Stratified: class c (n_c samples) is shuffled with
/// Rng::substream(seed, 0, c) and contributes clamp(round(n_c * f), 1, n_c - 1)
/// test samples; every class needs >= 2 samples. Otherwise all indices are
/// shuffled with Rng::substream(seed, 1, 0) and clamp(round(n * f), 1, n - 1)
/// go to test.
SplitIndices split_indices(std::span<const std::size_t> labels,
                           std::size_t n_classes, const SplitSpec& spec);

/// The training side of a split. Standardizers can only be fit on this type.
struct TrainSplit {
  Dataset data;
  std::vector<std::size_t> indices;
};

struct TestSplit {
  Dataset data;
  std::vector<std::size_t> indices;
};

struct Split {
  TrainSplit train;
  TestSplit test;
};

Split stratified_split(const Dataset& data, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

/// Features whose training standard deviation is below this map to 0.
inline constexpr double kConstantFeatureSd = 1e-12;

struct StandardizationParams {
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<bool> constant;

  std::size_t dim() const { return mean.size(); }
  std::vector<double> apply(std::span<const double> x) const;
  bool operator==(const StandardizationParams&) const = default;
};

/// Per-feature mean and population standard deviation of the training rows.
StandardizationParams fit_standardizer(const TrainSplit& train);

Dataset apply_standardizer(const StandardizationParams& params,
                           const Dataset& data);

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

struct BlobSpec {
  std::size_t n_per_class = 20;
  std::size_t n_classes = 2;
  std::size_t dim = 2;
  double separation = 4.0;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
};

/// Class centers. For K <= d they are scaled unit vectors e_k shifted to zero
/// mean, so every pair is `separation` apart. For K > d they are the vertices
/// of a regular K-gon with side `separation` in the first two axes.
std::vector<std::vector<double>> blob_centers(std::size_t n_classes,
                                              std::size_t dim,
                                              double separation);

/// Isotropic Gaussian blobs around blob_centers, class-major order.
Dataset synth_blobs(const BlobSpec& spec);

}  // namespace bnn
