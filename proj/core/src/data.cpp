#include "bnn/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bnn/error.hpp"
#include "bnn/random.hpp"
#include "bnn/text_io.hpp"

namespace bnn {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

Dataset load_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  const std::string where = path.string() + ":";

  std::string line;
  if (!std::getline(in, line)) throw DataError(where + "1: missing header");
  const auto header = split_fields(line);
  if (header.size() < 2 || header[0] != "label") {
    throw DataError(where + "1: header must be label,f0,f1,...");
  }
  const std::size_t dim = header.size() - 1;

  std::vector<double> features;
  std::vector<std::size_t> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    const std::string at = where + std::to_string(line_no) + ": ";
    if (fields.size() != dim + 1) {
      throw DataError(at + "expected " + std::to_string(dim + 1) +
                      " fields, found " + std::to_string(fields.size()));
    }
    double label;
    if (!parse_double(fields[0], label) || label != std::floor(label) ||
        !std::isfinite(label)) {
      throw DataError(at + "label '" + std::string(fields[0]) +
                      "' is not an integer");
    }
    if (label < 0) {
      throw DataError(at + "negative label " + std::string(fields[0]));
    }
    labels.push_back(static_cast<std::size_t>(label));
    for (std::size_t f = 1; f <= dim; ++f) {
      double v;
      if (!parse_double(fields[f], v) || !std::isfinite(v)) {
        throw DataError(at + "non-numeric cell '" + std::string(fields[f]) +
                        "' in column " + std::string(header[f]));
      }
      features.push_back(v);
    }
  }
  if (labels.empty()) throw DataError(where + " no samples after the header");
  const std::size_t k = *std::max_element(labels.begin(), labels.end()) + 1;
  return Dataset(dim, std::max<std::size_t>(k, 1), std::move(features),
                 std::move(labels));
}

void save_csv(const fs::path& path, const Dataset& data) {
  std::string out = "label";
  for (std::size_t f = 0; f < data.dim(); ++f) out += ",f" + std::to_string(f);
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += std::to_string(data.label(i));
    for (double v : data.row(i)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

// ---------------------------------------------------------------------------
// PGM
// ---------------------------------------------------------------------------

namespace {

// Reads one header token, skipping whitespace and '#' comments.
bool next_token(const std::string& buf, std::size_t& pos, std::string& token) {
  while (pos < buf.size()) {
    const char c = buf[pos];
    if (c == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos])))
    ++pos;
  token = buf.substr(start, pos - start);
  return !token.empty();
}

std::size_t header_number(const std::string& buf, std::size_t& pos,
                          const fs::path& path, const char* field) {
  std::string tok;
  if (!next_token(buf, pos, tok) ||
      !std::all_of(tok.begin(), tok.end(),
                   [](unsigned char c) { return std::isdigit(c); }) ||
      tok.size() > 9) {
    throw DataError(path.string() + ": corrupt PGM header (" + field + ")");
  }
  return std::stoul(tok);
}

}  // namespace

Image read_pgm(const fs::path& path) {
  const std::string buf = read_file(path);
  std::size_t pos = 0;
  std::string magic;
  if (!next_token(buf, pos, magic) || magic != "P5") {
    throw DataError(path.string() + ": not a binary PGM (P5) file");
  }
  const std::size_t width = header_number(buf, pos, path, "width");
  const std::size_t height = header_number(buf, pos, path, "height");
  const std::size_t maxval = header_number(buf, pos, path, "maxval");
  if (width == 0 || height == 0) {
    throw DataError(path.string() + ": PGM has zero width or height");
  }
  if (maxval == 0 || maxval > 255) {
    throw DataError(path.string() + ": PGM maxval must be in 1..255");
  }
  if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos]))) {
    throw DataError(path.string() + ": corrupt PGM header (raster separator)");
  }
  ++pos;
  const std::size_t n = width * height;
  if (buf.size() - pos < n) {
    throw DataError(path.string() + ": PGM raster truncated (" +
                    std::to_string(buf.size() - pos) + " of " +
                    std::to_string(n) + " bytes)");
  }
  Image img(height, width);
  const double scale = static_cast<double>(maxval);
  for (std::size_t i = 0; i < n; ++i) {
    const auto byte = static_cast<unsigned char>(buf[pos + i]);
    if (byte > maxval) {
      throw DataError(path.string() + ": pixel value exceeds maxval");
    }
    img.pixels[i] = static_cast<double>(byte) / scale;
  }
  return img;
}

void write_pgm(const fs::path& path, const Image& image) {
  std::string out = "P5\n" + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  out.reserve(out.size() + image.size());
  for (double v : image.pixels) {
    const double c = std::clamp(v, 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
  write_file_atomic(path, out);
}

ImageDataset load_image_dir(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw DataError(root.string() + ": not a directory");
  }
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty()) {
    throw DataError(root.string() + ": no class directories");
  }
  ImageDataset out;
  for (std::size_t c = 0; c < class_dirs.size(); ++c) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(class_dirs[c])) {
      if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw DataError(class_dirs[c].string() + ": class directory has no .pgm files");
    }
    out.class_names.push_back(class_dirs[c].filename().string());
    for (const auto& f : files) {
      out.images.push_back(read_pgm(f));
      out.labels.push_back(c);
      out.files.push_back(f);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

void SplitSpec::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
}

namespace {

std::size_t test_count(std::size_t n, double fraction) {
  const auto raw = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * fraction));
  return std::clamp<std::size_t>(raw, 1, n - 1);
}

}  // namespace

SplitIndices split_indices(std::span<const std::size_t> labels,
                           std::size_t n_classes, const SplitSpec& spec) {
  spec.validate();
  SplitIndices out;
  if (spec.stratified) {
    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] >= n_classes) throw InvalidInput("label out of range in split");
      by_class[labels[i]].push_back(i);
    }
    for (std::size_t c = 0; c < n_classes; ++c) {
      auto& idx = by_class[c];
      if (idx.empty()) continue;
      if (idx.size() < 2) {
        throw ConfigError("stratified split: class " + std::to_string(c) +
                          " has a single sample (needs >= 2)");
      }
      Rng rng = Rng::substream(spec.seed, 0, c);
      shuffle(std::span<std::size_t>(idx), rng);
      const std::size_t t = test_count(idx.size(), spec.test_fraction);
      out.test.insert(out.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(t));
      out.train.insert(out.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(t), idx.end());
    }
  } else {
    if (labels.size() < 2) throw ConfigError("split needs >= 2 samples");
    std::vector<std::size_t> idx(labels.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng = Rng::substream(spec.seed, 1, 0);
    shuffle(std::span<std::size_t>(idx), rng);
    const std::size_t t = test_count(idx.size(), spec.test_fraction);
    out.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(t));
    out.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(t), idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

Split stratified_split(const Dataset& data, const SplitSpec& spec) {
  auto idx = split_indices(data.labels(), data.n_classes(), spec);
  Split split{TrainSplit{data.subset(idx.train), std::move(idx.train)},
              TestSplit{data.subset(idx.test), std::move(idx.test)}};
  return split;
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

std::vector<double> StandardizationParams::apply(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw InvalidInput("standardizer expects " + std::to_string(dim()) +
                       " features, got " + std::to_string(x.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t f = 0; f < x.size(); ++f) {
    out[f] = constant[f] ? 0.0 : (x[f] - mean[f]) / sd[f];
  }
  return out;
}

StandardizationParams fit_standardizer(const TrainSplit& train) {
  const Dataset& d = train.data;
  const std::size_t dim = d.dim();
  const double n = static_cast<double>(d.size());
  StandardizationParams p;
  p.mean.assign(dim, 0.0);
  p.sd.assign(dim, 0.0);
  p.constant.assign(dim, false);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto r = d.row(i);
    for (std::size_t f = 0; f < dim; ++f) p.mean[f] += r[f];
  }
  for (double& m : p.mean) m /= n;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto r = d.row(i);
    for (std::size_t f = 0; f < dim; ++f) {
      const double c = r[f] - p.mean[f];
      p.sd[f] += c * c;
    }
  }
  for (std::size_t f = 0; f < dim; ++f) {
    p.sd[f] = std::sqrt(p.sd[f] / n);
    if (p.sd[f] < kConstantFeatureSd) p.constant[f] = true;
  }
  return p;
}

Dataset apply_standardizer(const StandardizationParams& params,
                           const Dataset& data) {
  std::vector<double> feats;
  feats.reserve(data.features().size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto z = params.apply(data.row(i));
    feats.insert(feats.end(), z.begin(), z.end());
  }
  return Dataset(data.dim(), data.n_classes(), std::move(feats), data.labels());
}

// ---------------------------------------------------------------------------
// Synthetic blobs
// ---------------------------------------------------------------------------

std::vector<std::vector<double>> blob_centers(std::size_t n_classes,
                                              std::size_t dim,
                                              double separation) {
  if (n_classes < 2) throw InvalidInput("blobs need K >= 2");
  if (dim < 2) throw InvalidInput("blobs need d >= 2");
  std::vector<std::vector<double>> centers(n_classes,
                                           std::vector<double>(dim, 0.0));
  if (n_classes <= dim) {
    const double a = separation / std::numbers::sqrt2;
    const double shift = a / static_cast<double>(n_classes);
    for (std::size_t k = 0; k < n_classes; ++k) {
      for (std::size_t j = 0; j < n_classes; ++j) centers[k][j] = -shift;
      centers[k][k] += a;
    }
  } else {
    const double k = static_cast<double>(n_classes);
    const double radius = separation / (2.0 * std::sin(std::numbers::pi / k));
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / k;
      centers[c][0] = radius * std::cos(angle);
      centers[c][1] = radius * std::sin(angle);
    }
  }
  return centers;
}

Dataset synth_blobs(const BlobSpec& spec) {
  if (spec.n_per_class == 0) throw InvalidInput("blobs need n_per_class >= 1");
  if (!(spec.noise_sd >= 0.0)) throw InvalidInput("noise_sd must be >= 0");
  const auto centers = blob_centers(spec.n_classes, spec.dim, spec.separation);
  Rng rng(spec.seed);
  std::vector<double> feats;
  std::vector<std::size_t> labels;
  feats.reserve(spec.n_per_class * spec.n_classes * spec.dim);
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    for (std::size_t i = 0; i < spec.n_per_class; ++i) {
      for (std::size_t j = 0; j < spec.dim; ++j) {
        feats.push_back(centers[c][j] + spec.noise_sd * rng.normal());
      }
      labels.push_back(c);
    }
  }
  return Dataset(spec.dim, spec.n_classes, std::move(feats), std::move(labels));
}

}  // namespace bnn
