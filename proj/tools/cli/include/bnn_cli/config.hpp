#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bnn/augmentation.hpp"
#include "bnn/data.hpp"
#include "bnn/features.hpp"
#include "bnn/model.hpp"
#include "bnn/samplers.hpp"
#include "json.hpp"

namespace bnn::cli {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Exactly one of csv / image_dir is set. conv_stack applies to image_dir.
struct DatasetSource {
  std::filesystem::path csv;
  std::filesystem::path image_dir;
  ConvStackSpec conv_stack;
};

struct ChainSettings {
  std::size_t n_iter = 1000;
  std::size_t burn_in = 200;
  std::size_t thin = 1;
  std::size_t n_chains = 1;
  /// All chains start from one draw when true; otherwise one draw per chain.
  bool shared_init = true;
  double init_scale = 0.1;
};

struct RunConfig {
  DatasetSource dataset;
  std::optional<AugmentPolicy> augmentation;
  SplitSpec split;
  std::optional<std::size_t> input_dim;
  std::optional<std::size_t> n_classes;
  std::vector<std::size_t> hidden_dims{8};
  Activation activation = Activation::ReLU;
  PriorSpec prior;
  Kernel kernel = HmcConfig{};
  ChainSettings chain;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "bnn_run";
  /// Document the config was parsed from, overrides applied, output_dir
  /// removed. Hashed into the run manifest.
  Json document;
};

/// Parses a JSON document from disk. Throws ConfigError.
Json read_config_document(const std::filesystem::path& path);

/// Applies "a.b.c=value". The value is parsed as JSON and falls back to a
/// plain string, so `--set dataset.csv=x.csv` works unquoted.
void apply_override(Json& document, std::string_view assignment);

/// Validates and converts a config document. Relative dataset paths resolve
/// against base_dir. Every problem is reported, one per line, prefixed with
/// its field path; the ConfigError is thrown before any work starts.
RunConfig parse_config(const Json& document,
                       const std::filesystem::path& base_dir);

/// Convenience: read, apply overrides, set seed/output, parse.
RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides,
                      std::optional<std::uint64_t> seed,
                      std::optional<std::filesystem::path> output_dir);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Kernel as stored in sidecars and reports.
OrderedJson kernel_json(const Kernel& kernel);

}  // namespace bnn::cli
