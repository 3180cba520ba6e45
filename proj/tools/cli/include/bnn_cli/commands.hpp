#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnn/data.hpp"
#include "bnn/evaluation.hpp"
#include "bnn/features.hpp"
#include "bnn/samplers.hpp"
#include "bnn_cli/config.hpp"

namespace bnn::cli {

/// Train and test features ready for standardization. For image sources the
/// train side is augmented (when configured) before feature extraction; the
/// test side never is.
struct PreparedData {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;  // into the ingested samples
  std::vector<std::size_t> test_indices;
  std::vector<std::string> class_names;
  std::size_t n_ingested = 0;
};

PreparedData prepare_data(const RunConfig& cfg);

/// Everything needed to apply trained chains to new inputs.
struct ModelInfo {
  NetworkSpec network;
  StandardizationParams standardizer;
  std::optional<ConvStackSpec> conv_stack;
  std::vector<std::string> class_names;
  std::vector<std::string> chain_files;
};

OrderedJson model_json(const ModelInfo& model);
ModelInfo model_from_json(const Json& doc);
ModelInfo load_model(const std::filesystem::path& run_dir);
/// Loads every chain listed in the model and checks its width.
std::vector<Chain> load_chains(const std::filesystem::path& run_dir,
                               const ModelInfo& model);

/// Network for a config and the width / class count of its data.
NetworkSpec resolve_network(const RunConfig& cfg, std::size_t input_dim,
                            std::size_t n_classes);

struct TrainOutcome {
  std::vector<Chain> chains;
  double test_accuracy = 0.0;
  std::vector<std::string> warnings;
};

/// Writes chain_<c>.csv/.json, model.json, report.json and manifest.json to
/// cfg.output_dir. Chains run concurrently, one thread each.
TrainOutcome cmd_train(const RunConfig& cfg, std::ostream& log);

enum class SplitSide { Test, Train };

struct EvaluateOutcome {
  ConfusionMatrix confusion{2};
  MetricsReport metrics;
  std::vector<std::optional<RocCurve>> roc;  // per class; empty entries are undefined
  std::optional<double> macro_auc;
};

/// Posterior-predictive evaluation of one side of the configured split with
/// the chains in run_dir. Writes metrics.json, predictions.csv and ROC tables
/// (roc.csv for K = 2, roc_class_<k>.csv otherwise) into run_dir.
EvaluateOutcome cmd_evaluate(const RunConfig& cfg,
                             const std::filesystem::path& run_dir,
                             SplitSide side, std::ostream& log);

/// Prediction for a raw feature vector (standardized with the stored
/// parameters) or a PGM image (for models trained on images).
OrderedJson cmd_predict(const std::filesystem::path& run_dir,
                 std::span<const double> features);
OrderedJson cmd_predict_image(const std::filesystem::path& run_dir,
                       const std::filesystem::path& image);

/// Copies the input tree, then writes per_image_count augmented copies of
/// every image as <stem>_aug<j>.pgm beside the original. Returns the number
/// of augmented files written.
std::size_t cmd_augment(const std::filesystem::path& input_dir,
                        const std::filesystem::path& output_dir,
                        const AugmentPolicy& policy);

void cmd_synth(const BlobSpec& spec, const std::filesystem::path& output_csv);

OrderedJson cmd_diagnose(std::span<const std::filesystem::path> chain_files);

/// Two-decimal rendering used in terminal summaries.
std::string two_decimals(double v);

}  // namespace bnn::cli
