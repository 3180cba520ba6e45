#include "bnn_cli/app.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "bnn/error.hpp"
#include "bnn/text_io.hpp"
#include "bnn_cli/commands.hpp"

namespace bnn::cli {

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config, "JSON run configuration");
  if (config_required) c->required();
  cmd->add_option("--seed", f.seed, "Overrides the config seed");
  cmd->add_option("--set", f.overrides, "Config override key.path=value (repeatable)");
}

RunConfig config_from(const CommonFlags& f, bool with_out) {
  std::optional<fs::path> out;
  if (with_out && !f.out.empty()) out = f.out;
  return load_config(f.config, f.overrides, f.seed, out);
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> v;
  for (auto field : split_fields(text)) {
    double x = 0.0;
    if (!parse_double(field, x)) throw ConfigError("--input: bad number '" + std::string(field) + "'");
    v.push_back(x);
  }
  return v;
}

void emit(const OrderedJson& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian neural network classification with MCMC", "bnn"};
  app.require_subcommand(1);

  CommonFlags train_f;
  auto* train = app.add_subcommand("train", "Sample the network posterior");
  add_common(train, train_f, true);
  train->add_option("--out", train_f.out, "Output directory");

  CommonFlags eval_f;
  std::string eval_chains, eval_split = "test";
  auto* evaluate = app.add_subcommand("evaluate", "Score held-out data with trained chains");
  add_common(evaluate, eval_f, true);
  evaluate->add_option("--out", eval_f.out, "Run directory (defaults to the config output_dir)");
  evaluate->add_option("--chains", eval_chains, "Directory holding model.json and chains");
  evaluate->add_option("--split", eval_split, "test or train")
      ->check(CLI::IsMember({"test", "train"}));

  CommonFlags pred_f;
  std::string pred_run, pred_input, pred_image, pred_output;
  auto* predict = app.add_subcommand("predict", "Posterior-predictive output for one input");
  add_common(predict, pred_f, false);
  predict->add_option("--out", pred_run, "Run directory");
  predict->add_option("--run", pred_run, "Run directory (alias of --out)");
  auto* in_opt = predict->add_option("--input", pred_input, "Comma-separated raw features");
  auto* img_opt = predict->add_option("--image", pred_image, "PGM image")->check(CLI::ExistingFile);
  in_opt->excludes(img_opt);
  predict->add_option("--output", pred_output, "Write JSON here instead of stdout");

  CommonFlags aug_f;
  std::string aug_input;
  std::optional<std::size_t> aug_count;
  auto* augment = app.add_subcommand("augment", "Write augmented copies of an image directory");
  add_common(augment, aug_f, false);
  augment->add_option("--input", aug_input, "Directory of class subdirectories")->required()
      ->check(CLI::ExistingDirectory);
  augment->add_option("--out", aug_f.out, "Output directory")->required();
  augment->add_option("--count", aug_count, "Augmented copies per image");

  CommonFlags syn_f;
  BlobSpec blobs;
  auto* synth = app.add_subcommand("synth", "Write a Gaussian-blob data set as CSV");
  synth->add_option("--seed", syn_f.seed, "Sampling seed");
  synth->add_option("--out", syn_f.out, "Output CSV path")->required();
  synth->add_option("--n-per-class", blobs.n_per_class)->capture_default_str();
  synth->add_option("--classes", blobs.n_classes)->capture_default_str();
  synth->add_option("--dim", blobs.dim)->capture_default_str();
  synth->add_option("--separation", blobs.separation)->capture_default_str();
  synth->add_option("--noise", blobs.noise_sd)->capture_default_str();

  std::vector<std::string> diag_files;
  std::string diag_output;
  auto* diagnose = app.add_subcommand("diagnose", "Convergence diagnostics for chain files");
  diagnose->add_option("chains", diag_files, "Sample tables (chain_*.csv)")->required()
      ->check(CLI::ExistingFile);
  diagnose->add_option("--out", diag_output, "Write JSON here instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) {
      cmd_train(config_from(train_f, true), out);
    } else if (*evaluate) {
      const RunConfig cfg = config_from(eval_f, true);
      const fs::path dir = eval_chains.empty() ? cfg.output_dir : fs::path(eval_chains);
      cmd_evaluate(cfg, dir, eval_split == "train" ? SplitSide::Train : SplitSide::Test, out);
    } else if (*predict) {
      fs::path dir = pred_run;
      if (dir.empty()) {
        if (pred_f.config.empty()) throw ConfigError("predict needs --run or --config");
        dir = config_from(pred_f, false).output_dir;
      }
      if (pred_input.empty() == pred_image.empty()) {
        throw ConfigError("predict needs exactly one of --input or --image");
      }
      const OrderedJson doc = pred_image.empty()
                                  ? cmd_predict(dir, parse_vector(pred_input))
                                  : cmd_predict_image(dir, pred_image);
      emit(doc, pred_output, out);
    } else if (*augment) {
      AugmentPolicy policy;
      if (!aug_f.config.empty()) {
        Json doc = read_config_document(aug_f.config);
        for (const auto& o : aug_f.overrides) apply_override(doc, o);
        if (!doc.contains("augmentation")) throw ConfigError("augmentation: required");
        // Only the augmentation section (and seed) matter here.
        Json slim = {{"seed", doc.value("seed", Json(0))},
                     {"augmentation", doc["augmentation"]},
                     {"dataset", {{"image_dir", aug_input}}}};
        policy = *parse_config(slim, fs::path()).augmentation;
      }
      if (aug_f.seed) policy.seed = *aug_f.seed;
      if (aug_count) policy.per_image_count = *aug_count;
      const std::size_t written = cmd_augment(aug_input, aug_f.out, policy);
      out << "wrote " << written << " augmented images to " << aug_f.out << "\n";
    } else if (*synth) {
      if (syn_f.seed) blobs.seed = *syn_f.seed;
      cmd_synth(blobs, syn_f.out);
      out << "wrote " << blobs.n_per_class * blobs.n_classes << " samples to " << syn_f.out
          << "\n";
    } else if (*diagnose) {
      std::vector<fs::path> paths(diag_files.begin(), diag_files.end());
      emit(cmd_diagnose(paths), diag_output, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

}  // namespace bnn::cli
