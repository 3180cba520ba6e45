#include "bnn_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "bnn/augmentation.hpp"
#include "bnn/chain_io.hpp"
#include "bnn/diagnostics.hpp"
#include "bnn/error.hpp"
#include "bnn/text_io.hpp"

#ifndef BNN_VERSION
#define BNN_VERSION "0.0.0"
#endif

namespace bnn::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kModelFormat = "bnn-model/1";
constexpr const char* kReportFormat = "bnn-report/1";
constexpr const char* kMetricsFormat = "bnn-metrics/1";
constexpr const char* kManifestFormat = "bnn-manifest/1";
constexpr const char* kChainFormat = "bnn-chain/1";

std::string dump(const OrderedJson& doc) { return doc.dump(2) + "\n"; }

std::string hash_tag(std::string_view bytes) { return "fnv1a64:" + hex64(fnv1a64(bytes)); }

// Non-finite values have no JSON literal; they are written as null.
OrderedJson number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::vector<std::string> numbered_names(std::size_t k) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < k; ++c) names.push_back(std::to_string(c));
  return names;
}

OrderedJson conv_stack_json(const ConvStackSpec& spec) {
  OrderedJson stages = OrderedJson::array();
  for (const auto& s : spec.stages) {
    stages.push_back({{"n_kernels", s.n_kernels},
                      {"kernel_size", s.kernel_size},
                      {"pool_size", s.pool_size}});
  }
  return {{"stages", stages}, {"output_dim", spec.output_dim}, {"kernel_seed", spec.kernel_seed}};
}

OrderedJson network_json(const NetworkSpec& spec) {
  return {{"input_dim", spec.input_dim},
          {"hidden_dims", spec.hidden_dims},
          {"n_classes", spec.n_classes},
          {"activation", std::string(to_string(spec.activation))}};
}

void write_manifest(const fs::path& dir, const std::string& name, const std::string& command,
                    const RunConfig& cfg, const std::vector<std::string>& artifacts) {
  OrderedJson files = OrderedJson::object();
  for (const auto& a : artifacts) files[a] = hash_tag(read_file(dir / a));
  const OrderedJson manifest = {
      {"format", kManifestFormat},
      {"tool", "bnn"},
      {"version", BNN_VERSION},
      {"command", command},
      {"config_hash", hash_tag(cfg.document.dump())},
      {"seed", cfg.seed},
      {"artifact_versions",
       {{"chain", kChainFormat},
        {"model", kModelFormat},
        {"report", kReportFormat},
        {"metrics", kMetricsFormat}}},
      {"artifacts", files}};
  write_file_atomic(dir / name, dump(manifest));
}

std::string roc_table(const RocCurve& curve) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : curve.points) {
    out += format_double(p.threshold) + "," + format_double(p.fpr) + "," +
           format_double(p.tpr) + "\n";
  }
  return out;
}

std::size_t total_samples(std::span<const Chain> chains) {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.size();
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// Data preparation
// ---------------------------------------------------------------------------

PreparedData prepare_data(const RunConfig& cfg) {
  PreparedData out;
  if (!cfg.dataset.csv.empty()) {
    Dataset all = load_csv(cfg.dataset.csv);
    std::size_t k = all.n_classes();
    if (cfg.n_classes) {
      if (*cfg.n_classes < k) {
        throw ConfigError("network.n_classes: " + std::to_string(*cfg.n_classes) +
                          " but the data has labels up to " + std::to_string(k - 1));
      }
      k = *cfg.n_classes;
      all = Dataset(all.dim(), k, all.features(), all.labels());
    }
    const auto idx = split_indices(all.labels(), k, cfg.split);
    out.train = all.subset(idx.train);
    out.test = all.subset(idx.test);
    out.train_indices = idx.train;
    out.test_indices = idx.test;
    out.class_names = numbered_names(k);
    out.n_ingested = all.size();
    return out;
  }

  ImageDataset images = load_image_dir(cfg.dataset.image_dir);
  std::size_t k = images.class_names.size();
  out.class_names = images.class_names;
  if (cfg.n_classes) {
    if (*cfg.n_classes < k) {
      throw ConfigError("network.n_classes: " + std::to_string(*cfg.n_classes) + " but " +
                        std::to_string(k) + " class directories were found");
    }
    for (std::size_t c = k; c < *cfg.n_classes; ++c) out.class_names.push_back(std::to_string(c));
    k = *cfg.n_classes;
  }
  const auto idx = split_indices(images.labels, k, cfg.split);
  out.train_indices = idx.train;
  out.test_indices = idx.test;
  out.n_ingested = images.images.size();

  auto gather = [&](const std::vector<std::size_t>& rows) {
    LabelledImages li;
    for (auto i : rows) {
      li.images.push_back(images.images[i]);
      li.labels.push_back(images.labels[i]);
    }
    return li;
  };
  LabelledImages train = gather(idx.train);
  const LabelledImages test = gather(idx.test);
  if (cfg.augmentation) train = augment_dataset(train, *cfg.augmentation);

  const ConvStack stack(cfg.dataset.conv_stack);
  auto featurize = [&](const LabelledImages& li) {
    std::vector<double> features;
    features.reserve(li.images.size() * cfg.dataset.conv_stack.output_dim);
    for (const auto& img : li.images) {
      const auto f = stack.extract(img);
      features.insert(features.end(), f.begin(), f.end());
    }
    return Dataset(cfg.dataset.conv_stack.output_dim, k, std::move(features), li.labels);
  };
  out.train = featurize(train);
  out.test = featurize(test);
  return out;
}

NetworkSpec resolve_network(const RunConfig& cfg, std::size_t input_dim,
                            std::size_t n_classes) {
  if (cfg.input_dim && *cfg.input_dim != input_dim) {
    throw ConfigError("network.input_dim: config says " + std::to_string(*cfg.input_dim) +
                      " but the data has " + std::to_string(input_dim) + " features");
  }
  NetworkSpec spec;
  spec.input_dim = input_dim;
  spec.hidden_dims = cfg.hidden_dims;
  spec.activation = cfg.activation;
  spec.n_classes = cfg.n_classes.value_or(std::max<std::size_t>(n_classes, 2));
  try {
    spec.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("network: ") + e.what());
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

OrderedJson model_json(const ModelInfo& model) {
  std::vector<bool> constant(model.standardizer.constant.begin(),
                             model.standardizer.constant.end());
  OrderedJson doc = {
      {"format", kModelFormat},
      {"network", network_json(model.network)},
      {"class_names", model.class_names},
      {"standardizer",
       {{"mean", model.standardizer.mean},
        {"sd", model.standardizer.sd},
        {"constant", constant}}},
      {"conv_stack", nullptr},
      {"chains", model.chain_files}};
  if (model.conv_stack) doc["conv_stack"] = conv_stack_json(*model.conv_stack);
  return doc;
}

ModelInfo model_from_json(const Json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kModelFormat) {
      throw DataError("unsupported model format " + doc.at("format").dump());
    }
    ModelInfo m;
    const auto& net = doc.at("network");
    m.network.input_dim = net.at("input_dim").get<std::size_t>();
    m.network.hidden_dims = net.at("hidden_dims").get<std::vector<std::size_t>>();
    m.network.n_classes = net.at("n_classes").get<std::size_t>();
    m.network.activation = parse_activation(net.at("activation").get<std::string>());
    m.network.validate();
    m.class_names = doc.at("class_names").get<std::vector<std::string>>();
    const auto& st = doc.at("standardizer");
    m.standardizer.mean = st.at("mean").get<std::vector<double>>();
    m.standardizer.sd = st.at("sd").get<std::vector<double>>();
    for (bool b : st.at("constant").get<std::vector<bool>>()) m.standardizer.constant.push_back(b);
    if (m.standardizer.mean.size() != m.network.input_dim ||
        m.standardizer.sd.size() != m.network.input_dim ||
        m.standardizer.constant.size() != m.network.input_dim) {
      throw DataError("standardizer width disagrees with network.input_dim");
    }
    if (!doc.at("conv_stack").is_null()) {
      const auto& cs = doc.at("conv_stack");
      ConvStackSpec spec;
      spec.stages.clear();
      for (const auto& s : cs.at("stages")) {
        spec.stages.push_back({s.at("n_kernels").get<std::size_t>(),
                               s.at("kernel_size").get<std::size_t>(),
                               s.at("pool_size").get<std::size_t>()});
      }
      spec.output_dim = cs.at("output_dim").get<std::size_t>();
      spec.kernel_seed = cs.at("kernel_seed").get<std::uint64_t>();
      spec.validate();
      m.conv_stack = spec;
    }
    m.chain_files = doc.at("chains").get<std::vector<std::string>>();
    if (m.chain_files.empty()) throw DataError("model lists no chains");
    return m;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  } catch (const InvalidInput& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  }
}

ModelInfo load_model(const fs::path& run_dir) {
  const fs::path path = run_dir / "model.json";
  if (!fs::is_regular_file(path)) throw DataError("no model.json in " + run_dir.string());
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

std::vector<Chain> load_chains(const fs::path& run_dir, const ModelInfo& model) {
  const std::size_t want = param_count(model.network);
  std::vector<Chain> chains;
  for (const auto& name : model.chain_files) {
    Chain c = load_chain(run_dir / name).chain;
    if (c.dim != want) {
      throw DataError(name + " has " + std::to_string(c.dim) +
                      " weights per sample but the network needs " + std::to_string(want));
    }
    if (c.size() == 0) throw DataError(name + " holds no samples");
    chains.push_back(std::move(c));
  }
  return chains;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

TrainOutcome cmd_train(const RunConfig& cfg, std::ostream& log) {
  const PreparedData data = prepare_data(cfg);
  const StandardizationParams params =
      fit_standardizer(TrainSplit{data.train, data.train_indices});
  const Dataset train = apply_standardizer(params, data.train);
  const Dataset test = apply_standardizer(params, data.test);
  const NetworkSpec spec = resolve_network(cfg, train.dim(), train.n_classes());
  const TargetDensity target = posterior_target(spec, train, cfg.prior);
  const std::size_t dim = param_count(spec);
  const std::size_t n_chains = cfg.chain.n_chains;

  std::vector<WeightVector> inits(n_chains, WeightVector(dim));
  for (std::size_t c = 0; c < n_chains; ++c) {
    Rng rng = Rng::substream(cfg.seed, 2, cfg.chain.shared_init ? 0 : c);
    rng.fill_normal(inits[c]);
    for (double& v : inits[c]) v *= cfg.chain.init_scale;
  }
  std::vector<ChainControls> controls(n_chains);
  for (std::size_t c = 0; c < n_chains; ++c) {
    controls[c] = {cfg.chain.n_iter, cfg.chain.burn_in, cfg.chain.thin, cfg.seed, c};
  }

  TrainOutcome outcome;
  outcome.chains.resize(n_chains);
  {
    std::vector<std::exception_ptr> failures(n_chains);
    std::vector<std::thread> workers;
    workers.reserve(n_chains);
    for (std::size_t c = 0; c < n_chains; ++c) {
      workers.emplace_back([&, c] {
        try {
          outcome.chains[c] = run_chain(target, cfg.kernel, inits[c], controls[c]);
        } catch (...) {
          failures[c] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  const fs::path& dir = cfg.output_dir;
  std::vector<std::string> artifacts;
  ModelInfo model{spec, params, std::nullopt, data.class_names, {}};
  if (!cfg.dataset.image_dir.empty()) model.conv_stack = cfg.dataset.conv_stack;

  OrderedJson chain_reports = OrderedJson::array();
  for (std::size_t c = 0; c < n_chains; ++c) {
    const std::string stem = "chain_" + std::to_string(c);
    save_chain(dir, stem, ChainRecord{outcome.chains[c], cfg.kernel, controls[c]});
    artifacts.push_back(stem + ".csv");
    artifacts.push_back(stem + ".json");
    model.chain_files.push_back(stem + ".csv");

    const ChainDiagnostics d = diagnose_chain(outcome.chains[c]);
    OrderedJson ess_values = nullptr;
    std::size_t degenerate = 0;
    if (outcome.chains[c].size() >= kMinEssSamples) {
      std::vector<double> e;
      for (const auto& s : d.dims) {
        e.push_back(s.ess.value);
        if (s.ess.degenerate) ++degenerate;
      }
      std::sort(e.begin(), e.end());
      ess_values = {{"min", e.front()}, {"median", e[e.size() / 2]}, {"max", e.back()}};
    }
    chain_reports.push_back({{"file", stem + ".csv"},
                             {"n_retained", outcome.chains[c].size()},
                             {"acceptance_rate", number(d.acceptance_rate)},
                             {"divergence_rate", number(d.divergence_rate)},
                             {"ess", ess_values},
                             {"n_constant_dims", degenerate}});
    if (d.divergence_rate > 0.5) {
      outcome.warnings.push_back("chain " + std::to_string(c) + ": " +
                                 two_decimals(100.0 * d.divergence_rate) +
                                 "% of transitions diverged; reduce kernel.step_size");
    }
    log << "chain " << c << ": acceptance " << two_decimals(d.acceptance_rate)
        << ", divergent " << outcome.chains[c].n_divergent << "\n";
  }

  OrderedJson rhat = nullptr;
  if (outcome.chains.front().size() >= 4) {
    const auto r = split_rhat_per_dim(outcome.chains);
    OrderedJson values = OrderedJson::array();
    std::size_t below = 0;
    double worst = 0.0;
    for (const auto& v : r) {
      values.push_back(number(v.value));
      if (v.value < 1.1) ++below;
      worst = std::max(worst, v.value);
    }
    rhat = {{"max", number(worst)},
            {"fraction_below_1_1", static_cast<double>(below) / static_cast<double>(r.size())},
            {"values", values}};
  } else {
    outcome.warnings.push_back("fewer than 4 retained samples; R-hat not computed");
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto pred = posterior_predict(spec, std::span<const Chain>(outcome.chains), test.row(i));
    if (pred.predicted_class == test.label(i)) ++correct;
  }
  outcome.test_accuracy = static_cast<double>(correct) / static_cast<double>(test.size());

  write_file_atomic(dir / "model.json", dump(model_json(model)));
  artifacts.push_back("model.json");

  const OrderedJson report = {
      {"format", kReportFormat},
      {"n_ingested", data.n_ingested},
      {"n_train", train.size()},
      {"n_test", test.size()},
      {"network", network_json(spec)},
      {"n_parameters", dim},
      {"prior_variance", cfg.prior.variance},
      {"kernel", kernel_json(cfg.kernel)},
      {"controls",
       {{"n_iter", cfg.chain.n_iter},
        {"burn_in", cfg.chain.burn_in},
        {"thin", cfg.chain.thin},
        {"n_chains", n_chains},
        {"init", cfg.chain.shared_init ? "shared" : "independent"},
        {"init_scale", cfg.chain.init_scale}}},
      {"chains", chain_reports},
      {"split_rhat", rhat},
      {"test_accuracy", outcome.test_accuracy},
      {"warnings", outcome.warnings}};
  write_file_atomic(dir / "report.json", dump(report));
  artifacts.push_back("report.json");
  write_manifest(dir, "manifest.json", "train", cfg, artifacts);

  log << "holdout accuracy " << two_decimals(outcome.test_accuracy) << " (" << test.size()
      << " samples)\n";
  for (const auto& w : outcome.warnings) log << "warning: " << w << "\n";
  return outcome;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

EvaluateOutcome cmd_evaluate(const RunConfig& cfg, const fs::path& run_dir, SplitSide side,
                             std::ostream& log) {
  const ModelInfo model = load_model(run_dir);
  const std::vector<Chain> chains = load_chains(run_dir, model);
  const PreparedData data = prepare_data(cfg);
  const Dataset& raw = side == SplitSide::Test ? data.test : data.train;
  const NetworkSpec& spec = model.network;
  if (raw.dim() != spec.input_dim) {
    throw DataError("dataset has " + std::to_string(raw.dim()) +
                    " features per sample but the network expects " +
                    std::to_string(spec.input_dim));
  }
  if (raw.n_classes() > spec.n_classes) {
    throw DataError("dataset has " + std::to_string(raw.n_classes()) +
                    " classes but the network outputs " + std::to_string(spec.n_classes));
  }
  const Dataset x = apply_standardizer(model.standardizer, raw);
  const std::size_t k = spec.n_classes;
  const std::size_t n = x.size();

  std::vector<double> probs(n * k);
  std::vector<std::size_t> predicted(n);
  std::string predictions = "row,label,predicted";
  for (std::size_t c = 0; c < k; ++c) predictions += ",p" + std::to_string(c);
  predictions += ",entropy\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = posterior_predict(spec, std::span<const Chain>(chains), x.row(i));
    std::copy(p.mean_probs.begin(), p.mean_probs.end(), probs.begin() + i * k);
    predicted[i] = p.predicted_class;
    predictions += std::to_string(i) + "," + std::to_string(x.label(i)) + "," +
                   std::to_string(p.predicted_class);
    for (double v : p.mean_probs) predictions += "," + format_double(v);
    predictions += "," + format_double(p.entropy) + "\n";
  }

  EvaluateOutcome out;
  out.confusion = confusion_matrix(x.labels(), predicted, k);
  out.metrics = metrics_from_confusion(out.confusion);
  out.roc.resize(k);

  std::vector<std::string> artifacts{"metrics.json", "predictions.csv"};
  std::vector<OrderedJson> roc_files(k, nullptr);
  auto curve_for = [&](std::size_t cls) -> std::optional<RocCurve> {
    std::vector<double> scores(n);
    std::vector<std::size_t> positive(n);
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = probs[i * k + cls];
      positive[i] = x.label(i) == cls ? 1 : 0;
      n_pos += positive[i];
    }
    if (n_pos == 0 || n_pos == n) return std::nullopt;
    return roc_curve(scores, positive);
  };
  auto emit = [&](std::size_t cls, const std::string& name) {
    out.roc[cls] = curve_for(cls);
    if (!out.roc[cls]) return;
    write_file_atomic(run_dir / name, roc_table(*out.roc[cls]));
    artifacts.push_back(name);
    roc_files[cls] = name;
  };
  if (k == 2) {
    emit(1, "roc.csv");
  } else {
    for (std::size_t c = 0; c < k; ++c) emit(c, "roc_class_" + std::to_string(c) + ".csv");
  }
  double auc_sum = 0.0;
  std::size_t auc_count = 0;
  for (const auto& r : out.roc) {
    if (r) {
      auc_sum += r->auc;
      ++auc_count;
    }
  }
  if (auc_count > 0) out.macro_auc = auc_sum / static_cast<double>(auc_count);

  OrderedJson per_class = OrderedJson::array();
  for (std::size_t c = 0; c < k; ++c) {
    const auto& m = out.metrics.per_class[c];
    per_class.push_back({{"class", c},
                         {"name", c < model.class_names.size() ? model.class_names[c]
                                                                : std::to_string(c)},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support},
                         {"precision_undefined", m.precision_undefined},
                         {"recall_undefined", m.recall_undefined},
                         {"auc", out.roc[c] ? OrderedJson(out.roc[c]->auc) : OrderedJson()},
                         {"roc_table", roc_files[c]}});
  }
  OrderedJson confusion = OrderedJson::array();
  for (std::size_t t = 0; t < k; ++t) {
    OrderedJson row = OrderedJson::array();
    for (std::size_t p = 0; p < k; ++p) row.push_back(out.confusion.at(t, p));
    confusion.push_back(row);
  }
  const OrderedJson metrics = {
      {"format", kMetricsFormat},
      {"split", side == SplitSide::Test ? "test" : "train"},
      {"n_samples", n},
      {"n_posterior_samples", total_samples(chains)},
      {"accuracy", out.metrics.accuracy},
      {"macro_precision", out.metrics.macro_precision},
      {"macro_recall", out.metrics.macro_recall},
      {"macro_f1", out.metrics.macro_f1},
      {"macro_auc", out.macro_auc ? OrderedJson(*out.macro_auc) : OrderedJson()},
      {"per_class", per_class},
      {"confusion_matrix", confusion}};
  write_file_atomic(run_dir / "metrics.json", dump(metrics));
  write_file_atomic(run_dir / "predictions.csv", predictions);
  write_manifest(run_dir, "manifest_evaluate.json", "evaluate", cfg, artifacts);

  log << "split " << (side == SplitSide::Test ? "test" : "train") << ": " << n
      << " samples, " << total_samples(chains) << " posterior draws\n";
  log << "accuracy " << two_decimals(out.metrics.accuracy) << "  precision "
      << two_decimals(out.metrics.macro_precision) << "  recall "
      << two_decimals(out.metrics.macro_recall) << "  F1 " << two_decimals(out.metrics.macro_f1);
  if (out.macro_auc) log << "  AUC " << two_decimals(*out.macro_auc);
  log << "\n";
  for (std::size_t c = 0; c < k; ++c) {
    const auto& m = out.metrics.per_class[c];
    log << "  " << (c < model.class_names.size() ? model.class_names[c] : std::to_string(c))
        << ": precision " << two_decimals(m.precision) << " recall " << two_decimals(m.recall)
        << " F1 " << two_decimals(m.f1) << " support " << m.support << "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

namespace {

OrderedJson predict_with(const ModelInfo& model, const std::vector<Chain>& chains,
                         std::span<const double> features) {
  if (features.size() != model.network.input_dim) {
    throw DataError("input has " + std::to_string(features.size()) +
                    " features but the network expects " +
                    std::to_string(model.network.input_dim));
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw DataError("input contains a non-finite value");
  }
  const auto x = model.standardizer.apply(features);
  const auto p = posterior_predict(model.network, std::span<const Chain>(chains), x);
  const std::size_t c = p.predicted_class;
  return {{"class", c},
          {"class_name", c < model.class_names.size() ? model.class_names[c] : std::to_string(c)},
          {"probabilities", p.mean_probs},
          {"entropy", p.entropy},
          {"max_entropy", std::log(static_cast<double>(model.network.n_classes))},
          {"n_posterior_samples", total_samples(chains)}};
}

}  // namespace

OrderedJson cmd_predict(const fs::path& run_dir, std::span<const double> features) {
  const ModelInfo model = load_model(run_dir);
  return predict_with(model, load_chains(run_dir, model), features);
}

OrderedJson cmd_predict_image(const fs::path& run_dir, const fs::path& image) {
  const ModelInfo model = load_model(run_dir);
  if (!model.conv_stack) {
    throw ConfigError("model in " + run_dir.string() +
                      " was trained on feature vectors, not images");
  }
  const auto features = ConvStack(*model.conv_stack).extract(read_pgm(image));
  return predict_with(model, load_chains(run_dir, model), features);
}

// ---------------------------------------------------------------------------
// augment / synth / diagnose
// ---------------------------------------------------------------------------

std::size_t cmd_augment(const fs::path& input_dir, const fs::path& output_dir,
                        const AugmentPolicy& policy) {
  policy.validate();
  const ImageDataset input = load_image_dir(input_dir);
  if (fs::exists(output_dir) && fs::equivalent(input_dir, output_dir)) {
    throw ConfigError("output directory must differ from the input directory");
  }
  fs::create_directories(output_dir);
  fs::copy(input_dir, output_dir,
           fs::copy_options::recursive | fs::copy_options::overwrite_existing);

  const LabelledImages originals{input.images, input.labels};
  const LabelledImages augmented = augment_dataset(originals, policy);
  const std::size_t n = input.images.size();
  const std::size_t m = policy.per_image_count;
  for (std::size_t i = 0; i < n; ++i) {
    const fs::path rel = input.files[i].lexically_relative(input_dir);
    for (std::size_t j = 0; j < m; ++j) {
      const fs::path target = output_dir / rel.parent_path() /
                              (rel.stem().string() + "_aug" + std::to_string(j) + ".pgm");
      write_pgm(target, augmented.images[n + i * m + j]);
    }
  }
  return n * m;
}

void cmd_synth(const BlobSpec& spec, const fs::path& output_csv) {
  save_csv(output_csv, synth_blobs(spec));
}

OrderedJson cmd_diagnose(std::span<const fs::path> chain_files) {
  if (chain_files.empty()) throw ConfigError("no chain files given");
  std::vector<Chain> chains;
  OrderedJson per_chain = OrderedJson::array();
  std::size_t degenerate_total = 0;
  for (const auto& path : chain_files) {
    Chain c = load_chain(path).chain;
    const ChainDiagnostics d = diagnose_chain(c);
    const bool has_ess = c.size() >= kMinEssSamples;
    OrderedJson dims = OrderedJson::array();
    std::size_t degenerate = 0;
    for (const auto& s : d.dims) {
      if (has_ess && s.ess.degenerate) ++degenerate;
      dims.push_back({{"mean", s.mean},
                      {"sd", s.sd},
                      {"ess", has_ess ? OrderedJson(s.ess.value) : OrderedJson()},
                      {"degenerate", has_ess && s.ess.degenerate}});
    }
    degenerate_total += degenerate;
    per_chain.push_back({{"file", path.filename().string()},
                         {"n_retained", c.size()},
                         {"acceptance_rate", number(d.acceptance_rate)},
                         {"divergence_rate", number(d.divergence_rate)},
                         {"n_degenerate_dims", degenerate},
                         {"dims", dims}});
    chains.push_back(std::move(c));
  }

  OrderedJson rhat = nullptr;
  bool comparable = chains.front().size() >= 4;
  for (const auto& c : chains) {
    comparable = comparable && c.dim == chains.front().dim && c.size() == chains.front().size();
  }
  if (comparable) {
    rhat = OrderedJson::array();
    for (const auto& r : split_rhat_per_dim(chains)) {
      rhat.push_back({{"value", number(r.value)}, {"degenerate", r.degenerate}});
    }
  }
  return {{"chains", per_chain},
          {"n_degenerate_dims", degenerate_total},
          {"split_rhat", rhat}};
}

std::string two_decimals(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace bnn::cli
