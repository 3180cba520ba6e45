#include "bnn_cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "bnn/error.hpp"

namespace bnn::cli {

namespace fs = std::filesystem;

namespace {

// Reads fields of one JSON object, recording problems instead of throwing.
class Fields {
 public:
  Fields(const Json* object, std::string path, std::vector<std::string>& errors)
      : obj_(object), path_(std::move(path)), errors_(errors) {
    if (obj_ != nullptr && !obj_->is_object()) {
      fail("", "expected an object");
      obj_ = nullptr;
    }
  }

  bool present() const { return obj_ != nullptr; }
  bool has(const std::string& key) const {
    return obj_ != nullptr && obj_->contains(key);
  }

  const Json* child(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return nullptr;
    return &obj_->at(key);
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void fail(const std::string& key, const std::string& msg) {
    const std::string where = key.empty() ? path_ : field(key);
    errors_.push_back((where.empty() ? std::string("<root>") : where) + ": " + msg);
  }

  void size(const std::string& key, std::size_t& out) {
    const Json* v = child(key);
    if (v == nullptr) return;
    if (!v->is_number_unsigned()) {
      fail(key, "expected a non-negative integer");
      return;
    }
    out = v->get<std::size_t>();
  }

  void u64(const std::string& key, std::uint64_t& out) {
    std::size_t tmp = out;
    size(key, tmp);
    out = tmp;
  }

  void real(const std::string& key, double& out) {
    const Json* v = child(key);
    if (v == nullptr) return;
    if (!v->is_number()) {
      fail(key, "expected a number");
      return;
    }
    out = v->get<double>();
  }

  void boolean(const std::string& key, bool& out) {
    const Json* v = child(key);
    if (v == nullptr) return;
    if (!v->is_boolean()) {
      fail(key, "expected true or false");
      return;
    }
    out = v->get<bool>();
  }

  void string(const std::string& key, std::string& out) {
    const Json* v = child(key);
    if (v == nullptr) return;
    if (!v->is_string()) {
      fail(key, "expected a string");
      return;
    }
    out = v->get<std::string>();
  }

  void finish() {
    if (obj_ == nullptr) return;
    for (const auto& [key, value] : obj_->items()) {
      if (!seen_.contains(key)) fail(key, "unknown field");
    }
  }

 private:
  const Json* obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

template <class F>
void guarded(std::vector<std::string>& errors, const std::string& where, F&& check) {
  try {
    check();
  } catch (const std::exception& e) {
    errors.push_back(where + ": " + e.what());
  }
}

void parse_dataset(Fields& root, const fs::path& base, RunConfig& cfg,
                   std::vector<std::string>& errors) {
  Fields f(root.child("dataset"), "dataset", errors);
  if (!f.present()) {
    errors.push_back("dataset: required");
    return;
  }
  std::string csv, image_dir;
  f.string("csv", csv);
  f.string("image_dir", image_dir);
  if (csv.empty() == image_dir.empty()) {
    f.fail("", "set exactly one of csv or image_dir");
  }
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_relative() ? base / path : path;
  };
  if (!csv.empty()) {
    cfg.dataset.csv = resolve(csv);
    if (!fs::is_regular_file(cfg.dataset.csv)) {
      f.fail("csv", "file not found: " + cfg.dataset.csv.string());
    }
  }
  if (!image_dir.empty()) {
    cfg.dataset.image_dir = resolve(image_dir);
    if (!fs::is_directory(cfg.dataset.image_dir)) {
      f.fail("image_dir", "directory not found: " + cfg.dataset.image_dir.string());
    }
  }

  Fields cs(f.child("conv_stack"), "dataset.conv_stack", errors);
  if (cs.present()) {
    if (!csv.empty()) cs.fail("", "only valid with image_dir");
    ConvStackSpec& spec = cfg.dataset.conv_stack;
    cs.size("output_dim", spec.output_dim);
    cs.u64("kernel_seed", spec.kernel_seed);
    if (const Json* stages = cs.child("stages")) {
      if (!stages->is_array()) {
        cs.fail("stages", "expected an array");
      } else {
        spec.stages.clear();
        for (std::size_t s = 0; s < stages->size(); ++s) {
          Fields st(&(*stages)[s], "dataset.conv_stack.stages[" + std::to_string(s) + "]",
                    errors);
          ConvStage stage;
          st.size("n_kernels", stage.n_kernels);
          st.size("kernel_size", stage.kernel_size);
          st.size("pool_size", stage.pool_size);
          st.finish();
          spec.stages.push_back(stage);
        }
      }
    }
    cs.finish();
    guarded(errors, "dataset.conv_stack", [&] { spec.validate(); });
  }
  f.finish();
}

void parse_augmentation(Fields& root, RunConfig& cfg, std::vector<std::string>& errors) {
  Fields f(root.child("augmentation"), "augmentation", errors);
  if (!f.present()) return;
  AugmentPolicy policy;
  policy.seed = cfg.seed;
  if (const Json* r = f.child("rotations")) {
    if (!r->is_array()) {
      f.fail("rotations", "expected an array of degrees");
    } else {
      policy.rotations.clear();
      for (const auto& v : *r) {
        if (!v.is_number_integer()) {
          f.fail("rotations", "expected integer degrees");
          break;
        }
        policy.rotations.push_back(v.get<int>());
      }
    }
  }
  if (const Json* fl = f.child("flips")) {
    if (!fl->is_array()) {
      f.fail("flips", "expected an array of axis names");
    } else {
      policy.flips.clear();
      for (const auto& v : *fl) {
        if (!v.is_string()) {
          f.fail("flips", "expected axis names");
          break;
        }
        guarded(errors, f.field("flips"),
                [&] { policy.flips.push_back(parse_flip_axis(v.get<std::string>())); });
      }
    }
  }
  if (const Json* s = f.child("scales")) {
    if (!s->is_array()) {
      f.fail("scales", "expected an array of factors");
    } else {
      policy.scales.clear();
      for (const auto& v : *s) {
        if (!v.is_number()) {
          f.fail("scales", "expected numeric factors");
          break;
        }
        policy.scales.push_back(v.get<double>());
      }
    }
  }
  f.size("per_image_count", policy.per_image_count);
  f.u64("seed", policy.seed);
  f.finish();
  guarded(errors, "augmentation", [&] { policy.validate(); });
  if (!cfg.dataset.csv.empty()) f.fail("", "only valid with dataset.image_dir");
  cfg.augmentation = policy;
}

void parse_split(Fields& root, RunConfig& cfg, std::vector<std::string>& errors) {
  cfg.split.seed = cfg.seed;
  Fields f(root.child("split"), "split", errors);
  f.real("test_fraction", cfg.split.test_fraction);
  f.u64("seed", cfg.split.seed);
  f.boolean("stratified", cfg.split.stratified);
  f.finish();
  guarded(errors, "split", [&] { cfg.split.validate(); });
}

void parse_network(Fields& root, RunConfig& cfg, std::vector<std::string>& errors) {
  Fields f(root.child("network"), "network", errors);
  if (f.has("input_dim")) {
    std::size_t v = 0;
    f.size("input_dim", v);
    cfg.input_dim = v;
  }
  if (f.has("n_classes")) {
    std::size_t v = 0;
    f.size("n_classes", v);
    if (v < 2) f.fail("n_classes", "must be >= 2");
    cfg.n_classes = v;
  }
  if (const Json* h = f.child("hidden_dims")) {
    cfg.hidden_dims.clear();
    if (!h->is_array()) {
      f.fail("hidden_dims", "expected an array of widths");
    } else {
      for (const auto& v : *h) {
        if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
          f.fail("hidden_dims", "widths must be positive integers");
          break;
        }
        cfg.hidden_dims.push_back(v.get<std::size_t>());
      }
    }
  }
  std::string act;
  f.string("activation", act);
  if (!act.empty()) {
    guarded(errors, f.field("activation"), [&] { cfg.activation = parse_activation(act); });
  }
  f.finish();
}

void parse_prior(Fields& root, RunConfig& cfg, std::vector<std::string>& errors) {
  Fields f(root.child("prior"), "prior", errors);
  if (f.has("variance") && f.has("weight_decay")) {
    f.fail("", "set variance or weight_decay, not both");
  }
  double v = cfg.prior.variance;
  f.real("variance", v);
  cfg.prior.variance = v;
  if (f.has("weight_decay")) {
    double lambda = 0.0;
    f.real("weight_decay", lambda);
    guarded(errors, f.field("weight_decay"),
            [&] { cfg.prior = PriorSpec::from_weight_decay(lambda); });
  }
  f.finish();
  guarded(errors, "prior", [&] { cfg.prior.validate(); });
}

void parse_kernel(Fields& root, RunConfig& cfg, std::vector<std::string>& errors) {
  Fields f(root.child("kernel"), "kernel", errors);
  std::string type = "hmc";
  f.string("type", type);
  if (type == "hmc") {
    HmcConfig hmc;
    f.real("step_size", hmc.step_size);
    f.size("n_leapfrog", hmc.n_leapfrog);
    guarded(errors, "kernel", [&] { hmc.validate(); });
    cfg.kernel = hmc;
  } else if (type == "mh") {
    RandomWalkProposal mh;
    f.real("step_scale", mh.step_scale);
    guarded(errors, "kernel", [&] { mh.validate(); });
    cfg.kernel = mh;
  } else {
    f.fail("type", "expected \"hmc\" or \"mh\", got \"" + type + "\"");
    for (const char* key : {"step_size", "n_leapfrog", "step_scale"}) f.child(key);
  }
  f.finish();
}

void parse_chain(Fields& root, RunConfig& cfg, std::vector<std::string>& errors) {
  Fields f(root.child("chain"), "chain", errors);
  ChainSettings& c = cfg.chain;
  f.size("n_iter", c.n_iter);
  c.burn_in = c.n_iter / 5;
  f.size("burn_in", c.burn_in);
  f.size("thin", c.thin);
  f.size("n_chains", c.n_chains);
  std::string init = "shared";
  f.string("init", init);
  if (init == "shared") {
    c.shared_init = true;
  } else if (init == "independent") {
    c.shared_init = false;
  } else {
    f.fail("init", "expected \"shared\" or \"independent\"");
  }
  f.real("init_scale", c.init_scale);
  f.finish();
  if (c.n_iter == 0) f.fail("n_iter", "must be >= 1");
  if (c.burn_in >= c.n_iter) {
    f.fail("burn_in", "must be < chain.n_iter (" + std::to_string(c.burn_in) +
                          " >= " + std::to_string(c.n_iter) + ")");
  }
  if (c.thin == 0) f.fail("thin", "must be >= 1");
  if (c.n_chains == 0) f.fail("n_chains", "must be >= 1");
  if (!(c.init_scale >= 0.0) || !std::isfinite(c.init_scale)) {
    f.fail("init_scale", "must be finite and >= 0");
  }
}

std::vector<std::string> split_path(std::string_view dotted) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    parts.emplace_back(dotted.substr(start, dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

}  // namespace

Json read_config_document(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_override(Json& document, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: " + std::string(assignment));
  }
  const std::string_view value_text = assignment.substr(eq + 1);
  Json value = Json::parse(value_text, nullptr, false);
  if (value.is_discarded()) value = std::string(value_text);

  Json* node = &document;
  const auto parts = split_path(assignment.substr(0, eq));
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError("override path crosses a non-object: " + parts[i]);
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = Json::object();
  }
  if (!node->is_object()) throw ConfigError("override target is not an object");
  (*node)[parts.back()] = std::move(value);
}

RunConfig parse_config(const Json& document, const fs::path& base_dir) {
  std::vector<std::string> errors;
  RunConfig cfg;
  Fields root(&document, "", errors);
  root.u64("seed", cfg.seed);
  std::string out;
  root.string("output_dir", out);
  if (!out.empty()) cfg.output_dir = out;

  parse_dataset(root, base_dir, cfg, errors);
  parse_augmentation(root, cfg, errors);
  parse_split(root, cfg, errors);
  parse_network(root, cfg, errors);
  parse_prior(root, cfg, errors);
  parse_kernel(root, cfg, errors);
  parse_chain(root, cfg, errors);
  root.finish();

  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  cfg.document = document;
  cfg.document.erase("output_dir");
  return cfg;
}

RunConfig load_config(const fs::path& path, const std::vector<std::string>& overrides,
                      std::optional<std::uint64_t> seed,
                      std::optional<fs::path> output_dir) {
  Json doc = read_config_document(path);
  if (!doc.is_object()) throw ConfigError(path.string() + ": top level must be an object");
  for (const auto& o : overrides) apply_override(doc, o);
  if (seed) doc["seed"] = *seed;
  if (output_dir) doc["output_dir"] = output_dir->string();
  return parse_config(doc, path.parent_path());
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

OrderedJson kernel_json(const Kernel& kernel) {
  if (const auto* h = std::get_if<HmcConfig>(&kernel)) {
    return {{"type", "hmc"}, {"step_size", h->step_size}, {"n_leapfrog", h->n_leapfrog}};
  }
  const auto& m = std::get<RandomWalkProposal>(kernel);
  return {{"type", "mh"}, {"step_scale", m.step_scale}};
}

}  // namespace bnn::cli
