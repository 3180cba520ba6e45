#include "bnn/chain_io.hpp"

#include <fstream>

#include "bnn/error.hpp"
#include "bnn/text_io.hpp"
#include "json.hpp"

namespace bnn {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string samples_table(const Chain& chain) {
  std::string out = "lp";
  for (std::size_t d = 0; d < chain.dim; ++d) out += ",w" + std::to_string(d);
  out += '\n';
  for (std::size_t i = 0; i < chain.size(); ++i) {
    out += format_double(chain.log_posts[i]);
    for (double v : chain.sample(i)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void save_chain(const fs::path& dir, const std::string& stem,
                const ChainRecord& record) {
  const Chain& c = record.chain;
  write_file_atomic(dir / (stem + ".csv"), samples_table(c));

  ordered_json meta;
  meta["format"] = "bnn-chain/1";
  meta["samples_file"] = stem + ".csv";
  meta["seed"] = c.seed;
  meta["stream"] = c.stream;
  if (const auto* hmc = std::get_if<HmcConfig>(&record.kernel)) {
    meta["kernel"] = {{"type", "hmc"},
                      {"step_size", hmc->step_size},
                      {"n_leapfrog", hmc->n_leapfrog}};
  } else {
    const auto& mh = std::get<RandomWalkProposal>(record.kernel);
    meta["kernel"] = {{"type", "mh"}, {"step_scale", mh.step_scale}};
  }
  meta["controls"] = {{"n_iter", record.controls.n_iter},
                      {"burn_in", record.controls.burn_in},
                      {"thin", record.controls.thin}};
  meta["dim"] = c.dim;
  meta["n_retained"] = c.size();
  meta["n_proposed"] = c.n_proposed;
  meta["n_accepted"] = c.n_accepted;
  meta["n_divergent"] = c.n_divergent;
  write_file_atomic(dir / (stem + ".json"), meta.dump(2) + "\n");
}

Chain read_samples_table(const fs::path& samples_csv) {
  std::ifstream in(samples_csv);
  if (!in) throw DataError("cannot open " + samples_csv.string());
  const std::string where = samples_csv.string() + ":";
  std::string line;
  if (!std::getline(in, line)) throw DataError(where + "1: missing header");
  const auto header = split_fields(line);
  if (header.empty() || header[0] != "lp") {
    throw DataError(where + "1: header must be lp,w0,w1,...");
  }
  Chain chain;
  chain.dim = header.size() - 1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != chain.dim + 1) {
      throw DataError(where + std::to_string(line_no) + ": expected " +
                      std::to_string(chain.dim + 1) + " fields, found " +
                      std::to_string(fields.size()));
    }
    double v;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (!parse_double(fields[f], v)) {
        throw DataError(where + std::to_string(line_no) + ": bad number '" +
                        std::string(fields[f]) + "'");
      }
      if (f == 0) {
        chain.log_posts.push_back(v);
      } else {
        chain.samples.push_back(v);
      }
    }
  }
  return chain;
}

ChainRecord load_chain(const fs::path& samples_csv) {
  ChainRecord rec;
  rec.chain = read_samples_table(samples_csv);
  auto sidecar = samples_csv;
  sidecar.replace_extension(".json");
  if (!fs::exists(sidecar)) return rec;

  ordered_json meta;
  try {
    meta = ordered_json::parse(read_file(sidecar));
    rec.chain.seed = meta.at("seed").get<std::uint64_t>();
    rec.chain.stream = meta.value("stream", std::uint64_t{0});
    rec.chain.n_proposed = meta.at("n_proposed").get<std::size_t>();
    rec.chain.n_accepted = meta.at("n_accepted").get<std::size_t>();
    rec.chain.n_divergent = meta.value("n_divergent", std::size_t{0});
    const auto& k = meta.at("kernel");
    if (k.at("type") == "hmc") {
      rec.kernel = HmcConfig{k.at("step_size").get<double>(),
                             k.at("n_leapfrog").get<std::size_t>()};
    } else {
      rec.kernel = RandomWalkProposal{k.at("step_scale").get<double>()};
    }
    const auto& ctl = meta.at("controls");
    rec.controls.n_iter = ctl.at("n_iter").get<std::size_t>();
    rec.controls.burn_in = ctl.at("burn_in").get<std::size_t>();
    rec.controls.thin = ctl.at("thin").get<std::size_t>();
    rec.controls.seed = rec.chain.seed;
    rec.controls.stream = rec.chain.stream;
    if (meta.at("dim").get<std::size_t>() != rec.chain.dim) {
      throw DataError(sidecar.string() + ": dim disagrees with samples table");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(sidecar.string() + ": " + e.what());
  }
  return rec;
}

}  // namespace bnn
