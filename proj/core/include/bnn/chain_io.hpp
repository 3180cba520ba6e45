#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "bnn/samplers.hpp"

namespace bnn {

/// A chain together with the settings that produced it.
struct ChainRecord {
  Chain chain;
  Kernel kernel;
  ChainControls controls;
};

/// Writes `<dir>/<stem>.csv` (header `lp,w0,w1,...`, one row per retained
/// sample, 17 significant digits) and the metadata sidecar `<dir>/<stem>.json`.
/// Both files are written atomically.
void save_chain(const std::filesystem::path& dir, const std::string& stem,
                const ChainRecord& record);

/// Reads a samples table. The sidecar next to it (same stem, .json) supplies
/// kernel, controls and acceptance counters when present; without it the
/// counters are zero and `kernel`/`controls` hold defaults.
ChainRecord load_chain(const std::filesystem::path& samples_csv);

/// Samples-table parsing only; throws DataError with line numbers.
Chain read_samples_table(const std::filesystem::path& samples_csv);

std::string samples_table(const Chain& chain);

}  // namespace bnn
