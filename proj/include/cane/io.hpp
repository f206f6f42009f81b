#pragma once

#include <map>
#include <string>
#include <vector>

#include "cane/matrix.hpp"
#include "cane/training.hpp"

namespace cane {

// Flat "key=value" config file; '#' starts a comment line. Unknown keys are
// rejected, not ignored.
std::map<std::string, std::string> read_kv_file(const std::string& path);
void apply_config_entries(TrainConfig& cfg, const std::map<std::string, std::string>& entries);
TrainConfig load_config_file(const std::string& path);

// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest(const std::string& path);

struct Snapshot {
    TrainConfig cfg;
    std::size_t n = 0;
    std::size_t m = 0;
    TrainState state;
};

// Versioned JSON parameter blob: shapes, alpha, K, d, base embeddings and all
// MLP weights. The inner variant stores no MLP block.
void save_snapshot(const std::string& path, const Snapshot& snapshot);
Snapshot load_snapshot(const std::string& path);

// Per-node rows of the final layer as "node,dim0,...,dim{d-1}".
void write_embeddings_csv(const std::string& path, const DenseMatrix& last_layer,
                          std::size_t n_nodes);

// One JSON object per epoch. The log file omits the wall-clock seconds so
// reruns with the same seed are byte-identical; the streamed form carries it.
std::string metrics_line(const EpochMetrics& entry, bool with_seconds);
void write_metrics_log(const std::string& path, const std::vector<EpochMetrics>& history);

}  // namespace cane
