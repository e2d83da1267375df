#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include "rainsr/models.hpp"

namespace rainsr::nn {

/// Run metadata carried in the checkpoint header alongside the layer table.
struct CheckpointMeta {
    std::string architecture; // "cnn_baseline" | "tempnet"
    int epoch = 0;
    uint64_t seed = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double plateau_factor = 0.5;
    int plateau_patience = 3;
    double plateau_min_lr = 1e-6;
    std::string init = "uniform_fanin";
    std::string rng = "mt19937_64";
};

// Checkpoint container: magic "RNCK", then a 32-bit little-endian header
// length, then a JSON header (architecture, layer shapes, optimizer
// hyperparameters, epoch, seed), then for every layer in declared order the
// raw weight then bias payload as little-endian float32.

void save_checkpoint(const ModelParams& params, const CheckpointMeta& meta,
                     const std::filesystem::path& path);

std::pair<ModelParams, CheckpointMeta> load_checkpoint(const std::filesystem::path& path);

} // namespace rainsr::nn
