#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "rainsr/raster.hpp"

namespace rainsr {

/// One advecting Gaussian rain cell. Position is (row, col) in cells; velocity
/// is split into column (vx) and row (vy) components in cells per frame; the
/// amplitude is multiplied by `growth` once per frame.
struct RainCell {
    double row = 0.0;
    double col = 0.0;
    double vx = 0.0; // cells per frame, +cols
    double vy = 0.0; // cells per frame, +rows
    double amp = 1.0;
    double sigma = 1.0;
    double growth = 1.0;
};

struct SynthConfig {
    uint32_t rows = 64;
    uint32_t cols = 64;
    int n_cells = 4;
    std::pair<double, double> amp_range = {0.3, 0.9};
    std::pair<double, double> sigma_range = {3.0, 7.0};
    std::pair<double, double> velocity_range = {0.5, 2.0}; // speed, cells/frame
    std::pair<double, double> growth_range = {0.97, 1.03};
    int n_frames = 8;
    uint64_t seed = 0;
    /// Emulates isolated artifact-like echoes with extra near-point cells
    /// (sigma 0.25, static). Off by default.
    bool salt_noise = false;
    int n_salt = 0;
    double step_minutes = 5.0;

    void validate() const;
};

/// Evaluates the closed-form field at continuous frame index t:
/// clamp01( sum_i amp_i * growth_i^t * exp(-|x - c_i - v_i*t|^2 / (2 sigma_i^2)) ).
/// Fractional t gives exact intermediate ground truth.
RainMap field_at(const SynthConfig& config, const std::vector<RainCell>& cells, double t);

/// Closed-form ground truth for one generated event; answers field_at for any
/// fractional frame index.
class SynthOracle {
public:
    SynthOracle(SynthConfig config, std::vector<RainCell> cells)
        : config_(std::move(config)), cells_(std::move(cells)) {}

    RainMap at(double t) const { return field_at(config_, cells_, t); }

    const SynthConfig& config() const { return config_; }
    const std::vector<RainCell>& cells() const { return cells_; }

private:
    SynthConfig config_;
    std::vector<RainCell> cells_;
};

/// Samples cell parameters from the seeded RNG and emits frames at
/// t = 0 .. n_frames-1. Deterministic per seed. Cell centers are drawn from
/// the central 60% of each dimension so cells start interior.
std::pair<EventSequence, SynthOracle> gen_event(const SynthConfig& config,
                                                const std::string& event_id = "event");

/// Generates `n_events` events (seeds derive from config.seed and the event
/// index), writes them in the event layout under `root` and records config and
/// drawn cell parameters in root/synth_manifest.json.
void write_synth_dataset(const SynthConfig& config, int n_events,
                         const std::filesystem::path& root);

/// Rebuilds the oracle for one event recorded in a synth_manifest.json.
SynthOracle oracle_from_manifest(const std::filesystem::path& manifest_path,
                                 const std::string& event_id);

} // namespace rainsr
