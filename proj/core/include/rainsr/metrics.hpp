#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rainsr/raster.hpp"

namespace rainsr {

/// Binary rain/no-rain classification counts. The correct-negative cell is
/// deliberately untracked; none of the reported scores use it.
struct ContingencyCounts {
    uint64_t hits = 0;
    uint64_t false_alarms = 0;
    uint64_t misses = 0;

    ContingencyCounts& operator+=(const ContingencyCounts& o) {
        hits += o.hits;
        false_alarms += o.false_alarms;
        misses += o.misses;
        return *this;
    }
};

/// Per cell, with strictly-greater-than threshold (default 0):
///   pred > thr && truth > thr  -> hit
///   pred > thr && truth <= thr -> false alarm
///   pred <= thr && truth > thr -> miss
///   both <= thr                -> uncounted
ContingencyCounts contingency(const RainMap& pred, const RainMap& truth, double threshold = 0.0);

/// H/(H+M), F/(H+F), H/(H+F+M). A zero denominator yields nullopt; undefined
/// ratios are never silently 0 or 1.
std::optional<double> pod(const ContingencyCounts& c);
std::optional<double> far(const ContingencyCounts& c);
std::optional<double> csi(const ContingencyCounts& c);

/// Mean over all cells of |pred - truth|, in the maps' units.
double mae(const RainMap& pred, const RainMap& truth);

struct MetricsReport {
    // Pooled variant: counts and absolute errors summed over all cells of all
    // frames, ratios applied once.
    double mae = 0.0;
    std::optional<double> pod;
    std::optional<double> far;
    std::optional<double> csi;
    ContingencyCounts counts;

    // Per-frame-averaged variant: metric per frame, averaged over the frames
    // where it is defined.
    double mae_frame_avg = 0.0;
    std::optional<double> pod_frame_avg;
    std::optional<double> far_frame_avg;
    std::optional<double> csi_frame_avg;

    uint64_t n_frames = 0;
    uint64_t n_cells = 0; // total cells across all frames
    bool normalized_units = false;
};

/// Mergeable accumulator over (pred, truth) pairs; merging partial
/// accumulators gives the same report as sequential accumulation.
class MetricsAccumulator {
public:
    explicit MetricsAccumulator(double threshold = 0.0) : threshold_(threshold) {}

    void add(const RainMap& pred, const RainMap& truth);
    void merge(const MetricsAccumulator& other);

    /// Throws ConfigError when no samples were added.
    MetricsReport report() const;

    uint64_t n_frames() const { return n_frames_; }

private:
    double threshold_ = 0.0;
    ContingencyCounts counts_;
    double abs_error_sum_ = 0.0;
    uint64_t n_cells_ = 0;
    uint64_t n_frames_ = 0;
    bool normalized_units_ = false;

    double mae_sum_ = 0.0;
    double pod_sum_ = 0.0;
    uint64_t pod_defined_ = 0;
    double far_sum_ = 0.0;
    uint64_t far_defined_ = 0;
    double csi_sum_ = 0.0;
    uint64_t csi_defined_ = 0;
};

/// Pools counts and errors across all frames of the stream (primary report)
/// and carries the per-frame-averaged variants alongside.
MetricsReport aggregate(const std::vector<std::pair<RainMap, RainMap>>& samples,
                        double threshold = 0.0);

/// One scored method row for report.csv.
struct ReportRow {
    std::string method;
    MetricsReport metrics;
};

/// Writes rows in the report.csv layout:
/// method, mae, pod, far, csi, H, F, M, n_frames, n_cells.
/// Undefined ratios are emitted as empty fields. `frame_averaged` selects the
/// per-frame-averaged variant instead of the pooled one.
void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path,
                      bool frame_averaged = false);

} // namespace rainsr
