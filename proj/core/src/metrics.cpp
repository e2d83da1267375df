#include "rainsr/metrics.hpp"

#include <cmath>
#include <fstream>

namespace rainsr {

ContingencyCounts contingency(const RainMap& pred, const RainMap& truth, double threshold) {
    if (!pred.same_shape(truth))
        throw ShapeError("contingency: shape mismatch");
    ContingencyCounts c;
    for (size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred.values[i] > threshold;
        const bool t = truth.values[i] > threshold;
        if (p && t)
            ++c.hits;
        else if (p && !t)
            ++c.false_alarms;
        else if (!p && t)
            ++c.misses;
    }
    return c;
}

std::optional<double> pod(const ContingencyCounts& c) {
    const uint64_t denom = c.hits + c.misses;
    if (denom == 0)
        return std::nullopt;
    return double(c.hits) / double(denom);
}

std::optional<double> far(const ContingencyCounts& c) {
    const uint64_t denom = c.hits + c.false_alarms;
    if (denom == 0)
        return std::nullopt;
    return double(c.false_alarms) / double(denom);
}

std::optional<double> csi(const ContingencyCounts& c) {
    const uint64_t denom = c.hits + c.false_alarms + c.misses;
    if (denom == 0)
        return std::nullopt;
    return double(c.hits) / double(denom);
}

double mae(const RainMap& pred, const RainMap& truth) {
    if (!pred.same_shape(truth))
        throw ShapeError("mae: shape mismatch");
    double sum = 0.0;
    for (size_t i = 0; i < pred.size(); ++i)
        sum += std::abs(double(pred.values[i]) - double(truth.values[i]));
    return sum / double(pred.size());
}

void MetricsAccumulator::add(const RainMap& pred, const RainMap& truth) {
    if (!pred.same_shape(truth))
        throw ShapeError("MetricsAccumulator: shape mismatch");
    const ContingencyCounts c = contingency(pred, truth, threshold_);
    counts_ += c;

    double abs_sum = 0.0;
    for (size_t i = 0; i < pred.size(); ++i)
        abs_sum += std::abs(double(pred.values[i]) - double(truth.values[i]));
    abs_error_sum_ += abs_sum;
    n_cells_ += pred.size();
    n_frames_ += 1;
    normalized_units_ = truth.normalized;

    mae_sum_ += abs_sum / double(pred.size());
    if (auto v = pod(c)) {
        pod_sum_ += *v;
        ++pod_defined_;
    }
    if (auto v = far(c)) {
        far_sum_ += *v;
        ++far_defined_;
    }
    if (auto v = csi(c)) {
        csi_sum_ += *v;
        ++csi_defined_;
    }
}

void MetricsAccumulator::merge(const MetricsAccumulator& other) {
    counts_ += other.counts_;
    abs_error_sum_ += other.abs_error_sum_;
    n_cells_ += other.n_cells_;
    n_frames_ += other.n_frames_;
    normalized_units_ = normalized_units_ || other.normalized_units_;
    mae_sum_ += other.mae_sum_;
    pod_sum_ += other.pod_sum_;
    pod_defined_ += other.pod_defined_;
    far_sum_ += other.far_sum_;
    far_defined_ += other.far_defined_;
    csi_sum_ += other.csi_sum_;
    csi_defined_ += other.csi_defined_;
}

MetricsReport MetricsAccumulator::report() const {
    if (n_frames_ == 0)
        throw ConfigError("MetricsAccumulator: no samples");
    MetricsReport r;
    r.counts = counts_;
    r.mae = abs_error_sum_ / double(n_cells_);
    r.pod = pod(counts_);
    r.far = far(counts_);
    r.csi = csi(counts_);
    r.mae_frame_avg = mae_sum_ / double(n_frames_);
    if (pod_defined_ > 0)
        r.pod_frame_avg = pod_sum_ / double(pod_defined_);
    if (far_defined_ > 0)
        r.far_frame_avg = far_sum_ / double(far_defined_);
    if (csi_defined_ > 0)
        r.csi_frame_avg = csi_sum_ / double(csi_defined_);
    r.n_frames = n_frames_;
    r.n_cells = n_cells_;
    r.normalized_units = normalized_units_;
    return r;
}

MetricsReport aggregate(const std::vector<std::pair<RainMap, RainMap>>& samples,
                        double threshold) {
    MetricsAccumulator acc(threshold);
    for (const auto& [pred, truth] : samples)
        acc.add(pred, truth);
    return acc.report();
}

namespace {

std::string ratio_field(const std::optional<double>& v) {
    if (!v)
        return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    return buf;
}

} // namespace

void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path,
                      bool frame_averaged) {
    std::ofstream out(path);
    if (!out)
        throw IoError("write_report_csv: cannot open " + path.string());
    out << "method,mae,pod,far,csi,H,F,M,n_frames,n_cells\n";
    for (const auto& row : rows) {
        const MetricsReport& m = row.metrics;
        char mae_buf[32];
        std::snprintf(mae_buf, sizeof(mae_buf), "%.6f", frame_averaged ? m.mae_frame_avg : m.mae);
        out << row.method << ',' << mae_buf << ','
            << ratio_field(frame_averaged ? m.pod_frame_avg : m.pod) << ','
            << ratio_field(frame_averaged ? m.far_frame_avg : m.far) << ','
            << ratio_field(frame_averaged ? m.csi_frame_avg : m.csi) << ',' << m.counts.hits
            << ',' << m.counts.false_alarms << ',' << m.counts.misses << ',' << m.n_frames
            << ',' << m.n_cells << '\n';
    }
    if (!out)
        throw IoError("write_report_csv: write failure on " + path.string());
}

} // namespace rainsr
