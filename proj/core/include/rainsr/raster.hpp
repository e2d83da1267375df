#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rainsr/errors.hpp"

namespace rainsr {

inline constexpr const char* kVersion = "0.1.0";

/// A single 2D grid of rain-rate values, row-major, top row first.
/// Values are in [0,1] when `normalized` is set, else mm/h. All values
/// must be finite and non-negative.
struct RainMap {
    uint32_t rows = 0;
    uint32_t cols = 0;
    bool normalized = false;
    std::vector<float> values; // rows*cols, row-major

    RainMap() = default;
    RainMap(uint32_t r, uint32_t c, bool norm, float fill = 0.0f)
        : rows(r), cols(c), normalized(norm), values(size_t(r) * c, fill) {}

    size_t size() const { return size_t(rows) * cols; }
    float at(uint32_t r, uint32_t c) const { return values[size_t(r) * cols + c]; }
    float& at(uint32_t r, uint32_t c) { return values[size_t(r) * cols + c]; }

    bool same_shape(const RainMap& o) const { return rows == o.rows && cols == o.cols; }

    /// Throws DomainError/ShapeError if any invariant is violated.
    void validate() const;

    bool operator==(const RainMap& o) const = default;
};

/// Signed elementwise difference of two equally shaped maps.
struct DeltaGrid {
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<float> values;
};

/// Ordered rain maps at a fixed time step; one rainfall event.
struct EventSequence {
    std::string event_id;
    double step_minutes = 5.0;
    std::optional<int> year;
    std::optional<std::string> start_time;
    std::vector<RainMap> frames;

    /// Throws if frames disagree on shape/normalized flag or step <= 0.
    void validate() const;
};

// --- RGRD binary grid format ------------------------------------------------
//
// bytes 0-3   magic "RGRD"
// bytes 4-7   rows, unsigned 32-bit little-endian
// bytes 8-11  cols, unsigned 32-bit little-endian
// byte  12    flags (bit 0 = normalized)
// then rows*cols IEEE-754 single-precision little-endian values, row-major,
// top row first.  Total length is exactly 13 + 4*rows*cols bytes.

/// Serializes a valid map; returns the number of bytes written.
size_t write_grid(const RainMap& map, std::ostream& out);

/// Inverse of write_grid. Rejects bad magic (FormatError), short payloads
/// (TruncationError) and values violating RainMap invariants (DomainError).
RainMap read_grid(std::istream& in);

size_t write_grid_file(const RainMap& map, const std::filesystem::path& path);
RainMap read_grid_file(const std::filesystem::path& path);

/// Raw codec without rain-domain validation. Used for signed diagnostic
/// grids such as optical-flow components; regular map IO goes through
/// write_grid/read_grid.
size_t write_raw_grid(uint32_t rows, uint32_t cols, uint8_t flags,
                      const std::vector<float>& values, std::ostream& out);

// --- elementwise arithmetic --------------------------------------------------

/// a - b, elementwise. Throws ShapeError on mismatch.
DeltaGrid map_sub(const RainMap& a, const RainMap& b);

/// a + d with results below 0 clamped to 0. Throws ShapeError on mismatch.
RainMap map_add_clamped(const RainMap& a, const DeltaGrid& d);

// --- event directory layout ---------------------------------------------------
//
// A directory holding event.json (event_id, step_minutes, frame list, optional
// year/start_time) plus frame_0000.rgrd, frame_0001.rgrd, ... in chronological
// order; frame indices are zero-padded so lexicographic order is frame order.

void save_event(const EventSequence& event, const std::filesystem::path& dir);
EventSequence load_event(const std::filesystem::path& dir);

/// Loads every event directory directly under `root` (each containing an
/// event.json), sorted by directory name.
std::vector<EventSequence> load_events(const std::filesystem::path& root);

} // namespace rainsr
