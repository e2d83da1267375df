#include "rainsr/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wire.hpp"

namespace rainsr {

namespace {

using wire::get_u32le;
using wire::put_f32le;
using wire::put_u32le;

constexpr char kMagic[4] = {'R', 'G', 'R', 'D'};
constexpr uint8_t kFlagNormalized = 0x01;

} // namespace

void RainMap::validate() const {
    if (rows < 1 || cols < 1)
        throw ShapeError("RainMap: rows and cols must be >= 1");
    if (values.size() != size())
        throw ShapeError("RainMap: values.length != rows*cols");
    for (float v : values) {
        if (!std::isfinite(v))
            throw DomainError("RainMap: non-finite value");
        if (v < 0.0f)
            throw DomainError("RainMap: negative rain rate");
        if (normalized && v > 1.0f)
            throw DomainError("RainMap: normalized value > 1");
    }
}

void EventSequence::validate() const {
    if (step_minutes <= 0.0)
        throw DomainError("EventSequence: step_minutes must be > 0");
    for (const auto& f : frames) {
        f.validate();
        if (!f.same_shape(frames.front()) || f.normalized != frames.front().normalized)
            throw ShapeError("EventSequence: frames disagree on shape or normalized flag");
    }
}

size_t write_raw_grid(uint32_t rows, uint32_t cols, uint8_t flags,
                      const std::vector<float>& values, std::ostream& out) {
    if (values.size() != size_t(rows) * cols)
        throw ShapeError("write_raw_grid: payload size mismatch");
    out.write(kMagic, 4);
    put_u32le(out, rows);
    put_u32le(out, cols);
    out.put(static_cast<char>(flags));
    for (float v : values)
        put_f32le(out, v);
    if (!out)
        throw IoError("write_raw_grid: sink write failure");
    return 13 + 4 * values.size();
}

size_t write_grid(const RainMap& map, std::ostream& out) {
    map.validate();
    return write_raw_grid(map.rows, map.cols, map.normalized ? kFlagNormalized : 0,
                          map.values, out);
}

RainMap read_grid(std::istream& in) {
    unsigned char header[13];
    in.read(reinterpret_cast<char*>(header), 13);
    if (in.gcount() != 13)
        throw TruncationError("read_grid: stream shorter than header");
    if (std::memcmp(header, kMagic, 4) != 0)
        throw FormatError("read_grid: bad magic");

    RainMap map;
    map.rows = get_u32le(header + 4);
    map.cols = get_u32le(header + 8);
    map.normalized = (header[12] & kFlagNormalized) != 0;
    if (map.rows < 1 || map.cols < 1)
        throw FormatError("read_grid: zero dimension");

    const size_t n = size_t(map.rows) * map.cols;
    std::vector<unsigned char> payload(4 * n);
    in.read(reinterpret_cast<char*>(payload.data()), std::streamsize(payload.size()));
    if (size_t(in.gcount()) != payload.size())
        throw TruncationError("read_grid: payload shorter than rows*cols values");

    map.values.resize(n);
    for (size_t i = 0; i < n; ++i)
        map.values[i] = std::bit_cast<float>(get_u32le(payload.data() + 4 * i));

    map.validate();
    return map;
}

size_t write_grid_file(const RainMap& map, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("write_grid_file: cannot open " + path.string());
    return write_grid(map, out);
}

RainMap read_grid_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("read_grid_file: cannot open " + path.string());
    return read_grid(in);
}

DeltaGrid map_sub(const RainMap& a, const RainMap& b) {
    if (!a.same_shape(b))
        throw ShapeError("map_sub: shape mismatch");
    DeltaGrid d{a.rows, a.cols, std::vector<float>(a.size())};
    for (size_t i = 0; i < a.size(); ++i)
        d.values[i] = a.values[i] - b.values[i];
    return d;
}

RainMap map_add_clamped(const RainMap& a, const DeltaGrid& d) {
    if (a.rows != d.rows || a.cols != d.cols)
        throw ShapeError("map_add_clamped: shape mismatch");
    RainMap out(a.rows, a.cols, a.normalized);
    for (size_t i = 0; i < a.size(); ++i)
        out.values[i] = std::max(0.0f, a.values[i] + d.values[i]);
    return out;
}

namespace {

std::string frame_name(size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%04zu.rgrd", index);
    return buf;
}

} // namespace

void save_event(const EventSequence& event, const std::filesystem::path& dir) {
    event.validate();
    std::filesystem::create_directories(dir);

    nlohmann::json meta;
    meta["event_id"] = event.event_id;
    meta["step_minutes"] = event.step_minutes;
    if (event.year)
        meta["year"] = *event.year;
    if (event.start_time)
        meta["start_time"] = *event.start_time;
    std::vector<std::string> names;
    names.reserve(event.frames.size());
    for (size_t i = 0; i < event.frames.size(); ++i) {
        names.push_back(frame_name(i));
        write_grid_file(event.frames[i], dir / names.back());
    }
    meta["frames"] = names;

    std::ofstream out(dir / "event.json");
    if (!out)
        throw IoError("save_event: cannot write event.json in " + dir.string());
    out << meta.dump(2) << "\n";
}

EventSequence load_event(const std::filesystem::path& dir) {
    std::ifstream in(dir / "event.json");
    if (!in)
        throw IoError("load_event: missing event.json in " + dir.string());
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("load_event: bad event.json: " + std::string(e.what()));
    }

    EventSequence event;
    event.event_id = meta.at("event_id").get<std::string>();
    event.step_minutes = meta.at("step_minutes").get<double>();
    if (meta.contains("year"))
        event.year = meta["year"].get<int>();
    if (meta.contains("start_time"))
        event.start_time = meta["start_time"].get<std::string>();
    for (const auto& name : meta.at("frames"))
        event.frames.push_back(read_grid_file(dir / name.get<std::string>()));
    event.validate();
    return event;
}

std::vector<EventSequence> load_events(const std::filesystem::path& root) {
    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "event.json"))
            dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<EventSequence> events;
    events.reserve(dirs.size());
    for (const auto& d : dirs)
        events.push_back(load_event(d));
    return events;
}

} // namespace rainsr
