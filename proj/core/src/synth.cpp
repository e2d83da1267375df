#include "rainsr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "rainsr/rng.hpp"

namespace rainsr {

void SynthConfig::validate() const {
    if (rows < 1 || cols < 1)
        throw ConfigError("SynthConfig: grid must be at least 1x1");
    if (n_cells < 0 || n_salt < 0)
        throw ConfigError("SynthConfig: negative cell count");
    if (amp_range.first <= 0.0 || amp_range.second > 1.0 || amp_range.first > amp_range.second)
        throw ConfigError("SynthConfig: amp_range must lie within (0,1]");
    if (sigma_range.first <= 0.0 || sigma_range.first > sigma_range.second)
        throw ConfigError("SynthConfig: sigma_range must be positive");
    if (velocity_range.first < 0.0 || velocity_range.first > velocity_range.second)
        throw ConfigError("SynthConfig: bad velocity_range");
    if (growth_range.first <= 0.0 || growth_range.first > growth_range.second)
        throw ConfigError("SynthConfig: bad growth_range");
    if (n_frames < 3)
        throw ConfigError("SynthConfig: n_frames must be >= 3 (a triple needs 3 frames)");
    if (step_minutes <= 0.0)
        throw ConfigError("SynthConfig: step_minutes must be > 0");
}

RainMap field_at(const SynthConfig& config, const std::vector<RainCell>& cells, double t) {
    config.validate();
    RainMap map(config.rows, config.cols, /*normalized=*/true);
    // Accumulate in double, clamp01 after summation so overlapping cells
    // saturate instead of exceeding normalized range.
    std::vector<double> acc(map.size(), 0.0);
    for (const RainCell& cell : cells) {
        const double cr = cell.row + cell.vy * t;
        const double cc = cell.col + cell.vx * t;
        const double a = cell.amp * std::pow(cell.growth, t);
        const double inv2s2 = 1.0 / (2.0 * cell.sigma * cell.sigma);
        for (uint32_t r = 0; r < config.rows; ++r) {
            const double dr = double(r) - cr;
            for (uint32_t c = 0; c < config.cols; ++c) {
                const double dc = double(c) - cc;
                acc[size_t(r) * config.cols + c] +=
                    a * std::exp(-(dr * dr + dc * dc) * inv2s2);
            }
        }
    }
    for (size_t i = 0; i < acc.size(); ++i)
        map.values[i] = float(std::clamp(acc[i], 0.0, 1.0));
    return map;
}

namespace {

std::vector<RainCell> draw_cells(const SynthConfig& config, Rng& rng) {
    std::vector<RainCell> cells;
    cells.reserve(size_t(config.n_cells) + size_t(config.salt_noise ? config.n_salt : 0));
    for (int i = 0; i < config.n_cells; ++i) {
        RainCell cell;
        // Centers from the central 60% of the grid so cells begin interior.
        cell.row = rng.uniform(0.2 * config.rows, 0.8 * config.rows);
        cell.col = rng.uniform(0.2 * config.cols, 0.8 * config.cols);
        const double speed = rng.uniform(config.velocity_range.first, config.velocity_range.second);
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        cell.vx = speed * std::cos(angle);
        cell.vy = speed * std::sin(angle);
        cell.amp = rng.uniform(config.amp_range.first, config.amp_range.second);
        cell.sigma = rng.uniform(config.sigma_range.first, config.sigma_range.second);
        cell.growth = rng.uniform(config.growth_range.first, config.growth_range.second);
        cells.push_back(cell);
    }
    if (config.salt_noise) {
        for (int i = 0; i < config.n_salt; ++i) {
            RainCell salt;
            salt.row = rng.uniform(0.0, double(config.rows));
            salt.col = rng.uniform(0.0, double(config.cols));
            salt.amp = rng.uniform(config.amp_range.first, config.amp_range.second);
            salt.sigma = 0.25; // effectively a single-cell echo
            salt.growth = 1.0;
            cells.push_back(salt);
        }
    }
    return cells;
}

} // namespace

std::pair<EventSequence, SynthOracle> gen_event(const SynthConfig& config,
                                                const std::string& event_id) {
    config.validate();
    Rng rng(config.seed);
    std::vector<RainCell> cells = draw_cells(config, rng);

    EventSequence event;
    event.event_id = event_id;
    event.step_minutes = config.step_minutes;
    event.frames.reserve(size_t(config.n_frames));
    for (int t = 0; t < config.n_frames; ++t)
        event.frames.push_back(field_at(config, cells, double(t)));
    return {std::move(event), SynthOracle(config, std::move(cells))};
}

namespace {

nlohmann::json config_to_json(const SynthConfig& c) {
    return nlohmann::json{
        {"rows", c.rows},
        {"cols", c.cols},
        {"n_cells", c.n_cells},
        {"amp_range", {c.amp_range.first, c.amp_range.second}},
        {"sigma_range", {c.sigma_range.first, c.sigma_range.second}},
        {"velocity_range", {c.velocity_range.first, c.velocity_range.second}},
        {"growth_range", {c.growth_range.first, c.growth_range.second}},
        {"n_frames", c.n_frames},
        {"seed", c.seed},
        {"salt_noise", c.salt_noise},
        {"n_salt", c.n_salt},
        {"step_minutes", c.step_minutes},
        {"rng", Rng::kAlgorithm},
    };
}

SynthConfig config_from_json(const nlohmann::json& j) {
    SynthConfig c;
    c.rows = j.at("rows").get<uint32_t>();
    c.cols = j.at("cols").get<uint32_t>();
    c.n_cells = j.at("n_cells").get<int>();
    c.amp_range = {j.at("amp_range")[0].get<double>(), j.at("amp_range")[1].get<double>()};
    c.sigma_range = {j.at("sigma_range")[0].get<double>(), j.at("sigma_range")[1].get<double>()};
    c.velocity_range = {j.at("velocity_range")[0].get<double>(),
                        j.at("velocity_range")[1].get<double>()};
    c.growth_range = {j.at("growth_range")[0].get<double>(), j.at("growth_range")[1].get<double>()};
    c.n_frames = j.at("n_frames").get<int>();
    c.seed = j.at("seed").get<uint64_t>();
    c.salt_noise = j.at("salt_noise").get<bool>();
    c.n_salt = j.at("n_salt").get<int>();
    c.step_minutes = j.at("step_minutes").get<double>();
    return c;
}

nlohmann::json cell_to_json(const RainCell& cell) {
    return nlohmann::json{
        {"row", cell.row},   {"col", cell.col},     {"vx", cell.vx},
        {"vy", cell.vy},     {"amp", cell.amp},     {"sigma", cell.sigma},
        {"growth", cell.growth},
    };
}

RainCell cell_from_json(const nlohmann::json& j) {
    RainCell cell;
    cell.row = j.at("row").get<double>();
    cell.col = j.at("col").get<double>();
    cell.vx = j.at("vx").get<double>();
    cell.vy = j.at("vy").get<double>();
    cell.amp = j.at("amp").get<double>();
    cell.sigma = j.at("sigma").get<double>();
    cell.growth = j.at("growth").get<double>();
    return cell;
}

} // namespace

void write_synth_dataset(const SynthConfig& config, int n_events,
                         const std::filesystem::path& root) {
    config.validate();
    if (n_events < 1)
        throw ConfigError("write_synth_dataset: n_events must be >= 1");
    std::filesystem::create_directories(root);

    nlohmann::json manifest;
    manifest["config"] = config_to_json(config);
    manifest["n_events"] = n_events;
    nlohmann::json events = nlohmann::json::array();

    for (int i = 0; i < n_events; ++i) {
        SynthConfig per_event = config;
        per_event.seed = derive_seed(config.seed, uint64_t(i));
        char name[32];
        std::snprintf(name, sizeof(name), "event_%04d", i);
        auto [event, oracle] = gen_event(per_event, name);
        save_event(event, root / name);

        nlohmann::json entry;
        entry["event_id"] = name;
        entry["seed"] = per_event.seed;
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& cell : oracle.cells())
            cells.push_back(cell_to_json(cell));
        entry["cells"] = cells;
        events.push_back(entry);
    }
    manifest["events"] = events;

    std::ofstream out(root / "synth_manifest.json");
    if (!out)
        throw IoError("write_synth_dataset: cannot write synth_manifest.json");
    out << manifest.dump(2) << "\n";
}

SynthOracle oracle_from_manifest(const std::filesystem::path& manifest_path,
                                 const std::string& event_id) {
    std::ifstream in(manifest_path);
    if (!in)
        throw IoError("oracle_from_manifest: cannot open " + manifest_path.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("oracle_from_manifest: bad manifest: " + std::string(e.what()));
    }
    SynthConfig config = config_from_json(manifest.at("config"));
    for (const auto& entry : manifest.at("events")) {
        if (entry.at("event_id").get<std::string>() != event_id)
            continue;
        config.seed = entry.at("seed").get<uint64_t>();
        std::vector<RainCell> cells;
        for (const auto& cj : entry.at("cells"))
            cells.push_back(cell_from_json(cj));
        return SynthOracle(config, std::move(cells));
    }
    throw ConfigError("oracle_from_manifest: unknown event id " + event_id);
}

} // namespace rainsr
