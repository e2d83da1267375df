#include "rainsr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rainsr/rng.hpp"

namespace rainsr {

std::vector<TripleSample> make_triples(const EventSequence& event) {
    std::vector<TripleSample> triples;
    if (event.frames.size() < 3)
        return triples;
    triples.reserve(event.frames.size() - 2);
    for (size_t s = 1; s + 1 < event.frames.size(); ++s) {
        TripleSample sample;
        sample.before = event.frames[s - 1];
        sample.after = event.frames[s + 1];
        sample.target = event.frames[s];
        sample.event_id = event.event_id;
        sample.frame_index = s;
        sample.reversed = false;
        triples.push_back(std::move(sample));
    }
    return triples;
}

std::vector<TripleSample> augment_reverse(const std::vector<TripleSample>& samples) {
    std::vector<TripleSample> out;
    out.reserve(samples.size() * 2);
    out = samples;
    for (const TripleSample& s : samples) {
        TripleSample rev = s;
        std::swap(rev.before, rev.after);
        rev.reversed = true;
        out.push_back(std::move(rev));
    }
    return out;
}

namespace {

std::string rule_name(const SplitRule& rule) {
    if (const auto* y = std::get_if<YearRule>(&rule))
        return "year:" + std::to_string(y->test_year);
    const auto& f = std::get<FractionRule>(rule);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fraction:%g", f.train_fraction);
    return buf;
}

SplitRule parse_rule(const std::string& text) {
    if (text.rfind("year:", 0) == 0)
        return YearRule{std::stoi(text.substr(5))};
    if (text.rfind("fraction:", 0) == 0)
        return FractionRule{std::stod(text.substr(9))};
    throw ConfigError("unknown split rule: " + text);
}

} // namespace

DatasetSplit split_chronological(const std::vector<EventSequence>& events,
                                 const SplitRule& rule, bool augment, uint64_t seed) {
    if (events.empty())
        throw ConfigError("split_chronological: no events");
    const bool normalized = events.front().frames.empty()
                                ? false
                                : events.front().frames.front().normalized;
    for (const auto& e : events)
        for (const auto& f : e.frames)
            if (f.normalized != normalized)
                throw ConfigError("split_chronological: inconsistent normalized flag across events");

    std::vector<const EventSequence*> train_events, test_events;
    if (const auto* year_rule = std::get_if<YearRule>(&rule)) {
        for (const auto& e : events) {
            if (!e.year)
                throw ConfigError("split_chronological: year rule needs year metadata on every event");
            (*e.year >= year_rule->test_year ? test_events : train_events).push_back(&e);
        }
    } else {
        const auto& frac = std::get<FractionRule>(rule);
        if (frac.train_fraction <= 0.0 || frac.train_fraction >= 1.0)
            throw ConfigError("split_chronological: train_fraction must be in (0,1)");
        const size_t n_train = size_t(std::llround(double(events.size()) * frac.train_fraction));
        for (size_t i = 0; i < events.size(); ++i)
            (i < n_train ? train_events : test_events).push_back(&events[i]);
    }
    if (train_events.empty() || test_events.empty())
        throw ConfigError("split_chronological: rule selects an empty side");

    DatasetSplit split;
    split.manifest.rule = rule_name(rule);
    split.manifest.augmented = augment;
    split.manifest.normalized = normalized;
    split.manifest.seed = seed;

    for (const auto* e : train_events) {
        split.manifest.train_events.push_back(e->event_id);
        split.manifest.train_unique_frames += e->frames.size();
        auto triples = make_triples(*e);
        split.train.insert(split.train.end(), std::make_move_iterator(triples.begin()),
                           std::make_move_iterator(triples.end()));
    }
    split.manifest.train_triples = split.train.size();
    if (augment)
        split.train = augment_reverse(split.train);
    split.manifest.train_entries_augmented = split.train.size();

    for (const auto* e : test_events) {
        split.manifest.test_events.push_back(e->event_id);
        split.manifest.test_unique_frames += e->frames.size();
        auto triples = make_triples(*e);
        split.test.insert(split.test.end(), std::make_move_iterator(triples.begin()),
                          std::make_move_iterator(triples.end()));
    }
    split.manifest.test_triples = split.test.size();
    return split;
}

std::vector<std::vector<size_t>> epoch_batches(size_t n_samples, size_t batch_size,
                                               uint64_t seed, uint64_t epoch) {
    if (batch_size < 1)
        throw ConfigError("epoch_batches: batch_size must be >= 1");
    Rng rng(derive_seed(seed, epoch));
    std::vector<size_t> order = rng.permutation(n_samples);
    std::vector<std::vector<size_t>> batches;
    for (size_t start = 0; start < order.size(); start += batch_size) {
        const size_t end = std::min(order.size(), start + batch_size);
        batches.emplace_back(order.begin() + long(start), order.begin() + long(end));
    }
    return batches;
}

void write_split_manifest(const SplitManifest& m, const std::filesystem::path& path) {
    nlohmann::json j;
    j["rule"] = m.rule;
    j["train_events"] = m.train_events;
    j["test_events"] = m.test_events;
    j["train_triples"] = m.train_triples;
    j["train_entries_augmented"] = m.train_entries_augmented;
    j["test_triples"] = m.test_triples;
    j["train_unique_frames"] = m.train_unique_frames;
    j["test_unique_frames"] = m.test_unique_frames;
    j["augmented"] = m.augmented;
    j["normalized"] = m.normalized;
    j["seed"] = m.seed;
    j["events_root"] = m.events_root;
    std::ofstream out(path);
    if (!out)
        throw IoError("write_split_manifest: cannot open " + path.string());
    out << j.dump(2) << "\n";
}

SplitManifest read_split_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("read_split_manifest: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("read_split_manifest: bad manifest: " + std::string(e.what()));
    }
    SplitManifest m;
    m.rule = j.at("rule").get<std::string>();
    m.train_events = j.at("train_events").get<std::vector<std::string>>();
    m.test_events = j.at("test_events").get<std::vector<std::string>>();
    m.train_triples = j.at("train_triples").get<size_t>();
    m.train_entries_augmented = j.at("train_entries_augmented").get<size_t>();
    m.test_triples = j.at("test_triples").get<size_t>();
    m.train_unique_frames = j.at("train_unique_frames").get<size_t>();
    m.test_unique_frames = j.at("test_unique_frames").get<size_t>();
    m.augmented = j.at("augmented").get<bool>();
    m.normalized = j.at("normalized").get<bool>();
    m.seed = j.at("seed").get<uint64_t>();
    m.events_root = j.at("events_root").get<std::string>();
    return m;
}

DatasetSplit load_split(const std::filesystem::path& manifest_path) {
    SplitManifest recorded = read_split_manifest(manifest_path);
    std::filesystem::path root(recorded.events_root);
    if (root.is_relative())
        root = manifest_path.parent_path() / root;

    DatasetSplit split;
    split.manifest = recorded;
    split.manifest.train_unique_frames = 0;
    split.manifest.test_unique_frames = 0;

    for (const auto& id : recorded.train_events) {
        EventSequence e = load_event(root / id);
        split.manifest.train_unique_frames += e.frames.size();
        auto triples = make_triples(e);
        split.train.insert(split.train.end(), std::make_move_iterator(triples.begin()),
                           std::make_move_iterator(triples.end()));
    }
    split.manifest.train_triples = split.train.size();
    if (recorded.augmented)
        split.train = augment_reverse(split.train);
    split.manifest.train_entries_augmented = split.train.size();

    for (const auto& id : recorded.test_events) {
        EventSequence e = load_event(root / id);
        split.manifest.test_unique_frames += e.frames.size();
        auto triples = make_triples(e);
        split.test.insert(split.test.end(), std::make_move_iterator(triples.begin()),
                          std::make_move_iterator(triples.end()));
    }
    split.manifest.test_triples = split.test.size();
    return split;
}

} // namespace rainsr
