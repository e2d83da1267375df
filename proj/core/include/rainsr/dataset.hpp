#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "rainsr/raster.hpp"

namespace rainsr {

/// One dataset entry: (predecessor, successor) input pair and the true
/// intermediate frame as target.
struct TripleSample {
    RainMap before;
    RainMap after;
    RainMap target;
    std::string event_id;
    size_t frame_index = 0; // index of the target frame within its event
    bool reversed = false;
};

/// Split rule: either "events from `test_year` on are test" or "the last
/// (1 - train_fraction) of events (in input order) are test".
struct YearRule {
    int test_year;
};
struct FractionRule {
    double train_fraction; // in (0,1)
};
using SplitRule = std::variant<YearRule, FractionRule>;

struct SplitManifest {
    std::string rule;
    std::vector<std::string> train_events;
    std::vector<std::string> test_events;
    size_t train_triples = 0;           // before augmentation
    size_t train_entries_augmented = 0; // after reversal augmentation
    size_t test_triples = 0;
    size_t train_unique_frames = 0;
    size_t test_unique_frames = 0;
    bool augmented = true;
    bool normalized = false;
    uint64_t seed = 0;
    std::string events_root; // set when the split was built from disk
};

struct DatasetSplit {
    std::vector<TripleSample> train;
    std::vector<TripleSample> test;
    SplitManifest manifest;
};

/// Builds the n_frames - 2 chronological triples of one event:
/// (frame[s-1], frame[s+1]) -> frame[s] for every interior s. Events with
/// fewer than 3 frames yield an empty list.
std::vector<TripleSample> make_triples(const EventSequence& event);

/// Appends, for each input sample, a copy with before/after swapped and the
/// reversed flag set. Output length is exactly twice the input length.
std::vector<TripleSample> augment_reverse(const std::vector<TripleSample>& samples);

/// Chronological split: later events go to test, earlier to train; reversal
/// augmentation is applied to the train side only (when `augment` is set).
/// Throws ConfigError when the rule leaves either side empty or when events
/// disagree on the normalized flag.
DatasetSplit split_chronological(const std::vector<EventSequence>& events,
                                 const SplitRule& rule, bool augment = true,
                                 uint64_t seed = 0);

/// Deterministic per (seed, epoch) batch order: a seeded shuffle of all
/// sample indices, chunked into batches of `batch_size`; the final short
/// batch is kept.
std::vector<std::vector<size_t>> epoch_batches(size_t n_samples, size_t batch_size,
                                               uint64_t seed, uint64_t epoch);

void write_split_manifest(const SplitManifest& manifest, const std::filesystem::path& path);
SplitManifest read_split_manifest(const std::filesystem::path& path);

/// Loads the events recorded in a split manifest from its events_root and
/// re-applies the recorded rule.
DatasetSplit load_split(const std::filesystem::path& manifest_path);

} // namespace rainsr
