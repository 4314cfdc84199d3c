#pragma once
// Random-walk citation trails and the venue-token corpus derived from them.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "diachron/corpus.hpp"
#include "diachron/types.hpp"

namespace diachron {

using PaperTrail = std::vector<PaperId>;
using VenueTrail = std::vector<VenueId>;

struct WalkOptions {
    std::size_t starts_per_node = 5;
    // Upper bound on papers per trail; only binding when the graph has cycles.
    std::size_t max_len = 100;
    std::uint64_t seed = 1;
    // Start nodes are split into this many contiguous shards, each with its own
    // RNG stream. Output depends on (seed, shard_count) only, never on workers.
    std::size_t shard_count = 64;
    unsigned workers = 1;
};

// Every node starts `starts_per_node` walks; each step follows a uniformly
// chosen out-edge until a node without out-edges or `max_len` papers.
// Output is ordered by shard, then start node, then repetition.
std::vector<PaperTrail> walk_epoch(const EpochGraph& graph, const WalkOptions& options);

// Token i of each output trail is the venue of paper i of the input trail.
std::vector<VenueTrail> to_venue_trails(std::span<const PaperTrail> trails, const EpochGraph& graph);
std::vector<VenueTrail> to_venue_trails(std::span<const PaperTrail> trails,
                                        const std::unordered_map<PaperId, VenueId>& venue_of);

struct TrailCorpus {
    EpochSpec epoch;
    std::vector<VenueTrail> trails;
    std::map<VenueId, std::size_t> token_counts;

    std::size_t token_total() const;
};

// True for trails that carry a citation relation: length >= 2 and not a
// single venue repeated.
bool is_informative(const VenueTrail& trail);

// Drops uninformative trails, removes venues with fewer than `min_count`
// occurrences (closing the gap), and repeats until nothing changes, so every
// surviving venue has at least `min_count` occurrences. Throws
// EmptyCorpusError when nothing survives.
TrailCorpus filter_and_prune(std::vector<VenueTrail> raw, std::size_t min_count, EpochSpec epoch = {});

// Counts venue occurrences across trails.
std::map<VenueId, std::size_t> count_tokens(std::span<const VenueTrail> trails);

// One trail per line, venue ids separated by single spaces.
void write_corpus(const TrailCorpus& corpus, const std::string& path);
TrailCorpus read_corpus(const std::string& path, EpochSpec epoch = {});

struct CorpusStats {
    std::string epoch;
    std::size_t raw_trails = 0;
    std::size_t trails = 0;
    std::size_t tokens = 0;
    std::size_t vocabulary = 0;
};

void write_corpus_stats(std::span<const CorpusStats> stats, const std::string& path);

}  // namespace diachron
