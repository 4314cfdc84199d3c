#pragma once
// Planted-structure citation corpora with known communities, migrations and
// densifying venue clusters.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "diachron/corpus.hpp"
#include "diachron/types.hpp"

namespace diachron::synth {

// Venue `venue` (global index, community-major) belongs to `to_community`
// from epoch index `epoch` onward.
struct Migration {
    std::size_t venue = 0;
    std::size_t to_community = 0;
    std::size_t epoch = 0;
};

// Extra venues titled with `title_word`. Plant venue i takes the area of
// community (community + i) mod communities. In epoch e each citation from a
// plant paper targets another plant paper with probability cohesion[e] and a
// uniformly random earlier non-plant paper otherwise. Plant papers are cited
// only by plant papers, so a rising schedule turns a diffuse group into an
// isolated tight cluster.
struct DensifyPlant {
    std::size_t community = 0;
    std::size_t venues = 5;
    std::vector<double> cohesion;
    std::string title_word = "nano";
};

struct PlantSpec {
    std::size_t communities = 3;
    std::size_t venues_per_community = 20;
    std::size_t papers_per_venue = 40;  // per epoch
    std::vector<EpochSpec> epochs = {{"1990s", 1990, 1999}, {"2000s", 2000, 2009}, {"2010s", 2010, 2021}};
    double mean_citations = 3.0;  // Poisson mean of references per paper
    double p_in = 0.8;            // weight of each earlier same-community paper
    double p_out = 0.02;          // weight of each earlier other-community paper
    // Only the most recent `citation_window` papers of each community are
    // citable (0 = all earlier papers). Without a window every walk drains
    // into the first few papers of the epoch.
    std::size_t citation_window = 50;
    std::vector<Migration> migrations;
    std::vector<DensifyPlant> densify;
    // The first venue of every community also lists the next community's area.
    bool multi_label = true;
    // Every epoch reuses the first epoch's random stream, so without
    // migrations or plants the epochs share one citation structure (new paper
    // ids and years). Differences between epochs then come from walks and
    // training alone.
    bool static_graph = false;
    std::uint64_t seed = 1;

    std::size_t venue_count() const;
    // Throws PreconditionError on an infeasible spec.
    void validate() const;
};

// key = value lines ('#' comments). Repeatable keys:
//   migrate = <venue>:<to_community>:<epoch index>
//   densify = <community>:<venues>:<c0,c1,...>:<title word>
PlantSpec parse_plant_spec(const std::string& text);
PlantSpec load_plant_spec(const std::string& path);

struct SyntheticCorpus {
    std::vector<EpochSpec> epochs;
    std::vector<PaperRecord> papers;
    std::vector<Citation> edges;
    std::vector<VenueRecord> venues;
    // community[e][v]: community of venue index v during epoch e.
    std::vector<std::vector<std::size_t>> community;
    std::vector<std::vector<VenueId>> plants;  // one list per densify plant

    VenueId venue_id(std::size_t index) const { return venues[index].venue_id; }
};

// Papers cite only earlier papers of the same epoch, so every epoch graph is
// acyclic. Deterministic under spec.seed.
SyntheticCorpus generate_planted(const PlantSpec& spec);

// Writes papers.tsv, edges.tsv, venues.tsv and communities.tsv
// (venue_id, epoch, community) into `dir`.
void write_synthetic(const SyntheticCorpus& corpus, const std::string& dir);

}  // namespace diachron::synth
