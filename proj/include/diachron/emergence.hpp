#pragma once
// Local cluster formation around venues (change in k-th neighbour distance)
// and the title words that distinguish strongly densifying venues.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "diachron/embedding.hpp"
#include "diachron/types.hpp"

namespace diachron {

// 1 - cosine to the k-th nearest neighbour. Requires k < size().
double kth_nn_distance(const EpochEmbedding& embedding, VenueId venue, std::size_t k = 10);

struct DeltaD {
    VenueId venue{};
    std::string t_est;   // first epoch containing the venue
    std::string t_last;  // final epoch of the series
    std::size_t k = 10;
    double d_first = 0;
    double d_last = 0;
    double delta = 0;  // d_first - d_last; large means the neighbourhood tightened
};

// Throws PreconditionError if the venue is absent from the final epoch.
DeltaD delta_d(const EmbeddingSeries& series, VenueId venue, std::size_t k = 10);

struct DeltaDTable {
    std::vector<DeltaD> scored;  // ascending venue id
    std::map<VenueId, std::string> unscored;  // venue -> reason
};

// Scores every venue of the series. Venues missing from the final epoch, or
// first appearing in it, are reported as unscored.
DeltaDTable delta_d_table(const EmbeddingSeries& series, std::size_t k = 10);

using TermCounts = std::map<std::string, std::size_t>;

struct TermScore {
    std::string token;
    double z = 0;
    double delta = 0;  // log-odds difference
    std::size_t count_a = 0;
    std::size_t count_b = 0;
};

// Log-odds ratio with an informative Dirichlet prior proportional to the
// pooled counts and summing to `prior_scale`; z = delta / sqrt(variance).
// Positive z marks words over-represented in `a`. Sorted by z descending,
// ties by token. Throws PreconditionError if either corpus is empty.
std::vector<TermScore> fightin_words(const TermCounts& a, const TermCounts& b, double prior_scale = 10.0);

using TitleTokens = std::unordered_map<VenueId, std::vector<std::string>>;

struct EmergentTerms {
    std::string epoch;  // establishment epoch of the group
    double threshold = 0;  // venues with delta strictly above it form the top group
    std::vector<VenueId> top;
    std::vector<VenueId> rest;
    std::vector<TermScore> terms;
};

// Splits one establishment group at the (1 - top_frac) quantile of delta (ties
// go to the rest) and scores title words of top vs rest. Throws
// PreconditionError for groups under `min_group` venues or a split that leaves
// either side empty.
EmergentTerms emergent_terms_for_group(std::span<const DeltaD> group, const TitleTokens& titles,
                                       double top_frac = 0.10, double prior_scale = 10.0,
                                       std::size_t min_group = 10);

struct EmergenceReport {
    std::vector<EmergentTerms> groups;        // in series order of establishment epoch
    std::map<std::string, std::string> skipped;  // epoch -> reason
};

// Groups scored venues by establishment epoch and runs the term comparison on
// each group; groups that cannot be split are reported as skipped.
EmergenceReport emergent_terms(std::span<const DeltaD> scored, const TitleTokens& titles,
                               std::span<const std::string> epoch_order, double top_frac = 0.10,
                               double prior_scale = 10.0, std::size_t min_group = 10);

}  // namespace diachron
