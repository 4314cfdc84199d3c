#pragma once
// Cosine similarity, exact nearest neighbours and the summary statistics used
// to validate embeddings against known venue-field relations.

#include <cstddef>
#include <span>
#include <vector>

#include "diachron/embedding.hpp"
#include "diachron/types.hpp"

namespace diachron {

// u.v / (|u| |v|) accumulated in double. Throws NumericError on a zero vector
// and PreconditionError on a dimension mismatch.
double cosine(std::span<const float> u, std::span<const float> v);
double cosine(std::span<const double> u, std::span<const double> v);

struct Neighbor {
    VenueId venue{};
    double similarity = 0.0;

    bool operator==(const Neighbor&) const = default;
};

struct NeighborList {
    VenueId query{};
    std::vector<Neighbor> neighbors;  // descending similarity, ties by ascending venue id
};

// Exact top-k by cosine over the whole vocabulary, excluding the query.
// Requires k < size(); k = 0 yields an empty list.
NeighborList knn(const EpochEmbedding& embedding, VenueId venue, std::size_t k);

struct RelativeSimilarity {
    double ratio = 0.0;         // field_mean / overall_mean, 0 when degenerate
    double field_mean = 0.0;
    double overall_mean = 0.0;
    std::size_t field_size = 0;  // field members actually averaged
    bool degenerate = false;     // overall_mean <= 0, ratio is meaningless
};

// Mean cosine between `venue` and the field members over its mean cosine to
// every other venue. The venue itself is excluded from both averages and
// field members missing from the embedding are ignored.
RelativeSimilarity relative_similarity(const EpochEmbedding& embedding, VenueId venue,
                                       std::span<const VenueId> field);

// Kendall tau-b. Returns 0 when either sequence is constant.
double kendall_tau(std::span<const double> xs, std::span<const double> ys);

// R^2 of the ordinary least squares fit of ys on xs; 0 when ys is constant.
double linear_fit_r2(std::span<const double> xs, std::span<const double> ys);

}  // namespace diachron
