#pragma once
// Placement of venues on the physical-life-health simplex, clustering of the
// placed points, and per-venue comparison of clusterings.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "diachron/corpus.hpp"
#include "diachron/embedding.hpp"
#include "diachron/types.hpp"

namespace diachron {

using AreaMap = std::unordered_map<VenueId, Area>;

// Picks one area for a venue with several candidate areas: the candidate most
// common among the labels (`known`) of its m nearest neighbours, ties by area
// order P, L, H, S. Single-candidate venues keep their area; venues without
// candidates or missing from the table stay unlabeled.
std::optional<Area> resolve_area(VenueId venue, const EpochEmbedding& embedding, const VenueTable& venues,
                                 const AreaMap& known, std::size_t m = 50);

// Resolves every venue in the embedding. Single-area venues seed the known
// labels; multi-area venues are then resolved in ascending id order, each
// result becoming visible to the venues after it.
AreaMap resolve_areas(const EpochEmbedding& embedding, const VenueTable& venues, std::size_t m = 50);

struct Pole {
    Area area = Area::Physical;
    std::vector<double> centroid;
    std::string epoch;
    std::size_t members = 0;

    // A zero centroid has no direction, so cosine to it is undefined.
    bool degenerate() const;
};

struct Poles {
    Pole physical;
    Pole life;
    Pole health;
};

// Arithmetic mean of the raw vectors of the members present in the embedding.
// Throws PreconditionError when none is present.
Pole pole_centroid(const EpochEmbedding& embedding, Area area, std::span<const VenueId> members);

// Poles from resolved labels; social-science venues never contribute.
Poles build_poles(const EpochEmbedding& embedding, const AreaMap& areas);

struct TernaryCoord {
    VenueId venue{};
    std::string epoch;
    double p = 0, l = 0, h = 0;
    bool degenerate = false;  // all proximities were <= 0; placed at the centre
};

// Clamps negative proximities to zero and rescales to sum to one.
TernaryCoord normalize_proximity(double physical, double life, double health);

// Cosines to the three poles, normalized. Throws NumericError for a zero
// venue vector or a degenerate pole.
TernaryCoord ternary_coords(const EpochEmbedding& embedding, VenueId venue, const Poles& poles);

struct Trajectory {
    VenueId venue{};
    std::vector<TernaryCoord> points;  // one per epoch containing the venue, in order
    std::vector<std::string> gaps;     // epochs missing between first and last appearance
};

// `poles` is indexed like `series`.
Trajectory trajectory(const EmbeddingSeries& series, VenueId venue, std::span<const Poles> poles);

using Point3 = std::array<double, 3>;

struct KMeansOptions {
    std::size_t k = 4;
    std::uint64_t seed = 1;
    std::size_t max_iter = 300;
    std::size_t restarts = 10;
};

struct KMeansResult {
    std::vector<int> assignment;
    std::vector<Point3> centroids;
    double inertia = 0;
    std::size_t iterations = 0;
    std::vector<double> inertia_trace;  // after each assignment step of the winning run
};

// Lloyd iterations from k-means++ seeds; best of `restarts` by inertia.
// Nearest-centroid ties go to the lowest cluster index; an emptied cluster
// keeps its previous centroid. Throws PreconditionError when k > points.
KMeansResult kmeans(std::span<const Point3> points, const KMeansOptions& options = {});

// Disjoint assignment of elements to cluster ids, stored in ascending element
// order.
class Clustering {
public:
    Clustering() = default;
    Clustering(std::span<const VenueId> elements, std::span<const int> clusters);
    explicit Clustering(const std::map<VenueId, int>& assignment);

    std::size_t size() const noexcept { return elements_.size(); }
    VenueId element(std::size_t i) const { return elements_[i]; }
    int cluster(std::size_t i) const { return clusters_[i]; }
    const std::vector<VenueId>& elements() const noexcept { return elements_; }
    const std::vector<int>& clusters() const noexcept { return clusters_; }

private:
    std::vector<VenueId> elements_;
    std::vector<int> clusters_;
};

// Most common reference area per cluster, ties by area order.
std::map<int, Area> label_clusters(const Clustering& clustering, const AreaMap& reference);

// Per-element similarity of two partitions of the same elements, from the
// closed-form personalized-PageRank affinities of the cluster-induced graphs:
// p_ij = alpha/|C(i)| + (1-alpha)[i=j] for j in C(i), else 0, and
// S_i = 1 - (1/(2 alpha)) sum_j |p1_ij - p2_ij|. Values follow the element order.
std::vector<double> element_centric_similarity(const Clustering& a, const Clustering& b, double alpha = 0.9);

// Throws PreconditionError for an empty input.
double mean_similarity(std::span<const double> scores);

// Cartesian position in an equilateral triangle with unit sides:
// physical (0,0), life (1,0), health (1/2, sqrt(3)/2).
std::array<double, 2> simplex_to_plane(double p, double l, double h);

// sum w_i z_i / sum w_i with w_i = d_i^-power; distances below 1e-12 count as
// exact hits and return the mean of the coincident values.
double inverse_distance_weight(std::span<const double> distances, std::span<const double> values,
                               double power = 2.0);

struct IdwSample {
    double p = 0, l = 0, h = 0;
    double value = 0;
};

struct GridPoint {
    double p = 0, l = 0, h = 0;
    double value = 0;
};

struct HeatmapGrid {
    std::size_t resolution = 0;
    double power = 2.0;
    std::vector<GridPoint> points;  // (i, j) lattice with i + j <= resolution
};

// Interpolates on the barycentric lattice {(i, j, r-i-j) / r}. Throws
// PreconditionError without samples.
HeatmapGrid idw_grid(std::span<const IdwSample> samples, std::size_t resolution = 100, double power = 2.0);

}  // namespace diachron
