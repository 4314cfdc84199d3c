#pragma once
// Per-venue semantic change between epochs: the neighbourhood-profile metric
// and the rotation-aligned metric.

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "diachron/embedding.hpp"
#include "diachron/types.hpp"

namespace diachron {

enum class ChangeMethod { Local, Aligned };

const char* to_string(ChangeMethod m) noexcept;

struct ChangeScore {
    VenueId venue{};
    std::string t1;
    std::string t2;
    ChangeMethod method = ChangeMethod::Local;
    double d = 0.0;  // cosine distance, in [0, 2]
};

// Builds the union of the venue's k nearest neighbours in both epochs (ordered
// by venue id), drops members missing from either epoch, and returns the
// cosine distance between the venue's similarity profiles over that union.
// Throws PreconditionError if the venue is missing or an epoch has <= k venues,
// NumericError if fewer than two members survive or a profile is all zero.
ChangeScore local_change(const EpochEmbedding& t1, const EpochEmbedding& t2, VenueId venue, std::size_t k = 10);

enum class GapPolicy {
    Report,  // skip consecutive pairs missing the venue and count them
    Error,   // any skipped pair is an error
};

struct TotalChange {
    VenueId venue{};
    std::string first_epoch;
    std::size_t pairs = 0;    // consecutive pairs that contributed
    std::size_t skipped = 0;  // consecutive pairs after first appearance missing the venue
    double total = 0.0;
};

// Sum of local_change over consecutive epoch pairs that both contain the
// venue. Requires the venue in at least two epochs.
TotalChange total_local_change(const EmbeddingSeries& series, VenueId venue, std::size_t k = 10,
                               GapPolicy policy = GapPolicy::Report);

struct RotationMatrix {
    Eigen::MatrixXd matrix;  // D x D, maps source-epoch vectors into the target space
    std::string source;
    std::string target;
    std::vector<VenueId> shared;
    bool rank_deficient = false;  // optimum not unique
    bool underdetermined = false; // fewer shared venues than dimensions
};

// Venues present in both embeddings, ascending.
std::vector<VenueId> shared_vocabulary(const EpochEmbedding& a, const EpochEmbedding& b);

// Orthogonal R minimising ||R * source - target||_F where both matrices hold
// one venue per column: R = U W^T for target * source^T = U S W^T.
// `rank_deficient` (optional) reports singular values below 1e-12 * max.
Eigen::MatrixXd procrustes(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target,
                           bool* rank_deficient = nullptr);

// Columns of the returned D x n matrix are the venues' vectors, in order.
Eigen::MatrixXd stack_columns(const EpochEmbedding& embedding, std::span<const VenueId> venues);

// Procrustes over the given shared venues (all of them if empty). Throws
// PreconditionError when no venue is shared.
RotationMatrix procrustes_rotation(const EpochEmbedding& t1, const EpochEmbedding& t2,
                                   std::span<const VenueId> shared = {});

// 1 - cos(v_t2, R v_t1).
ChangeScore aligned_change(const EpochEmbedding& t1, const EpochEmbedding& t2, const RotationMatrix& rotation,
                           VenueId venue);

struct FieldSizeRow {
    std::string field;
    std::size_t venues = 0;
    double mean_d = 0.0;
};

struct FieldSizeReport {
    std::vector<FieldSizeRow> rows;  // ordered by field name
    double correlation = 0.0;        // Kendall tau-b of venue count vs mean d
};

// Throws PreconditionError with fewer than two non-empty fields.
FieldSizeReport field_size_effect(const std::map<std::string, std::vector<double>>& scores_by_field);

}  // namespace diachron
