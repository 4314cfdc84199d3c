#pragma once
// Per-epoch venue embeddings, their word2vec text serialization, and ordered
// series of them.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "diachron/types.hpp"

namespace diachron {

// Vocabulary plus a row-major |V| x D matrix of input vectors. Immutable once
// constructed; row norms are cached for the similarity routines.
class EpochEmbedding {
public:
    EpochEmbedding() = default;
    // Throws PreconditionError on shape mismatch or duplicate ids and
    // NumericError on a non-finite entry.
    EpochEmbedding(std::string label, std::vector<VenueId> ids, std::size_t dim, std::vector<float> vectors);

    const std::string& label() const noexcept { return label_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<VenueId>& ids() const noexcept { return ids_; }
    const std::vector<float>& data() const noexcept { return vectors_; }

    bool contains(VenueId v) const { return index_.contains(v); }
    std::optional<std::size_t> index_of(VenueId v) const;
    // Throws PreconditionError for a venue outside the vocabulary.
    std::size_t require_index(VenueId v) const;

    std::span<const float> row(std::size_t i) const { return {vectors_.data() + i * dim_, dim_}; }
    std::span<const float> vector(VenueId v) const { return row(require_index(v)); }
    // Euclidean norm of row i, accumulated in double.
    double norm(std::size_t i) const { return norms_[i]; }

    EpochEmbedding with_label(std::string label) const;

private:
    std::string label_;
    std::vector<VenueId> ids_;
    std::size_t dim_ = 0;
    std::vector<float> vectors_;
    std::vector<double> norms_;
    std::unordered_map<VenueId, std::size_t> index_;
};

// word2vec text format: "<vocab> <dim>" then "<venue_id> <f1> ... <fD>" per
// row, six significant digits.
void write_word2vec(const EpochEmbedding& embedding, const std::string& path);
EpochEmbedding read_word2vec(const std::string& path, std::string label = {});

// Epoch-ordered family of embeddings. Order is insertion order, which callers
// keep chronological; labels must be unique.
class EmbeddingSeries {
public:
    void push_back(EpochEmbedding embedding);

    std::size_t size() const noexcept { return epochs_.size(); }
    bool empty() const noexcept { return epochs_.empty(); }
    const EpochEmbedding& operator[](std::size_t i) const { return epochs_[i]; }
    const EpochEmbedding& back() const { return epochs_.back(); }
    std::optional<std::size_t> find(const std::string& label) const;

    auto begin() const { return epochs_.begin(); }
    auto end() const { return epochs_.end(); }

private:
    std::vector<EpochEmbedding> epochs_;
};

struct SeriesEntry {
    std::string label;
    std::string path;
};

// series.tsv: "epoch_label\tpath"; relative paths resolve against the
// manifest's directory.
void write_series_manifest(std::span<const SeriesEntry> entries, const std::string& path);
std::vector<SeriesEntry> read_series_manifest(const std::string& path);
EmbeddingSeries load_series(const std::string& manifest_path);

}  // namespace diachron
