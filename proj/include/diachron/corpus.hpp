#pragma once
// Paper, citation and venue tables, and the per-epoch citation graph built from them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "diachron/types.hpp"

namespace diachron {

struct PaperRecord {
    PaperId paper_id{};
    VenueId venue_id{};
    int year = 0;

    bool operator==(const PaperRecord&) const = default;
};

struct VenueRecord {
    VenueId venue_id{};
    std::string name;
    AreaSet areas;
    std::vector<std::string> title_tokens;

    bool operator==(const VenueRecord&) const = default;
};

struct Citation {
    PaperId citing{};
    PaperId cited{};

    bool operator==(const Citation&) const = default;
};

class PaperTable {
public:
    PaperTable() = default;
    // Throws IntegrityError on a duplicate paper_id or out-of-range year.
    explicit PaperTable(std::vector<PaperRecord> rows);

    const std::vector<PaperRecord>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }
    const PaperRecord* find(PaperId id) const;

    bool operator==(const PaperTable& other) const { return rows_ == other.rows_; }

private:
    std::vector<PaperRecord> rows_;
    std::unordered_map<PaperId, std::size_t> index_;
};

struct EdgeTable {
    std::vector<Citation> edges;  // first-occurrence order
    std::size_t duplicate_count = 0;
    std::size_t selfloop_count = 0;

    bool operator==(const EdgeTable&) const = default;
};

class VenueTable {
public:
    VenueTable() = default;
    explicit VenueTable(std::vector<VenueRecord> rows);

    const std::vector<VenueRecord>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }
    const VenueRecord* find(VenueId id) const;

    bool operator==(const VenueTable& other) const { return rows_ == other.rows_; }

private:
    std::vector<VenueRecord> rows_;
    std::unordered_map<VenueId, std::size_t> index_;
};

PaperTable load_paper_table(const std::string& path);
EdgeTable load_edge_table(const std::string& path);
VenueTable load_venue_table(const std::string& path);

// Deduplicates and drops self-citations, counting both.
EdgeTable normalize_edges(std::span<const Citation> raw);

struct GraphStats {
    std::size_t cross_epoch_edges = 0;     // one endpoint outside the epoch
    std::size_t unknown_paper_edges = 0;   // an endpoint missing from the paper table
};

// Immutable within-epoch citation graph in compressed sparse row form. Node
// indices are dense and ordered by ascending paper id.
class EpochGraph {
public:
    using Node = std::uint32_t;

    const EpochSpec& epoch() const noexcept { return epoch_; }
    std::size_t node_count() const noexcept { return papers_.size(); }
    std::size_t edge_count() const noexcept { return targets_.size(); }

    PaperId paper(Node n) const { return papers_[n]; }
    VenueId venue(Node n) const { return venues_[n]; }
    std::span<const Node> out_neighbors(Node n) const {
        return {targets_.data() + offsets_[n], targets_.data() + offsets_[n + 1]};
    }
    std::size_t out_degree(Node n) const { return offsets_[n + 1] - offsets_[n]; }

    std::optional<Node> index_of(PaperId id) const;
    // Throws IntegrityError for a paper outside the graph.
    VenueId venue_of(PaperId id) const;

    const GraphStats& stats() const noexcept { return stats_; }

private:
    friend EpochGraph build_epoch_graph(const PaperTable&, const EdgeTable&, const VenueTable&,
                                        const EpochSpec&);

    EpochSpec epoch_;
    std::vector<PaperId> papers_;
    std::vector<VenueId> venues_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Node> targets_;
    std::unordered_map<PaperId, Node> index_;
    GraphStats stats_;
};

// Keeps exactly the papers published inside the epoch and the citations whose
// two endpoints both are. Throws IntegrityError if a kept paper's venue is
// missing from the venue table.
EpochGraph build_epoch_graph(const PaperTable& papers, const EdgeTable& edges, const VenueTable& venues,
                             const EpochSpec& epoch);

// Parses "1980s:1980-1989,1990s:1990-1999"; checks bounds, disjointness and order.
std::vector<EpochSpec> parse_epochs(const std::string& text);
std::string format_epochs(std::span<const EpochSpec> epochs);

}  // namespace diachron
