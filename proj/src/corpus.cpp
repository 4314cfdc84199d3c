#include "diachron/corpus.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "diachron/errors.hpp"
#include "diachron/text.hpp"
#include "tsv.hpp"

namespace diachron {

namespace {

constexpr int kMinYear = 1000;
constexpr int kMaxYear = 2100;

struct CitationHash {
    std::size_t operator()(const Citation& c) const noexcept {
        std::uint64_t h = raw(c.citing) * 0x9E3779B97F4A7C15ull;
        h ^= raw(c.cited) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

PaperTable::PaperTable(std::vector<PaperRecord> rows) : rows_(std::move(rows)) {
    index_.reserve(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (r.year < kMinYear || r.year > kMaxYear)
            throw IntegrityError("paper " + std::to_string(raw(r.paper_id)) + " has out-of-range year " +
                                 std::to_string(r.year));
        if (!index_.emplace(r.paper_id, i).second)
            throw IntegrityError("duplicate paper_id " + std::to_string(raw(r.paper_id)));
    }
}

const PaperRecord* PaperTable::find(PaperId id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &rows_[it->second];
}

VenueTable::VenueTable(std::vector<VenueRecord> rows) : rows_(std::move(rows)) {
    index_.reserve(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (!index_.emplace(rows_[i].venue_id, i).second)
            throw IntegrityError("duplicate venue_id " + std::to_string(raw(rows_[i].venue_id)));
    }
}

const VenueRecord* VenueTable::find(VenueId id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &rows_[it->second];
}

PaperTable load_paper_table(const std::string& path) {
    detail::TsvReader reader(path, "paper_id\tvenue_id\tyear");
    std::vector<PaperRecord> rows;
    std::unordered_map<PaperId, std::size_t> first_line;
    std::vector<std::string_view> f;
    while (reader.next(f)) {
        if (f.size() != 3) reader.fail("expected 3 fields, got " + std::to_string(f.size()));
        auto pid = detail::parse_int<std::uint64_t>(f[0]);
        auto vid = detail::parse_int<std::uint64_t>(f[1]);
        auto year = detail::parse_int<int>(f[2]);
        if (!pid) reader.fail("bad paper_id '" + std::string(f[0]) + "'");
        if (!vid) reader.fail("bad venue_id '" + std::string(f[1]) + "'");
        if (!year) reader.fail("bad year '" + std::string(f[2]) + "'");
        if (*year < kMinYear || *year > kMaxYear) reader.fail("year " + std::to_string(*year) + " out of range");
        auto [it, fresh] = first_line.emplace(PaperId{*pid}, reader.line());
        if (!fresh)
            throw IntegrityError(path + ": duplicate paper_id " + std::to_string(*pid) + " (lines " +
                                 std::to_string(it->second) + " and " + std::to_string(reader.line()) + ")");
        rows.push_back({PaperId{*pid}, VenueId{*vid}, *year});
    }
    return PaperTable(std::move(rows));
}

EdgeTable normalize_edges(std::span<const Citation> raw_edges) {
    EdgeTable out;
    std::unordered_set<Citation, CitationHash> seen;
    seen.reserve(raw_edges.size());
    for (const auto& c : raw_edges) {
        if (c.citing == c.cited) {
            ++out.selfloop_count;
            continue;
        }
        if (!seen.insert(c).second) {
            ++out.duplicate_count;
            continue;
        }
        out.edges.push_back(c);
    }
    return out;
}

EdgeTable load_edge_table(const std::string& path) {
    detail::TsvReader reader(path, "citing_id\tcited_id");
    std::vector<Citation> raw_edges;
    std::vector<std::string_view> f;
    while (reader.next(f)) {
        if (f.size() != 2) reader.fail("expected 2 fields, got " + std::to_string(f.size()));
        auto a = detail::parse_int<std::uint64_t>(f[0]);
        auto b = detail::parse_int<std::uint64_t>(f[1]);
        if (!a) reader.fail("bad citing_id '" + std::string(f[0]) + "'");
        if (!b) reader.fail("bad cited_id '" + std::string(f[1]) + "'");
        raw_edges.push_back({PaperId{*a}, PaperId{*b}});
    }
    return normalize_edges(raw_edges);
}

VenueTable load_venue_table(const std::string& path) {
    detail::TsvReader reader(path, "venue_id\tname\tareas");
    std::vector<VenueRecord> rows;
    std::vector<std::string_view> f;
    while (reader.next(f)) {
        // A trailing empty areas column may have been stripped by an editor.
        if (f.size() == 2) f.emplace_back();
        if (f.size() != 3) reader.fail("expected 3 fields, got " + std::to_string(f.size()));
        auto vid = detail::parse_int<std::uint64_t>(f[0]);
        if (!vid) reader.fail("bad venue_id '" + std::string(f[0]) + "'");
        VenueRecord rec;
        rec.venue_id = VenueId{*vid};
        rec.name = std::string(f[1]);
        try {
            rec.areas = AreaSet::parse(f[2]);
        } catch (const PreconditionError& e) {
            reader.fail(e.what());
        }
        rec.title_tokens = tokenize_title(rec.name);
        rows.push_back(std::move(rec));
    }
    try {
        return VenueTable(std::move(rows));
    } catch (const IntegrityError& e) {
        throw IntegrityError(path + ": " + e.what());
    }
}

std::optional<EpochGraph::Node> EpochGraph::index_of(PaperId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

VenueId EpochGraph::venue_of(PaperId id) const {
    auto n = index_of(id);
    if (!n) throw IntegrityError("paper " + std::to_string(raw(id)) + " is not in epoch " + epoch_.label);
    return venues_[*n];
}

EpochGraph build_epoch_graph(const PaperTable& papers, const EdgeTable& edges, const VenueTable& venues,
                             const EpochSpec& epoch) {
    EpochGraph g;
    g.epoch_ = epoch;

    std::vector<const PaperRecord*> members;
    for (const auto& p : papers.rows())
        if (epoch.contains(p.year)) members.push_back(&p);
    std::sort(members.begin(), members.end(),
              [](const PaperRecord* a, const PaperRecord* b) { return a->paper_id < b->paper_id; });

    g.papers_.reserve(members.size());
    g.venues_.reserve(members.size());
    g.index_.reserve(members.size());
    for (const PaperRecord* p : members) {
        if (!venues.find(p->venue_id))
            throw IntegrityError("paper " + std::to_string(raw(p->paper_id)) + " references unknown venue " +
                                 std::to_string(raw(p->venue_id)));
        g.index_.emplace(p->paper_id, static_cast<EpochGraph::Node>(g.papers_.size()));
        g.papers_.push_back(p->paper_id);
        g.venues_.push_back(p->venue_id);
    }

    // Counting sort by source keeps each node's targets in input order.
    std::vector<std::pair<EpochGraph::Node, EpochGraph::Node>> kept;
    for (const auto& e : edges.edges) {
        auto s = g.index_of(e.citing);
        auto t = g.index_of(e.cited);
        if (s && t) {
            kept.emplace_back(*s, *t);
            continue;
        }
        if (!papers.find(e.citing) || !papers.find(e.cited))
            ++g.stats_.unknown_paper_edges;
        else if (s || t)
            ++g.stats_.cross_epoch_edges;
    }
    g.offsets_.assign(g.papers_.size() + 1, 0);
    for (const auto& [s, t] : kept) ++g.offsets_[s + 1];
    for (std::size_t i = 1; i < g.offsets_.size(); ++i) g.offsets_[i] += g.offsets_[i - 1];
    g.targets_.resize(kept.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [s, t] : kept) g.targets_[cursor[s]++] = t;
    return g;
}

std::vector<EpochSpec> parse_epochs(const std::string& text) {
    std::vector<EpochSpec> out;
    for (auto item : detail::split(text, ',')) {
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (item.empty()) continue;
        auto colon = item.find(':');
        auto dash = item.find('-', colon == std::string_view::npos ? 0 : colon);
        if (colon == std::string_view::npos || dash == std::string_view::npos || colon == 0)
            throw PreconditionError("bad epoch '" + std::string(item) + "', expected label:start-end");
        auto start = detail::parse_int<int>(item.substr(colon + 1, dash - colon - 1));
        auto end = detail::parse_int<int>(item.substr(dash + 1));
        if (!start || !end) throw PreconditionError("bad epoch years in '" + std::string(item) + "'");
        if (*start > *end) throw PreconditionError("epoch '" + std::string(item) + "' has start after end");
        if (!out.empty() && out.back().end_year >= *start)
            throw PreconditionError("epochs must be disjoint and in increasing order");
        for (const auto& e : out)
            if (e.label == item.substr(0, colon)) throw PreconditionError("duplicate epoch label");
        out.push_back({std::string(item.substr(0, colon)), *start, *end});
    }
    if (out.empty()) throw PreconditionError("no epochs defined");
    return out;
}

std::string format_epochs(std::span<const EpochSpec> epochs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        if (i) os << ',';
        os << epochs[i].label << ':' << epochs[i].start_year << '-' << epochs[i].end_year;
    }
    return os.str();
}

}  // namespace diachron
