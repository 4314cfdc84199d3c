#include "diachron/walk.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <thread>

#include "diachron/errors.hpp"
#include "rng.hpp"
#include "tsv.hpp"

namespace diachron {

namespace {

void walk_shard(const EpochGraph& graph, const WalkOptions& opt, std::size_t shard, std::vector<PaperTrail>& out) {
    const std::size_t n = graph.node_count();
    const std::size_t begin = shard * n / opt.shard_count;
    const std::size_t end = (shard + 1) * n / opt.shard_count;
    std::mt19937_64 rng(detail::stream_seed(opt.seed, shard));

    out.reserve((end - begin) * opt.starts_per_node);
    for (std::size_t start = begin; start < end; ++start) {
        for (std::size_t rep = 0; rep < opt.starts_per_node; ++rep) {
            PaperTrail trail;
            auto node = static_cast<EpochGraph::Node>(start);
            trail.push_back(graph.paper(node));
            while (trail.size() < opt.max_len) {
                auto next = graph.out_neighbors(node);
                if (next.empty()) break;
                std::uniform_int_distribution<std::size_t> pick(0, next.size() - 1);
                node = next[pick(rng)];
                trail.push_back(graph.paper(node));
            }
            out.push_back(std::move(trail));
        }
    }
}

}  // namespace

std::vector<PaperTrail> walk_epoch(const EpochGraph& graph, const WalkOptions& options) {
    if (options.max_len < 1) throw PreconditionError("max_len must be at least 1");
    if (options.shard_count < 1) throw PreconditionError("shard_count must be at least 1");

    std::vector<std::vector<PaperTrail>> shards(options.shard_count);
    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, options.shard_count));
    if (workers == 1) {
        for (std::size_t s = 0; s < shards.size(); ++s) walk_shard(graph, options, s, shards[s]);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t s = w; s < shards.size(); s += workers) walk_shard(graph, options, s, shards[s]);
            });
        }
    }

    std::vector<PaperTrail> out;
    out.reserve(graph.node_count() * options.starts_per_node);
    for (auto& shard : shards)
        for (auto& t : shard) out.push_back(std::move(t));
    return out;
}

std::vector<VenueTrail> to_venue_trails(std::span<const PaperTrail> trails, const EpochGraph& graph) {
    std::vector<VenueTrail> out;
    out.reserve(trails.size());
    for (const auto& t : trails) {
        VenueTrail v;
        v.reserve(t.size());
        for (PaperId p : t) v.push_back(graph.venue_of(p));
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<VenueTrail> to_venue_trails(std::span<const PaperTrail> trails,
                                        const std::unordered_map<PaperId, VenueId>& venue_of) {
    std::vector<VenueTrail> out;
    out.reserve(trails.size());
    for (const auto& t : trails) {
        VenueTrail v;
        v.reserve(t.size());
        for (PaperId p : t) {
            auto it = venue_of.find(p);
            if (it == venue_of.end()) throw IntegrityError("paper " + std::to_string(raw(p)) + " has no venue");
            v.push_back(it->second);
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::size_t TrailCorpus::token_total() const {
    std::size_t n = 0;
    for (const auto& t : trails) n += t.size();
    return n;
}

bool is_informative(const VenueTrail& trail) {
    if (trail.size() < 2) return false;
    return std::any_of(trail.begin() + 1, trail.end(), [&](VenueId v) { return v != trail.front(); });
}

std::map<VenueId, std::size_t> count_tokens(std::span<const VenueTrail> trails) {
    std::map<VenueId, std::size_t> counts;
    for (const auto& t : trails)
        for (VenueId v : t) ++counts[v];
    return counts;
}

TrailCorpus filter_and_prune(std::vector<VenueTrail> raw_trails, std::size_t min_count, EpochSpec epoch) {
    std::erase_if(raw_trails, [](const VenueTrail& t) { return !is_informative(t); });
    auto counts = count_tokens(raw_trails);

    // Removing a venue can shorten trails into uninformative ones, which in
    // turn lowers other venues' counts; iterate until stable.
    for (;;) {
        bool pruned = false;
        for (auto& t : raw_trails) {
            auto rare = [&](VenueId v) { return counts.at(v) < min_count; };
            if (std::any_of(t.begin(), t.end(), rare)) {
                std::erase_if(t, rare);
                pruned = true;
            }
        }
        if (!pruned) break;
        std::erase_if(raw_trails, [](const VenueTrail& t) { return !is_informative(t); });
        counts = count_tokens(raw_trails);
    }

    if (raw_trails.empty())
        throw EmptyCorpusError("corpus for epoch '" + epoch.label + "' is empty after filtering (min_count=" +
                               std::to_string(min_count) + ")");
    return TrailCorpus{std::move(epoch), std::move(raw_trails), std::move(counts)};
}

void write_corpus(const TrailCorpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IntegrityError("cannot write " + path);
    std::string line;
    for (const auto& t : corpus.trails) {
        line.clear();
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i) line += ' ';
            line += std::to_string(raw(t[i]));
        }
        line += '\n';
        out << line;
    }
    if (!out) throw IntegrityError("write failed for " + path);
}

TrailCorpus read_corpus(const std::string& path, EpochSpec epoch) {
    std::ifstream in(path);
    if (!in) throw IntegrityError("cannot open corpus " + path);
    TrailCorpus corpus;
    corpus.epoch = std::move(epoch);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        VenueTrail t;
        for (auto tok : detail::split(line, ' ')) {
            if (tok.empty()) continue;
            auto v = detail::parse_int<std::uint64_t>(tok);
            if (!v) throw ParseError(path, line_no, "bad venue id '" + std::string(tok) + "'");
            t.push_back(VenueId{*v});
        }
        corpus.trails.push_back(std::move(t));
    }
    corpus.token_counts = count_tokens(corpus.trails);
    return corpus;
}

void write_corpus_stats(std::span<const CorpusStats> stats, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IntegrityError("cannot write " + path);
    out << "epoch\traw_trails\ttrails\ttokens\tvocabulary\n";
    for (const auto& s : stats)
        out << s.epoch << '\t' << s.raw_trails << '\t' << s.trails << '\t' << s.tokens << '\t' << s.vocabulary
            << '\n';
}

}  // namespace diachron
