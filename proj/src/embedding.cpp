#include "diachron/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "diachron/errors.hpp"
#include "tsv.hpp"

namespace diachron {

EpochEmbedding::EpochEmbedding(std::string label, std::vector<VenueId> ids, std::size_t dim,
                               std::vector<float> vectors)
    : label_(std::move(label)), ids_(std::move(ids)), dim_(dim), vectors_(std::move(vectors)) {
    if (dim_ == 0 && !ids_.empty()) throw PreconditionError("embedding dimension must be positive");
    if (vectors_.size() != ids_.size() * dim_)
        throw PreconditionError("embedding matrix has " + std::to_string(vectors_.size()) + " entries, expected " +
                                std::to_string(ids_.size() * dim_));
    index_.reserve(ids_.size());
    norms_.resize(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!index_.emplace(ids_[i], i).second)
            throw PreconditionError("duplicate venue " + std::to_string(raw(ids_[i])) + " in embedding");
        double ss = 0.0;
        for (float x : row(i)) {
            if (!std::isfinite(x))
                throw NumericError("non-finite entry for venue " + std::to_string(raw(ids_[i])) + " in embedding '" +
                                   label_ + "'");
            ss += static_cast<double>(x) * static_cast<double>(x);
        }
        norms_[i] = std::sqrt(ss);
    }
}

std::optional<std::size_t> EpochEmbedding::index_of(VenueId v) const {
    auto it = index_.find(v);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t EpochEmbedding::require_index(VenueId v) const {
    auto i = index_of(v);
    if (!i) throw PreconditionError("venue " + std::to_string(raw(v)) + " is not in embedding '" + label_ + "'");
    return *i;
}

EpochEmbedding EpochEmbedding::with_label(std::string label) const {
    EpochEmbedding copy = *this;
    copy.label_ = std::move(label);
    return copy;
}

void write_word2vec(const EpochEmbedding& embedding, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IntegrityError("cannot write " + path);
    out << embedding.size() << ' ' << embedding.dim() << '\n';
    std::string line;
    char buf[32];
    for (std::size_t i = 0; i < embedding.size(); ++i) {
        line = std::to_string(raw(embedding.ids()[i]));
        for (float x : embedding.row(i)) {
            std::snprintf(buf, sizeof buf, " %.6g", static_cast<double>(x));
            line += buf;
        }
        line += '\n';
        out << line;
    }
    if (!out) throw IntegrityError("write failed for " + path);
}

EpochEmbedding read_word2vec(const std::string& path, std::string label) {
    std::ifstream in(path);
    if (!in) throw IntegrityError("cannot open embedding " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path, 1, "missing header");
    auto head = detail::split(line, ' ');
    if (head.size() != 2) throw ParseError(path, 1, "header must be '<vocab_size> <dim>'");
    auto n = detail::parse_int<std::size_t>(head[0]);
    auto dim = detail::parse_int<std::size_t>(head[1]);
    if (!n || !dim) throw ParseError(path, 1, "header must be '<vocab_size> <dim>'");

    std::vector<VenueId> ids;
    std::vector<float> vecs;
    ids.reserve(*n);
    vecs.reserve(*n * *dim);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = detail::split(line, ' ');
        while (!f.empty() && f.back().empty()) f.pop_back();
        if (f.size() != *dim + 1)
            throw ParseError(path, line_no, "expected " + std::to_string(*dim + 1) + " fields");
        auto id = detail::parse_int<std::uint64_t>(f[0]);
        if (!id) throw ParseError(path, line_no, "bad venue id '" + std::string(f[0]) + "'");
        ids.push_back(VenueId{*id});
        for (std::size_t j = 1; j < f.size(); ++j) {
            auto x = detail::parse_double(f[j]);
            if (!x) throw ParseError(path, line_no, "bad number '" + std::string(f[j]) + "'");
            vecs.push_back(static_cast<float>(*x));
        }
    }
    if (ids.size() != *n)
        throw ParseError(path, line_no,
                         "header promises " + std::to_string(*n) + " rows, found " + std::to_string(ids.size()));
    if (label.empty()) label = std::filesystem::path(path).stem().string();
    return EpochEmbedding(std::move(label), std::move(ids), *dim, std::move(vecs));
}

void EmbeddingSeries::push_back(EpochEmbedding embedding) {
    if (find(embedding.label())) throw PreconditionError("duplicate epoch label '" + embedding.label() + "'");
    epochs_.push_back(std::move(embedding));
}

std::optional<std::size_t> EmbeddingSeries::find(const std::string& label) const {
    for (std::size_t i = 0; i < epochs_.size(); ++i)
        if (epochs_[i].label() == label) return i;
    return std::nullopt;
}

void write_series_manifest(std::span<const SeriesEntry> entries, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IntegrityError("cannot write " + path);
    out << "epoch_label\tpath\n";
    for (const auto& e : entries) out << e.label << '\t' << e.path << '\n';
}

std::vector<SeriesEntry> read_series_manifest(const std::string& path) {
    detail::TsvReader reader(path, "epoch_label\tpath");
    std::vector<SeriesEntry> out;
    std::vector<std::string_view> f;
    while (reader.next(f)) {
        if (f.size() != 2) reader.fail("expected 2 fields");
        out.push_back({std::string(f[0]), std::string(f[1])});
    }
    return out;
}

EmbeddingSeries load_series(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    const fs::path base = fs::path(manifest_path).parent_path();
    EmbeddingSeries series;
    for (const auto& e : read_series_manifest(manifest_path)) {
        fs::path p(e.path);
        if (p.is_relative()) p = base / p;
        series.push_back(read_word2vec(p.string(), e.label));
    }
    return series;
}

}  // namespace diachron
