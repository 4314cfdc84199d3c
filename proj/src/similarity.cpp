#include "diachron/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diachron/errors.hpp"

namespace diachron {

namespace {

template <class T>
double dot(std::span<const T> u, std::span<const T> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += static_cast<double>(u[i]) * static_cast<double>(v[i]);
    return s;
}

template <class T>
double cosine_impl(std::span<const T> u, std::span<const T> v) {
    if (u.size() != v.size()) throw PreconditionError("cosine of vectors with different dimensions");
    const double uu = dot(u, u);
    const double vv = dot(v, v);
    if (uu == 0.0 || vv == 0.0) throw NumericError("cosine of a zero vector");
    // One square root keeps cos(u, u) exactly 1.
    return dot(u, v) / std::sqrt(uu * vv);
}

// Descending similarity, ascending id on ties.
bool ranks_before(const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.venue < b.venue;
}

}  // namespace

double cosine(std::span<const float> u, std::span<const float> v) { return cosine_impl(u, v); }
double cosine(std::span<const double> u, std::span<const double> v) { return cosine_impl(u, v); }

NeighborList knn(const EpochEmbedding& embedding, VenueId venue, std::size_t k) {
    const std::size_t q = embedding.require_index(venue);
    if (k >= embedding.size())
        throw PreconditionError("k=" + std::to_string(k) + " must be smaller than the vocabulary size " +
                                std::to_string(embedding.size()));
    NeighborList out{venue, {}};
    if (k == 0) return out;

    const double nq = embedding.norm(q);
    if (nq == 0.0) throw NumericError("query venue " + std::to_string(raw(venue)) + " has a zero vector");
    const auto qv = embedding.row(q);

    std::vector<Neighbor> all;
    all.reserve(embedding.size() - 1);
    for (std::size_t i = 0; i < embedding.size(); ++i) {
        if (i == q) continue;
        const double ni = embedding.norm(i);
        if (ni == 0.0)
            throw NumericError("venue " + std::to_string(raw(embedding.ids()[i])) + " has a zero vector");
        all.push_back({embedding.ids()[i], dot(qv, embedding.row(i)) / (nq * ni)});
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), ranks_before);
    all.resize(k);
    out.neighbors = std::move(all);
    return out;
}

RelativeSimilarity relative_similarity(const EpochEmbedding& embedding, VenueId venue,
                                       std::span<const VenueId> field) {
    const std::size_t q = embedding.require_index(venue);
    const auto qv = embedding.row(q);

    std::vector<double> sims(embedding.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < embedding.size(); ++i) {
        if (i == q) continue;
        sims[i] = cosine(qv, embedding.row(i));
        total += sims[i];
    }

    RelativeSimilarity r;
    double field_total = 0.0;
    std::vector<std::size_t> members;
    for (VenueId f : field) {
        auto i = embedding.index_of(f);
        if (i && *i != q) members.push_back(*i);
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.empty()) throw PreconditionError("field has no members besides the venue itself");
    for (std::size_t i : members) field_total += sims[i];

    r.field_size = members.size();
    r.field_mean = field_total / static_cast<double>(members.size());
    r.overall_mean = embedding.size() > 1 ? total / static_cast<double>(embedding.size() - 1) : 0.0;
    if (r.overall_mean <= 0.0) {
        r.degenerate = true;
        return r;
    }
    r.ratio = r.field_mean / r.overall_mean;
    return r;
}

double kendall_tau(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw PreconditionError("kendall_tau: length mismatch");
    if (xs.size() < 2) throw PreconditionError("kendall_tau: need at least 2 observations");
    // Quadratic pair scan; inputs here are at most a few thousand venues.
    double concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            const double dx = xs[i] - xs[j];
            const double dy = ys[i] - ys[j];
            if (dx == 0 && dy == 0) continue;
            if (dx == 0) {
                ++ties_x;
            } else if (dy == 0) {
                ++ties_y;
            } else if ((dx > 0) == (dy > 0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double denom = std::sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y));
    if (denom == 0.0) return 0.0;
    return (concordant - discordant) / denom;
}

double linear_fit_r2(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw PreconditionError("linear_fit_r2: length mismatch");
    if (xs.size() < 3) throw PreconditionError("linear_fit_r2: need at least 3 points");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw PreconditionError("linear_fit_r2: xs are all equal");
    if (syy == 0.0) return 0.0;
    return (sxy * sxy) / (sxx * syy);
}

}  // namespace diachron
