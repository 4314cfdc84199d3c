#include "diachron/emergence.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "diachron/errors.hpp"
#include "diachron/similarity.hpp"

namespace diachron {

double kth_nn_distance(const EpochEmbedding& embedding, VenueId venue, std::size_t k) {
    if (k == 0) throw PreconditionError("kth_nn_distance: k must be positive");
    const auto list = knn(embedding, venue, k);
    return std::clamp(1.0 - list.neighbors.back().similarity, 0.0, 2.0);
}

DeltaD delta_d(const EmbeddingSeries& series, VenueId venue, std::size_t k) {
    if (series.empty()) throw PreconditionError("delta_d: empty series");
    if (!series.back().contains(venue))
        throw PreconditionError("venue " + std::to_string(raw(venue)) + " is absent from the final epoch '" +
                                series.back().label() + "'");
    std::size_t est = 0;
    while (!series[est].contains(venue)) ++est;

    DeltaD out;
    out.venue = venue;
    out.t_est = series[est].label();
    out.t_last = series.back().label();
    out.k = k;
    out.d_first = kth_nn_distance(series[est], venue, k);
    out.d_last = kth_nn_distance(series.back(), venue, k);
    out.delta = out.d_first - out.d_last;
    return out;
}

DeltaDTable delta_d_table(const EmbeddingSeries& series, std::size_t k) {
    DeltaDTable table;
    std::set<VenueId> all;
    for (const auto& e : series) all.insert(e.ids().begin(), e.ids().end());
    for (VenueId v : all) {
        if (!series.back().contains(v)) {
            table.unscored.emplace(v, "absent from final epoch");
            continue;
        }
        if (series.size() < 2 || std::none_of(series.begin(), series.end() - 1,
                                              [&](const EpochEmbedding& e) { return e.contains(v); })) {
            table.unscored.emplace(v, "established in final epoch");
            continue;
        }
        table.scored.push_back(delta_d(series, v, k));
    }
    return table;
}

std::vector<TermScore> fightin_words(const TermCounts& a, const TermCounts& b, double prior_scale) {
    if (!(prior_scale > 0)) throw PreconditionError("fightin_words: prior_scale must be positive");
    double na = 0, nb = 0;
    for (const auto& [w, c] : a) na += static_cast<double>(c);
    for (const auto& [w, c] : b) nb += static_cast<double>(c);
    if (na == 0 || nb == 0) throw PreconditionError("fightin_words: both corpora must be non-empty");

    std::set<std::string> vocab;
    for (const auto& [w, c] : a) vocab.insert(w);
    for (const auto& [w, c] : b) vocab.insert(w);

    const double a0 = prior_scale;
    const double pooled = na + nb;
    std::vector<TermScore> out;
    for (const auto& w : vocab) {
        auto ia = a.find(w);
        auto ib = b.find(w);
        const std::size_t ca = ia == a.end() ? 0 : ia->second;
        const std::size_t cb = ib == b.end() ? 0 : ib->second;
        const double ya = static_cast<double>(ca);
        const double yb = static_cast<double>(cb);
        const double aw = prior_scale * static_cast<double>(ca + cb) / pooled;
        if (!(aw > 0)) continue;  // a token with zero pooled count cannot be listed
        const double delta = std::log((ya + aw) / (na + a0 - ya - aw)) - std::log((yb + aw) / (nb + a0 - yb - aw));
        const double var = 1.0 / (ya + aw) + 1.0 / (yb + aw);
        out.push_back({w, delta / std::sqrt(var), delta, ca, cb});
    }
    std::sort(out.begin(), out.end(), [](const TermScore& x, const TermScore& y) {
        if (x.z != y.z) return x.z > y.z;
        return x.token < y.token;
    });
    return out;
}

EmergentTerms emergent_terms_for_group(std::span<const DeltaD> group, const TitleTokens& titles, double top_frac,
                                       double prior_scale, std::size_t min_group) {
    if (!(top_frac > 0 && top_frac < 1)) throw PreconditionError("top_frac must be in (0,1)");
    if (group.size() < min_group)
        throw PreconditionError("group has " + std::to_string(group.size()) + " venues, need " +
                                std::to_string(min_group));
    EmergentTerms out;
    out.epoch = group.front().t_est;

    std::vector<double> deltas;
    for (const auto& d : group) deltas.push_back(d.delta);
    std::sort(deltas.begin(), deltas.end());
    const double n = static_cast<double>(deltas.size());
    // Lower (1 - top_frac) quantile; the epsilon guards 0.9 * 10 landing just above 9.
    auto idx = static_cast<std::size_t>(std::ceil((1.0 - top_frac) * n - 1e-9));
    idx = std::clamp<std::size_t>(idx, 1, deltas.size()) - 1;
    out.threshold = deltas[idx];

    TermCounts top_counts, rest_counts;
    for (const auto& d : group) {
        const bool is_top = d.delta > out.threshold;
        (is_top ? out.top : out.rest).push_back(d.venue);
        auto it = titles.find(d.venue);
        if (it == titles.end()) continue;
        for (const auto& tok : it->second) ++(is_top ? top_counts : rest_counts)[tok];
    }
    if (out.top.empty() || out.rest.empty())
        throw PreconditionError("degenerate top-" + std::to_string(top_frac) + " split in '" + out.epoch +
                                "': delta values do not separate");
    if (top_counts.empty() || rest_counts.empty())
        throw PreconditionError("no title words on one side of the split in '" + out.epoch + "'");
    out.terms = fightin_words(top_counts, rest_counts, prior_scale);
    return out;
}

EmergenceReport emergent_terms(std::span<const DeltaD> scored, const TitleTokens& titles,
                               std::span<const std::string> epoch_order, double top_frac, double prior_scale,
                               std::size_t min_group) {
    EmergenceReport report;
    for (const auto& epoch : epoch_order) {
        std::vector<DeltaD> group;
        for (const auto& d : scored)
            if (d.t_est == epoch) group.push_back(d);
        if (group.empty()) continue;
        try {
            report.groups.push_back(emergent_terms_for_group(group, titles, top_frac, prior_scale, min_group));
        } catch (const PreconditionError& e) {
            report.skipped.emplace(epoch, e.what());
        }
    }
    return report;
}

}  // namespace diachron
