#include "diachron/change.hpp"

#include <algorithm>
#include <cmath>

#include "diachron/errors.hpp"
#include "diachron/similarity.hpp"

namespace diachron {

namespace {

double clamp_distance(double d) { return std::clamp(d, 0.0, 2.0); }

}  // namespace

const char* to_string(ChangeMethod m) noexcept { return m == ChangeMethod::Local ? "local" : "aligned"; }

ChangeScore local_change(const EpochEmbedding& t1, const EpochEmbedding& t2, VenueId venue, std::size_t k) {
    if (!t1.contains(venue) || !t2.contains(venue))
        throw PreconditionError("venue " + std::to_string(raw(venue)) + " is not present in both '" + t1.label() +
                                "' and '" + t2.label() + "'");
    if (t1.size() <= k || t2.size() <= k)
        throw PreconditionError("local_change needs more than k=" + std::to_string(k) + " venues in each epoch");

    std::vector<VenueId> members;
    for (const auto& n : knn(t1, venue, k).neighbors) members.push_back(n.venue);
    for (const auto& n : knn(t2, venue, k).neighbors) members.push_back(n.venue);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    std::erase_if(members, [&](VenueId m) { return !t1.contains(m) || !t2.contains(m); });
    if (members.size() < 2)
        throw NumericError("venue " + std::to_string(raw(venue)) + ": fewer than two neighbours shared by '" +
                           t1.label() + "' and '" + t2.label() + "'");

    std::vector<double> s1, s2;
    s1.reserve(members.size());
    s2.reserve(members.size());
    const auto v1 = t1.vector(venue);
    const auto v2 = t2.vector(venue);
    for (VenueId m : members) {
        s1.push_back(cosine(v1, t1.vector(m)));
        s2.push_back(cosine(v2, t2.vector(m)));
    }
    double d;
    try {
        d = 1.0 - cosine(std::span<const double>(s1), std::span<const double>(s2));
    } catch (const NumericError&) {
        throw NumericError("venue " + std::to_string(raw(venue)) + ": all-zero similarity profile");
    }
    return {venue, t1.label(), t2.label(), ChangeMethod::Local, clamp_distance(d)};
}

TotalChange total_local_change(const EmbeddingSeries& series, VenueId venue, std::size_t k, GapPolicy policy) {
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series[i].contains(venue)) present.push_back(i);
    if (present.size() < 2)
        throw PreconditionError("venue " + std::to_string(raw(venue)) + " appears in fewer than two epochs");

    TotalChange out;
    out.venue = venue;
    out.first_epoch = series[present.front()].label();
    for (std::size_t i = present.front(); i + 1 < series.size(); ++i) {
        if (!series[i].contains(venue) || !series[i + 1].contains(venue)) {
            // Pairs after the venue's last appearance are not gaps.
            if (i + 1 > present.back()) break;
            if (policy == GapPolicy::Error)
                throw PreconditionError("venue " + std::to_string(raw(venue)) + " is missing between '" +
                                        series[i].label() + "' and '" + series[i + 1].label() + "'");
            ++out.skipped;
            continue;
        }
        out.total += local_change(series[i], series[i + 1], venue, k).d;
        ++out.pairs;
    }
    return out;
}

std::vector<VenueId> shared_vocabulary(const EpochEmbedding& a, const EpochEmbedding& b) {
    std::vector<VenueId> out;
    for (VenueId v : a.ids())
        if (b.contains(v)) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

Eigen::MatrixXd procrustes(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target, bool* rank_deficient) {
    if (source.rows() != target.rows() || source.cols() != target.cols())
        throw PreconditionError("procrustes: source and target shapes differ");
    if (source.cols() == 0) throw PreconditionError("procrustes: no shared columns");
    if (!source.allFinite() || !target.allFinite()) throw NumericError("procrustes: non-finite input");

    const Eigen::MatrixXd cross = target * source.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (rank_deficient) {
        const auto& s = svd.singularValues();
        const double smax = s.size() ? s(0) : 0.0;
        *rank_deficient = smax == 0.0 || s(s.size() - 1) < 1e-12 * smax;
    }
    return svd.matrixU() * svd.matrixV().transpose();
}

Eigen::MatrixXd stack_columns(const EpochEmbedding& embedding, std::span<const VenueId> venues) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(embedding.dim()), static_cast<Eigen::Index>(venues.size()));
    for (std::size_t c = 0; c < venues.size(); ++c) {
        auto v = embedding.vector(venues[c]);
        for (std::size_t r = 0; r < v.size(); ++r)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<double>(v[r]);
    }
    return m;
}

RotationMatrix procrustes_rotation(const EpochEmbedding& t1, const EpochEmbedding& t2,
                                   std::span<const VenueId> shared) {
    if (t1.dim() != t2.dim()) throw PreconditionError("procrustes_rotation: embedding dimensions differ");
    RotationMatrix r;
    r.source = t1.label();
    r.target = t2.label();
    if (shared.empty()) {
        r.shared = shared_vocabulary(t1, t2);
    } else {
        r.shared.assign(shared.begin(), shared.end());
    }
    if (r.shared.empty()) throw PreconditionError("procrustes_rotation: epochs share no venues");
    r.matrix = procrustes(stack_columns(t1, r.shared), stack_columns(t2, r.shared), &r.rank_deficient);
    r.underdetermined = r.shared.size() < t1.dim();
    return r;
}

ChangeScore aligned_change(const EpochEmbedding& t1, const EpochEmbedding& t2, const RotationMatrix& rotation,
                           VenueId venue) {
    if (!t1.contains(venue) || !t2.contains(venue))
        throw PreconditionError("venue " + std::to_string(raw(venue)) + " is not shared by '" + t1.label() +
                                "' and '" + t2.label() + "'");
    const auto a = t1.vector(venue);
    const auto b = t2.vector(venue);
    Eigen::VectorXd va(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) va(static_cast<Eigen::Index>(i)) = a[i];
    const Eigen::VectorXd rotated = rotation.matrix * va;
    std::vector<double> vb(b.begin(), b.end());
    const double c = cosine(std::span<const double>(rotated.data(), static_cast<std::size_t>(rotated.size())),
                            std::span<const double>(vb));
    return {venue, t1.label(), t2.label(), ChangeMethod::Aligned, clamp_distance(1.0 - c)};
}

FieldSizeReport field_size_effect(const std::map<std::string, std::vector<double>>& scores_by_field) {
    FieldSizeReport report;
    for (const auto& [field, scores] : scores_by_field) {
        if (scores.empty()) continue;
        // Running mean: a field of equal scores gets exactly that score.
        double mean = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i) mean += (scores[i] - mean) / static_cast<double>(i + 1);
        report.rows.push_back({field, scores.size(), mean});
    }
    if (report.rows.size() < 2) throw PreconditionError("field_size_effect needs at least two non-empty fields");
    std::vector<double> counts, means;
    for (const auto& r : report.rows) {
        counts.push_back(static_cast<double>(r.venues));
        means.push_back(r.mean_d);
    }
    report.correlation = kendall_tau(counts, means);
    return report;
}

}  // namespace diachron
