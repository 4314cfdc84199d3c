#include "diachron/ternary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "diachron/errors.hpp"
#include "diachron/similarity.hpp"
#include "rng.hpp"

namespace diachron {

namespace {

Area pick_most_common(const std::array<std::size_t, 4>& counts, AreaSet allowed) {
    std::optional<Area> best;
    for (Area a : kAllAreas) {
        if (!allowed.contains(a)) continue;
        if (!best || counts[static_cast<int>(a)] > counts[static_cast<int>(*best)]) best = a;
    }
    return *best;
}

double squared_distance(const Point3& a, const Point3& b) {
    double s = 0;
    for (int i = 0; i < 3; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

// Returns true if any assignment changed.
bool assign(std::span<const Point3> pts, const std::vector<Point3>& centroids, std::vector<int>& assignment,
            double& inertia) {
    bool changed = false;
    inertia = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        int best = 0;
        double best_d = squared_distance(pts[i], centroids[0]);
        for (std::size_t c = 1; c < centroids.size(); ++c) {
            const double d = squared_distance(pts[i], centroids[c]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        if (assignment[i] != best) {
            assignment[i] = best;
            changed = true;
        }
        inertia += best_d;
    }
    return changed;
}

std::vector<Point3> plus_plus_seeds(std::span<const Point3> pts, std::size_t k, std::mt19937_64& rng) {
    std::vector<Point3> seeds;
    std::uniform_int_distribution<std::size_t> uniform(0, pts.size() - 1);
    seeds.push_back(pts[uniform(rng)]);
    std::vector<double> d2(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) d2[i] = squared_distance(pts[i], seeds[0]);
    while (seeds.size() < k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick;
        if (total <= 0) {
            pick = uniform(rng);
        } else {
            std::uniform_real_distribution<double> u(0.0, total);
            double r = u(rng);
            pick = pts.size() - 1;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                r -= d2[i];
                if (r < 0) {
                    pick = i;
                    break;
                }
            }
        }
        seeds.push_back(pts[pick]);
        for (std::size_t i = 0; i < pts.size(); ++i) d2[i] = std::min(d2[i], squared_distance(pts[i], seeds.back()));
    }
    return seeds;
}

KMeansResult lloyd(std::span<const Point3> pts, std::vector<Point3> centroids, std::size_t max_iter) {
    KMeansResult r;
    r.assignment.assign(pts.size(), -1);
    double inertia = 0;
    assign(pts, centroids, r.assignment, inertia);
    r.inertia_trace.push_back(inertia);
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::vector<Point3> sums(centroids.size(), Point3{0, 0, 0});
        std::vector<std::size_t> counts(centroids.size(), 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto c = static_cast<std::size_t>(r.assignment[i]);
            for (int j = 0; j < 3; ++j) sums[c][j] += pts[i][j];
            ++counts[c];
        }
        for (std::size_t c = 0; c < centroids.size(); ++c)
            if (counts[c])
                for (int j = 0; j < 3; ++j) centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
        ++r.iterations;
        const bool changed = assign(pts, centroids, r.assignment, inertia);
        r.inertia_trace.push_back(inertia);
        if (!changed) break;
    }
    r.centroids = std::move(centroids);
    r.inertia = inertia;
    return r;
}

}  // namespace

std::optional<Area> resolve_area(VenueId venue, const EpochEmbedding& embedding, const VenueTable& venues,
                                 const AreaMap& known, std::size_t m) {
    const VenueRecord* rec = venues.find(venue);
    if (!rec || rec->areas.empty()) return std::nullopt;
    if (rec->areas.size() == 1) return rec->areas.first();

    std::array<std::size_t, 4> counts{};
    const std::size_t k = std::min(m, embedding.size() - 1);
    for (const auto& n : knn(embedding, venue, k).neighbors) {
        auto it = known.find(n.venue);
        if (it != known.end() && rec->areas.contains(it->second)) ++counts[static_cast<int>(it->second)];
    }
    return pick_most_common(counts, rec->areas);
}

AreaMap resolve_areas(const EpochEmbedding& embedding, const VenueTable& venues, std::size_t m) {
    AreaMap known;
    std::vector<VenueId> ambiguous;
    for (VenueId v : embedding.ids()) {
        const VenueRecord* rec = venues.find(v);
        if (!rec || rec->areas.empty()) continue;
        if (rec->areas.size() == 1)
            known.emplace(v, rec->areas.first());
        else
            ambiguous.push_back(v);
    }
    std::sort(ambiguous.begin(), ambiguous.end());
    for (VenueId v : ambiguous)
        if (auto a = resolve_area(v, embedding, venues, known, m)) known.emplace(v, *a);
    return known;
}

bool Pole::degenerate() const {
    return std::all_of(centroid.begin(), centroid.end(), [](double x) { return x == 0.0; });
}

Pole pole_centroid(const EpochEmbedding& embedding, Area area, std::span<const VenueId> members) {
    Pole pole;
    pole.area = area;
    pole.epoch = embedding.label();
    pole.centroid.assign(embedding.dim(), 0.0);
    for (VenueId v : members) {
        auto i = embedding.index_of(v);
        if (!i) continue;
        auto row = embedding.row(*i);
        for (std::size_t j = 0; j < row.size(); ++j) pole.centroid[j] += row[j];
        ++pole.members;
    }
    if (pole.members == 0)
        throw PreconditionError(std::string("no members for the ") + area_code(area) + " pole in '" +
                                embedding.label() + "'");
    for (double& x : pole.centroid) x /= static_cast<double>(pole.members);
    return pole;
}

Poles build_poles(const EpochEmbedding& embedding, const AreaMap& areas) {
    std::array<std::vector<VenueId>, 3> members;
    for (VenueId v : embedding.ids()) {
        auto it = areas.find(v);
        if (it == areas.end() || it->second == Area::Social) continue;
        members[static_cast<int>(it->second)].push_back(v);
    }
    return {pole_centroid(embedding, Area::Physical, members[0]), pole_centroid(embedding, Area::Life, members[1]),
            pole_centroid(embedding, Area::Health, members[2])};
}

TernaryCoord normalize_proximity(double physical, double life, double health) {
    TernaryCoord c;
    const double p = std::max(physical, 0.0);
    const double l = std::max(life, 0.0);
    const double h = std::max(health, 0.0);
    const double sum = p + l + h;
    if (sum <= 0) {
        c.p = c.l = c.h = 1.0 / 3.0;
        c.degenerate = true;
        return c;
    }
    c.p = p / sum;
    c.l = l / sum;
    c.h = h / sum;
    return c;
}

TernaryCoord ternary_coords(const EpochEmbedding& embedding, VenueId venue, const Poles& poles) {
    const auto v = embedding.vector(venue);
    const std::vector<double> vd(v.begin(), v.end());
    auto proximity = [&](const Pole& pole) {
        if (pole.degenerate())
            throw NumericError(std::string("degenerate (zero) ") + area_code(pole.area) + " pole in '" +
                               embedding.label() + "'");
        return cosine(std::span<const double>(vd), std::span<const double>(pole.centroid));
    };
    TernaryCoord c = normalize_proximity(proximity(poles.physical), proximity(poles.life), proximity(poles.health));
    c.venue = venue;
    c.epoch = embedding.label();
    return c;
}

Trajectory trajectory(const EmbeddingSeries& series, VenueId venue, std::span<const Poles> poles) {
    if (poles.size() != series.size()) throw PreconditionError("trajectory: need one set of poles per epoch");
    Trajectory t;
    t.venue = venue;
    std::vector<std::string> pending;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series[i].contains(venue)) {
            if (!t.points.empty()) pending.push_back(series[i].label());
            continue;
        }
        t.gaps.insert(t.gaps.end(), pending.begin(), pending.end());
        pending.clear();
        t.points.push_back(ternary_coords(series[i], venue, poles[i]));
    }
    return t;
}

KMeansResult kmeans(std::span<const Point3> points, const KMeansOptions& options) {
    if (options.k == 0) throw PreconditionError("kmeans: k must be positive");
    if (options.k > points.size())
        throw PreconditionError("kmeans: k=" + std::to_string(options.k) + " exceeds " +
                                std::to_string(points.size()) + " points");
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
    for (std::size_t r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(detail::stream_seed(options.seed, r));
        KMeansResult run = lloyd(points, plus_plus_seeds(points, options.k, rng), options.max_iter);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return best;
}

Clustering::Clustering(std::span<const VenueId> elements, std::span<const int> clusters) {
    if (elements.size() != clusters.size()) throw PreconditionError("Clustering: element/cluster size mismatch");
    std::vector<std::size_t> order(elements.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return elements[a] < elements[b]; });
    for (std::size_t i : order) {
        if (!elements_.empty() && elements_.back() == elements[i])
            throw PreconditionError("Clustering: element " + std::to_string(raw(elements[i])) + " assigned twice");
        elements_.push_back(elements[i]);
        clusters_.push_back(clusters[i]);
    }
}

Clustering::Clustering(const std::map<VenueId, int>& assignment) {
    for (const auto& [e, c] : assignment) {
        elements_.push_back(e);
        clusters_.push_back(c);
    }
}

std::map<int, Area> label_clusters(const Clustering& clustering, const AreaMap& reference) {
    std::map<int, std::array<std::size_t, 4>> counts;
    for (std::size_t i = 0; i < clustering.size(); ++i) {
        auto& c = counts[clustering.cluster(i)];
        auto it = reference.find(clustering.element(i));
        if (it != reference.end()) ++c[static_cast<int>(it->second)];
    }
    std::map<int, Area> labels;
    const AreaSet all{Area::Physical, Area::Life, Area::Health, Area::Social};
    for (const auto& [cluster, c] : counts) labels[cluster] = pick_most_common(c, all);
    return labels;
}

std::vector<double> element_centric_similarity(const Clustering& a, const Clustering& b, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("element_centric_similarity: alpha must be in (0,1)");
    if (a.elements() != b.elements())
        throw PreconditionError("element_centric_similarity: clusterings cover different elements");

    std::map<int, std::size_t> size_a, size_b;
    std::map<std::pair<int, int>, std::size_t> overlap;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++size_a[a.cluster(i)];
        ++size_b[b.cluster(i)];
        ++overlap[{a.cluster(i), b.cluster(i)}];
    }

    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto na = static_cast<double>(size_a[a.cluster(i)]);
        const auto nb = static_cast<double>(size_b[b.cluster(i)]);
        const auto m = static_cast<double>(overlap[{a.cluster(i), b.cluster(i)}]);
        // Members of both clusters (including i, whose restart terms cancel),
        // then members of only one of them.
        const double l1 = m * std::abs(alpha / na - alpha / nb) + (na - m) * (alpha / na) + (nb - m) * (alpha / nb);
        out[i] = 1.0 - l1 / (2.0 * alpha);
    }
    return out;
}

double mean_similarity(std::span<const double> scores) {
    if (scores.empty()) throw PreconditionError("mean_similarity of an empty set");
    return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

std::array<double, 2> simplex_to_plane(double /*p*/, double l, double h) {
    return {l + 0.5 * h, h * std::sqrt(3.0) / 2.0};
}

double inverse_distance_weight(std::span<const double> distances, std::span<const double> values, double power) {
    if (distances.size() != values.size() || distances.empty())
        throw PreconditionError("inverse_distance_weight: need matching, non-empty inputs");
    double hit_sum = 0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        if (distances[i] < 1e-12) {
            hit_sum += values[i];
            ++hits;
        }
    }
    if (hits) return hit_sum / static_cast<double>(hits);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < distances.size(); ++i) {
        const double w = std::pow(distances[i], -power);
        num += w * values[i];
        den += w;
    }
    return num / den;
}

HeatmapGrid idw_grid(std::span<const IdwSample> samples, std::size_t resolution, double power) {
    if (samples.empty()) throw PreconditionError("idw_grid: no samples");
    if (resolution == 0) throw PreconditionError("idw_grid: resolution must be positive");
    HeatmapGrid grid;
    grid.resolution = resolution;
    grid.power = power;

    std::vector<std::array<double, 2>> xy;
    std::vector<double> values;
    for (const auto& s : samples) {
        xy.push_back(simplex_to_plane(s.p, s.l, s.h));
        values.push_back(s.value);
    }
    std::vector<double> dist(samples.size());
    const double r = static_cast<double>(resolution);
    for (std::size_t i = 0; i <= resolution; ++i) {
        for (std::size_t j = 0; i + j <= resolution; ++j) {
            GridPoint g;
            g.p = static_cast<double>(i) / r;
            g.l = static_cast<double>(j) / r;
            g.h = static_cast<double>(resolution - i - j) / r;
            const auto at = simplex_to_plane(g.p, g.l, g.h);
            for (std::size_t s = 0; s < samples.size(); ++s)
                dist[s] = std::hypot(at[0] - xy[s][0], at[1] - xy[s][1]);
            g.value = inverse_distance_weight(dist, values, power);
            grid.points.push_back(g);
        }
    }
    return grid;
}

}  // namespace diachron
