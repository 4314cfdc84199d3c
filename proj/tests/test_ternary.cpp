#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "diachron/errors.hpp"
#include "diachron/oracles.hpp"
#include "diachron/ternary.hpp"
#include "support.hpp"

using namespace diachron;
using testing::embedding;

namespace {

VenueTable table(const std::vector<std::pair<std::uint64_t, AreaSet>>& rows) {
    std::vector<VenueRecord> recs;
    for (const auto& [id, areas] : rows) recs.push_back({VenueId{id}, "v" + std::to_string(id), areas, {}});
    return VenueTable(recs);
}

std::vector<float> at_angle(double degrees) {
    const double r = degrees * std::numbers::pi / 180.0;
    return {static_cast<float>(std::cos(r)), static_cast<float>(std::sin(r))};
}

Clustering random_clustering(std::size_t n, int max_clusters, std::mt19937_64& rng) {
    std::vector<VenueId> ids;
    std::vector<int> clusters;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back(VenueId{i + 1});
        clusters.push_back(static_cast<int>(rng() % static_cast<unsigned>(max_clusters)));
    }
    return Clustering(ids, clusters);
}

std::set<VenueId> members_with(const Clustering& c, std::size_t i) {
    std::set<VenueId> out;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (c.cluster(j) == c.cluster(i)) out.insert(c.element(j));
    return out;
}

}  // namespace

TEST_CASE("area resolution") {
    const AreaSet pl{Area::Physical, Area::Life};
    SUBCASE("single candidate") {
        auto e = embedding("e", {{1, {1, 0}}, {2, {0, 1}}});
        auto t = table({{1, {Area::Health}}, {2, {Area::Life}}});
        CHECK(resolve_area(VenueId{1}, e, t, {{VenueId{2}, Area::Life}}) == Area::Health);
    }
    SUBCASE("unanimous neighbours") {
        auto e = embedding("e", {{1, at_angle(0)}, {2, at_angle(5)}, {3, at_angle(10)}, {4, at_angle(15)}, {5, at_angle(90)}});
        auto t = table({{1, pl}, {2, {Area::Life}}, {3, {Area::Life}}, {4, {Area::Life}}, {5, {Area::Physical}}});
        AreaMap known{{VenueId{2}, Area::Life}, {VenueId{3}, Area::Life}, {VenueId{4}, Area::Life}, {VenueId{5}, Area::Physical}};
        CHECK(resolve_area(VenueId{1}, e, t, known, 3) == Area::Life);
    }
    SUBCASE("ties go to the earlier area") {
        std::vector<testing::Row> rows{{1, at_angle(0)}};
        std::vector<std::pair<std::uint64_t, AreaSet>> recs{{1, pl}};
        AreaMap known;
        for (std::uint64_t i = 2; i <= 51; ++i) {
            rows.push_back({i, at_angle(static_cast<double>(i) * 0.1)});
            const Area a = i % 2 ? Area::Physical : Area::Life;
            recs.push_back({i, {a}});
            known[VenueId{i}] = a;
        }
        CHECK(resolve_area(VenueId{1}, embedding("e", rows), table(recs), known, 50) == Area::Physical);
    }
    SUBCASE("unlabeled venues") {
        auto e = embedding("e", {{1, {1, 0}}, {2, {0, 1}}});
        auto t = table({{1, {}}});
        CHECK_FALSE(resolve_area(VenueId{1}, e, t, {}).has_value());
        CHECK_FALSE(resolve_area(VenueId{2}, e, t, {}).has_value());
    }
    SUBCASE("earlier resolutions are visible to later venues") {
        auto e = embedding("e", {{1, at_angle(0)}, {2, at_angle(10)}, {3, at_angle(25)}, {4, at_angle(90)}});
        auto t = table({{1, {Area::Life}}, {2, pl}, {3, pl}, {4, {Area::Physical}}});
        auto areas = resolve_areas(e, t, 1);
        CHECK(areas.at(VenueId{2}) == Area::Life);
        CHECK(areas.at(VenueId{3}) == Area::Life);
        CHECK(areas.at(VenueId{4}) == Area::Physical);
    }
}

TEST_CASE("pole centroids") {
    auto e = embedding("e", {{1, {1, 0}}, {2, {0, 1}}, {3, {-1, 0}}});
    const std::vector<VenueId> one{VenueId{1}}, two{VenueId{1}, VenueId{2}}, opposite{VenueId{1}, VenueId{3}};
    CHECK(pole_centroid(e, Area::Physical, one).centroid == std::vector<double>{1, 0});
    auto p = pole_centroid(e, Area::Life, two);
    CHECK(p.centroid == std::vector<double>{0.5, 0.5});
    CHECK(p.members == 2);
    CHECK_FALSE(p.degenerate());
    CHECK(pole_centroid(e, Area::Health, opposite).degenerate());
    const std::vector<VenueId> absent{VenueId{9}};
    CHECK_THROWS_AS(pole_centroid(e, Area::Health, absent), PreconditionError);

    auto poles = build_poles(e, {{VenueId{1}, Area::Physical}, {VenueId{2}, Area::Life}, {VenueId{3}, Area::Health}});
    CHECK(poles.health.centroid == std::vector<double>{-1, 0});
    Poles flat = poles;
    flat.life = pole_centroid(e, Area::Life, opposite);
    CHECK_THROWS_AS(ternary_coords(e, VenueId{1}, flat), NumericError);
}

TEST_CASE("proximity normalization") {
    auto even = normalize_proximity(1, 1, 1);
    CHECK(even.p == doctest::Approx(1.0 / 3));
    CHECK(even.l == doctest::Approx(1.0 / 3));
    CHECK(even.h == doctest::Approx(1.0 / 3));
    auto already = normalize_proximity(0.6, 0.3, 0.1);
    CHECK(already.p == doctest::Approx(0.6));
    CHECK(already.l == doctest::Approx(0.3));
    CHECK(already.h == doctest::Approx(0.1));
    auto clamped = normalize_proximity(0.5, -0.2, 0.1);
    CHECK(clamped.p == doctest::Approx(5.0 / 6));
    CHECK(clamped.l == 0.0);
    CHECK(clamped.h == doctest::Approx(1.0 / 6));
    auto none = normalize_proximity(-1, 0, -0.5);
    CHECK(none.degenerate);
    CHECK(none.p + none.l + none.h == doctest::Approx(1.0));
}

TEST_CASE("ternary coordinates lie on the simplex (random embeddings)") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        auto e = testing::random_embedding("e", 60, 5, rng());
        AreaMap areas;
        for (std::uint64_t v = 1; v <= 60; ++v) areas[VenueId{v}] = kPoleAreas[v % 3];
        auto poles = build_poles(e, areas);
        std::vector<float> doubled = e.data();
        for (auto& x : doubled) x *= 2.0f;
        EpochEmbedding e2(e.label(), e.ids(), e.dim(), doubled);
        auto poles2 = build_poles(e2, areas);
        for (std::uint64_t v = 1; v <= 60; ++v) {
            auto c = ternary_coords(e, VenueId{v}, poles);
            CHECK(c.p >= 0);
            CHECK(c.l >= 0);
            CHECK(c.h >= 0);
            CHECK(std::abs(c.p + c.l + c.h - 1.0) <= 1e-12);
            auto c2 = ternary_coords(e2, VenueId{v}, poles2);
            CHECK(c2.p == doctest::Approx(c.p).epsilon(1e-6));
            CHECK(c2.h == doctest::Approx(c.h).epsilon(1e-6));
        }
    }
}

TEST_CASE("trajectories") {
    auto a = embedding("a", {{1, {1, 0}}, {2, {0, 1}}, {3, {1, 1}}});
    auto b = embedding("b", {{2, {0, 1}}, {3, {1, 1}}});
    auto c = embedding("c", {{1, {0, 1}}, {2, {1, 0}}, {3, {1, 1}}});
    EmbeddingSeries s;
    s.push_back(a);
    s.push_back(b);
    s.push_back(c);
    // Fixed poles for every epoch.
    const auto fixed = build_poles(a, {{VenueId{2}, Area::Physical}, {VenueId{3}, Area::Life}, {VenueId{1}, Area::Health}});
    const std::vector<Poles> poles(3, fixed);
    auto t = trajectory(s, VenueId{1}, poles);
    REQUIRE(t.points.size() == 2);
    CHECK(t.points[0].epoch == "a");
    CHECK(t.points[1].epoch == "c");
    CHECK(t.gaps == std::vector<std::string>{"b"});
    CHECK(trajectory(s, VenueId{3}, poles).gaps.empty());
    CHECK_THROWS_AS(trajectory(s, VenueId{1}, std::span<const Poles>(poles).first(2)), PreconditionError);
}

TEST_CASE("k-means") {
    SUBCASE("one cluster per point") {
        std::vector<Point3> pts{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {0.5, 0.5, 0}};
        auto r = kmeans(pts, {4, 1, 300, 3});
        CHECK(r.inertia == 0.0);
        CHECK(std::set<int>(r.assignment.begin(), r.assignment.end()).size() == 4);
    }
    SUBCASE("separated blobs") {
        const std::vector<Point3> centers{{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}, {0.34, 0.33, 0.33}};
        std::mt19937_64 rng(2);
        std::normal_distribution<double> g(0.0, 0.01);
        std::vector<Point3> pts;
        for (int i = 0; i < 100; ++i) {
            Point3 p = centers[static_cast<std::size_t>(i % 4)];
            for (auto& x : p) x += g(rng);
            pts.push_back(p);
        }
        auto r = kmeans(pts, {4, 5, 300, 10});
        for (int i = 0; i < 100; ++i) CHECK(r.assignment[static_cast<std::size_t>(i)] == r.assignment[static_cast<std::size_t>(i % 4)]);
        CHECK(std::set<int>(r.assignment.begin(), r.assignment.end()).size() == 4);
        auto again = kmeans(pts, {4, 5, 300, 10});
        CHECK(again.assignment == r.assignment);
    }
    SUBCASE("duplicate points") {
        std::vector<Point3> pts(10, Point3{0.2, 0.3, 0.5});
        for (int i = 0; i < 10; ++i) pts.push_back({0.6, 0.2, 0.2});
        auto r = kmeans(pts, {2, 1, 300, 5});
        CHECK(r.inertia <= 1e-28);
        CHECK(r.assignment[0] != r.assignment[10]);
        auto three = kmeans(pts, {3, 1, 300, 5});
        CHECK(three.inertia <= 1e-28);
    }
    SUBCASE("too many clusters") {
        std::vector<Point3> pts{{1, 0, 0}};
        CHECK_THROWS_AS(kmeans(pts, {2, 1, 300, 1}), PreconditionError);
    }
    SUBCASE("inertia never increases (random points)") {
        std::mt19937_64 rng(19);
        std::uniform_real_distribution<double> u(0, 1);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<Point3> pts(20 + rng() % 200);
            for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
            auto r = kmeans(pts, {1 + rng() % 8, rng(), 300, 3});
            for (std::size_t i = 1; i < r.inertia_trace.size(); ++i)
                CHECK(r.inertia_trace[i] <= r.inertia_trace[i - 1] + 1e-12);
            CHECK(r.inertia == r.inertia_trace.back());
        }
    }
}

TEST_CASE("cluster labels") {
    const std::vector<VenueId> ids{VenueId{1}, VenueId{2}, VenueId{3}, VenueId{4}, VenueId{5}};
    const std::vector<int> cl{0, 0, 0, 1, 1};
    Clustering c(ids, cl);
    AreaMap ref{{VenueId{1}, Area::Life}, {VenueId{2}, Area::Life}, {VenueId{3}, Area::Physical},
                {VenueId{4}, Area::Health}, {VenueId{5}, Area::Physical}};
    auto labels = label_clusters(c, ref);
    CHECK(labels.at(0) == Area::Life);
    CHECK(labels.at(1) == Area::Physical);
    const std::vector<VenueId> dup{VenueId{1}, VenueId{1}};
    const std::vector<int> dcl{0, 1};
    CHECK_THROWS_AS(Clustering(dup, dcl), PreconditionError);
}

TEST_CASE("element-centric similarity") {
    const std::vector<VenueId> two{VenueId{1}, VenueId{2}};
    const std::vector<int> together{0, 0}, apart{0, 1};
    Clustering a(two, together), b(two, apart);
    for (double s : element_centric_similarity(a, b)) CHECK(std::abs(s - 0.5) < 1e-12);
    for (double s : element_centric_similarity(a, a)) CHECK(s == 1.0);
    CHECK_THROWS_AS(element_centric_similarity(a, b, 1.0), PreconditionError);
    CHECK_THROWS_AS(element_centric_similarity(a, b, 0.0), PreconditionError);
    const std::vector<VenueId> other{VenueId{1}, VenueId{3}};
    CHECK_THROWS_AS(element_centric_similarity(a, Clustering(other, apart)), PreconditionError);
}

TEST_CASE("element-centric similarity agrees with the PageRank oracle") {
    std::mt19937_64 rng(50);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng() % 49;
        auto a = random_clustering(n, 1 + static_cast<int>(rng() % 8), rng);
        auto b = random_clustering(n, 1 + static_cast<int>(rng() % 8), rng);
        const double alpha = trial % 2 ? 0.9 : 0.5;
        auto fast = element_centric_similarity(a, b, alpha);
        auto slow = oracle::ecs(a, b, alpha);
        auto swapped = element_centric_similarity(b, a, alpha);
        REQUIRE(fast.size() == n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(fast[i] - slow[i]) <= 1e-8);
            CHECK(fast[i] == doctest::Approx(swapped[i]).epsilon(1e-14));
            CHECK(fast[i] >= -1e-12);
            CHECK(fast[i] <= 1.0 + 1e-12);
            const bool same = members_with(a, i) == members_with(b, i);
            CHECK(same == (std::abs(fast[i] - 1.0) < 1e-12));
        }
    }
}

TEST_CASE("mean similarity and plane projection") {
    const std::vector<double> s{1.0, 0.5};
    CHECK(mean_similarity(s) == 0.75);
    CHECK_THROWS_AS(mean_similarity(std::vector<double>{}), PreconditionError);
    auto p = simplex_to_plane(1, 0, 0);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 0.0);
    auto l = simplex_to_plane(0, 1, 0);
    CHECK(l[0] == doctest::Approx(1.0));
    auto h = simplex_to_plane(0, 0, 1);
    CHECK(h[0] == doctest::Approx(0.5));
    CHECK(h[1] == doctest::Approx(std::sqrt(3.0) / 2));
}

TEST_CASE("inverse distance weighting") {
    const std::vector<double> d{1, 2}, z{0, 1};
    CHECK(inverse_distance_weight(d, z, 2.0) == doctest::Approx(0.2));
    const std::vector<double> equal{1.5, 1.5};
    CHECK(inverse_distance_weight(equal, z, 2.0) == doctest::Approx(0.5));
    const std::vector<double> hit{0.0, 2};
    CHECK(inverse_distance_weight(hit, z, 2.0) == 0.0);

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.01, 3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> dist(1 + rng() % 10), vals(dist.size());
        for (auto& x : dist) x = u(rng);
        for (auto& x : vals) x = u(rng) - 1.5;
        const double r = inverse_distance_weight(dist, vals, 1.0 + static_cast<double>(rng() % 3));
        CHECK(r >= *std::min_element(vals.begin(), vals.end()) - 1e-12);
        CHECK(r <= *std::max_element(vals.begin(), vals.end()) + 1e-12);
    }
}

TEST_CASE("heatmap grid") {
    std::vector<IdwSample> samples{{1, 0, 0, 3.0}, {0, 1, 0, 3.0}, {0.2, 0.3, 0.5, 3.0}};
    auto g = idw_grid(samples, 2);
    CHECK(g.points.size() == 6);
    for (const auto& p : g.points) {
        CHECK(p.p + p.l + p.h == doctest::Approx(1.0));
        CHECK(p.value == doctest::Approx(3.0));
    }
    CHECK_THROWS_AS(idw_grid(std::vector<IdwSample>{}, 4), PreconditionError);
}
