#include <doctest.h>

#include <cmath>
#include <random>

#include "diachron/emergence.hpp"
#include "diachron/errors.hpp"
#include "support.hpp"

using namespace diachron;
using testing::embedding;

namespace {

// Direct evaluation of the log-odds z-score for one word.
double z_formula(double ya, double yb, double na, double nb, double aw, double a0) {
    const double delta = std::log((ya + aw) / (na + a0 - ya - aw)) - std::log((yb + aw) / (nb + a0 - yb - aw));
    return delta / std::sqrt(1.0 / (ya + aw) + 1.0 / (yb + aw));
}

const TermScore& find_term(const std::vector<TermScore>& terms, const std::string& token) {
    for (const auto& t : terms)
        if (t.token == token) return t;
    throw std::runtime_error("term not found: " + token);
}

DeltaD scored(std::uint64_t venue, const std::string& epoch, double delta) {
    DeltaD d;
    d.venue = VenueId{venue};
    d.t_est = epoch;
    d.delta = delta;
    return d;
}

}  // namespace

TEST_CASE("k-th neighbour distance") {
    auto same = embedding("e", {{1, {1, 2}}, {2, {1, 2}}, {3, {2, 4}}});
    CHECK(kth_nn_distance(same, VenueId{1}, 2) == doctest::Approx(0.0).epsilon(1e-12));
    auto e = embedding("e", {{1, {1, 0}}, {2, {1, 0}}, {3, {0, 1}}});
    CHECK(kth_nn_distance(e, VenueId{1}, 1) == 0.0);
    CHECK(kth_nn_distance(e, VenueId{1}, 2) == 1.0);
    CHECK_THROWS_AS(kth_nn_distance(e, VenueId{1}, 3), PreconditionError);
    CHECK_THROWS_AS(kth_nn_distance(e, VenueId{1}, 0), PreconditionError);

    auto r = testing::random_embedding("r", 50, 6, 4);
    for (std::uint64_t v = 1; v <= 50; v += 7)
        for (std::size_t k = 1; k + 1 < 50; ++k)
            CHECK(kth_nn_distance(r, VenueId{v}, k) <= kth_nn_distance(r, VenueId{v}, k + 1));
}

TEST_CASE("delta d") {
    auto loose = embedding("a", {{1, {1, 0}}, {2, {0, 1}}, {3, {-1, 0}}});
    auto tight = embedding("b", {{1, {1, 0}}, {2, {1, 0}}, {3, {-1, 0}}, {4, {0, 1}}});
    EmbeddingSeries s;
    s.push_back(loose);
    s.push_back(tight);
    auto d = delta_d(s, VenueId{1}, 1);
    CHECK(d.t_est == "a");
    CHECK(d.t_last == "b");
    CHECK(d.d_first == 1.0);
    CHECK(d.d_last == 0.0);
    CHECK(d.delta == 1.0);
    CHECK_THROWS_AS(delta_d(s, VenueId{9}, 1), PreconditionError);

    auto table = delta_d_table(s, 1);
    CHECK(table.scored.size() == 3);
    CHECK(table.unscored.at(VenueId{4}) == "established in final epoch");

    EmbeddingSeries same;
    auto r = testing::random_embedding("x", 30, 4, 9);
    same.push_back(r);
    same.push_back(r.with_label("y"));
    for (const auto& row : delta_d_table(same, 5).scored) CHECK(row.delta == 0.0);

    EmbeddingSeries dropped;
    dropped.push_back(tight.with_label("a"));
    dropped.push_back(loose.with_label("b"));
    CHECK(delta_d_table(dropped, 1).unscored.at(VenueId{4}) == "absent from final epoch");
}

TEST_CASE("fightin words on identical corpora") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        TermCounts c;
        for (int w = 0; w < 30; ++w) c["w" + std::to_string(w)] = 1 + rng() % 50;
        for (const auto& t : fightin_words(c, c, 1.0 + static_cast<double>(rng() % 20))) CHECK(std::abs(t.z) < 1e-12);
    }
}

TEST_CASE("fightin words sign flips when corpora are swapped") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        TermCounts a, b;
        for (int w = 0; w < 25; ++w) {
            if (rng() % 4) a["w" + std::to_string(w)] = 1 + rng() % 40;
            if (rng() % 4) b["w" + std::to_string(w)] = 1 + rng() % 40;
        }
        auto ab = fightin_words(a, b);
        auto ba = fightin_words(b, a);
        REQUIRE(ab.size() == ba.size());
        for (const auto& t : ab) CHECK(find_term(ba, t.token).z == doctest::Approx(-t.z).epsilon(1e-12));
        for (std::size_t i = 1; i < ab.size(); ++i) CHECK(ab[i - 1].z >= ab[i].z);
    }
}

TEST_CASE("fightin words hand example") {
    const TermCounts a{{"aids", 5}, {"journal", 5}}, b{{"sleep", 5}, {"journal", 5}};
    auto terms = fightin_words(a, b, 1.0);
    REQUIRE(terms.size() == 3);
    // Pooled counts 5, 10, 5 over 20 tokens with total prior mass 1.
    CHECK(std::abs(find_term(terms, "aids").z - z_formula(5, 0, 10, 10, 0.25, 1.0)) < 1e-10);
    CHECK(std::abs(find_term(terms, "sleep").z - z_formula(0, 5, 10, 10, 0.25, 1.0)) < 1e-10);
    CHECK(std::abs(find_term(terms, "journal").z - z_formula(5, 5, 10, 10, 0.5, 1.0)) < 1e-10);
    CHECK(terms.front().token == "aids");
    CHECK(terms.back().token == "sleep");
    CHECK(find_term(terms, "aids").count_a == 5);
    CHECK(find_term(terms, "aids").count_b == 0);
    CHECK_THROWS_AS(fightin_words(a, {}, 1.0), PreconditionError);
    CHECK_THROWS_AS(fightin_words(a, b, 0.0), PreconditionError);
}

TEST_CASE("fightin words z approaches scale invariance") {
    // z grows like sqrt(scale), so compare z / sqrt(scale) between scales.
    const TermCounts a{{"x", 7}, {"y", 3}, {"z", 1}}, b{{"x", 2}, {"y", 6}, {"z", 4}};
    auto scaled = [](const TermCounts& c, std::size_t f) {
        TermCounts out;
        for (const auto& [w, n] : c) out[w] = n * f;
        return out;
    };
    double prev_gap = 1e300;
    for (std::size_t f : {1u, 10u, 100u, 1000u}) {
        auto lo = fightin_words(scaled(a, f), scaled(b, f));
        auto hi = fightin_words(scaled(a, 10 * f), scaled(b, 10 * f));
        double gap = 0;
        for (const auto& t : lo)
            gap = std::max(gap, std::abs(t.z / std::sqrt(double(f)) - find_term(hi, t.token).z / std::sqrt(10.0 * f)));
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3);
}

TEST_CASE("emergent terms split") {
    std::vector<DeltaD> group;
    TitleTokens titles;
    for (std::uint64_t v = 1; v <= 10; ++v) {
        group.push_back(scored(v, "1990s", static_cast<double>(v) / 10));
        titles[VenueId{v}] = v == 10 ? std::vector<std::string>{"nano", "letters"} : std::vector<std::string>{"letters"};
    }
    auto r = emergent_terms_for_group(group, titles, 0.10, 10.0, 10);
    CHECK(r.top == std::vector<VenueId>{VenueId{10}});
    CHECK(r.rest.size() == 9);
    CHECK(r.threshold == doctest::Approx(0.9));
    CHECK(r.terms.front().token == "nano");

    std::vector<DeltaD> flat;
    for (std::uint64_t v = 1; v <= 10; ++v) flat.push_back(scored(v, "1990s", 0.2));
    CHECK_THROWS_AS(emergent_terms_for_group(flat, titles, 0.10, 10.0, 10), PreconditionError);
    CHECK_THROWS_AS(emergent_terms_for_group(std::span(group).first(5), titles, 0.10, 10.0, 10), PreconditionError);

    std::vector<DeltaD> both = group;
    for (std::uint64_t v = 11; v <= 13; ++v) both.push_back(scored(v, "2000s", 0.1));
    const std::vector<std::string> order{"1990s", "2000s", "2010s"};
    auto report = emergent_terms(both, titles, order);
    REQUIRE(report.groups.size() == 1);
    CHECK(report.groups[0].epoch == "1990s");
    CHECK(report.skipped.contains("2000s"));
    CHECK_FALSE(report.skipped.contains("2010s"));
}

TEST_CASE("quantile split puts exactly the largest tenth on top (random groups)") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 10 * (1 + rng() % 10);
        std::vector<DeltaD> group;
        TitleTokens titles;
        for (std::uint64_t v = 1; v <= n; ++v) {
            group.push_back(scored(v, "e", u(rng)));
            titles[VenueId{v}] = {"w" + std::to_string(v % 3)};
        }
        auto r = emergent_terms_for_group(group, titles);
        CHECK(r.top.size() == n / 10);
        for (VenueId t : r.top)
            for (VenueId s : r.rest) {
                const auto dt = group[raw(t) - 1].delta, ds = group[raw(s) - 1].delta;
                CHECK(dt > ds);
            }
    }
}
