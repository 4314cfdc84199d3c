#include "diachron/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <unordered_set>

#include "diachron/errors.hpp"
#include "diachron/keyvalue.hpp"
#include "diachron/text.hpp"
#include "rng.hpp"
#include "tsv.hpp"

namespace diachron::synth {

namespace {

// Topic vocabularies for venue titles, one per area in area order.
const std::vector<std::vector<std::string>> kTopicWords = {
    {"physics", "optics", "quantum", "materials", "astronomy", "mechanics", "photonics", "plasma"},
    {"biology", "genetics", "cell", "ecology", "neuroscience", "zoology", "botany", "microbiology"},
    {"medicine", "clinical", "surgery", "cardiology", "oncology", "nursing", "pediatrics", "radiology"},
    {"economics", "sociology", "psychology", "linguistics", "management", "education", "politics", "law"},
};

Area community_area(std::size_t c) { return kAllAreas[c % 4]; }

std::vector<std::string_view> split_on(std::string_view s, char sep) { return detail::split(s, sep); }

std::vector<double> parse_schedule(const std::string& text) {
    std::vector<double> out;
    for (auto item : split_on(text, ',')) {
        auto v = detail::parse_double(item);
        if (!v) throw PreconditionError("bad cohesion value '" + std::string(item) + "'");
        out.push_back(*v);
    }
    return out;
}

}  // namespace

std::size_t PlantSpec::venue_count() const {
    std::size_t n = communities * venues_per_community;
    for (const auto& d : densify) n += d.venues;
    return n;
}

void PlantSpec::validate() const {
    if (communities == 0 || venues_per_community == 0) throw PreconditionError("plant spec: no venues");
    if (papers_per_venue == 0) throw PreconditionError("plant spec: zero papers per venue");
    if (epochs.empty()) throw PreconditionError("plant spec: no epochs");
    if (!(p_in > p_out) || p_out < 0 || p_in > 1) throw PreconditionError("plant spec: need 0 <= p_out < p_in <= 1");
    if (mean_citations < 0) throw PreconditionError("plant spec: negative mean_citations");
    for (const auto& m : migrations) {
        if (m.venue >= communities * venues_per_community)
            throw PreconditionError("plant spec: migration of unknown venue " + std::to_string(m.venue));
        if (m.to_community >= communities) throw PreconditionError("plant spec: migration to unknown community");
        if (m.epoch >= epochs.size()) throw PreconditionError("plant spec: migration epoch out of range");
    }
    for (const auto& d : densify) {
        if (d.community >= communities) throw PreconditionError("plant spec: densify plant in unknown community");
        if (d.venues < 2) throw PreconditionError("plant spec: densify plant needs at least 2 venues");
        if (d.cohesion.size() != epochs.size())
            throw PreconditionError("plant spec: densify schedule needs one cohesion value per epoch");
        for (double c : d.cohesion)
            if (c < 0 || c > 1) throw PreconditionError("plant spec: cohesion must be in [0,1]");
        if (d.title_word.empty()) throw PreconditionError("plant spec: empty densify title word");
    }
}

PlantSpec parse_plant_spec(const std::string& text) {
    PlantSpec spec;
    for (const auto& [key, value] : parse_key_values(text)) {
        if (key == "communities") {
            spec.communities = to_size(key, value);
        } else if (key == "venues_per_community") {
            spec.venues_per_community = to_size(key, value);
        } else if (key == "papers_per_venue") {
            spec.papers_per_venue = to_size(key, value);
        } else if (key == "epochs") {
            spec.epochs = parse_epochs(value);
        } else if (key == "mean_citations") {
            spec.mean_citations = to_double(key, value);
        } else if (key == "p_in") {
            spec.p_in = to_double(key, value);
        } else if (key == "p_out") {
            spec.p_out = to_double(key, value);
        } else if (key == "citation_window") {
            spec.citation_window = to_size(key, value);
        } else if (key == "seed") {
            spec.seed = to_size(key, value);
        } else if (key == "multi_label") {
            spec.multi_label = to_bool(key, value);
        } else if (key == "static_graph") {
            spec.static_graph = to_bool(key, value);
        } else if (key == "migrate") {
            auto parts = split_on(value, ':');
            if (parts.size() != 3) throw PreconditionError("migrate: expected venue:to_community:epoch");
            spec.migrations.push_back({to_size(key, std::string(parts[0])), to_size(key, std::string(parts[1])),
                                       to_size(key, std::string(parts[2]))});
        } else if (key == "densify") {
            auto parts = split_on(value, ':');
            if (parts.size() != 4) throw PreconditionError("densify: expected community:venues:schedule:word");
            DensifyPlant d;
            d.community = to_size(key, std::string(parts[0]));
            d.venues = to_size(key, std::string(parts[1]));
            d.cohesion = parse_schedule(std::string(parts[2]));
            d.title_word = std::string(parts[3]);
            spec.densify.push_back(std::move(d));
        } else {
            throw PreconditionError("plant spec: unknown key '" + key + "'");
        }
    }
    spec.validate();
    return spec;
}

PlantSpec load_plant_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IntegrityError("cannot open plant spec " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_plant_spec(text);
}

SyntheticCorpus generate_planted(const PlantSpec& spec) {
    spec.validate();
    SyntheticCorpus out;
    out.epochs = spec.epochs;

    const std::size_t regular = spec.communities * spec.venues_per_community;
    const std::size_t n_venues = spec.venue_count();

    // Venue table. Regular venues are community-major; plant venues follow.
    std::vector<std::size_t> home(n_venues);
    std::vector<int> plant_of(n_venues, -1);
    for (std::size_t v = 0; v < regular; ++v) home[v] = v / spec.venues_per_community;
    {
        std::size_t next = regular;
        for (std::size_t p = 0; p < spec.densify.size(); ++p) {
            out.plants.emplace_back();
            for (std::size_t i = 0; i < spec.densify[p].venues; ++i, ++next) {
                home[next] = (spec.densify[p].community + i) % spec.communities;
                plant_of[next] = static_cast<int>(p);
                out.plants.back().push_back(VenueId{next + 1});
            }
        }
    }
    for (std::size_t v = 0; v < n_venues; ++v) {
        VenueRecord rec;
        rec.venue_id = VenueId{v + 1};
        const auto& words = kTopicWords[static_cast<int>(community_area(home[v]))];
        const std::size_t j = v < regular ? v % spec.venues_per_community : v - regular;
        if (plant_of[v] >= 0) {
            rec.name = "Journal of " + spec.densify[plant_of[v]].title_word + " " + words[j % words.size()];
        } else {
            rec.name = "Journal of " + words[j % words.size()] + " and " + words[(j / words.size() + j + 3) % words.size()];
        }
        rec.areas.insert(community_area(home[v]));
        if (spec.multi_label && v < regular && v % spec.venues_per_community == 0 && spec.communities > 1)
            rec.areas.insert(community_area((home[v] + 1) % spec.communities));
        rec.title_tokens = tokenize_title(rec.name);
        out.venues.push_back(std::move(rec));
    }

    std::uint64_t next_paper = 1;
    for (std::size_t e = 0; e < spec.epochs.size(); ++e) {
        std::mt19937_64 rng(detail::stream_seed(spec.seed, spec.static_graph ? 0 : e));
        const EpochSpec& epoch = spec.epochs[e];

        std::vector<std::size_t> comm = home;
        for (const auto& m : spec.migrations)
            if (e >= m.epoch) comm[m.venue] = m.to_community;
        out.community.push_back(comm);

        std::vector<std::size_t> order;
        for (std::size_t v = 0; v < n_venues; ++v)
            for (std::size_t i = 0; i < spec.papers_per_venue; ++i) order.push_back(v);
        std::shuffle(order.begin(), order.end(), rng);

        const std::size_t n = order.size();
        const int span = epoch.end_year - epoch.start_year + 1;
        std::vector<std::vector<std::size_t>> by_community(spec.communities);
        std::vector<std::vector<std::size_t>> by_plant(spec.densify.size());
        std::vector<PaperId> ids(n);
        std::poisson_distribution<int> refs(spec.mean_citations);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        auto citable = [&](std::size_t c) {
            const std::size_t n_c = by_community[c].size();
            return spec.citation_window == 0 ? n_c : std::min(n_c, spec.citation_window);
        };

        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t v = order[i];
            ids[i] = PaperId{next_paper++};
            const int year = epoch.start_year + static_cast<int>(static_cast<long long>(i) * span / static_cast<long long>(n));
            out.papers.push_back({ids[i], VenueId{v + 1}, year});

            const std::size_t wanted = std::min<std::size_t>(static_cast<std::size_t>(refs(rng)), i);
            std::unordered_set<std::size_t> cited;
            for (std::size_t attempt = 0; cited.size() < wanted && attempt < 10 * wanted + 10; ++attempt) {
                std::size_t target;
                const int plant = plant_of[v];
                const auto* plant_pool = plant >= 0 ? &by_plant[static_cast<std::size_t>(plant)] : nullptr;
                if (plant_pool && !plant_pool->empty() &&
                    unit(rng) < spec.densify[static_cast<std::size_t>(plant)].cohesion[e]) {
                    target = (*plant_pool)[std::uniform_int_distribution<std::size_t>(0, plant_pool->size() - 1)(rng)];
                } else if (plant_pool) {
                    target = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
                    if (plant_of[order[target]] >= 0) continue;
                } else {
                    std::vector<double> weight(spec.communities);
                    for (std::size_t c = 0; c < spec.communities; ++c)
                        weight[c] = (c == comm[v] ? spec.p_in : spec.p_out) * static_cast<double>(citable(c));
                    double total = 0;
                    for (double w : weight) total += w;
                    if (total <= 0) break;
                    double r = unit(rng) * total;
                    std::size_t c = spec.communities;
                    for (std::size_t k = 0; k < spec.communities; ++k) {
                        if (weight[k] <= 0) continue;
                        c = k;
                        if (r < weight[k]) break;
                        r -= weight[k];
                    }
                    const auto& pool = by_community[c];
                    target = pool[pool.size() - 1 - std::uniform_int_distribution<std::size_t>(0, citable(c) - 1)(rng)];
                }
                if (cited.insert(target).second) out.edges.push_back({ids[i], ids[target]});
            }
            if (plant_of[v] >= 0) {
                by_plant[static_cast<std::size_t>(plant_of[v])].push_back(i);
            } else {
                by_community[comm[v]].push_back(i);
            }
        }
    }
    return out;
}

void write_synthetic(const SyntheticCorpus& corpus, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw IntegrityError("cannot write " + (fs::path(dir) / name).string());
        return f;
    };
    {
        auto f = open("papers.tsv");
        f << "paper_id\tvenue_id\tyear\n";
        for (const auto& p : corpus.papers) f << raw(p.paper_id) << '\t' << raw(p.venue_id) << '\t' << p.year << '\n';
    }
    {
        auto f = open("edges.tsv");
        f << "citing_id\tcited_id\n";
        for (const auto& e : corpus.edges) f << raw(e.citing) << '\t' << raw(e.cited) << '\n';
    }
    {
        auto f = open("venues.tsv");
        f << "venue_id\tname\tareas\n";
        for (const auto& v : corpus.venues) f << raw(v.venue_id) << '\t' << v.name << '\t' << v.areas.to_string() << '\n';
    }
    {
        auto f = open("communities.tsv");
        f << "venue_id\tepoch\tcommunity\n";
        for (std::size_t e = 0; e < corpus.epochs.size(); ++e)
            for (std::size_t v = 0; v < corpus.venues.size(); ++v)
                f << raw(corpus.venues[v].venue_id) << '\t' << corpus.epochs[e].label << '\t' << corpus.community[e][v]
                  << '\n';
    }
}

}  // namespace diachron::synth
