#include "diachron/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "diachron/change.hpp"
#include "diachron/corpus.hpp"
#include "diachron/embedding.hpp"
#include "diachron/emergence.hpp"
#include "diachron/similarity.hpp"
#include "diachron/synth.hpp"
#include "diachron/text.hpp"
#include "rng.hpp"

namespace diachron {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

// Round-trip precision, for values whose sums are checked downstream.
std::string exact(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IntegrityError("cannot write " + path.string());
    return f;
}

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw UsageError(std::string("no ") + what + " path configured");
    if (!fs::is_regular_file(path)) throw IntegrityError(std::string("missing ") + what + ": " + path);
}

fs::path stage_dir(const RunConfig& cfg, const char* stage) {
    fs::path dir = fs::path(cfg.out) / stage;
    fs::create_directories(dir);
    return dir;
}

// Records everything needed to regenerate a stage's outputs: parameters, seed,
// and content hashes of inputs and outputs. Output paths are relative to the
// stage directory so manifests of identical runs compare equal.
void write_manifest(const fs::path& dir, const RunConfig& cfg, const std::string& stage,
                    const std::vector<std::string>& inputs, const std::vector<fs::path>& outputs) {
    auto f = open_out(dir / "manifest.tsv");
    f << "kind\tkey\tvalue\n";
    f << "stage\tname\t" << stage << '\n';
    f << "seed\tseed\t" << cfg.seed << '\n';
    for (const auto& [k, v] : cfg.describe()) f << "param\t" << k << '\t' << v << '\n';
    for (const auto& in : inputs) f << "input\t" << in << '\t' << sha256_file(in) << '\n';
    for (const auto& out : outputs)
        f << "output\t" << out.lexically_relative(dir).generic_string() << '\t' << sha256_file(out.string()) << '\n';
}

struct Tables {
    PaperTable papers;
    EdgeTable edges;
    VenueTable venues;
};

Tables load_tables(const RunConfig& cfg) {
    require_file(cfg.papers, "paper table");
    require_file(cfg.edges, "edge table");
    require_file(cfg.venues, "venue table");
    return {load_paper_table(cfg.papers), load_edge_table(cfg.edges), load_venue_table(cfg.venues)};
}

VenueTable load_venues(const RunConfig& cfg) {
    require_file(cfg.venues, "venue table");
    return load_venue_table(cfg.venues);
}

void require_epochs(const RunConfig& cfg) {
    if (cfg.epochs.empty()) throw UsageError("no epochs configured (key 'epochs')");
}

fs::path series_manifest(const RunConfig& cfg) { return fs::path(cfg.out) / "train" / "series.tsv"; }

EmbeddingSeries load_trained_series(const RunConfig& cfg) {
    const fs::path manifest = series_manifest(cfg);
    if (!fs::is_regular_file(manifest)) throw IntegrityError("missing embedding series: " + manifest.string());
    return load_series(manifest.string());
}

std::vector<std::string> series_inputs(const RunConfig& cfg) {
    std::vector<std::string> inputs{series_manifest(cfg).string()};
    for (const auto& e : read_series_manifest(series_manifest(cfg).string()))
        inputs.push_back((fs::path(cfg.out) / "train" / e.path).string());
    return inputs;
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

KeyValues RunConfig::describe() const {
    return {
        {"papers", papers},
        {"edges", edges},
        {"venues", venues},
        {"epochs", format_epochs(epochs)},
        {"starts_per_node", std::to_string(starts_per_node)},
        {"max_len", std::to_string(max_len)},
        {"min_count", std::to_string(min_count)},
        {"shard_count", std::to_string(shard_count)},
        {"dim", std::to_string(dim)},
        {"window", std::to_string(window)},
        {"negatives", std::to_string(negatives)},
        {"train_epochs", std::to_string(train_epochs)},
        {"learning_rate", num(learning_rate)},
        {"min_learning_rate", num(min_learning_rate)},
        {"subsample", num(subsample)},
        {"k", std::to_string(k)},
        {"resolve_neighbors", std::to_string(resolve_neighbors)},
        {"kmeans_k", std::to_string(kmeans_k)},
        {"kmeans_restarts", std::to_string(kmeans_restarts)},
        {"kmeans_max_iter", std::to_string(kmeans_max_iter)},
        {"alpha", num(alpha)},
        {"idw_power", num(idw_power)},
        {"idw_resolution", std::to_string(idw_resolution)},
        {"top_frac", num(top_frac)},
        {"prior_scale", num(prior_scale)},
        {"min_group", std::to_string(min_group)},
        {"stopwords", stopwords},
        {"plant_spec", plant_spec},
        {"workers", std::to_string(workers)},
        {"deterministic", deterministic ? "1" : "0"},
        {"seed", std::to_string(seed)},
    };
}

RunConfig config_from_key_values(const KeyValues& kv, const std::string& base_dir) {
    RunConfig c;
    auto path = [&](const std::string& v) {
        if (v.empty() || base_dir.empty() || fs::path(v).is_absolute()) return v;
        return (fs::path(base_dir) / v).lexically_normal().string();
    };
    try {
        for (const auto& [key, v] : kv) {
            if (key == "papers") c.papers = path(v);
            else if (key == "edges") c.edges = path(v);
            else if (key == "venues") c.venues = path(v);
            else if (key == "epochs") c.epochs = v.empty() ? std::vector<EpochSpec>{} : parse_epochs(v);
            else if (key == "starts_per_node") c.starts_per_node = to_size(key, v);
            else if (key == "max_len") c.max_len = to_size(key, v);
            else if (key == "min_count") c.min_count = to_size(key, v);
            else if (key == "shard_count") c.shard_count = to_size(key, v);
            else if (key == "dim") c.dim = to_size(key, v);
            else if (key == "window") c.window = to_size(key, v);
            else if (key == "negatives") c.negatives = to_size(key, v);
            else if (key == "train_epochs") c.train_epochs = to_size(key, v);
            else if (key == "learning_rate") c.learning_rate = to_double(key, v);
            else if (key == "min_learning_rate") c.min_learning_rate = to_double(key, v);
            else if (key == "subsample") c.subsample = to_double(key, v);
            else if (key == "k") c.k = to_size(key, v);
            else if (key == "resolve_neighbors") c.resolve_neighbors = to_size(key, v);
            else if (key == "kmeans_k") c.kmeans_k = to_size(key, v);
            else if (key == "kmeans_restarts") c.kmeans_restarts = to_size(key, v);
            else if (key == "kmeans_max_iter") c.kmeans_max_iter = to_size(key, v);
            else if (key == "alpha") c.alpha = to_double(key, v);
            else if (key == "idw_power") c.idw_power = to_double(key, v);
            else if (key == "idw_resolution") c.idw_resolution = to_size(key, v);
            else if (key == "top_frac") c.top_frac = to_double(key, v);
            else if (key == "prior_scale") c.prior_scale = to_double(key, v);
            else if (key == "min_group") c.min_group = to_size(key, v);
            else if (key == "stopwords") c.stopwords = path(v);
            else if (key == "plant_spec") c.plant_spec = path(v);
            else if (key == "out") c.out = path(v);
            else if (key == "workers") c.workers = static_cast<unsigned>(std::max<std::size_t>(1, to_size(key, v)));
            else if (key == "deterministic") c.deterministic = to_bool(key, v);
            else if (key == "seed") c.seed = to_size(key, v);
            else throw UsageError("unknown config key '" + key + "'");
        }
    } catch (const PreconditionError& e) {
        throw UsageError(e.what());
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    if (!fs::is_regular_file(path)) throw UsageError("config file not found: " + path);
    try {
        return config_from_key_values(load_key_values(path));
    } catch (const PreconditionError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

WalkOptions walk_options(const RunConfig& cfg, std::size_t epoch_index) {
    WalkOptions w;
    w.starts_per_node = cfg.starts_per_node;
    w.max_len = cfg.max_len;
    w.shard_count = cfg.shard_count;
    w.seed = detail::stream_seed(cfg.seed, 1000 + epoch_index);
    w.workers = cfg.workers;
    return w;
}

TrainConfig train_config(const RunConfig& cfg, std::size_t epoch_index) {
    TrainConfig t;
    t.dim = cfg.dim;
    t.window = cfg.window;
    t.negatives = cfg.negatives;
    t.epochs = cfg.train_epochs;
    t.learning_rate = cfg.learning_rate;
    t.min_learning_rate = cfg.min_learning_rate;
    t.subsample = cfg.subsample;
    t.seed = detail::stream_seed(cfg.seed, 2000 + epoch_index);
    t.workers = cfg.deterministic ? 1 : cfg.workers;
    return t;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IntegrityError("cannot hash " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

void run_synth(const RunConfig& cfg, std::ostream& log) {
    synth::PlantSpec spec = cfg.plant_spec.empty() ? synth::PlantSpec{} : synth::load_plant_spec(cfg.plant_spec);
    spec.seed = cfg.seed;
    const auto corpus = synth::generate_planted(spec);
    fs::create_directories(cfg.out);
    synth::write_synthetic(corpus, cfg.out);
    log << "[synth] " << corpus.papers.size() << " papers, " << corpus.edges.size() << " citations, "
        << corpus.venues.size() << " venues over " << corpus.epochs.size() << " epochs -> " << cfg.out << '\n';
    const fs::path dir(cfg.out);
    std::vector<std::string> inputs;
    if (!cfg.plant_spec.empty()) inputs.push_back(cfg.plant_spec);
    write_manifest(dir, cfg, "synth", inputs,
                   {dir / "papers.tsv", dir / "edges.tsv", dir / "venues.tsv", dir / "communities.tsv"});
}

void run_ingest(const RunConfig& cfg, std::ostream& log) {
    require_epochs(cfg);
    const Tables t = load_tables(cfg);
    const fs::path dir = stage_dir(cfg, "ingest");
    auto f = open_out(dir / "graph_stats.tsv");
    f << "epoch\tnodes\tedges\tcross_epoch_edges\tunknown_paper_edges\tduplicate_edges\tself_loops\n";
    for (const auto& epoch : cfg.epochs) {
        const EpochGraph g = build_epoch_graph(t.papers, t.edges, t.venues, epoch);
        f << epoch.label << '\t' << g.node_count() << '\t' << g.edge_count() << '\t' << g.stats().cross_epoch_edges
          << '\t' << g.stats().unknown_paper_edges << '\t' << t.edges.duplicate_count << '\t'
          << t.edges.selfloop_count << '\n';
        log << "[ingest] " << epoch.label << ": " << g.node_count() << " papers, " << g.edge_count()
            << " citations\n";
    }
    f.close();
    write_manifest(dir, cfg, "ingest", {cfg.papers, cfg.edges, cfg.venues}, {dir / "graph_stats.tsv"});
}

void run_walk(const RunConfig& cfg, std::ostream& log) {
    require_epochs(cfg);
    const Tables t = load_tables(cfg);
    const fs::path dir = stage_dir(cfg, "walk");
    std::vector<CorpusStats> stats;
    std::vector<fs::path> outputs;
    for (std::size_t e = 0; e < cfg.epochs.size(); ++e) {
        const auto& epoch = cfg.epochs[e];
        Timer timer;
        const EpochGraph g = build_epoch_graph(t.papers, t.edges, t.venues, epoch);
        std::vector<VenueTrail> raw_trails;
        {
            const auto paper_trails = walk_epoch(g, walk_options(cfg, e));
            raw_trails = to_venue_trails(paper_trails, g);
        }
        const std::size_t raw_count = raw_trails.size();
        const TrailCorpus corpus = filter_and_prune(std::move(raw_trails), cfg.min_count, epoch);
        const fs::path path = dir / (epoch.label + ".corpus");
        write_corpus(corpus, path.string());
        outputs.push_back(path);
        stats.push_back({epoch.label, raw_count, corpus.trails.size(), corpus.token_total(), corpus.token_counts.size()});
        log << "[walk] " << epoch.label << ": " << corpus.trails.size() << " trails, " << corpus.token_total()
            << " tokens, " << corpus.token_counts.size() << " venues (" << num(timer.seconds()) << " s)\n";
    }
    write_corpus_stats(stats, (dir / "corpus_stats.tsv").string());
    outputs.push_back(dir / "corpus_stats.tsv");
    write_manifest(dir, cfg, "walk", {cfg.papers, cfg.edges, cfg.venues}, outputs);
}

void run_train(const RunConfig& cfg, std::ostream& log) {
    require_epochs(cfg);
    const fs::path walk_dir = fs::path(cfg.out) / "walk";
    std::vector<std::string> inputs;
    for (const auto& epoch : cfg.epochs) {
        const fs::path p = walk_dir / (epoch.label + ".corpus");
        if (!fs::is_regular_file(p)) throw IntegrityError("missing corpus: " + p.string());
        inputs.push_back(p.string());
    }
    const fs::path dir = stage_dir(cfg, "train");
    std::vector<SeriesEntry> entries;
    std::vector<fs::path> outputs;
    for (std::size_t e = 0; e < cfg.epochs.size(); ++e) {
        const auto& epoch = cfg.epochs[e];
        Timer timer;
        const TrailCorpus corpus = read_corpus(inputs[e], epoch);
        const TrainResult result = train(corpus, train_config(cfg, e));
        const std::string vec_name = epoch.label + ".vec";
        write_word2vec(result.embedding, (dir / vec_name).string());
        write_train_log(result.log, (dir / ("train_log_" + epoch.label + ".tsv")).string());
        entries.push_back({epoch.label, vec_name});
        outputs.push_back(dir / vec_name);
        outputs.push_back(dir / ("train_log_" + epoch.label + ".tsv"));
        log << "[train] " << epoch.label << ": " << result.embedding.size() << " venues, final loss "
            << (result.log.empty() ? 0.0 : result.log.back().mean_loss) << " (" << num(timer.seconds()) << " s)\n";
    }
    write_series_manifest(entries, series_manifest(cfg).string());
    outputs.push_back(series_manifest(cfg));
    write_manifest(dir, cfg, "train", inputs, outputs);
}

void run_change(const RunConfig& cfg, std::ostream& log) {
    const EmbeddingSeries series = load_trained_series(cfg);
    const VenueTable venues = load_venues(cfg);
    const fs::path dir = stage_dir(cfg, "change");

    auto change = open_out(dir / "change.tsv");
    change << "venue_id\tt1\tt2\tmethod\td\n";
    auto fields = open_out(dir / "field_size.tsv");
    fields << "t1\tt2\tfield\tvenues\tmean_d\tcorrelation\n";

    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const auto& a = series[i];
        const auto& b = series[i + 1];
        const auto shared = shared_vocabulary(a, b);
        std::size_t degenerate = 0;
        if (a.size() > cfg.k && b.size() > cfg.k) {
            for (VenueId v : shared) {
                try {
                    const auto s = local_change(a, b, v, cfg.k);
                    change << raw(v) << '\t' << s.t1 << '\t' << s.t2 << "\tlocal\t" << num(s.d) << '\n';
                } catch (const NumericError&) {
                    ++degenerate;
                }
            }
        }
        if (shared.empty()) continue;
        const auto rotation = procrustes_rotation(a, b, shared);
        if (rotation.underdetermined || rotation.rank_deficient)
            log << "[change] warning: " << a.label() << "->" << b.label() << " alignment uses " << shared.size()
                << " shared venues for " << a.dim() << " dimensions; rotation is not unique\n";
        const AreaMap areas = resolve_areas(b, venues, cfg.resolve_neighbors);
        std::map<std::string, std::vector<double>> by_field;
        for (VenueId v : shared) {
            const auto s = aligned_change(a, b, rotation, v);
            change << raw(v) << '\t' << s.t1 << '\t' << s.t2 << "\taligned\t" << num(s.d) << '\n';
            if (auto it = areas.find(v); it != areas.end()) by_field[std::string(1, area_code(it->second))].push_back(s.d);
        }
        try {
            const auto report = field_size_effect(by_field);
            for (const auto& r : report.rows)
                fields << a.label() << '\t' << b.label() << '\t' << r.field << '\t' << r.venues << '\t'
                       << num(r.mean_d) << '\t' << num(report.correlation) << '\n';
        } catch (const PreconditionError&) {
            log << "[change] " << a.label() << "->" << b.label() << ": fewer than two labeled fields\n";
        }
        log << "[change] " << a.label() << "->" << b.label() << ": " << shared.size() << " shared venues"
            << (degenerate ? ", " + std::to_string(degenerate) + " degenerate local scores skipped" : "") << '\n';
    }
    change.close();
    fields.close();

    auto totals = open_out(dir / "total_change.tsv");
    totals << "venue_id\tfirst_epoch\tpairs\ttotal_d\n";
    std::set<VenueId> all;
    for (const auto& e : series) all.insert(e.ids().begin(), e.ids().end());
    for (VenueId v : all) {
        std::size_t present = 0;
        for (const auto& e : series) present += e.contains(v) ? 1 : 0;
        if (present < 2) continue;
        try {
            const auto t = total_local_change(series, v, cfg.k);
            totals << raw(v) << '\t' << t.first_epoch << '\t' << t.pairs << '\t' << num(t.total) << '\n';
        } catch (const Error&) {
            // Degenerate neighbourhoods or epochs too small for k.
        }
    }
    totals.close();

    auto inputs = series_inputs(cfg);
    inputs.push_back(cfg.venues);
    write_manifest(dir, cfg, "change", inputs,
                   {dir / "change.tsv", dir / "total_change.tsv", dir / "field_size.tsv"});
}

void run_ternary(const RunConfig& cfg, std::ostream& log) {
    const EmbeddingSeries series = load_trained_series(cfg);
    const VenueTable venues = load_venues(cfg);
    const fs::path dir = stage_dir(cfg, "ternary");
    std::vector<fs::path> outputs{dir / "ternary.tsv", dir / "clusters.tsv", dir / "ecs_summary.tsv",
                                  dir / "trajectories.tsv"};

    auto coords_out = open_out(dir / "ternary.tsv");
    coords_out << "venue_id\tepoch\tp\tl\th\tcluster\treference_area\tecs\n";
    auto clusters_out = open_out(dir / "clusters.tsv");
    clusters_out << "epoch\tcluster\tlabel\tsize\tp\tl\th\n";
    auto summary_out = open_out(dir / "ecs_summary.tsv");
    summary_out << "epoch\tvenues\tmean_similarity\n";

    std::vector<Poles> poles;
    for (const auto& emb : series) {
        const AreaMap areas = resolve_areas(emb, venues, cfg.resolve_neighbors);
        poles.push_back(build_poles(emb, areas));

        std::vector<VenueId> ids = emb.ids();
        std::sort(ids.begin(), ids.end());
        std::vector<TernaryCoord> coords;
        std::vector<Point3> points;
        for (VenueId v : ids) {
            coords.push_back(ternary_coords(emb, v, poles.back()));
            points.push_back({coords.back().p, coords.back().l, coords.back().h});
        }
        KMeansOptions km;
        km.k = cfg.kmeans_k;
        km.restarts = cfg.kmeans_restarts;
        km.max_iter = cfg.kmeans_max_iter;
        km.seed = cfg.seed;
        const KMeansResult clusters = kmeans(points, km);
        const Clustering all_clusters(ids, clusters.assignment);
        const auto labels = label_clusters(all_clusters, areas);

        std::vector<VenueId> labeled;
        std::vector<int> kmeans_labeled, reference;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            auto it = areas.find(ids[i]);
            if (it == areas.end()) continue;
            labeled.push_back(ids[i]);
            kmeans_labeled.push_back(clusters.assignment[i]);
            reference.push_back(static_cast<int>(it->second));
        }
        std::map<VenueId, double> ecs;
        std::vector<IdwSample> samples;
        if (!labeled.empty()) {
            const Clustering a(labeled, kmeans_labeled), b(labeled, reference);
            const auto scores = element_centric_similarity(a, b, cfg.alpha);
            for (std::size_t i = 0; i < labeled.size(); ++i) ecs[labeled[i]] = scores[i];
            summary_out << emb.label() << '\t' << labeled.size() << '\t' << num(mean_similarity(scores)) << '\n';
        }

        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto& c = coords[i];
            auto area = areas.find(ids[i]);
            auto score = ecs.find(ids[i]);
            coords_out << raw(ids[i]) << '\t' << emb.label() << '\t' << exact(c.p) << '\t' << exact(c.l) << '\t'
                       << exact(c.h) << '\t' << clusters.assignment[i] << '\t'
                       << (area == areas.end() ? std::string() : std::string(1, area_code(area->second))) << '\t'
                       << (score == ecs.end() ? std::string("NA") : num(score->second)) << '\n';
            if (score != ecs.end()) samples.push_back({c.p, c.l, c.h, score->second});
        }
        std::vector<std::size_t> sizes(cfg.kmeans_k, 0);
        for (int a : clusters.assignment) ++sizes[static_cast<std::size_t>(a)];
        for (std::size_t c = 0; c < cfg.kmeans_k; ++c) {
            auto lab = labels.find(static_cast<int>(c));
            const auto& cen = clusters.centroids[c];
            clusters_out << emb.label() << '\t' << c << '\t'
                         << (lab == labels.end() ? std::string() : std::string(1, area_code(lab->second))) << '\t'
                         << sizes[c] << '\t' << num(cen[0]) << '\t' << num(cen[1]) << '\t' << num(cen[2]) << '\n';
        }

        if (!samples.empty()) {
            const auto grid = idw_grid(samples, cfg.idw_resolution, cfg.idw_power);
            const fs::path hp = dir / ("heatmap_" + emb.label() + ".tsv");
            auto h = open_out(hp);
            h << "p\tl\th\tvalue\n";
            for (const auto& g : grid.points)
                h << num(g.p) << '\t' << num(g.l) << '\t' << num(g.h) << '\t' << num(g.value) << '\n';
            outputs.push_back(hp);
        }
        log << "[ternary] " << emb.label() << ": " << ids.size() << " venues, k-means inertia "
            << num(clusters.inertia) << '\n';
    }
    coords_out.close();
    clusters_out.close();
    summary_out.close();

    auto traj = open_out(dir / "trajectories.tsv");
    traj << "venue_id\tstep\tepoch\tp\tl\th\n";
    std::set<VenueId> all;
    for (const auto& e : series) all.insert(e.ids().begin(), e.ids().end());
    for (VenueId v : all) {
        const auto t = trajectory(series, v, poles);
        for (std::size_t s = 0; s < t.points.size(); ++s) {
            const auto& c = t.points[s];
            traj << raw(v) << '\t' << s << '\t' << c.epoch << '\t' << exact(c.p) << '\t' << exact(c.l) << '\t'
                 << exact(c.h) << '\n';
        }
    }
    traj.close();

    auto inputs = series_inputs(cfg);
    inputs.push_back(cfg.venues);
    write_manifest(dir, cfg, "ternary", inputs, outputs);
}

void run_emerge(const RunConfig& cfg, std::ostream& log) {
    const EmbeddingSeries series = load_trained_series(cfg);
    const VenueTable venues = load_venues(cfg);
    const StopwordSet stop = cfg.stopwords.empty() ? default_stopwords() : load_stopwords(cfg.stopwords);
    const fs::path dir = stage_dir(cfg, "emerge");
    std::vector<fs::path> outputs{dir / "delta_d.tsv", dir / "unscored.tsv", dir / "skipped_groups.tsv"};

    const DeltaDTable table = delta_d_table(series, cfg.k);
    {
        auto f = open_out(dir / "delta_d.tsv");
        f << "venue_id\tt_est\td_first\td_last\tdelta\n";
        for (const auto& d : table.scored)
            f << raw(d.venue) << '\t' << d.t_est << '\t' << num(d.d_first) << '\t' << num(d.d_last) << '\t'
              << num(d.delta) << '\n';
        auto u = open_out(dir / "unscored.tsv");
        u << "venue_id\treason\n";
        for (const auto& [v, why] : table.unscored) u << raw(v) << '\t' << why << '\n';
    }

    TitleTokens titles;
    for (const auto& d : table.scored)
        if (const VenueRecord* rec = venues.find(d.venue)) titles[d.venue] = tokenize_title(rec->name, stop);

    std::vector<std::string> order;
    for (const auto& e : series) order.push_back(e.label());
    const auto report = emergent_terms(table.scored, titles, order, cfg.top_frac, cfg.prior_scale, cfg.min_group);
    for (const auto& g : report.groups) {
        const fs::path p = dir / ("terms_" + g.epoch + ".tsv");
        auto f = open_out(p);
        f << "token\tz\tcount_top\tcount_rest\n";
        for (const auto& t : g.terms) f << t.token << '\t' << num(t.z) << '\t' << t.count_a << '\t' << t.count_b << '\n';
        outputs.push_back(p);
        log << "[emerge] " << g.epoch << ": " << g.top.size() << " of " << g.top.size() + g.rest.size()
            << " venues in the top group; leading term '" << (g.terms.empty() ? "" : g.terms.front().token)
            << "'\n";
    }
    {
        auto f = open_out(dir / "skipped_groups.tsv");
        f << "epoch\treason\n";
        for (const auto& [epoch, why] : report.skipped) f << epoch << '\t' << why << '\n';
    }

    auto inputs = series_inputs(cfg);
    inputs.push_back(cfg.venues);
    write_manifest(dir, cfg, "emerge", inputs, outputs);
}

void run_all(const RunConfig& cfg, std::ostream& log) {
    Timer timer;
    run_ingest(cfg, log);
    run_walk(cfg, log);
    run_train(cfg, log);
    run_change(cfg, log);
    run_ternary(cfg, log);
    run_emerge(cfg, log);
    log << "[all] done in " << num(timer.seconds()) << " s\n";
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e)) return 1;
    if (dynamic_cast<const NumericError*>(&e)) return 3;
    return 2;
}

}  // namespace diachron
