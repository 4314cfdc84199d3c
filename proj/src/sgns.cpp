#include "diachron/sgns.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <thread>

#include "rng.hpp"

namespace diachron {

Vocabulary Vocabulary::from_counts(const std::map<VenueId, std::size_t>& counts, double power) {
    Vocabulary v;
    std::vector<std::pair<VenueId, std::size_t>> entries;
    for (const auto& [id, c] : counts)
        if (c > 0) entries.emplace_back(id, c);
    if (entries.empty()) throw EmptyCorpusError("cannot build a vocabulary from an empty corpus");
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    double total = 0;
    for (const auto& [id, c] : entries) {
        v.index_.emplace(id, v.ids_.size());
        v.ids_.push_back(id);
        v.counts_.push_back(c);
        const double w = std::pow(static_cast<double>(c), power);
        v.probs_.push_back(w);
        total += w;
    }
    double acc = 0;
    for (double& p : v.probs_) {
        p /= total;
        acc += p;
        v.cdf_.push_back(acc);
    }
    v.cdf_.back() = 1.0;
    return v;
}

std::optional<std::size_t> Vocabulary::index_of(VenueId v) const {
    auto it = index_.find(v);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Vocabulary::sample_negative(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::size_t>(it - cdf_.begin());
}

Vocabulary build_vocab(const TrailCorpus& corpus, double power) {
    return Vocabulary::from_counts(corpus.token_counts, power);
}

void TrainConfig::validate() const {
    if (dim < 1) throw PreconditionError("dim must be at least 1");
    if (window < 1) throw PreconditionError("window must be at least 1");
    if (negatives < 1) throw PreconditionError("negatives must be at least 1");
    if (!(learning_rate > 0)) throw PreconditionError("learning rate must be positive");
    if (min_learning_rate < 0 || min_learning_rate > learning_rate)
        throw PreconditionError("min learning rate must lie in [0, learning_rate]");
    if (subsample < 0) throw PreconditionError("subsample threshold must be non-negative");
    if (workers < 1) throw PreconditionError("workers must be at least 1");
}

std::vector<float> initialize_input_vectors(std::size_t rows, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(detail::stream_seed(seed, 0));
    std::uniform_real_distribution<float> unit(0.0f, 1.0f);
    std::vector<float> v(rows * dim);
    const float scale = 1.0f / static_cast<float>(dim);
    for (float& x : v) x = (unit(rng) - 0.5f) * scale;
    return v;
}

namespace {

struct Shared {
    const TrainConfig& cfg;
    const Vocabulary& vocab;
    const std::vector<std::vector<std::uint32_t>>& trails;
    std::vector<float>& input;
    std::vector<float>& output;
    std::vector<double> keep_prob;  // empty when subsampling is off
    std::size_t total_work;         // epochs * corpus tokens
    std::atomic<std::size_t> processed{0};
};

struct WorkerStats {
    double loss = 0;
    std::size_t pairs = 0;
};

double current_lr(const Shared& s, std::size_t processed) {
    const double progress = s.total_work ? static_cast<double>(processed) / static_cast<double>(s.total_work) : 0.0;
    const double lr = s.cfg.learning_rate - (s.cfg.learning_rate - s.cfg.min_learning_rate) * progress;
    return std::max(lr, s.cfg.min_learning_rate);
}

// Trains on trails [begin, end). The only state shared with other workers is
// the parameter matrices and the progress counter.
WorkerStats run_worker(Shared& s, std::size_t begin, std::size_t end, std::mt19937_64& rng) {
    const std::size_t d = s.cfg.dim;
    const std::size_t w = s.cfg.window;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> window_draw(1, w);
    std::vector<float> scratch(d);
    std::vector<std::span<float>> negs;
    std::vector<std::uint32_t> sentence;
    WorkerStats stats;

    for (std::size_t t = begin; t < end; ++t) {
        const auto& trail = s.trails[t];
        sentence.clear();
        for (std::uint32_t idx : trail)
            if (s.keep_prob.empty() || unit(rng) < s.keep_prob[idx]) sentence.push_back(idx);

        const double lr_d = current_lr(s, s.processed.load(std::memory_order_relaxed));
        const float lr = static_cast<float>(lr_d);
        for (std::size_t i = 0; i < sentence.size(); ++i) {
            const std::size_t b = s.cfg.dynamic_window ? window_draw(rng) : w;
            const std::size_t lo = i >= b ? i - b : 0;
            const std::size_t hi = std::min(sentence.size() - 1, i + b);
            std::span<float> center(s.input.data() + sentence[i] * d, d);
            for (std::size_t j = lo; j <= hi; ++j) {
                if (j == i) continue;
                const std::uint32_t ctx = sentence[j];
                negs.clear();
                for (std::size_t n = 0; n < s.cfg.negatives; ++n) {
                    const std::size_t neg = s.vocab.sample_negative(unit(rng));
                    // A draw equal to the centre word would push the word away
                    // from its own context set; skipped like the context itself.
                    if (neg == ctx || neg == sentence[i]) continue;
                    negs.emplace_back(s.output.data() + neg * d, d);
                }
                const double loss =
                    sgns_apply<float>(center, std::span<float>(s.output.data() + ctx * d, d), negs, lr, scratch);
                if (!std::isfinite(loss))
                    throw NumericError("training diverged (non-finite loss) at lr=" + std::to_string(lr_d));
                stats.loss += loss;
                ++stats.pairs;
            }
        }
        s.processed.fetch_add(trail.size(), std::memory_order_relaxed);
    }
    return stats;
}

void check_finite(const std::vector<float>& m, const char* which) {
    for (float x : m)
        if (!std::isfinite(x)) throw NumericError(std::string("training diverged: non-finite ") + which + " vector");
}

}  // namespace

TrainResult train(const TrailCorpus& corpus, const TrainConfig& config) {
    config.validate();
    const Vocabulary vocab = build_vocab(corpus, config.ns_exponent);
    const std::size_t d = config.dim;

    std::vector<std::vector<std::uint32_t>> trails;
    trails.reserve(corpus.trails.size());
    std::size_t corpus_tokens = 0;
    for (const auto& t : corpus.trails) {
        std::vector<std::uint32_t> idx;
        idx.reserve(t.size());
        for (VenueId v : t)
            if (auto i = vocab.index_of(v)) idx.push_back(static_cast<std::uint32_t>(*i));
        corpus_tokens += idx.size();
        trails.push_back(std::move(idx));
    }

    std::vector<float> input = initialize_input_vectors(vocab.size(), d, config.seed);
    std::vector<float> output(vocab.size() * d, 0.0f);

    Shared shared{config, vocab, trails, input, output, {}, config.epochs * corpus_tokens};
    if (config.subsample > 0) {
        // word2vec's keep probability (sqrt(f/t) + 1) * t/f, f the token frequency.
        const double threshold = config.subsample * static_cast<double>(corpus_tokens);
        shared.keep_prob.resize(vocab.size());
        for (std::size_t i = 0; i < vocab.size(); ++i) {
            const double c = static_cast<double>(vocab.count(i));
            shared.keep_prob[i] = std::min(1.0, (std::sqrt(c / threshold) + 1.0) * threshold / c);
        }
    }

    TrainResult result;
    const unsigned workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(trails.size())));
    std::vector<std::mt19937_64> rngs;
    for (unsigned k = 0; k < workers; ++k) rngs.emplace_back(detail::stream_seed(config.seed, 1 + k));

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<WorkerStats> stats(workers);
        if (workers == 1) {
            stats[0] = run_worker(shared, 0, trails.size(), rngs[0]);
        } else {
            // Hogwild: workers update the shared matrices without locks. The
            // races are accepted; results are only statistically reproducible.
            std::vector<std::exception_ptr> errors(workers);
            {
                std::vector<std::jthread> pool;
                for (unsigned k = 0; k < workers; ++k) {
                    pool.emplace_back([&, k] {
                        try {
                            const std::size_t b = k * trails.size() / workers;
                            const std::size_t e = (k + 1) * trails.size() / workers;
                            stats[k] = run_worker(shared, b, e, rngs[k]);
                        } catch (...) {
                            errors[k] = std::current_exception();
                        }
                    });
                }
            }
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
        check_finite(input, "input");
        check_finite(output, "output");

        WorkerStats total;
        for (const auto& s : stats) {
            total.loss += s.loss;
            total.pairs += s.pairs;
        }
        const std::size_t done = shared.processed.load();
        result.log.push_back({epoch + 1, done, total.pairs ? total.loss / static_cast<double>(total.pairs) : 0.0,
                              current_lr(shared, done)});
    }

    result.embedding = EpochEmbedding(corpus.epoch.label, vocab.ids(), d, std::move(input));
    result.output_vectors = std::move(output);
    return result;
}

void write_train_log(std::span<const TrainLogEntry> log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IntegrityError("cannot write " + path);
    out << "epoch\ttokens\tmean_loss\tlr\n";
    char buf[64];
    for (const auto& e : log) {
        std::snprintf(buf, sizeof buf, "%.6g\t%.6g", e.mean_loss, e.learning_rate);
        out << e.epoch << '\t' << e.tokens << '\t' << buf << '\n';
    }
}

}  // namespace diachron
