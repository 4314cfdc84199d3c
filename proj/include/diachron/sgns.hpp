#pragma once
// Skip-gram with negative sampling over venue trails.
//
// Notation: the centre token's *input* vector v is trained to score its
// context token's *output* vector u_c high and k sampled negatives' output
// vectors u_n low:
//
//   L = -log sigma(u_c . v) - sum_n log sigma(-u_n . v)
//
// Input vectors are the published embedding; output vectors stay internal.
// Negative draws equal to the context or to the centre token are dropped.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "diachron/embedding.hpp"
#include "diachron/errors.hpp"
#include "diachron/types.hpp"
#include "diachron/walk.hpp"

namespace diachron {

// Dense index <-> venue bijection, ordered by descending count then ascending
// venue id, with the smoothed unigram distribution used for negatives.
class Vocabulary {
public:
    static Vocabulary from_counts(const std::map<VenueId, std::size_t>& counts, double power = 0.75);

    std::size_t size() const noexcept { return ids_.size(); }
    VenueId id(std::size_t i) const { return ids_[i]; }
    const std::vector<VenueId>& ids() const noexcept { return ids_; }
    std::size_t count(std::size_t i) const { return counts_[i]; }
    std::optional<std::size_t> index_of(VenueId v) const;

    double negative_probability(std::size_t i) const { return probs_[i]; }
    // Inverse-CDF draw for u in [0, 1).
    std::size_t sample_negative(double u) const;

private:
    std::vector<VenueId> ids_;
    std::vector<std::size_t> counts_;
    std::vector<double> probs_;
    std::vector<double> cdf_;
    std::unordered_map<VenueId, std::size_t> index_;
};

// Throws EmptyCorpusError for a corpus without tokens.
Vocabulary build_vocab(const TrailCorpus& corpus, double power = 0.75);

struct TrainConfig {
    std::size_t dim = 100;
    std::size_t window = 10;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    double learning_rate = 0.025;
    double min_learning_rate = 1e-4;
    std::uint64_t seed = 1;
    // Frequent-token subsampling threshold; 0 disables it.
    double subsample = 0.0;
    double ns_exponent = 0.75;
    // Draw the effective window per position uniformly from 1..window.
    bool dynamic_window = true;
    // 1 = deterministic; more = lock-free shared updates, not reproducible.
    unsigned workers = 1;

    void validate() const;
};

// Numerically stable -log sigma(x).
inline double neg_log_sigmoid(double x) {
    return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

template <class Real>
double sgns_pair_loss(std::span<const Real> center, std::span<const Real> context,
                      std::span<const std::span<const Real>> negatives) {
    auto dot = [](std::span<const Real> a, std::span<const Real> b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
        return s;
    };
    double loss = neg_log_sigmoid(dot(context, center));
    for (auto n : negatives) loss += neg_log_sigmoid(-dot(n, center));
    return loss;
}

template <class Real>
struct PairGradients {
    double loss = 0;
    std::vector<Real> center;
    std::vector<Real> context;
    std::vector<std::vector<Real>> negatives;
};

// Analytic gradients of the pair loss with respect to every vector involved.
template <class Real>
PairGradients<Real> sgns_pair_gradients(std::span<const Real> center, std::span<const Real> context,
                                        std::span<const std::span<const Real>> negatives) {
    const std::size_t d = center.size();
    PairGradients<Real> g;
    g.loss = sgns_pair_loss(center, context, negatives);
    g.center.assign(d, Real(0));

    auto accumulate = [&](std::span<const Real> target, double label) {
        double f = 0;
        for (std::size_t i = 0; i < d; ++i) f += static_cast<double>(target[i]) * static_cast<double>(center[i]);
        // dL/df = sigma(f) - label
        const double coeff = sigmoid(f) - label;
        std::vector<Real> gt(d);
        for (std::size_t i = 0; i < d; ++i) {
            g.center[i] += static_cast<Real>(coeff * static_cast<double>(target[i]));
            gt[i] = static_cast<Real>(coeff * static_cast<double>(center[i]));
        }
        return gt;
    };
    g.context = accumulate(context, 1.0);
    for (auto n : negatives) g.negatives.push_back(accumulate(n, 0.0));
    return g;
}

// In-place gradient step on one (centre, context, negatives) group. Uses the
// pre-update vectors for every gradient, so with distinct vectors this is
// exactly v <- v - lr * dL/dv for all of them. `scratch` must hold dim
// entries. Returns the loss before the update.
template <class Real>
double sgns_apply(std::span<Real> center, std::span<Real> context, std::span<const std::span<Real>> negatives,
                  Real lr, std::span<Real> scratch) {
    const std::size_t d = center.size();
    std::fill(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(d), Real(0));
    double loss = 0;

    auto step = [&](std::span<Real> target, Real label) {
        Real f = 0;
        for (std::size_t i = 0; i < d; ++i) f += target[i] * center[i];
        const double fd = static_cast<double>(f);
        loss += label > 0 ? neg_log_sigmoid(fd) : neg_log_sigmoid(-fd);
        // Negative of dL/df.
        const Real g = label - static_cast<Real>(sigmoid(fd));
        const Real scaled = lr * g;
        for (std::size_t i = 0; i < d; ++i) {
            scratch[i] += g * target[i];
            target[i] += scaled * center[i];
        }
    };
    step(context, Real(1));
    for (auto n : negatives) step(n, Real(0));
    for (std::size_t i = 0; i < d; ++i) center[i] += lr * scratch[i];
    return loss;
}

template <class Real>
struct PairStepResult {
    double loss = 0;
    std::vector<Real> center;
    std::vector<Real> context;
    std::vector<std::vector<Real>> negatives;
};

// Value-semantics wrapper around sgns_apply: returns the loss and updated
// copies, leaving the inputs untouched. Throws NumericError on non-finite
// input.
template <class Real>
PairStepResult<Real> sgns_pair_step(std::span<const Real> center, std::span<const Real> context,
                                    std::span<const std::span<const Real>> negatives, Real lr) {
    auto finite = [](std::span<const Real> v) {
        for (Real x : v)
            if (!std::isfinite(static_cast<double>(x))) return false;
        return true;
    };
    if (!finite(center) || !finite(context)) throw NumericError("sgns_pair_step: non-finite input");
    for (auto n : negatives)
        if (!finite(n)) throw NumericError("sgns_pair_step: non-finite input");
    if (!(lr >= 0)) throw PreconditionError("sgns_pair_step: learning rate must be non-negative");

    PairStepResult<Real> r;
    r.center.assign(center.begin(), center.end());
    r.context.assign(context.begin(), context.end());
    for (auto n : negatives) r.negatives.emplace_back(n.begin(), n.end());
    std::vector<std::span<Real>> neg_spans;
    for (auto& n : r.negatives) neg_spans.emplace_back(n);
    std::vector<Real> scratch(center.size());
    r.loss = sgns_apply<Real>(r.center, r.context, neg_spans, lr, scratch);
    return r;
}

struct TrainLogEntry {
    std::size_t epoch = 0;
    std::size_t tokens = 0;  // cumulative tokens processed
    double mean_loss = 0;    // per (centre, context) pair in this epoch
    double learning_rate = 0;
};

struct TrainResult {
    EpochEmbedding embedding;
    std::vector<float> output_vectors;  // |V| x D, same row order as the embedding
    std::vector<TrainLogEntry> log;
};

// Input-vector initialization: uniform in [-0.5/D, 0.5/D], row-major in
// vocabulary order.
std::vector<float> initialize_input_vectors(std::size_t rows, std::size_t dim, std::uint64_t seed);

// Trains one epoch embedding. The embedding's rows follow the vocabulary order
// and its label is corpus.epoch.label. Throws NumericError if any parameter
// becomes non-finite.
TrainResult train(const TrailCorpus& corpus, const TrainConfig& config);

void write_train_log(std::span<const TrainLogEntry> log, const std::string& path);

}  // namespace diachron
