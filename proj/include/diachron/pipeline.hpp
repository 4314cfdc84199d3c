#pragma once
// End-to-end orchestration behind the `diachron` command line tool. Each stage
// reads its inputs from the previous stage's directory under the output root
// and writes its tables plus a manifest.tsv.
//
//   <out>/ingest/   graph_stats.tsv
//   <out>/walk/     <epoch>.corpus, corpus_stats.tsv
//   <out>/train/    <epoch>.vec, train_log_<epoch>.tsv, series.tsv
//   <out>/change/   change.tsv, total_change.tsv, field_size.tsv
//   <out>/ternary/  ternary.tsv, clusters.tsv, ecs_summary.tsv, trajectories.tsv, heatmap_<epoch>.tsv
//   <out>/emerge/   delta_d.tsv, unscored.tsv, terms_<epoch>.tsv, skipped_groups.tsv

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "diachron/errors.hpp"
#include "diachron/keyvalue.hpp"
#include "diachron/sgns.hpp"
#include "diachron/ternary.hpp"
#include "diachron/types.hpp"
#include "diachron/walk.hpp"

namespace diachron {

// Bad command line or configuration.
class UsageError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::string papers;
    std::string edges;
    std::string venues;
    std::vector<EpochSpec> epochs;

    std::size_t starts_per_node = 5;
    std::size_t max_len = 100;
    std::size_t min_count = 50;
    std::size_t shard_count = 64;

    std::size_t dim = 100;
    std::size_t window = 10;
    std::size_t negatives = 5;
    std::size_t train_epochs = 5;
    double learning_rate = 0.025;
    double min_learning_rate = 1e-4;
    double subsample = 0.0;

    std::size_t k = 10;
    std::size_t resolve_neighbors = 50;
    std::size_t kmeans_k = 4;
    std::size_t kmeans_restarts = 10;
    std::size_t kmeans_max_iter = 300;
    double alpha = 0.9;
    double idw_power = 2.0;
    std::size_t idw_resolution = 100;
    double top_frac = 0.10;
    double prior_scale = 10.0;
    std::size_t min_group = 10;
    std::string stopwords;  // empty = built-in list

    std::string plant_spec;  // synth only; empty = built-in default spec

    std::string out = "out";
    unsigned workers = 1;
    bool deterministic = false;
    std::uint64_t seed = 1;

    // Every key/value pair in effect, for the manifest.
    KeyValues describe() const;
};

// Unknown keys and malformed values throw UsageError. Relative paths resolve
// against `base_dir`.
RunConfig config_from_key_values(const KeyValues& kv, const std::string& base_dir = {});
RunConfig load_run_config(const std::string& path);

// Per-stage seeds derived from the run seed.
WalkOptions walk_options(const RunConfig& cfg, std::size_t epoch_index);
TrainConfig train_config(const RunConfig& cfg, std::size_t epoch_index);

// SHA-256 of a file's bytes, lowercase hex.
std::string sha256_file(const std::string& path);

void run_synth(const RunConfig& cfg, std::ostream& log);
void run_ingest(const RunConfig& cfg, std::ostream& log);
void run_walk(const RunConfig& cfg, std::ostream& log);
void run_train(const RunConfig& cfg, std::ostream& log);
void run_change(const RunConfig& cfg, std::ostream& log);
void run_ternary(const RunConfig& cfg, std::ostream& log);
void run_emerge(const RunConfig& cfg, std::ostream& log);
// ingest, walk, train, change, ternary, emerge.
void run_all(const RunConfig& cfg, std::ostream& log);

// Process exit code for an exception escaping a stage: 1 usage, 2 data or
// integrity, 3 numeric.
int exit_code_for(const std::exception& e);

}  // namespace diachron
