// diachron: venue-level citation trail embeddings across epochs.
//
//   diachron <subcommand> --config <path> [--seed N] [--workers N] [--deterministic] [--out DIR]
//
// Flags override the corresponding config keys. `synth` takes a plant spec as
// its config (optional) and writes the corpus tables into --out.

#include <CLI11.hpp>

#include <iostream>

#include "diachron/pipeline.hpp"

namespace {

using Runner = void (*)(const diachron::RunConfig&, std::ostream&);

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    bool deterministic = false;
    std::string out;
};

void add_common(CLI::App* sub, Options& opt, bool config_required) {
    auto* c = sub->add_option("--config", opt.config, config_required ? "run config (key = value)" : "plant spec (key = value)");
    if (config_required) c->required();
    sub->add_option("--seed", opt.seed, "master seed");
    sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--deterministic", opt.deterministic, "single-worker training, byte-identical outputs");
    sub->add_option("--out", opt.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diachronic venue embeddings from citation trails"};
    app.require_subcommand(1);
    Options opt;

    const std::vector<std::tuple<const char*, const char*, Runner>> commands = {
        {"synth", "generate a planted synthetic corpus", diachron::run_synth},
        {"ingest", "build per-epoch citation graphs and report statistics", diachron::run_ingest},
        {"walk", "sample venue trails per epoch", diachron::run_walk},
        {"train", "train one embedding per epoch", diachron::run_train},
        {"change", "local and aligned semantic change", diachron::run_change},
        {"ternary", "area poles, ternary coordinates, clustering and heatmaps", diachron::run_ternary},
        {"emerge", "emergence scores and emergent title terms", diachron::run_emerge},
        {"all", "ingest, walk, train, change, ternary, emerge", diachron::run_all},
    };
    std::map<CLI::App*, Runner> runners;
    for (const auto& [name, help, fn] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, opt, std::string(name) != "synth");
        runners[sub] = fn;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    CLI::App* chosen = app.get_subcommands().front();
    try {
        diachron::RunConfig cfg;
        if (chosen->get_name() == "synth") {
            cfg.plant_spec = opt.config;
        } else {
            cfg = diachron::load_run_config(opt.config);
        }
        if (opt.seed) cfg.seed = *opt.seed;
        if (opt.workers) cfg.workers = *opt.workers;
        if (opt.deterministic) cfg.deterministic = true;
        if (!opt.out.empty()) cfg.out = opt.out;
        runners.at(chosen)(cfg, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "diachron " << chosen->get_name() << ": " << e.what() << '\n';
        return diachron::exit_code_for(e);
    }
    return 0;
}
