#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "diachron/pipeline.hpp"
#include "support.hpp"

using namespace diachron;
namespace fs = std::filesystem;

namespace {

const char* const kStages[] = {"ingest", "walk", "train", "change", "ternary", "emerge"};

const char* const kSmallSpec =
    "communities = 3\nvenues_per_community = 10\npapers_per_venue = 30\n"
    "epochs = 1990s:1990-1999,2000s:2000-2009,2010s:2010-2021\nmigrate = 2:1:1\n";

std::string small_run_config(const fs::path& data) {
    return "papers = " + (data / "papers.tsv").string() + "\nedges = " + (data / "edges.tsv").string() +
           "\nvenues = " + (data / "venues.tsv").string() +
           "\nepochs = 1990s:1990-1999,2000s:2000-2009,2010s:2010-2021\n"
           "min_count = 20\ndim = 16\ntrain_epochs = 2\nk = 5\nidw_resolution = 10\nkmeans_restarts = 3\n";
}

int run_cli(const std::string& args, const std::string& stderr_path) {
    const std::string cmd = std::string(DIACHRON_CLI) + " " + args + " > /dev/null 2> " + stderr_path;
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Output rows of a stage manifest: "<relative path>\t<sha256>".
std::vector<std::string> manifest_outputs(const fs::path& stage_dir) {
    std::istringstream in(testing::read_text((stage_dir / "manifest.tsv").string()));
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("output\t", 0) == 0) rows.push_back(line.substr(7));
    return rows;
}

}  // namespace

TEST_CASE("run configuration") {
    auto cfg = config_from_key_values(parse_key_values("papers = p.tsv\nedges = /abs/e.tsv\nk = 7\nseed = 3\n"), "/base");
    CHECK(cfg.papers == "/base/p.tsv");
    CHECK(cfg.edges == "/abs/e.tsv");
    CHECK(cfg.k == 7);
    CHECK(cfg.seed == 3);
    CHECK(cfg.dim == 100);
    CHECK_THROWS_AS(config_from_key_values(parse_key_values("colour = blue\n")), UsageError);
    CHECK_THROWS_AS(config_from_key_values(parse_key_values("k = many\n")), UsageError);
    CHECK_THROWS_AS(config_from_key_values(parse_key_values("epochs = a:2000-1990\n")), UsageError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.conf"), UsageError);

    auto again = config_from_key_values(cfg.describe());
    CHECK(again.describe() == cfg.describe());
}

TEST_CASE("stage seeds") {
    RunConfig cfg;
    cfg.epochs = parse_epochs("a:1990-1999,b:2000-2009");
    cfg.workers = 4;
    CHECK(walk_options(cfg, 0).seed != walk_options(cfg, 1).seed);
    CHECK(train_config(cfg, 0).seed != train_config(cfg, 1).seed);
    CHECK(walk_options(cfg, 0).seed != train_config(cfg, 0).seed);
    CHECK(train_config(cfg, 0).workers == 4);
    cfg.deterministic = true;
    CHECK(train_config(cfg, 0).workers == 1);
    cfg.seed = 2;
    CHECK(walk_options(cfg, 0).seed != walk_options(RunConfig{}, 0).seed);
}

TEST_CASE("exit codes and hashing") {
    CHECK(exit_code_for(UsageError("x")) == 1);
    CHECK(exit_code_for(IntegrityError("x")) == 2);
    CHECK(exit_code_for(ParseError("f", 3, "x")) == 2);
    CHECK(exit_code_for(EmptyCorpusError("x")) == 2);
    CHECK(exit_code_for(NumericError("x")) == 3);

    testing::TempDir dir;
    testing::write_text(dir.file("abc"), "abc");
    CHECK(sha256_file(dir.file("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK_THROWS_AS(sha256_file(dir.file("none")), IntegrityError);
}

TEST_CASE("in-process pipeline writes every stage") {
    testing::TempDir dir;
    RunConfig synth;
    synth.plant_spec = testing::write_text(dir.file("spec.conf"), kSmallSpec);
    synth.out = dir.file("data");
    std::ostringstream log;
    run_synth(synth, log);

    auto cfg = config_from_key_values(parse_key_values(small_run_config(dir.path() / "data")));
    cfg.out = dir.file("out");
    cfg.deterministic = true;
    run_all(cfg, log);
    const fs::path out = cfg.out;
    for (const char* s : kStages) CHECK(fs::is_regular_file(out / s / "manifest.tsv"));
    for (const char* f : {"ingest/graph_stats.tsv", "walk/1990s.corpus", "walk/corpus_stats.tsv", "train/2010s.vec",
                          "train/series.tsv", "train/train_log_2000s.tsv", "change/change.tsv",
                          "change/total_change.tsv", "change/field_size.tsv", "ternary/ternary.tsv",
                          "ternary/clusters.tsv", "ternary/ecs_summary.tsv", "ternary/trajectories.tsv",
                          "ternary/heatmap_1990s.tsv", "emerge/delta_d.tsv", "emerge/unscored.tsv",
                          "emerge/skipped_groups.tsv"})
        CHECK_MESSAGE(fs::is_regular_file(out / f), f);
    CHECK(testing::read_text((out / "change/change.tsv").string()).rfind("venue_id\tt1\tt2\tmethod\td\n", 0) == 0);
    CHECK_FALSE(manifest_outputs(out / "train").empty());
}

TEST_CASE("command line errors") {
    testing::TempDir dir;
    const std::string err = dir.file("stderr.txt");
    CHECK(run_cli("", err) == 1);
    CHECK(run_cli("train", err) == 1);
    CHECK(run_cli("bogus --config x", err) == 1);
    CHECK(run_cli("ingest --config " + dir.file("missing.conf"), err) == 1);
    testing::write_text(dir.file("bad.conf"), "colour = blue\n");
    CHECK(run_cli("ingest --config " + dir.file("bad.conf"), err) == 1);
    CHECK(run_cli("ingest --config " + dir.file("bad.conf") + " --workers 0", err) == 1);

    // A train stage without walk output names the missing corpus.
    CHECK(run_cli("synth --out " + dir.file("data"), err) == 0);
    testing::write_text(dir.file("run.conf"), small_run_config(dir.path() / "data"));
    CHECK(run_cli("train --config " + dir.file("run.conf") + " --out " + dir.file("out"), err) == 2);
    const std::string msg = testing::read_text(err);
    CHECK(msg.find("missing corpus") != std::string::npos);
    CHECK(msg.find((dir.path() / "out" / "walk" / "1990s.corpus").string()) != std::string::npos);

    testing::write_text(dir.file("bad_papers.tsv"), "paper_id\tvenue_id\tyear\n1\t1\tsoon\n");
    testing::write_text(dir.file("bad.conf"), "papers = " + dir.file("bad_papers.tsv") + "\nedges = " +
                                                  dir.file("data/edges.tsv") + "\nvenues = " +
                                                  dir.file("data/venues.tsv") + "\nepochs = a:1990-1999\n");
    CHECK(run_cli("ingest --config " + dir.file("bad.conf") + " --out " + dir.file("out2"), err) == 2);
    CHECK(testing::read_text(err).find("bad_papers.tsv:2:") != std::string::npos);
}

TEST_CASE("deterministic command line runs are byte-identical") {
    testing::TempDir dir;
    const std::string err = dir.file("stderr.txt");
    testing::write_text(dir.file("spec.conf"), kSmallSpec);
    REQUIRE(run_cli("synth --config " + dir.file("spec.conf") + " --out " + dir.file("data"), err) == 0);
    testing::write_text(dir.file("run.conf"), small_run_config(dir.path() / "data"));

    std::map<std::string, std::string> inputs;
    for (const char* f : {"papers.tsv", "edges.tsv", "venues.tsv"}) inputs[f] = sha256_file(dir.file(std::string("data/") + f));

    for (const char* o : {"out1", "out2"})
        REQUIRE(run_cli("all --config " + dir.file("run.conf") + " --deterministic --seed 7 --out " + dir.file(o), err) == 0);
    for (const char* s : kStages) {
        auto a = manifest_outputs(dir.path() / "out1" / s);
        CHECK(!a.empty());
        CHECK(a == manifest_outputs(dir.path() / "out2" / s));
    }
    for (const auto& [f, hash] : inputs) CHECK(sha256_file(dir.file("data/" + f)) == hash);

    REQUIRE(run_cli("walk --config " + dir.file("run.conf") + " --seed 8 --out " + dir.file("out3"), err) == 0);
    CHECK(manifest_outputs(dir.path() / "out3" / "walk") != manifest_outputs(dir.path() / "out1" / "walk"));
}
