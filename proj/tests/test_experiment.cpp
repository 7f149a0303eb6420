#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "polargp/experiment.hpp"
#include "polargp/json_io.hpp"

using namespace polargp;

namespace {

ExperimentConfig small_p2p(double rate) {
    ExperimentConfig cfg;
    cfg.scheme = "p2p";
    cfg.channel = make_bsc_interference(0.05, 0.1, 0.0);
    cfg.n = 64;
    cfg.k = 1;
    cfg.samples = 300;
    cfg.rates = {{0.0, rate, 0.0}};
    cfg.trials = 60;
    cfg.seed_hex = "77aa";
    cfg.threads = 2;
    return cfg;
}

}  // namespace

TEST_CASE("noiseless preset yields zero error rows") {
    ExperimentConfig cfg;
    cfg.scheme = "p2p";
    cfg.channel = make_bsc_interference(0.0, 0.0, 0.0);
    cfg.n = 32;
    cfg.k = 2;
    cfg.samples = 100;
    cfg.rates = {{0.0, 0.3, 0.0}};
    cfg.trials = 1;
    cfg.seed_hex = "1";
    auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].fer == 0.0);
    CHECK(rows[0].trials == 1);
}

TEST_CASE("identical configs produce identical CSV bytes across thread counts") {
    auto a = results_to_csv(run_experiment(small_p2p(0.3)));
    auto b = results_to_csv(run_experiment(small_p2p(0.3)));
    CHECK(a == b);
    auto cfg1 = small_p2p(0.3);
    cfg1.threads = 1;
    auto c = results_to_csv(run_experiment(cfg1));
    CHECK(a == c);
}

TEST_CASE("csv format contract") {
    auto rows = run_experiment(small_p2p(0.3));
    auto csv = results_to_csv(rows);
    CHECK(csv.rfind("rate,receiver,fer,ci95,trials\n", 0) == 0);
    CHECK(csv.find("\r") == std::string::npos);
    // infeasible rate point is reported in-row, not fatal
    auto cfg = small_p2p(0.99);
    auto bad = run_experiment(cfg);
    REQUIRE(bad.size() == 1);
    CHECK(!bad[0].feasible);
    auto bcsv = results_to_csv(bad);
    CHECK(bcsv.find("nan,nan,0") != std::string::npos);
}

TEST_CASE("adding trials never perturbs earlier trials") {
    // with the same seed, the error count over the first T trials is a
    // prefix of the run with 2T trials
    auto cfg = small_p2p(0.45);
    cfg.trials = 30;
    auto r1 = run_experiment(cfg);
    cfg.trials = 60;
    auto r2 = run_experiment(cfg);
    // error counts are monotone under trial extension
    CHECK(r2[0].fer * 60 + 1e-9 >= r1[0].fer * 30);
}

TEST_CASE("doubling trials shrinks the confidence half width like root two") {
    // operate at a rate with FER near one half so p-hat is stable
    auto cfg = small_p2p(0.62);
    cfg.trials = 400;
    auto r1 = run_experiment(cfg);
    cfg.trials = 800;
    auto r2 = run_experiment(cfg);
    REQUIRE(r1[0].fer > 0.15);
    REQUIRE(r1[0].fer < 0.9);
    double shrink = r2[0].ci95 / r1[0].ci95;
    CHECK(std::abs(shrink * std::sqrt(2.0) - 1.0) < 0.1);
}

TEST_CASE("construction cache reproduces byte-identical artifacts") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "polargp-cache-test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto cfg = small_p2p(0.3);
    cfg.cache_dir = dir.string();
    auto r1 = results_to_csv(run_experiment(cfg));
    // one cache file appears; a second run reuses it and agrees
    int files = 0;
    std::string cache_path;
    for (const auto& ent : fs::directory_iterator(dir)) {
        ++files;
        cache_path = ent.path().string();
    }
    CHECK(files == 1);
    std::ifstream in1(cache_path, std::ios::binary);
    std::string bytes1((std::istreambuf_iterator<char>(in1)), {});
    auto r2 = results_to_csv(run_experiment(cfg));
    CHECK(r1 == r2);
    std::ifstream in2(cache_path, std::ios::binary);
    std::string bytes2((std::istreambuf_iterator<char>(in2)), {});
    CHECK(bytes1 == bytes2);
    fs::remove_all(dir);
}

TEST_CASE("config json round trip") {
    auto cfg = small_p2p(0.4);
    cfg.scheme = "bcsi-common";
    cfg.channel = make_bsc_interference(0.05, 0.1, 0.5);
    cfg.rates = {{0.1, 0.4, 0.2}, {0.0, 0.5, 0.3}};
    auto j = to_json(cfg);
    auto back = experiment_from_json(j);
    CHECK(back.scheme == cfg.scheme);
    CHECK(back.n == cfg.n);
    CHECK(back.rates == cfg.rates);
    CHECK(back.seed_hex == cfg.seed_hex);
    CHECK(to_json(back) == j);
}

TEST_CASE("config validation errors") {
    json j{{"scheme", "p2p"}, {"n", 64}, {"rates", {0.3}}};
    CHECK_THROWS_AS(experiment_from_json(j), ConfigError);  // missing channel
    j["channel"] = json{{"preset", "bsc-interference"}, {"p1", 0.05}, {"p2", 0.1}, {"q", 0.0}};
    CHECK_NOTHROW(experiment_from_json(j));
    j["n"] = 63;
    CHECK_THROWS_AS(experiment_from_json(j), ConfigError);
    j["n"] = 64;
    j["scheme"] = "bogus";
    CHECK_THROWS_AS(experiment_from_json(j), ConfigError);
    j["scheme"] = "p2p";
    j["rates"] = {-0.1};
    CHECK_THROWS_AS(experiment_from_json(j), ConfigError);
}

TEST_CASE("channel json round trip including presets") {
    auto ch = make_stuck_memory(0.2);
    auto back = channel_from_json(to_json(ch));
    CHECK(back.trans == ch.trans);
    CHECK(back.state.probs == ch.state.probs);
    auto preset = channel_from_json(json{{"preset", "stuck-memory"}, {"p", 0.2}});
    CHECK(preset.trans == ch.trans);
    CHECK_THROWS_AS(channel_from_json(json{{"preset", "nope"}}), ConfigError);
}

TEST_CASE("polar sets json round trip") {
    ExperimentConfig cfg = small_p2p(0.3);
    auto art = build_construction(cfg);
    auto back = polar_sets_from_json(to_json(art.sets));
    CHECK(back.rx[0].info == art.sets.rx[0].info);
    CHECK(back.rx[0].info_ranked == art.sets.rx[0].info_ranked);
    CHECK(back.rx[0].f_relay == art.sets.rx[0].f_relay);
}
