// Command-line front end: construction, single-frame encode/decode traces,
// Monte Carlo simulation, rate-region evaluation, degradedness checks.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "polargp/experiment.hpp"
#include "polargp/json_io.hpp"
#include "polargp/rate_region.hpp"

using namespace polargp;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << "\n";
        std::exit(kExitIo);
    }
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        std::exit(kExitConfig);
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << path << "\n";
        std::exit(kExitIo);
    }
    out << text;
}

ExperimentConfig load_experiment(const std::string& path, const std::string& seed_override,
                                 int threads_override) {
    auto cfg = experiment_from_json(load_json(path));
    if (!seed_override.empty()) cfg.seed_hex = seed_override;
    if (threads_override > 0) cfg.threads = threads_override;
    return cfg;
}

json frame_trace(const ExperimentConfig& cfg, uint64_t trial_index, uint64_t noise_seed);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chained polar codes for channels with encoder state and "
                 "broadcast receivers with message side information"};
    app.require_subcommand(1);

    std::string config_path, out_path, seed_override;
    int threads_override = 0;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_path, "output path ('-' = stdout)");
    app.add_option("--seed", seed_override, "hex master seed override");
    app.add_option("--threads", threads_override, "worker thread override");

    auto* c_construct = app.add_subcommand("construct", "estimate profiles and polarization sets");
    c_construct->fallthrough();
    auto* c_encode = app.add_subcommand("encode", "encode one frame and dump its trace");
    c_encode->fallthrough();
    auto* c_decode = app.add_subcommand("decode", "decode a dumped frame trace");
    c_decode->fallthrough();
    auto* c_simulate = app.add_subcommand("simulate", "run the Monte Carlo experiment");
    c_simulate->fallthrough();
    auto* c_region = app.add_subcommand("rate-region", "evaluate or search rate regions");
    c_region->fallthrough();
    auto* c_degraded = app.add_subcommand("check-degraded", "solve for a degradedness witness");
    c_degraded->fallthrough();

    uint64_t trial_index = 0;
    int decode_receiver = 1;
    std::string frame_path;
    c_encode->add_option("--trial", trial_index, "trial index used to derive frame randomness");
    c_decode->add_option("--frame", frame_path, "frame trace produced by encode")->required();
    c_decode->add_option("--receiver", decode_receiver, "receiver to decode (1 or 2)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_simulate->parsed()) {
            auto cfg = load_experiment(config_path, seed_override, threads_override);
            auto rows = run_experiment(cfg);
            write_output(out_path, results_to_csv(rows));
            return 0;
        }
        if (c_construct->parsed()) {
            auto cfg = load_experiment(config_path, seed_override, threads_override);
            auto art = build_construction(cfg);
            json out{{"schema", 1}, {"scheme", cfg.scheme}, {"n", cfg.n}};
            json profs = json::array();
            for (const auto& p : art.profiles) profs.push_back(to_json(p));
            out["profiles"] = profs;
            out["sets"] = to_json(art.sets);
            if (art.sets2) out["sets2"] = to_json(*art.sets2);
            write_output(out_path, out.dump(1) + "\n");
            return 0;
        }
        if (c_encode->parsed()) {
            auto cfg = load_experiment(config_path, seed_override, threads_override);
            auto out = frame_trace(cfg, trial_index, trial_index);
            write_output(out_path, out.dump(1) + "\n");
            return 0;
        }
        if (c_decode->parsed()) {
            json fr = load_json(frame_path);
            auto cfg = experiment_from_json(fr.at("config"));
            if (!seed_override.empty()) cfg.seed_hex = seed_override;
            auto master = SharedRandomness::from_hex(cfg.seed_hex, "polargp/" + cfg.scheme);
            auto sr_code = master.fork("code");
            auto get_blocks = [&](const char* key) {
                return fr.at(key).get<std::vector<std::vector<int>>>();
            };
            auto get_bits = [&](const char* key) {
                auto v = fr.at(key).get<std::vector<int>>();
                return BitBlock(v.begin(), v.end());
            };
            json out{{"receiver", decode_receiver}};
            if (cfg.scheme == "p2p" || cfg.scheme == "gp") {
                auto art = build_construction(cfg);
                auto spec = build_gp_spec(cfg.channel, art.gp_strategy, cfg.receiver, cfg.n,
                                          cfg.k, cfg.rates.at(0)[1], cfg.samples, cfg.policy,
                                          master.fork("construction").u64(0, 0), cfg.threads,
                                          cfg.scheme == "p2p" ? SchemeKind::P2p
                                                              : SchemeKind::GpSingle,
                                          &art.sets);
                auto dec = gp_decode(spec, get_blocks(decode_receiver == 1 ? "y1" : "y2"), sr_code);
                auto truth = get_bits("message");
                out["message"] = std::vector<int>(dec.message.begin(), dec.message.end());
                out["ok"] = dec.ok;
                out["matches"] = dec.message == truth;
            } else if (cfg.scheme == "bcsi-common") {
                auto art = build_construction(cfg);
                auto spec = build_bcsi_common_spec(
                    cfg.channel, cfg.input.probs.empty() ? Pmf::uniform(2) : cfg.input, cfg.n,
                    cfg.k, cfg.rates.at(0)[0], cfg.rates.at(0)[1], cfg.rates.at(0)[2],
                    cfg.samples, cfg.policy, master.fork("construction").u64(0, 0), cfg.threads,
                    &art.sets);
                BitBlock side = get_bits(decode_receiver == 1 ? "m2" : "m1");
                auto dec = bcsi_common_decode(
                    spec, decode_receiver, get_blocks(decode_receiver == 1 ? "y1" : "y2"), side,
                    sr_code);
                auto m0 = get_bits("m0");
                auto mp = get_bits(decode_receiver == 1 ? "m1" : "m2");
                out["m0"] = std::vector<int>(dec.m0.begin(), dec.m0.end());
                out["mprivate"] = std::vector<int>(dec.mprivate.begin(), dec.mprivate.end());
                out["ok"] = dec.ok;
                out["matches"] = dec.m0 == m0 && dec.mprivate == mp;
            } else {
                auto art = build_construction(cfg);
                auto spec = build_bcsi_state_spec(
                    cfg.channel, art.aux_strategy, cfg.n, cfg.k, cfg.rates.at(0)[0],
                    cfg.rates.at(0)[1], cfg.rates.at(0)[2], cfg.layer2_rate, cfg.samples,
                    cfg.policy, master.fork("construction").u64(0, 0), cfg.threads, &art.sets,
                    art.sets2 ? &*art.sets2 : nullptr);
                BitBlock side = get_bits(decode_receiver == 1 ? "m2" : "m1");
                auto dec = bcsi_state_decode(
                    spec, decode_receiver, get_blocks(decode_receiver == 1 ? "y1" : "y2"), side,
                    sr_code);
                auto m0 = get_bits("m0");
                auto mp = get_bits(decode_receiver == 1 ? "m1" : "m2");
                out["m0"] = std::vector<int>(dec.m0.begin(), dec.m0.end());
                out["mprivate"] = std::vector<int>(dec.mprivate.begin(), dec.mprivate.end());
                out["ok"] = dec.ok;
                out["matches"] = dec.m0 == m0 && dec.mprivate == mp;
            }
            write_output(out_path, out.dump(1) + "\n");
            return 0;
        }
        if (c_region->parsed()) {
            json j = load_json(config_path);
            auto ch = channel_from_json(j.at("channel"));
            std::string csv = "r1,r2,c3,c4,c5\n";
            char line[160];
            if (j.contains("strategy")) {
                const auto& s = j.at("strategy");
                if (s.contains("v1_size")) {
                    auto reg = region_bcsi_state(ch, aux_strategy_from_json(s));
                    std::snprintf(line, sizeof line, "%.6g,%.6g,%d,%d,%d\n", reg.corner.r1,
                                  reg.corner.r2, int(reg.c3), int(reg.c4), int(reg.c5));
                    csv += line;
                } else {
                    auto st = gp_strategy_from_json(s);
                    double g1 = region_gp(ch, 1, st), g2 = region_gp(ch, 2, st);
                    std::snprintf(line, sizeof line, "%.6g,%.6g,,,\n", g1, g2);
                    csv += line;
                }
            }
            if (j.contains("search")) {
                const auto& s = j.at("search");
                auto res = search_strategies(
                    ch, s.value("v1_size", 2), s.value("v2_size", 1), s.value("grid", 4),
                    s.value("weight_r1", 0.5), s.value("r2_floor", -1e9),
                    s.value("budget", 2000000L), threads_override > 0 ? threads_override : 1);
                if (res.found) {
                    std::snprintf(line, sizeof line, "%.6g,%.6g,,,\n", res.best.r1, res.best.r2);
                    csv += line;
                }
            }
            if (j.contains("input")) {
                auto corner = region_bcsi_common(ch, pmf_from_json(j.at("input")));
                std::snprintf(line, sizeof line, "%.6g,%.6g,,,\n", corner.r1, corner.r2);
                csv += line;
            }
            write_output(out_path, csv);
            return 0;
        }
        if (c_degraded->parsed()) {
            json j = load_json(config_path);
            auto ch = channel_from_json(j.contains("channel") ? j.at("channel") : j);
            auto witness = check_degraded(ch);
            json out{{"degraded", witness.has_value()}};
            if (witness) {
                std::vector<std::vector<double>> q(ch.ny1(), std::vector<double>(ch.ny2()));
                for (int a = 0; a < ch.ny1(); ++a)
                    for (int b = 0; b < ch.ny2(); ++b) q[a][b] = witness->q[size_t(a) * ch.ny2() + b];
                out["witness"] = q;
                out["residual"] = witness->residual;
            }
            write_output(out_path, out.dump(1) + "\n");
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

namespace {

json bits_json(const BitBlock& b) { return std::vector<int>(b.begin(), b.end()); }

// One deterministic frame: messages and state drawn as the simulator's
// trial `trial_index` would, transmitted with the same seeds.
json frame_trace(const ExperimentConfig& cfg, uint64_t trial_index, uint64_t) {
    auto master = SharedRandomness::from_hex(cfg.seed_hex, "polargp/" + cfg.scheme);
    auto sr_code = master.fork("code");
    auto tsr = master.fork("trial", trial_index);
    uint64_t cons_seed = master.fork("construction").u64(0, 0);
    const auto& ch = cfg.channel;
    const int n = cfg.n;
    auto seeded_bits = [](uint64_t seed, long count) {
        Rng64 rng(seed);
        BitBlock out(count);
        for (auto& b : out) b = rng.next_bit();
        return out;
    };

    json out{{"config", to_json(cfg)}, {"trial", trial_index}};
    auto art = build_construction(cfg);
    if (cfg.scheme == "p2p" || cfg.scheme == "gp") {
        auto spec = build_gp_spec(ch, art.gp_strategy, cfg.receiver, n, cfg.k, cfg.rates.at(0)[1],
                                  cfg.samples, cfg.policy, cons_seed, cfg.threads,
                                  cfg.scheme == "p2p" ? SchemeKind::P2p : SchemeKind::GpSingle,
                                  &art.sets);
        BitBlock msg = seeded_bits(tsr.u64(0, 0), spec.plan.m1_bits);
        int blocks = spec.blocks();
        std::vector<std::vector<int>> states(blocks), y1(blocks), y2(blocks);
        for (int b = 0; b < blocks; ++b) states[b] = sample_state_block(ch, n, tsr.u64(1, b));
        auto frame = gp_encode(spec, msg, states, sr_code);
        for (int b = 0; b < blocks; ++b) {
            auto tr = sample_transmission(ch, frame.x[b], states[b], tsr.u64(2, b));
            y1[b] = std::move(tr.y1);
            y2[b] = std::move(tr.y2);
        }
        out["message"] = bits_json(msg);
        out["states"] = states;
        out["x"] = frame.x;
        out["y1"] = y1;
        out["y2"] = y2;
        json us = json::array();
        for (const auto& u : frame.u) us.push_back(bits_json(u));
        out["u"] = us;
        return out;
    }
    BcsiMessages msgs;
    if (cfg.scheme == "bcsi-common") {
        auto spec = build_bcsi_common_spec(ch, cfg.input.probs.empty() ? Pmf::uniform(2) : cfg.input,
                                           n, cfg.k, cfg.rates.at(0)[0], cfg.rates.at(0)[1],
                                           cfg.rates.at(0)[2], cfg.samples, cfg.policy, cons_seed,
                                           cfg.threads, &art.sets);
        msgs.m0 = seeded_bits(tsr.u64(0, 0), spec.plan.m0_bits);
        msgs.m1 = seeded_bits(tsr.u64(0, 1), spec.plan.m1_bits);
        msgs.m2 = seeded_bits(tsr.u64(0, 2), spec.plan.m2_bits);
        auto frame = bcsi_common_encode(spec, msgs, sr_code);
        std::vector<std::vector<int>> y1(cfg.k), y2(cfg.k);
        std::vector<int> s0(n, 0);
        for (int b = 0; b < cfg.k; ++b) {
            auto tr = sample_transmission(ch, frame.x[b], s0, tsr.u64(2, b));
            y1[b] = std::move(tr.y1);
            y2[b] = std::move(tr.y2);
        }
        out["m0"] = bits_json(msgs.m0);
        out["m1"] = bits_json(msgs.m1);
        out["m2"] = bits_json(msgs.m2);
        out["x"] = frame.x;
        out["y1"] = y1;
        out["y2"] = y2;
        return out;
    }
    auto spec = build_bcsi_state_spec(ch, art.aux_strategy, n, cfg.k, cfg.rates.at(0)[0],
                                      cfg.rates.at(0)[1], cfg.rates.at(0)[2], cfg.layer2_rate,
                                      cfg.samples, cfg.policy, cons_seed, cfg.threads, &art.sets,
                                      art.sets2 ? &*art.sets2 : nullptr);
    msgs.m0 = seeded_bits(tsr.u64(0, 0), spec.plan.m0_bits);
    msgs.m1 = seeded_bits(tsr.u64(0, 1), spec.plan.m1_bits);
    msgs.m2 = seeded_bits(tsr.u64(0, 2), spec.plan.m2_bits);
    int blocks = cfg.k + 2 * spec.plan.t;
    std::vector<std::vector<int>> states(blocks), y1(blocks), y2(blocks);
    for (int b = 0; b < blocks; ++b) states[b] = sample_state_block(ch, n, tsr.u64(1, b));
    auto frame = bcsi_state_encode(spec, msgs, states, sr_code);
    for (int b = 0; b < blocks; ++b) {
        auto tr = sample_transmission(ch, frame.x[b], states[b], tsr.u64(2, b));
        y1[b] = std::move(tr.y1);
        y2[b] = std::move(tr.y2);
    }
    out["m0"] = bits_json(msgs.m0);
    out["m1"] = bits_json(msgs.m1);
    out["m2"] = bits_json(msgs.m2);
    out["states"] = states;
    out["x"] = frame.x;
    out["y1"] = y1;
    out["y2"] = y2;
    return out;
}

}  // namespace
