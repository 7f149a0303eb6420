#include "polargp/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <tuple>

#include "polargp/json_io.hpp"
#include "polargp/rate_region.hpp"
#include "polargp/rng.hpp"

namespace polargp {

namespace {

BitBlock seeded_bits(uint64_t seed, long count) {
    Rng64 rng(seed);
    BitBlock out(count);
    for (auto& b : out) b = rng.next_bit();
    return out;
}

std::string cache_path(const ExperimentConfig& cfg, const std::string& dir) {
    uint64_t key = channel_hash(cfg.channel);
    key = mix64(key ^ hash_str64(cfg.scheme.c_str()));
    key = mix64(key ^ uint64_t(cfg.n));
    key = mix64(key ^ (cfg.policy.mode == SetPolicy::Mode::RateTarget ? 1 : 2));
    key = mix64(key ^ uint64_t(std::llround(cfg.policy.beta * 1e6)));
    key = mix64(key ^ uint64_t(cfg.samples));
    key = mix64(key ^ hash_str64(cfg.seed_hex.c_str()));
    char name[64];
    std::snprintf(name, sizeof name, "/polargp-%016llx.json", (unsigned long long)key);
    return dir + name;
}

struct Construction {
    PolarSets sets;
    PolarSets sets2;  // bcsi-state layer 2
    bool has_sets2 = false;
};

bool load_cache(const std::string& path, Construction& out) {
    std::ifstream in(path);
    if (!in) return false;
    try {
        json j = json::parse(in);
        out.sets = polar_sets_from_json(j.at("sets"));
        if (j.contains("sets2")) {
            out.sets2 = polar_sets_from_json(j.at("sets2"));
            out.has_sets2 = true;
        }
        return true;
    } catch (...) {
        return false;
    }
}

void save_cache(const std::string& path, const Construction& c) {
    json j{{"sets", to_json(c.sets)}};
    if (c.has_sets2) j["sets2"] = to_json(c.sets2);
    std::ofstream out(path);
    if (out) out << j.dump(1) << "\n";
}

struct TrialCounts {
    long err1 = 0, err2 = 0;
};

template <typename F>
TrialCounts run_trials(long trials, int threads, F&& one_trial) {
    const long chunk = 8;
    const long nchunks = (trials + chunk - 1) / chunk;
    std::vector<TrialCounts> partial(nchunks);
    auto run_chunk = [&](long c) {
        long lo = c * chunk, hi = std::min(trials, lo + chunk);
        for (long t = lo; t < hi; ++t) one_trial(t, partial[c]);
    };
    int nt = int(std::max<long>(1, std::min<long>(threads, nchunks)));
    if (nt == 1) {
        for (long c = 0; c < nchunks; ++c) run_chunk(c);
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < nt; ++w)
            pool.emplace_back([&] {
                for (long c = next.fetch_add(1); c < nchunks; c = next.fetch_add(1)) run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }
    TrialCounts total;
    for (const auto& p : partial) {
        total.err1 += p.err1;
        total.err2 += p.err2;
    }
    return total;
}

double half_width(double fer, long trials) {
    return 1.96 * std::sqrt(std::max(0.0, fer * (1.0 - fer)) / double(trials));
}

ResultRow make_row(double rate, int receiver, long errs, long trials, double wall_ms) {
    ResultRow row;
    row.rate = rate;
    row.receiver = receiver;
    row.fer = double(errs) / double(trials);
    row.ci95 = half_width(row.fer, trials);
    row.trials = trials;
    row.wall_ms = wall_ms;
    return row;
}

ResultRow infeasible_row(double rate, int receiver) {
    ResultRow row;
    row.rate = rate;
    row.receiver = receiver;
    row.feasible = false;
    return row;
}

}  // namespace

namespace {

// resolves the configured or optimizer-chosen auxiliary strategies
std::pair<GpStrategy, AuxStrategy> resolve_strategies(const ExperimentConfig& cfg) {
    const StateChannel& ch = cfg.channel;
    const int threads = std::max(1, cfg.threads);
    GpStrategy gpst;
    AuxStrategy auxst;
    if (cfg.scheme == "p2p") {
        gpst = cfg.gp_strategy ? *cfg.gp_strategy : p2p_strategy(ch.ns());
    } else if (cfg.scheme == "gp") {
        if (cfg.gp_strategy) {
            gpst = *cfg.gp_strategy;
        } else {
            auto found = search_strategies(ch, 2, 1, 8, cfg.receiver == 1 ? 1.0 : 0.0, -1e9,
                                           4000000, threads);
            if (!found.found) throw InfeasibleError("gp strategy search found nothing");
            gpst = found.strategy.layer1_as_gp(ch);
        }
    } else if (cfg.scheme == "bcsi-state") {
        if (cfg.aux_strategy) {
            auxst = *cfg.aux_strategy;
        } else {
            auto found = search_strategies(ch, 2, 1, 8, 0.5, -1e9, 4000000, threads);
            if (!found.found) throw InfeasibleError("bcsi-state strategy search found nothing");
            auxst = found.strategy;
            if (auxst.v2_size == 1) auxst = AuxStrategy::from_gp(auxst.layer1_as_gp(ch), ch);
        }
    }
    return {gpst, auxst};
}

}  // namespace

ConstructionArtifacts build_construction(const ExperimentConfig& cfg) {
    cfg.channel.validate(1e-9);
    if (!is_power_of_two(cfg.n))
        throw std::invalid_argument("build_construction: n must be a power of 2");
    const StateChannel& ch = cfg.channel;
    const int n = cfg.n, threads = std::max(1, cfg.threads);
    auto master = SharedRandomness::from_hex(cfg.seed_hex, "polargp/" + cfg.scheme);
    uint64_t cons_seed = master.fork("construction").u64(0, 0);
    Pmf input = cfg.input.probs.empty() ? Pmf::uniform(2) : cfg.input;

    ConstructionArtifacts art;
    std::tie(art.gp_strategy, art.aux_strategy) = resolve_strategies(cfg);

    if (cfg.scheme == "p2p" || cfg.scheme == "gp") {
        auto enc = law_gp_state(ch, art.gp_strategy);
        auto dec = law_gp_output(ch, art.gp_strategy, cfg.receiver);
        auto sp = estimate_z_profile(enc, n, cfg.samples, mix64(cons_seed ^ 0x11), "U|S", threads);
        auto op = estimate_z_profile(dec, n, cfg.samples, mix64(cons_seed ^ 0x22),
                                     cfg.receiver == 1 ? "U|Y1" : "U|Y2", threads);
        art.sets = build_polar_sets(sp, {op}, cfg.policy);
        art.profiles = {std::move(sp), std::move(op)};
    } else if (cfg.scheme == "bcsi-common") {
        auto prior = JointPmf::with_constant_obs(input);
        auto d1 = JointPmf::from_channel(input, ch.marginal(1), ch.ny1());
        auto d2 = JointPmf::from_channel(input, ch.marginal(2), ch.ny2());
        auto sp = estimate_z_profile(prior, n, cfg.samples, mix64(cons_seed ^ 0xa1), "U|0", threads);
        auto o1 = estimate_z_profile(d1, n, cfg.samples, mix64(cons_seed ^ 0xa2), "U|Y1", threads);
        auto o2 = estimate_z_profile(d2, n, cfg.samples, mix64(cons_seed ^ 0xa3), "U|Y2", threads);
        art.sets = build_polar_sets(sp, {o1, o2}, cfg.policy);
        art.profiles = {std::move(sp), std::move(o1), std::move(o2)};
    } else {
        auto sp = estimate_z_profile(law_v1_state(ch, art.aux_strategy), n, cfg.samples,
                                     mix64(cons_seed ^ 0xb1), "U1|S", threads);
        auto o1 = estimate_z_profile(law_v1_output(ch, art.aux_strategy, 1), n, cfg.samples,
                                     mix64(cons_seed ^ 0xb2), "U1|Y1", threads);
        auto o2 = estimate_z_profile(law_v1_output(ch, art.aux_strategy, 2), n, cfg.samples,
                                     mix64(cons_seed ^ 0xb3), "U1|Y2", threads);
        art.sets = build_polar_sets(sp, {o1, o2}, cfg.policy);
        auto sp2 = estimate_z_profile(law_v2_state(ch, art.aux_strategy), n, cfg.samples,
                                      mix64(cons_seed ^ 0xb4), "U2|S,U1", threads);
        auto o21 = estimate_z_profile(law_v2_output(ch, art.aux_strategy), n, cfg.samples,
                                      mix64(cons_seed ^ 0xb5), "U2|Y1,U1", threads);
        art.sets2 = build_polar_sets(sp2, {o21}, cfg.policy);
        art.profiles = {std::move(sp), std::move(o1), std::move(o2), std::move(sp2),
                        std::move(o21)};
    }
    return art;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.channel.validate(1e-9);
    if (!is_power_of_two(cfg.n)) throw std::invalid_argument("run_experiment: n must be a power of 2");
    const StateChannel& ch = cfg.channel;
    const int n = cfg.n, k = cfg.k, threads = std::max(1, cfg.threads);

    auto master = SharedRandomness::from_hex(cfg.seed_hex, "polargp/" + cfg.scheme);
    auto sr_code = master.fork("code");
    uint64_t cons_seed = master.fork("construction").u64(0, 0);

    std::string cache_dir = cfg.cache_dir;
    if (cache_dir.empty()) {
        const char* env = std::getenv("POLARGP_CACHE_DIR");
        if (env) cache_dir = env;
    }

    Pmf input = cfg.input.probs.empty() ? Pmf::uniform(2) : cfg.input;
    GpStrategy gpst;
    AuxStrategy auxst;
    Construction cons;
    bool cached = false;
    std::string cpath;
    if (!cache_dir.empty()) {
        cpath = cache_path(cfg, cache_dir);
        cached = load_cache(cpath, cons);
    }
    std::tie(gpst, auxst) = resolve_strategies(cfg);
    if (!cached) {
        auto art = build_construction(cfg);
        cons.sets = std::move(art.sets);
        if (art.sets2) {
            cons.sets2 = std::move(*art.sets2);
            cons.has_sets2 = true;
        }
        if (!cpath.empty()) save_cache(cpath, cons);
    }

    std::vector<ResultRow> rows;
    for (const auto& rate : cfg.rates) {
        double r0 = rate[0], r1 = rate[1], r2 = rate[2];
        auto t0 = std::chrono::steady_clock::now();
        auto elapsed_ms = [&] {
            return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        };

        if (cfg.scheme == "p2p" || cfg.scheme == "gp") {
            GpCodeSpec spec;
            try {
                spec = build_gp_spec(ch, gpst, cfg.receiver, n, k, r1, cfg.samples, cfg.policy,
                                     cons_seed, threads,
                                     cfg.scheme == "p2p" ? SchemeKind::P2p : SchemeKind::GpSingle,
                                     &cons.sets);
            } catch (const InfeasibleError&) {
                rows.push_back(infeasible_row(r0 + r1, cfg.receiver));
                continue;
            }
            auto counts = run_trials(cfg.trials, threads, [&](long trial, TrialCounts& tc) {
                auto tsr = master.fork("trial", uint64_t(trial));
                BitBlock msg = seeded_bits(tsr.u64(0, 0), spec.plan.m1_bits);
                int blocks = spec.blocks();
                std::vector<std::vector<int>> states(blocks), y(blocks);
                for (int b = 0; b < blocks; ++b) {
                    states[b] = sample_state_block(ch, n, tsr.u64(1, uint32_t(b)));
                }
                auto frame = gp_encode(spec, msg, states, sr_code);
                for (int b = 0; b < blocks; ++b) {
                    auto tr = sample_transmission(ch, frame.x[b], states[b], tsr.u64(2, uint32_t(b)));
                    y[b] = cfg.receiver == 1 ? tr.y1 : tr.y2;
                }
                auto dec = gp_decode(spec, y, sr_code);
                tc.err1 += dec.message != msg;
            });
            rows.push_back(make_row(r0 + r1, cfg.receiver, counts.err1, cfg.trials, elapsed_ms()));
            continue;
        }

        if (cfg.scheme == "bcsi-common") {
            BcsiCommonSpec spec;
            try {
                spec = build_bcsi_common_spec(ch, input, n, k, r0, r1, r2, cfg.samples,
                                              cfg.policy, cons_seed, threads, &cons.sets);
            } catch (const InfeasibleError&) {
                rows.push_back(infeasible_row(r0 + r1, 1));
                rows.push_back(infeasible_row(r0 + r2, 2));
                continue;
            }
            auto counts = run_trials(cfg.trials, threads, [&](long trial, TrialCounts& tc) {
                auto tsr = master.fork("trial", uint64_t(trial));
                BcsiMessages msgs;
                msgs.m0 = seeded_bits(tsr.u64(0, 0), spec.plan.m0_bits);
                msgs.m1 = seeded_bits(tsr.u64(0, 1), spec.plan.m1_bits);
                msgs.m2 = seeded_bits(tsr.u64(0, 2), spec.plan.m2_bits);
                auto frame = bcsi_common_encode(spec, msgs, sr_code);
                std::vector<std::vector<int>> y1(k), y2(k);
                std::vector<int> s0(n, 0);
                for (int b = 0; b < k; ++b) {
                    auto tr = sample_transmission(ch, frame.x[b], s0, tsr.u64(2, uint32_t(b)));
                    y1[b] = std::move(tr.y1);
                    y2[b] = std::move(tr.y2);
                }
                auto d1 = bcsi_common_decode(spec, 1, y1, msgs.m2, sr_code);
                auto d2 = bcsi_common_decode(spec, 2, y2, msgs.m1, sr_code);
                tc.err1 += d1.m0 != msgs.m0 || d1.mprivate != msgs.m1;
                tc.err2 += d2.m0 != msgs.m0 || d2.mprivate != msgs.m2;
            });
            rows.push_back(make_row(r0 + r1, 1, counts.err1, cfg.trials, elapsed_ms()));
            rows.push_back(make_row(r0 + r2, 2, counts.err2, cfg.trials, elapsed_ms()));
            continue;
        }

        // bcsi-state
        BcsiStateSpec spec;
        try {
            spec = build_bcsi_state_spec(ch, auxst, n, k, r0, r1, r2, cfg.layer2_rate,
                                         cfg.samples, cfg.policy, cons_seed, threads, &cons.sets,
                                         cons.has_sets2 ? &cons.sets2 : nullptr);
        } catch (const InfeasibleError&) {
            rows.push_back(infeasible_row(r0 + r1, 1));
            rows.push_back(infeasible_row(r0 + r2, 2));
            continue;
        }
        const int blocks = k + 2 * spec.plan.t;
        auto counts = run_trials(cfg.trials, threads, [&](long trial, TrialCounts& tc) {
            auto tsr = master.fork("trial", uint64_t(trial));
            BcsiMessages msgs;
            msgs.m0 = seeded_bits(tsr.u64(0, 0), spec.plan.m0_bits);
            msgs.m1 = seeded_bits(tsr.u64(0, 1), spec.plan.m1_bits);
            msgs.m2 = seeded_bits(tsr.u64(0, 2), spec.plan.m2_bits);
            std::vector<std::vector<int>> states(blocks), y1(blocks), y2(blocks);
            for (int b = 0; b < blocks; ++b)
                states[b] = sample_state_block(ch, n, tsr.u64(1, uint32_t(b)));
            auto frame = bcsi_state_encode(spec, msgs, states, sr_code);
            for (int b = 0; b < blocks; ++b) {
                auto tr = sample_transmission(ch, frame.x[b], states[b], tsr.u64(2, uint32_t(b)));
                y1[b] = std::move(tr.y1);
                y2[b] = std::move(tr.y2);
            }
            auto d1 = bcsi_state_decode(spec, 1, y1, msgs.m2, sr_code);
            auto d2 = bcsi_state_decode(spec, 2, y2, msgs.m1, sr_code);
            tc.err1 += d1.m0 != msgs.m0 || d1.mprivate != msgs.m1;
            tc.err2 += d2.m0 != msgs.m0 || d2.mprivate != msgs.m2;
        });
        rows.push_back(make_row(r0 + r1, 1, counts.err1, cfg.trials, elapsed_ms()));
        rows.push_back(make_row(r0 + r2, 2, counts.err2, cfg.trials, elapsed_ms()));
    }
    return rows;
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "rate,receiver,fer,ci95,trials\n";
    char line[160];
    for (const auto& r : rows) {
        if (r.feasible)
            std::snprintf(line, sizeof line, "%.6g,%d,%.6g,%.6g,%ld\n", r.rate, r.receiver, r.fer,
                          r.ci95, r.trials);
        else
            std::snprintf(line, sizeof line, "%.6g,%d,nan,nan,0\n", r.rate, r.receiver);
        out += line;
    }
    return out;
}

}  // namespace polargp
