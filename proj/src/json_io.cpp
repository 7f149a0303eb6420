#include "polargp/json_io.hpp"

#include "polargp/rng.hpp"

namespace polargp {

namespace {

template <typename T>
T get_or_throw(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing field: ") + key);
    try {
        return j.at(key).get<T>();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad field '") + key + "': " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad field '") + key + "': " + e.what());
    }
}

}  // namespace

json to_json(const Pmf& p) {
    return json{{"support", p.support}, {"probs", p.probs}};
}

Pmf pmf_from_json(const json& j) {
    Pmf p(get_or_throw<std::vector<int>>(j, "support"),
          get_or_throw<std::vector<double>>(j, "probs"));
    p.validate(1e-9);
    return p;
}

json to_json(const JointPmf& p) {
    std::vector<std::vector<double>> rows(2);
    for (int x = 0; x < 2; ++x)
        for (int o = 0; o < p.obs_size; ++o) rows[x].push_back(p.p(x, o));
    return json{{"x_alphabet", std::vector<int>{0, 1}},
                {"obs_alphabet", p.obs_alphabet},
                {"table", rows}};
}

JointPmf joint_from_json(const json& j) {
    auto rows = get_or_throw<std::vector<std::vector<double>>>(j, "table");
    if (rows.size() != 2 || rows[0].size() != rows[1].size())
        throw ConfigError("joint table must be 2 x m");
    int m = int(rows[0].size());
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    JointPmf p(m, std::move(flat));
    if (j.contains("obs_alphabet")) p.obs_alphabet = get_or_throw<std::vector<int>>(j, "obs_alphabet");
    p.validate(1e-9);
    return p;
}

json to_json(const StateChannel& ch) {
    std::vector<std::vector<std::vector<std::vector<double>>>> table(
        ch.nx(), std::vector<std::vector<std::vector<double>>>(
                     ch.ns(), std::vector<std::vector<double>>(
                                  ch.ny1(), std::vector<double>(ch.ny2(), 0.0))));
    for (int x = 0; x < ch.nx(); ++x)
        for (int s = 0; s < ch.ns(); ++s)
            for (int y1 = 0; y1 < ch.ny1(); ++y1)
                for (int y2 = 0; y2 < ch.ny2(); ++y2) table[x][s][y1][y2] = ch.p(x, s, y1, y2);
    return json{{"x_alphabet", ch.x_alphabet},   {"s_alphabet", ch.s_alphabet},
                {"y1_alphabet", ch.y1_alphabet}, {"y2_alphabet", ch.y2_alphabet},
                {"state_pmf", ch.state.probs},   {"transitions", table}};
}

StateChannel channel_from_json(const json& j) {
    if (j.contains("preset")) {
        auto name = get_or_throw<std::string>(j, "preset");
        if (name == "bsc-interference")
            return make_bsc_interference(get_or<double>(j, "p1", 0.05), get_or<double>(j, "p2", 0.1),
                                         get_or<double>(j, "q", 0.5));
        if (name == "stuck-memory") return make_stuck_memory(get_or<double>(j, "p", 0.2));
        throw ConfigError("unknown channel preset: " + name);
    }
    StateChannel ch;
    ch.x_alphabet = get_or_throw<std::vector<int>>(j, "x_alphabet");
    ch.s_alphabet = get_or_throw<std::vector<int>>(j, "s_alphabet");
    ch.y1_alphabet = get_or_throw<std::vector<int>>(j, "y1_alphabet");
    ch.y2_alphabet = get_or_throw<std::vector<int>>(j, "y2_alphabet");
    ch.state = Pmf(get_or_throw<std::vector<double>>(j, "state_pmf"));
    auto table = get_or_throw<std::vector<std::vector<std::vector<std::vector<double>>>>>(
        j, "transitions");
    ch.trans.assign(size_t(ch.nx()) * ch.ns() * ch.ny1() * ch.ny2(), 0.0);
    if (int(table.size()) != ch.nx()) throw ConfigError("transitions: wrong x dimension");
    for (int x = 0; x < ch.nx(); ++x)
        for (int s = 0; s < ch.ns(); ++s)
            for (int y1 = 0; y1 < ch.ny1(); ++y1)
                for (int y2 = 0; y2 < ch.ny2(); ++y2)
                    ch.trans[((size_t(x) * ch.ns() + s) * ch.ny1() + y1) * ch.ny2() + y2] =
                        table.at(x).at(s).at(y1).at(y2);
    try {
        ch.validate(1e-9);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid channel: ") + e.what());
    }
    return ch;
}

json to_json(const ZProfile& z) {
    return json{{"n", z.n},           {"conditioning", z.conditioning},
                {"h_cond", z.h_cond}, {"samples", z.samples},
                {"z", z.z},           {"var", z.var}};
}

ZProfile zprofile_from_json(const json& j) {
    ZProfile z;
    z.n = get_or_throw<int>(j, "n");
    z.conditioning = get_or<std::string>(j, "conditioning", "");
    z.h_cond = get_or_throw<double>(j, "h_cond");
    z.samples = get_or<int>(j, "samples", 0);
    z.z = get_or_throw<std::vector<double>>(j, "z");
    z.var = get_or<std::vector<double>>(j, "var", std::vector<double>(z.z.size(), 0.0));
    return z;
}

namespace {
json partition_to_json(const SetPartition& p) {
    return json{{"info", p.info},       {"f_approx", p.f_approx},
                {"f_relay", p.f_relay}, {"f_free", p.f_free},
                {"info_ranked", p.info_ranked}, {"z_out", p.z_out}};
}
SetPartition partition_from_json(const json& j) {
    SetPartition p;
    p.info = get_or_throw<std::vector<int>>(j, "info");
    p.f_approx = get_or_throw<std::vector<int>>(j, "f_approx");
    p.f_relay = get_or_throw<std::vector<int>>(j, "f_relay");
    p.f_free = get_or_throw<std::vector<int>>(j, "f_free");
    p.info_ranked = get_or<std::vector<int>>(j, "info_ranked", p.info);
    p.z_out = get_or<std::vector<double>>(j, "z_out", {});
    return p;
}
}  // namespace

json to_json(const PolarSets& s) {
    json rx = json::array();
    for (const auto& part : s.rx) rx.push_back(partition_to_json(part));
    return json{{"n", s.n},         {"h_state", s.h_state}, {"l_state", s.l_state},
                {"h_out", s.h_out}, {"l_out", s.l_out},     {"rx", rx}};
}

PolarSets polar_sets_from_json(const json& j) {
    PolarSets s;
    s.n = get_or_throw<int>(j, "n");
    s.h_state = get_or<std::vector<int>>(j, "h_state", {});
    s.l_state = get_or<std::vector<int>>(j, "l_state", {});
    s.h_out = get_or<std::vector<std::vector<int>>>(j, "h_out", {});
    s.l_out = get_or<std::vector<std::vector<int>>>(j, "l_out", {});
    if (!j.contains("rx")) throw ConfigError("polar sets: missing rx");
    for (const auto& part : j.at("rx")) s.rx.push_back(partition_from_json(part));
    s.validate_partition();
    return s;
}

json to_json(const GpStrategy& s) {
    return json{{"v_size", s.v_size}, {"pv_given_s", s.pv_given_s}, {"f", s.f}};
}

GpStrategy gp_strategy_from_json(const json& j) {
    GpStrategy s;
    s.v_size = get_or_throw<int>(j, "v_size");
    s.pv_given_s = get_or_throw<std::vector<double>>(j, "pv_given_s");
    s.f = get_or_throw<std::vector<int>>(j, "f");
    return s;
}

json to_json(const AuxStrategy& s) {
    return json{{"v1_size", s.v1_size},
                {"v2_size", s.v2_size},
                {"pv1_given_s", s.pv1_given_s},
                {"pv2_given_v1s", s.pv2_given_v1s},
                {"f", s.f}};
}

AuxStrategy aux_strategy_from_json(const json& j) {
    AuxStrategy s;
    s.v1_size = get_or_throw<int>(j, "v1_size");
    s.v2_size = get_or_throw<int>(j, "v2_size");
    s.pv1_given_s = get_or_throw<std::vector<double>>(j, "pv1_given_s");
    s.pv2_given_v1s = get_or_throw<std::vector<double>>(j, "pv2_given_v1s");
    s.f = get_or_throw<std::vector<int>>(j, "f");
    return s;
}

json to_json(const ExperimentConfig& cfg) {
    json j{{"schema", cfg.schema},
           {"scheme", cfg.scheme},
           {"channel", to_json(cfg.channel)},
           {"n", cfg.n},
           {"k", cfg.k},
           {"receiver", cfg.receiver},
           {"construction",
            json{{"policy", cfg.policy.mode == SetPolicy::Mode::RateTarget ? "rate-target"
                                                                           : "threshold"},
                 {"beta", cfg.policy.beta},
                 {"samples", cfg.samples}}},
           {"rates", cfg.rates},
           {"trials", cfg.trials},
           {"seed", cfg.seed_hex},
           {"threads", cfg.threads}};
    if (cfg.layer2_rate >= 0.0) j["layer2_rate"] = cfg.layer2_rate;
    if (!cfg.input.probs.empty()) j["input"] = to_json(cfg.input);
    if (cfg.gp_strategy) j["strategy"] = to_json(*cfg.gp_strategy);
    if (cfg.aux_strategy) j["strategy"] = to_json(*cfg.aux_strategy);
    return j;
}

ExperimentConfig experiment_from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.schema = get_or<int>(j, "schema", 1);
    if (cfg.schema != 1) throw ConfigError("unsupported schema version");
    cfg.scheme = get_or_throw<std::string>(j, "scheme");
    if (cfg.scheme != "p2p" && cfg.scheme != "gp" && cfg.scheme != "bcsi-common" &&
        cfg.scheme != "bcsi-state")
        throw ConfigError("unknown scheme: " + cfg.scheme);
    if (!j.contains("channel")) throw ConfigError("missing field: channel");
    cfg.channel = channel_from_json(j.at("channel"));
    cfg.n = get_or_throw<int>(j, "n");
    if (!is_power_of_two(cfg.n)) throw ConfigError("n must be a power of 2");
    cfg.k = get_or<int>(j, "k", 1);
    cfg.receiver = get_or<int>(j, "receiver", 1);
    if (j.contains("construction")) {
        const auto& c = j.at("construction");
        auto mode = get_or<std::string>(c, "policy", "rate-target");
        if (mode == "rate-target") cfg.policy.mode = SetPolicy::Mode::RateTarget;
        else if (mode == "threshold") cfg.policy.mode = SetPolicy::Mode::Threshold;
        else throw ConfigError("unknown construction policy: " + mode);
        cfg.policy.beta = get_or<double>(c, "beta", 0.45);
        cfg.samples = get_or<int>(c, "samples", 2000);
    }
    if (!j.contains("rates")) throw ConfigError("missing field: rates");
    for (const auto& r : j.at("rates")) {
        if (r.is_array() && r.size() == 3)
            cfg.rates.push_back({r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()});
        else if (r.is_number())
            cfg.rates.push_back({0.0, r.get<double>(), 0.0});
        else
            throw ConfigError("rates entries must be numbers or [r0,r1,r2] triples");
    }
    for (auto& r : cfg.rates)
        if (r[0] < 0 || r[1] < 0 || r[2] < 0) throw ConfigError("rates must be nonnegative");
    cfg.layer2_rate = get_or<double>(j, "layer2_rate", -1.0);
    cfg.trials = get_or<long>(j, "trials", 100);
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    cfg.seed_hex = get_or<std::string>(j, "seed", "0");
    cfg.threads = get_or<int>(j, "threads", 1);
    if (j.contains("input")) cfg.input = pmf_from_json(j.at("input"));
    if (j.contains("strategy")) {
        const auto& s = j.at("strategy");
        if (s.contains("v1_size")) cfg.aux_strategy = aux_strategy_from_json(s);
        else cfg.gp_strategy = gp_strategy_from_json(s);
    }
    return cfg;
}

uint64_t channel_hash(const StateChannel& ch) {
    uint64_t h = mix64(0x706f6c6172ULL);
    auto fold = [&](uint64_t v) { h = mix64(h ^ v); };
    fold(ch.nx());
    fold(ch.ns());
    fold(ch.ny1());
    fold(ch.ny2());
    for (double p : ch.state.probs) fold(uint64_t(std::llround(p * 1e12)));
    for (double p : ch.trans) fold(uint64_t(std::llround(p * 1e12)));
    return h;
}

}  // namespace polargp
