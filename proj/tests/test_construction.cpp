#include <doctest.h>

#include <cmath>

#include "polargp/construction.hpp"
#include "polargp/rng.hpp"
#include "test_support.hpp"

using namespace polargp;

TEST_CASE("z profile of the identity joint collapses to zero") {
    auto prof = estimate_z_profile(JointPmf::identity(Pmf::bernoulli(0.5)), 16, 1000, 1, "U|Y");
    for (double z : prof.z) CHECK(z <= 0.01);
}

TEST_CASE("z profile of an independent observation stays at one") {
    auto prof =
        estimate_z_profile(JointPmf::with_constant_obs(Pmf::bernoulli(0.5)), 1, 500, 2, "U|0");
    CHECK(prof.z[0] == doctest::Approx(1.0).epsilon(1e-9));
    auto prof16 =
        estimate_z_profile(JointPmf::with_constant_obs(Pmf::bernoulli(0.5)), 16, 400, 3, "U|0");
    for (double z : prof16.z) CHECK(z == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("z profile determinism and thread independence") {
    JointPmf j = JointPmf::bsc(0.5, 0.1);
    auto a = estimate_z_profile(j, 64, 300, 77, "U|Y", 1);
    auto b = estimate_z_profile(j, 64, 300, 77, "U|Y", 2);
    CHECK(a.z == b.z);  // bitwise equal regardless of thread count
    auto c = estimate_z_profile(j, 64, 300, 78, "U|Y", 1);
    CHECK(a.z != c.z);
}

TEST_CASE("BSC(0.1) polarization fractions at desk scale") {
    // Frozen against a 20000-sample run of the same estimator and checked
    // against the exact z-recursion brackets (BSC upper bound 0.230, BEC
    // analog 0.355 at n=256). The asymptotic fraction is 1-H(0.1)=0.531;
    // finite n sits well below it, approaching as n doubles.
    auto prof = estimate_z_profile(JointPmf::bsc(0.5, 0.1), 256, 2000, 1234, "U|Y");
    int good = 0, mid = 0;
    for (double z : prof.z) {
        good += z < 0.01;
        mid += z > 0.01 && z < 0.99;
    }
    CHECK(std::abs(double(good) / 256 - 0.2812) < 0.03);

    auto prof1k = estimate_z_profile(JointPmf::bsc(0.5, 0.1), 1024, 2000, 1234, "U|Y");
    int good1k = 0, mid1k = 0;
    for (double z : prof1k.z) {
        good1k += z < 0.01;
        mid1k += z > 0.01 && z < 0.99;
    }
    CHECK(std::abs(double(good1k) / 1024 - 0.3496) < 0.03);
    CHECK(double(good1k) / 1024 > double(good) / 256);     // toward 1-H(0.1)
    CHECK(double(mid1k) / 1024 < double(mid) / 256 + 1e-9);  // middle shrinks
}

TEST_CASE("larger sample counts move each z estimate within its confidence envelope") {
    JointPmf j = JointPmf::bsc(0.5, 0.1);
    const int n = 128;
    auto small = estimate_z_profile(j, n, 200, 990, "U|Y");
    auto large = estimate_z_profile(j, n, 2000, 991, "U|Y");
    int violations = 0;
    for (int i = 0; i < n; ++i) {
        double se = std::sqrt(small.var[i] / small.samples + large.var[i] / large.samples);
        if (std::abs(small.z[i] - large.z[i]) > 2.576 * se + 1e-9) ++violations;
    }
    // 99% per-index envelope: allow a small family-level violation count
    CHECK(violations <= n / 20);
}

TEST_CASE("rate-target sets partition and match the entropy sizing") {
    auto state = estimate_z_profile(JointPmf::with_constant_obs(Pmf::bernoulli(0.5)), 256, 200,
                                    5, "U|0");
    auto out = estimate_z_profile(JointPmf::bsc(0.5, 0.05), 256, 2000, 6, "U|Y");
    SetPolicy pol;
    auto sets = build_polar_sets(state, {out}, pol);
    CHECK_NOTHROW(sets.validate_partition());
    CHECK(sets.h_state.size() == 256);  // uniform prior: H(X) = 1
    double target = 1.0 - binary_entropy(0.05);
    CHECK(std::abs(double(sets.rx[0].info.size()) / 256 - target) < 0.05);
    // info_ranked is a permutation of info, most reliable first
    CHECK(sets.rx[0].info_ranked.size() == sets.rx[0].info.size());
    CHECK(out.z[sets.rx[0].info_ranked.front()] <= out.z[sets.rx[0].info_ranked.back()]);
}

TEST_CASE("threshold policy on extreme profiles") {
    ZProfile state;
    state.n = 8;
    state.z.assign(8, 1.0);
    state.h_cond = 1.0;
    ZProfile out;
    out.n = 8;
    out.z.assign(8, 1.0);  // useless channel
    out.h_cond = 1.0;
    SetPolicy pol;
    pol.mode = SetPolicy::Mode::Threshold;
    auto sets = build_polar_sets(state, {out}, pol);
    CHECK(sets.rx[0].info.empty());
    CHECK(sets.rx[0].f_approx.size() == 8);  // I empty, F_a everything

    out.z.assign(8, 0.0);  // noiseless channel
    auto sets2 = build_polar_sets(state, {out}, pol);
    CHECK(sets2.rx[0].info.size() == 8);
}

TEST_CASE("causal capacity of the additive interference channel") {
    auto ch = make_bsc_interference(0.05, 0.05, 0.5);
    auto best = causal_capacity(ch, 1);
    double expect = 1.0 - binary_entropy(0.05);
    CHECK(best.capacity == doctest::Approx(expect).epsilon(1e-7));
    CHECK(std::abs(best.capacity - expect) < 1e-6);
    // without state knowledge the same channel is useless
    auto blind = causal_capacity(ch, 1, 0, true);
    CHECK(blind.capacity < 1e-9);
}

TEST_CASE("causal capacity of a noiseless channel is 1 bit") {
    StateChannel ch;
    ch.x_alphabet = {0, 1};
    ch.s_alphabet = {0, 1};
    ch.y1_alphabet = {0, 1};
    ch.y2_alphabet = {0};
    ch.state = Pmf::bernoulli(0.3);
    ch.trans.assign(2 * 2 * 2 * 1, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int s = 0; s < 2; ++s) ch.trans[((size_t(x) * 2 + s) * 2 + x) * 1 + 0] = 1.0;
    auto best = causal_capacity(ch, 1, 2);
    CHECK(best.capacity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("no random probe beats the causal capacity optimizer") {
    auto ch = make_bsc_interference(0.1, 0.1, 0.5);
    auto best = causal_capacity(ch, 1, 2);
    Rng64 rng(404);
    for (int probe = 0; probe < 1000; ++probe) {
        // random P_V and random f: V x S -> X with |V| = 2
        double a = rng.next_u01();
        std::vector<double> q = {a, 1.0 - a};
        std::vector<int> f(4);
        for (auto& v : f) v = int(rng.next_below(2));
        // evaluate I(V;Y1)
        std::vector<double> w(4, 0.0);
        auto marg = ch.marginal(1);
        for (int v = 0; v < 2; ++v)
            for (int s = 0; s < 2; ++s)
                for (int y = 0; y < 2; ++y)
                    w[v * 2 + y] += ch.state[s] * marg[(size_t(f[v * 2 + s]) * 2 + s) * 2 + y];
        std::vector<double> t(4);
        for (int v = 0; v < 2; ++v)
            for (int y = 0; y < 2; ++y) t[v * 2 + y] = q[v] * w[v * 2 + y];
        JointPmf jj(2, t);
        CHECK(mutual_information(jj) <= best.capacity + 1e-6);
    }
}

TEST_CASE("gp plan t sizing follows the per-block reading") {
    // |F_r| = 37 relay bits, pre-phase info of 128 slots -> t = 1
    PolarSets sets;
    sets.n = 256;
    SetPartition part;
    for (int i = 0; i < 256; ++i) {
        if (i < 37) part.f_relay.push_back(i);
        else if (i < 64) part.f_free.push_back(i);
        else part.info.push_back(i);
    }
    part.info_ranked = part.info;
    sets.rx.push_back(part);
    PlanRequest req;
    req.scheme = SchemeKind::GpSingle;
    req.n = 256;
    req.k = 4;
    req.r1 = 0.2;
    req.sets = &sets;
    req.pre1_info_ranked.resize(128);
    for (int i = 0; i < 128; ++i) req.pre1_info_ranked[i] = 128 + i;
    auto plan = plan_chain(req);
    CHECK(plan.t == 1);
    CHECK(plan.r1.size() == 37);
    CHECK(plan.pre1_per_block == 37);
    CHECK(plan.m1_bits == long(std::ceil(0.2 * 5 * 256)));
    CHECK(plan.private_capacity >= plan.m1_bits);
    // chain wiring: R1 in every block j>0 copies F1r of block j-1
    for (int b = 1; b < plan.k; ++b)
        for (size_t a = 0; a < plan.r1.size(); ++a) {
            int i = plan.r1[a];
            CHECK(plan.layer1[b].kind[i] == uint8_t(SlotKind::Chain));
            CHECK(plan.layer1[b].chain_src[i] == plan.f1r[a]);
            CHECK(plan.layer1[b].chain_delta[i] == -1);
        }
}

TEST_CASE("infeasible gp rate is rejected") {
    PolarSets sets;
    sets.n = 16;
    SetPartition part;
    for (int i = 0; i < 16; ++i)
        (i < 8 ? part.f_free : part.info).push_back(i);
    part.info_ranked = part.info;
    sets.rx.push_back(part);
    PlanRequest req;
    req.scheme = SchemeKind::P2p;
    req.n = 16;
    req.k = 1;
    req.r1 = 0.9;  // 15 bits > 8 info slots
    req.sets = &sets;
    CHECK_THROWS_AS(plan_chain(req), InfeasibleError);
}

TEST_CASE("bcsi-common plan accounting matches the set arithmetic") {
    // handcrafted nested sets: I2 inside I1
    PolarSets sets;
    sets.n = 32;
    SetPartition p1, p2;
    for (int i = 0; i < 32; ++i) {
        if (i >= 8) p1.info.push_back(i);
        else p1.f_free.push_back(i);
        if (i >= 16) p2.info.push_back(i);
        else p2.f_free.push_back(i);
    }
    p1.info_ranked = p1.info;
    p2.info_ranked = p2.info;
    sets.rx = {p1, p2};
    PlanRequest req;
    req.scheme = SchemeKind::BcsiCommon;
    req.n = 32;
    req.k = 4;
    req.r0 = 0.1;
    req.r1 = 0.35;
    req.r2 = 0.2;
    req.sets = &sets;
    auto plan = plan_chain(req);
    long s1 = long(plan.i1.size()), s2 = long(plan.i2.size());
    long c = 0;
    for (int i : plan.i1)
        c += std::count(plan.i2.begin(), plan.i2.end(), i);
    // rate sums follow ((k-1)|I_m| + |I1 & I2|) / (k n) exactly
    CHECK(plan.common_capacity + plan.private_capacity == (req.k - 1) * s1 + c);
    CHECK(plan.common_capacity == (req.k - 1) * s2 + c);
    CHECK(plan.d10.size() == plan.d2.size());
    CHECK(plan.m0p_bits == plan.m0_bits + plan.m2_bits);
    // every role map covers [0,n) with exactly one role
    for (const auto& roles : plan.layer1) CHECK(roles.kind.size() == 32);
}

TEST_CASE("bcsi-common rejects reversed orientation") {
    PolarSets sets;
    sets.n = 16;
    SetPartition p;
    for (int i = 0; i < 16; ++i) p.info.push_back(i);
    p.info_ranked = p.info;
    sets.rx = {p, p};
    PlanRequest req;
    req.scheme = SchemeKind::BcsiCommon;
    req.n = 16;
    req.k = 2;
    req.r1 = 0.1;
    req.r2 = 0.2;
    req.sets = &sets;
    CHECK_THROWS_AS(plan_chain(req), InfeasibleError);
}
