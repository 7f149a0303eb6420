#include <doctest.h>

#include <cmath>

#include "polargp/construction.hpp"
#include "polargp/rate_region.hpp"
#include "polargp/rng.hpp"
#include "test_support.hpp"

using namespace polargp;

using testing::stateless_bsc_pair;

namespace {

AuxStrategy random_aux(Rng64& rng, const StateChannel& ch, int v1, int v2) {
    AuxStrategy st;
    st.v1_size = v1;
    st.v2_size = v2;
    int ns = ch.ns();
    st.pv1_given_s.resize(size_t(ns) * v1);
    for (int s = 0; s < ns; ++s) {
        double sum = 0.0;
        for (int v = 0; v < v1; ++v) sum += (st.pv1_given_s[size_t(s) * v1 + v] = rng.next_u01() + 1e-3);
        for (int v = 0; v < v1; ++v) st.pv1_given_s[size_t(s) * v1 + v] /= sum;
    }
    st.pv2_given_v1s.resize(size_t(v1) * ns * v2);
    for (int r = 0; r < v1 * ns; ++r) {
        double sum = 0.0;
        for (int v = 0; v < v2; ++v) sum += (st.pv2_given_v1s[size_t(r) * v2 + v] = rng.next_u01() + 1e-3);
        for (int v = 0; v < v2; ++v) st.pv2_given_v1s[size_t(r) * v2 + v] /= sum;
    }
    st.f.resize(size_t(v1) * v2 * ns);
    for (auto& x : st.f) x = int(rng.next_below(ch.nx()));
    return st;
}

}  // namespace

TEST_CASE("stateless broadcast corner") {
    auto noiseless = stateless_bsc_pair(0.0, 0.0);
    auto c = region_bcsi_common(noiseless, Pmf::bernoulli(0.5));
    CHECK(c.r1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.r2 == doctest::Approx(1.0).epsilon(1e-12));

    auto pair = stateless_bsc_pair(0.05, 0.1);
    auto c2 = region_bcsi_common(pair, Pmf::bernoulli(0.5));
    CHECK(c2.r1 == doctest::Approx(1.0 - binary_entropy(0.05)).epsilon(1e-10));
    CHECK(c2.r2 == doctest::Approx(1.0 - binary_entropy(0.1)).epsilon(1e-10));

    auto c3 = region_bcsi_common(pair, Pmf::point_mass(2, 0));
    CHECK(c3.r1 == doctest::Approx(0.0));
    CHECK(c3.r2 == doctest::Approx(0.0));
}

TEST_CASE("gp rate of canonical strategies") {
    auto ch = make_bsc_interference(0.05, 0.1, 0.5);
    // state-cancelling strategy achieves 1 - H(p) per receiver
    auto dp = GpStrategy::dirty_paper_xor();
    CHECK(region_gp(ch, 1, dp) == doctest::Approx(1.0 - binary_entropy(0.05)).epsilon(1e-10));
    CHECK(region_gp(ch, 2, dp) == doctest::Approx(1.0 - binary_entropy(0.1)).epsilon(1e-10));
    // U = S gives nonpositive rate
    GpStrategy us;
    us.v_size = 2;
    us.pv_given_s = {1.0, 0.0, 0.0, 1.0};
    us.f = {0, 1, 1, 0};
    CHECK(region_gp(ch, 1, us) <= 1e-10);
    // independent U over a noiseless channel: rate H(U)
    auto ident = stateless_bsc_pair(0.0, 0.0);
    GpStrategy ind;
    ind.v_size = 2;
    ind.pv_given_s = {0.7, 0.3};
    ind.f = {0, 1};
    CHECK(region_gp(ident, 1, ind) == doctest::Approx(binary_entropy(0.3)).epsilon(1e-10));
}

TEST_CASE("stuck memory strategy reaches the analytic corner") {
    for (double p : {0.1, 0.2, 0.5}) {
        auto ch = make_stuck_memory(p);
        auto st = stuck_memory_strategy();
        auto reg = region_bcsi_state(ch, st);
        CHECK(std::abs(reg.corner.r1 - (2.0 - 2.0 * p)) < 1e-9);
        CHECK(std::abs(reg.corner.r2 - (1.0 - p)) < 1e-9);
        CHECK(reg.c3);
        CHECK(reg.c4);
        CHECK(reg.c5);
    }
    // p = 1: corner collapses to the origin
    auto reg1 = region_bcsi_state(make_stuck_memory(1.0), stuck_memory_strategy());
    CHECK(std::abs(reg1.corner.r1) < 1e-9);
    CHECK(std::abs(reg1.corner.r2) < 1e-9);
}

TEST_CASE("constant V2 reduces the two-layer region to two gp rates") {
    auto ch = make_bsc_interference(0.05, 0.1, 0.5);
    auto gp = GpStrategy::dirty_paper_xor();
    auto aux = AuxStrategy::from_gp(gp, ch);
    auto reg = region_bcsi_state(ch, aux);
    CHECK(reg.corner.r1 == doctest::Approx(region_gp(ch, 1, gp)).epsilon(1e-12));
    CHECK(reg.corner.r2 == doctest::Approx(region_gp(ch, 2, gp)).epsilon(1e-12));
    CHECK(std::abs(reg.c3_gap) < 1e-12);  // boundary: layer 2 carries nothing
    CHECK(reg.boundary);
}

TEST_CASE("random probes never beat the analytic stuck-memory corner") {
    auto ch = make_stuck_memory(0.2);
    Rng64 rng(2024);
    for (int probe = 0; probe < 2000; ++probe) {
        auto st = random_aux(rng, ch, 2, 4);
        auto reg = region_bcsi_state(ch, st);
        // no strategy with valid conditions may exceed the capacity corner
        if (reg.c3 && reg.c4 && reg.c5) {
            CHECK(reg.corner.r1 <= 2.0 - 2.0 * 0.2 + 1e-9);
            CHECK(reg.corner.r2 <= 1.0 - 0.2 + 1e-9);
        }
    }
}

TEST_CASE("rates are nonnegative whenever the condition flags hold") {
    Rng64 rng(77);
    auto ch = make_bsc_interference(0.1, 0.2, 0.3);
    for (int probe = 0; probe < 500; ++probe) {
        auto st = random_aux(rng, ch, 2, 2);
        auto reg = region_bcsi_state(ch, st);
        // chain rule: the R1 corner splits into the layer contributions
        CHECK(reg.corner.r1 == doctest::Approx(reg.c3_gap + reg.c4_gap).epsilon(1e-9));
        if (reg.c3 && reg.c4) CHECK(reg.corner.r1 >= -1e-10);
        if (reg.c5) CHECK(reg.corner.r2 >= -1e-10);
    }
}

TEST_CASE("search finds the noiseless rate-1 strategy") {
    auto ident = stateless_bsc_pair(0.0, 0.0);
    auto res = search_strategies(ident, 2, 1, 2, 1.0, -1.0, 100000);
    REQUIRE(res.found);
    CHECK(res.best.r1 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("search returns the origin for a useless channel") {
    StateChannel ch;
    ch.x_alphabet = {0, 1};
    ch.s_alphabet = {0};
    ch.y1_alphabet = {0, 1};
    ch.y2_alphabet = {0, 1};
    ch.state = Pmf({1.0});
    ch.trans.assign(8, 0.25);  // outputs independent of everything
    auto res = search_strategies(ch, 2, 1, 4, 0.5, -1.0, 100000);
    REQUIRE(res.found);
    CHECK(std::abs(res.best.r1) < 1e-9);
    CHECK(std::abs(res.best.r2) < 1e-9);
}

TEST_CASE("a finer grid never returns a worse weighted corner") {
    auto ch = make_bsc_interference(0.1, 0.2, 0.5);
    auto coarse = search_strategies(ch, 2, 1, 2, 0.5, -1.0, 1000000);
    auto fine = search_strategies(ch, 2, 1, 4, 0.5, -1.0, 1000000);
    REQUIRE(coarse.found);
    REQUIRE(fine.found);
    double wc = 0.5 * coarse.best.r1 + 0.5 * coarse.best.r2;
    double wf = 0.5 * fine.best.r1 + 0.5 * fine.best.r2;
    CHECK(wf >= wc - 1e-12);
}

TEST_CASE("two-layer search runs within budget on a small channel") {
    auto ch = make_bsc_interference(0.1, 0.3, 0.5);
    auto res = search_strategies(ch, 2, 2, 2, 0.7, -1.0, 2000000);
    REQUIRE(res.found);
    // it can never beat the per-user state-informed limits
    CHECK(res.best.r1 <= 1.0 - binary_entropy(0.1) + 1e-9);
    CHECK(res.best.r2 <= 1.0 - binary_entropy(0.3) + 1e-9);
    CHECK_THROWS_AS(search_strategies(ch, 2, 2, 8, 0.5, -1.0, 1000), InfeasibleError);
}
