#include <doctest.h>

#include <cmath>

#include "polargp/sc_engine.hpp"
#include "test_support.hpp"

using namespace polargp;

TEST_CASE("polar transform small cases") {
    CHECK(polar_transform({1, 0}) == BitBlock{1, 0});
    CHECK(polar_transform({1, 1}) == BitBlock{0, 1});
    CHECK(polar_transform({0, 1}) == BitBlock{1, 1});
    CHECK_THROWS(polar_transform({1, 0, 1}));
}

TEST_CASE("polar transform is a GF(2)-linear involution") {
    Rng64 rng(3);
    for (int n : {1, 2, 4, 8, 16, 64}) {
        for (int trial = 0; trial < 20; ++trial) {
            BitBlock a(n), b(n);
            for (int i = 0; i < n; ++i) {
                a[i] = rng.next_bit();
                b[i] = rng.next_bit();
            }
            CHECK(polar_transform(polar_transform(a)) == a);
            BitBlock ab(n);
            for (int i = 0; i < n; ++i) ab[i] = a[i] ^ b[i];
            BitBlock ta = polar_transform(a), tb = polar_transform(b), tab = polar_transform(ab);
            for (int i = 0; i < n; ++i) CHECK(tab[i] == (ta[i] ^ tb[i]));
        }
    }
}

TEST_CASE("sc conditional on noiseless identity is a point mass") {
    JointPmf ident = JointPmf::identity(Pmf::bernoulli(0.5));
    Rng64 rng(5);
    for (int n : {2, 4, 8}) {
        BitBlock x(n);
        for (auto& b : x) b = rng.next_bit();
        std::vector<int> obs(x.begin(), x.end());
        BitBlock u = polar_transform(x);
        ScEvaluator ev(ident, obs);
        for (int i = 0; i < n; ++i) {
            auto c = ev.next_conditional();
            REQUIRE(c.has_value());
            CHECK((u[i] ? c->p1 : c->p0) == doctest::Approx(1.0).epsilon(1e-12));
            ev.push(u[i]);
        }
    }
}

TEST_CASE("independent observation at n=1 returns the X marginal") {
    JointPmf j = JointPmf::bsc(0.3, 0.5);
    auto c = sc_conditional({j, {0}, {}});
    REQUIRE(c.has_value());
    CHECK(c->p1 == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("n=1 reduces to Bayes rule") {
    Rng64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        JointPmf j = testing::random_joint(rng, 3);
        int o = int(rng.next_below(3));
        auto bf = brute_force_conditional({j, {o}, {}});
        double denom = j.p(0, o) + j.p(1, o);
        REQUIRE(bf.has_value());
        CHECK(bf->p1 == doctest::Approx(j.p(1, o) / denom).epsilon(1e-12));
    }
}

TEST_CASE("sc matches brute force on a fixed BSC(0.1) instance at n=4") {
    JointPmf j = JointPmf::bsc(0.5, 0.1);
    std::vector<int> obs = {1, 0, 0, 1};
    BitBlock prefix = {1, 0};
    auto fast = sc_conditional({j, obs, prefix});
    auto slow = brute_force_conditional({j, obs, prefix});
    REQUIRE(fast.has_value());
    REQUIRE(slow.has_value());
    CHECK(fast->p0 == doctest::Approx(slow->p0).epsilon(1e-10));
    CHECK(fast->p1 == doctest::Approx(slow->p1).epsilon(1e-10));
}

TEST_CASE("sc matches brute force on randomized instances") {
    Rng64 rng(23);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        int n = 1 << (1 + rng.next_below(3));  // 2, 4, 8
        JointPmf j = testing::random_joint(rng, 1 + int(rng.next_below(4)), trial % 4 == 0);
        BitBlock x;
        std::vector<int> obs;
        testing::sample_block(j, n, rng, x, obs);
        BitBlock u = polar_transform(x);
        int plen = int(rng.next_below(n));
        BitBlock prefix(u.begin(), u.begin() + plen);
        auto fast = sc_conditional({j, obs, prefix});
        auto slow = brute_force_conditional({j, obs, prefix});
        REQUIRE(fast.has_value() == slow.has_value());
        if (fast) {
            CHECK(std::abs(fast->p0 - slow->p0) < 1e-10);
            CHECK(std::abs(fast->p1 - slow->p1) < 1e-10);
            ++checked;
        }
    }
    CHECK(checked > 250);
}

TEST_CASE("chain rule: sequential conditionals multiply to the block posterior") {
    Rng64 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 << (1 + rng.next_below(3));
        JointPmf j = testing::random_joint(rng, 2);
        BitBlock x;
        std::vector<int> obs;
        testing::sample_block(j, n, rng, x, obs);
        BitBlock u = polar_transform(x);
        ScEvaluator ev(j, obs);
        double prod = 1.0;
        for (int i = 0; i < n; ++i) {
            auto c = ev.next_conditional();
            REQUIRE(c.has_value());
            prod *= u[i] ? c->p1 : c->p0;
            ev.push(u[i]);
        }
        double lik = 1.0;
        for (int i = 0; i < n; ++i) lik *= j.p(x[i], obs[i]);
        double pobs = brute_force_obs_probability(j, obs);
        CHECK(prod == doctest::Approx(lik / pobs).epsilon(1e-9));
    }
}

TEST_CASE("inconsistent prefix under a deterministic joint is an impossible context") {
    JointPmf ident = JointPmf::identity(Pmf::bernoulli(0.5));
    std::vector<int> obs = {0, 0};
    // true source is (0,0): u = (0,0); force u1 = 1
    auto fast = sc_conditional({ident, obs, {1}});
    auto slow = brute_force_conditional({ident, obs, {1}});
    CHECK(!fast.has_value());
    CHECK(!slow.has_value());
}

TEST_CASE("evaluator conditionals agree with one-shot queries mid-block") {
    Rng64 rng(31);
    JointPmf j = testing::random_joint(rng, 3);
    int n = 8;
    BitBlock x;
    std::vector<int> obs;
    testing::sample_block(j, n, rng, x, obs);
    BitBlock u = polar_transform(x);
    ScEvaluator ev(j, obs);
    for (int i = 0; i < n; ++i) {
        auto inc = ev.next_conditional();
        BitBlock prefix(u.begin(), u.begin() + i);
        auto one = sc_conditional({j, obs, prefix});
        REQUIRE(inc.has_value());
        REQUIRE(one.has_value());
        CHECK(inc->p1 == doctest::Approx(one->p1).epsilon(1e-12));
        ev.push(u[i]);
    }
}
