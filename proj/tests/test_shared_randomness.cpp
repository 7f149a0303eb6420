#include <doctest.h>

#include <string>

#include "polargp/shared_randomness.hpp"

using namespace polargp;

TEST_CASE("frozen maps are deterministic in (seed, stream, j, i)") {
    auto sr = SharedRandomness::from_hex("deadbeef0123456789", "scheme-x");
    CHECK(frozen_gamma(sr, 3, 17) == frozen_gamma(sr, 3, 17));
    CHECK(sr.u64(1, 2) == sr.u64(1, 2));
    auto sr2 = SharedRandomness::from_hex("deadbeef0123456789", "scheme-x");
    CHECK(sr.u64(9, 9) == sr2.u64(9, 9));
    auto forked = sr.fork("other");
    CHECK(sr.u64(9, 9) != forked.u64(9, 9));
}

TEST_CASE("lambda at a point mass ignores the seed") {
    auto sr = SharedRandomness::from_hex("00ff", "s");
    for (uint32_t i = 0; i < 50; ++i) {
        CHECK(frozen_lambda(sr, 0, i, {0.0, 1.0}) == 1);
        CHECK(frozen_lambda(sr, 0, i, {1.0, 0.0}) == 0);
    }
}

TEST_CASE("lambda empirical mean follows the conditional") {
    auto sr = SharedRandomness::from_hex("123456789abcdef0", "lam");
    const int labels = 100000;
    long ones = 0;
    for (int i = 0; i < labels; ++i)
        ones += frozen_lambda(sr, uint32_t(i >> 16), uint32_t(i & 0xffff), {0.7, 0.3});
    double mean = double(ones) / labels;
    CHECK(mean == doctest::Approx(0.300).epsilon(0.017));  // +-0.005 absolute
    CHECK(std::abs(mean - 0.300) < 0.005);
}

TEST_CASE("gamma empirical mean is one half") {
    auto sr = SharedRandomness::from_hex("fedcba", "gam");
    const int labels = 100000;
    long ones = 0;
    for (int i = 0; i < labels; ++i)
        ones += frozen_gamma(sr, uint32_t(i >> 16), uint32_t(i & 0xffff));
    CHECK(std::abs(double(ones) / labels - 0.5) < 0.005);
}

TEST_CASE("distinct master seeds agree on about half the labels") {
    auto a = SharedRandomness::from_hex("01", "g");
    auto b = SharedRandomness::from_hex("02", "g");
    const int labels = 100000;
    long agree = 0;
    for (int i = 0; i < labels; ++i)
        agree += frozen_gamma(a, 0, uint32_t(i)) == frozen_gamma(b, 0, uint32_t(i));
    CHECK(std::abs(double(agree) / labels - 0.5) < 0.01);
}

TEST_CASE("gamma equals lambda at conditional one half") {
    auto sr = SharedRandomness::from_hex("77", "eq");
    for (uint32_t i = 0; i < 1000; ++i)
        CHECK(frozen_gamma(sr, 5, i) == frozen_lambda(sr, 5, i, {0.5, 0.5}));
}

TEST_CASE("seed parsing") {
    CHECK_THROWS(SharedRandomness::from_hex("xyz", ""));
    CHECK_THROWS(SharedRandomness::from_hex(std::string(65, 'a'), ""));
    auto sr = SharedRandomness::from_hex("ff", "");
    CHECK(sr.seed[3] == 0xffu);
    CHECK(sr.seed[0] == 0u);
}
