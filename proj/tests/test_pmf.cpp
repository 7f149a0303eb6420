#include <doctest.h>

#include <cmath>

#include "polargp/pmf.hpp"
#include "polargp/rng.hpp"
#include "test_support.hpp"

using namespace polargp;

TEST_CASE("entropy basics") {
    CHECK(entropy(Pmf::bernoulli(0.5)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(entropy(Pmf::point_mass(4, 2)) == doctest::Approx(0.0));
    // direct evaluation of -sum p log2 p at p = 0.05
    CHECK(entropy(Pmf::bernoulli(0.05)) == doctest::Approx(0.28639695711595616).epsilon(1e-10));
    CHECK(entropy(Pmf::uniform(8)) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("conditional entropy") {
    CHECK(conditional_entropy(JointPmf::identity(Pmf::bernoulli(0.5))) == doctest::Approx(0.0));
    CHECK(conditional_entropy(JointPmf::bsc(0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(conditional_entropy(JointPmf::bsc(0.5, 0.1)) ==
          doctest::Approx(0.46899559358928117).epsilon(1e-10));
}

TEST_CASE("mutual information") {
    CHECK(mutual_information(JointPmf::bsc(0.5, 0.5)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mutual_information(JointPmf::bsc(0.5, 0.05)) ==
          doctest::Approx(0.7136030428840438).epsilon(1e-10));
    CHECK(mutual_information(JointPmf::identity(Pmf::bernoulli(0.5))) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bhattacharyya parameter") {
    CHECK(bhattacharyya(JointPmf::identity(Pmf::bernoulli(0.5))) == doctest::Approx(0.0));
    CHECK(bhattacharyya(JointPmf::bsc(0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bhattacharyya(JointPmf::bsc(0.5, 0.1)) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("bhattacharyya is invariant under observation relabeling") {
    Rng64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        JointPmf j = testing::random_joint(rng, 4);
        // reverse the observation alphabet
        std::vector<double> t(8);
        for (int x = 0; x < 2; ++x)
            for (int o = 0; o < 4; ++o) t[x * 4 + (3 - o)] = j.p(x, o);
        JointPmf rev(4, std::move(t));
        CHECK(bhattacharyya(j) == doctest::Approx(bhattacharyya(rev)).epsilon(1e-12));
    }
}

TEST_CASE("proposition bounds Z^2 <= H(X|Y) <= log2(1+Z) on random joints") {
    Rng64 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        JointPmf j = testing::random_joint(rng, 1 + int(rng.next_below(5)), trial % 3 == 0);
        double z = bhattacharyya(j);
        double h = conditional_entropy(j);
        CHECK(z * z <= h + 1e-10);
        CHECK(h <= std::log2(1.0 + z) + 1e-10);
    }
}

TEST_CASE("mutual information identities on random joints") {
    Rng64 rng(13);
    for (int trial = 0; trial < 500; ++trial) {
        JointPmf j = testing::random_joint(rng, 1 + int(rng.next_below(6)));
        double mi = mutual_information(j);
        CHECK(mi >= -1e-12);
        double alt = entropy(j.x_marginal()) + entropy(j.obs_marginal()) - joint_entropy(j);
        CHECK(mi == doctest::Approx(alt).epsilon(1e-10));
    }
}

TEST_CASE("pmf validation catches bad inputs") {
    Pmf bad({0.5, 0.6});
    CHECK_THROWS(bad.validate());
    Pmf neg({1.2, -0.2});
    CHECK_THROWS(neg.validate());
    CHECK_NOTHROW(Pmf::bernoulli(0.3).validate());
    CHECK_NOTHROW(JointPmf::bsc(0.4, 0.2).validate());
}
