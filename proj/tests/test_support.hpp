#pragma once

#include <vector>

#include <algorithm>

#include "polargp/channels.hpp"
#include "polargp/construction.hpp"
#include "polargp/pmf.hpp"
#include "polargp/rng.hpp"
#include "polargp/sc_engine.hpp"

namespace polargp::testing {

// Random joint table over a binary input and m observation symbols.
inline JointPmf random_joint(Rng64& rng, int m, bool allow_zeros = false) {
    std::vector<double> t(2 * m);
    double sum = 0.0;
    for (auto& v : t) {
        v = rng.next_u01();
        if (allow_zeros && rng.next_u01() < 0.2) v = 0.0;
        sum += v;
    }
    if (sum <= 0.0) t[0] = sum = 1.0;
    for (auto& v : t) v /= sum;
    return JointPmf(m, std::move(t));
}

// Draw one (x, obs) pair from the joint.
inline void sample_symbol(const JointPmf& j, Rng64& rng, uint8_t& x, int& obs) {
    double u = rng.next_u01();
    double acc = 0.0;
    for (int xi = 0; xi < 2; ++xi)
        for (int o = 0; o < j.obs_size; ++o) {
            acc += j.p(xi, o);
            if (u < acc) {
                x = static_cast<uint8_t>(xi);
                obs = o;
                return;
            }
        }
    x = 1;
    obs = j.obs_size - 1;
}

// i.i.d. block draw: source bits plus observations.
inline void sample_block(const JointPmf& j, int n, Rng64& rng, BitBlock& x, std::vector<int>& obs) {
    x.resize(n);
    obs.resize(n);
    for (int i = 0; i < n; ++i) sample_symbol(j, rng, x[i], obs[i]);
}

inline BitBlock random_bits(Rng64& rng, long count) {
    BitBlock out(count);
    for (auto& b : out) b = rng.next_bit();
    return out;
}

// Declares the last `count` free-frozen indices relay-frozen instead: a
// conservative re-classification (the decoder stops trusting the channel
// for them and takes them off the chain), used to light up the chaining
// machinery on channels whose estimated relay class is empty.
inline void force_relay(SetPartition& part, int count) {
    // take the lowest-indexed free-frozen bits: chain sources then resolve
    // earlier than any slot that copies them, keeping the encode dataflow
    // acyclic
    count = std::min<int>(count, int(part.f_free.size()));
    part.f_relay.insert(part.f_relay.end(), part.f_free.begin(), part.f_free.begin() + count);
    part.f_free.erase(part.f_free.begin(), part.f_free.begin() + count);
    std::sort(part.f_relay.begin(), part.f_relay.end());
}

// Stateless pair of binary symmetric channels toward the two receivers.
inline StateChannel stateless_bsc_pair(double p1, double p2) {
    StateChannel ch;
    ch.x_alphabet = {0, 1};
    ch.s_alphabet = {0};
    ch.y1_alphabet = {0, 1};
    ch.y2_alphabet = {0, 1};
    ch.state = Pmf({1.0});
    ch.trans.assign(8, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y1 = 0; y1 < 2; ++y1)
            for (int y2 = 0; y2 < 2; ++y2) {
                double a = (y1 ^ x) ? p1 : 1 - p1;
                double b = (y2 ^ x) ? p2 : 1 - p2;
                ch.trans[((size_t(x) * 1 + 0) * 2 + y1) * 2 + y2] = a * b;
            }
    return ch;
}

}  // namespace polargp::testing
