#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polargp/pmf.hpp"
#include "polargp/rng.hpp"

namespace polargp {

// Two-receiver discrete memoryless broadcast channel with state:
// P(y1,y2 | x,s) plus the state pmf. Alphabets are symbol-value lists;
// tables are indexed positionally.
struct StateChannel {
    std::vector<int> x_alphabet, s_alphabet, y1_alphabet, y2_alphabet;
    Pmf state;                    // over s_alphabet
    std::vector<double> trans;    // [((x*ns + s)*ny1 + y1)*ny2 + y2]

    int nx() const { return static_cast<int>(x_alphabet.size()); }
    int ns() const { return static_cast<int>(s_alphabet.size()); }
    int ny1() const { return static_cast<int>(y1_alphabet.size()); }
    int ny2() const { return static_cast<int>(y2_alphabet.size()); }

    double p(int x, int s, int y1, int y2) const {
        return trans[((size_t(x) * ns() + s) * ny1() + y1) * ny2() + y2];
    }
    double p_y1(int y1, int x, int s) const;
    double p_y2(int y2, int x, int s) const;
    // marginal towards one receiver: 1 or 2
    std::vector<double> marginal(int receiver) const;  // [(x*ns+s)*ny + y]

    void validate(double tol = 1e-12) const;
};

// Y_i = X xor Z_i xor S over {0,1}, Z_i ~ Bern(p_i) independent,
// S ~ Bern(q).
StateChannel make_bsc_interference(double p1, double p2, double q);

// Memory with stuck faults: X in {1..4}, S in {0..4} with P(S=s)=p/4 for
// s=1..4 and 1-p for s=0. Y1 = S when S != 0, else X; Y2 = 0 when
// Y1 in {1,2} and 1 when Y1 in {3,4}.
StateChannel make_stuck_memory(double p);

struct Transmission {
    std::vector<int> y1, y2;
};

// i.i.d. per-symbol sampling from P(y1,y2|x,s); deterministic given seed.
Transmission sample_transmission(const StateChannel& ch, const std::vector<int>& x_block,
                                 const std::vector<int>& s_block, uint64_t seed);

std::vector<int> sample_state_block(const StateChannel& ch, int n, uint64_t seed);

struct DegradednessWitness {
    std::vector<double> q;  // q[y1*ny2 + y2] = P(y2|y1)
    double residual = 0.0;
};

// Solves the linear feasibility problem for P(y2|y1) such that composing
// with P(y1|x,s) reproduces P(y2|x,s). Returns nullopt when the channel is
// not stochastically degraded.
std::optional<DegradednessWitness> check_degraded(const StateChannel& ch, double tol = 1e-9);

}  // namespace polargp
