#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polargp/pmf.hpp"

namespace polargp {

using BitBlock = std::vector<uint8_t>;

bool is_power_of_two(int n);

// u * G_n over GF(2), G_n = [[1,0],[1,1]]^{(x) log2 n}, natural (non
// bit-reversed) index order. The transform is an involution.
BitBlock polar_transform(const BitBlock& u);

struct BitConditional {
    double p0 = 0.0, p1 = 0.0;
    double z() const;             // 2*sqrt(p0*p1)
    uint8_t map_decision() const; // argmax, ties toward 0
};

// Conditioning state for one successive-cancellation query: the model is
// X^{1:n} i.i.d. from joint's X-marginal, obs^i drawn per symbol from the
// joint, U^{1:n} = X^{1:n} G_n. `decided` is the prefix u^{1:i-1}.
struct ScContext {
    JointPmf joint;
    std::vector<int> observations;
    BitBlock decided;
};

// Incremental evaluator giving exact P(U^i | obs^{1:n}, u^{1:i-1}).
// One full sweep of next_conditional()/push() over i = 1..n costs
// O(n log n); conditionals are only computed for queried indices, so
// blocks whose bits are pushed without a query cost almost nothing.
// A conditioning event of probability zero yields nullopt ("impossible
// context") and poisons the evaluator.
class ScEvaluator {
public:
    ScEvaluator(const JointPmf& joint, std::vector<int> observations);

    int length() const { return n_; }
    int position() const { return decided_; }
    bool poisoned() const { return poisoned_; }

    // Conditional for index position()+1. Idempotent until the next push.
    std::optional<BitConditional> next_conditional();
    void push(uint8_t bit);

private:
    struct Node {
        int count = 0;          // locally decided bits
        uint8_t last_bit = 0;   // most recent odd-position bit (pair partner)
        int pair_index = -1;    // which local pair s_/t_ currently hold
        BitConditional s, t;    // cached child conditionals for pair_index
    };

    std::optional<BitConditional> node_conditional(int depth, int path);
    void node_push(int depth, int path, uint8_t bit);
    Node& node(int depth, int path) { return nodes_[(size_t(1) << depth) - 1 + path]; }

    JointPmf joint_;
    std::vector<int> obs_;
    std::vector<Node> nodes_;
    int n_ = 0, kappa_ = 0, decided_ = 0;
    bool poisoned_ = false;
    std::optional<BitConditional> current_;
    bool current_valid_ = false;
};

// Single-query convenience wrapper around ScEvaluator.
std::optional<BitConditional> sc_conditional(const ScContext& ctx);

// Test oracle: same contract, computed by summing the joint likelihood
// over all 2^n source sequences consistent with the decided prefix.
// Requires n <= 16.
std::optional<BitConditional> brute_force_conditional(const ScContext& ctx);

// P(obs^{1:n}) under the model, by enumeration. n <= 16.
double brute_force_obs_probability(const JointPmf& joint, const std::vector<int>& obs);

}  // namespace polargp
