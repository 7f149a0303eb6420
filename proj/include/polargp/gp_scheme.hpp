#pragma once

#include "polargp/block_codec.hpp"
#include "polargp/construction.hpp"
#include "polargp/strategy.hpp"

namespace polargp {

// Chained single-user code for a channel with encoder state: k payload
// blocks whose relay-frozen bits thread forward through R1, plus t causal
// pre-phase blocks carrying the last block's relay bits. A constant-state
// channel with an identity map degenerates to the plain point-to-point
// asymmetric code (t = 0, empty chain).
struct GpCodeSpec {
    StateChannel channel;
    GpStrategy strategy;
    int receiver = 1;
    int n = 0, k = 1;
    double rate = 0.0;
    SchemeKind kind = SchemeKind::GpSingle;

    PolarSets sets;
    ChainPlan plan;
    CausalStrategy pre;
    PolarSets pre_sets;

    JointPmf enc_law, dec_law;        // (V,S), (V,Y)
    JointPmf pre_prior, pre_dec;      // (V',const), (V',Y)

    int blocks() const { return plan.blocks_total(); }
    long message_bits() const { return plan.m1_bits; }
};

GpCodeSpec build_gp_spec(const StateChannel& ch, const GpStrategy& st, int receiver, int n,
                         int k, double rate, int samples, const SetPolicy& policy,
                         uint64_t construction_seed, int threads = 1,
                         SchemeKind kind = SchemeKind::GpSingle,
                         const PolarSets* sets_override = nullptr);

struct GpFrame {
    std::vector<BitBlock> u;          // payload synthetic blocks, size k
    std::vector<BitBlock> u_pre;      // pre-phase synthetic blocks, size t
    std::vector<std::vector<int>> x;  // channel inputs, k + t blocks
};

GpFrame gp_encode(const GpCodeSpec& spec, const BitBlock& message,
                  const std::vector<std::vector<int>>& states, const SharedRandomness& sr);

struct GpDecodeOutput {
    BitBlock message;
    bool ok = true;            // false when any block hit an impossible context
    std::vector<uint8_t> block_ok;
};

// Decodes pre-phase first, then payload blocks from last to first. With
// genie_relay set, the last block's relay bits are taken from the truth
// instead of the pre-phase (strictly more information; test hook).
GpDecodeOutput gp_decode(const GpCodeSpec& spec, const std::vector<std::vector<int>>& y,
                         const SharedRandomness& sr, const BitBlock* genie_relay = nullptr);

// Convenience: a constant-state wrapper of a plain binary-input channel,
// so the point-to-point code rides the same machinery.
StateChannel p2p_channel(const std::vector<double>& w_y_given_x, int ny);
// uniform state-blind input: P(V) uniform, x = v regardless of s
GpStrategy p2p_strategy(int ns = 1);

}  // namespace polargp
