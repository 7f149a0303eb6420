#pragma once

#include "polargp/block_codec.hpp"
#include "polargp/construction.hpp"
#include "polargp/rate_region.hpp"
#include "polargp/strategy.hpp"

namespace polargp {

struct BcsiMessages {
    BitBlock m0, m1, m2;
};

// ---- common message, no state ------------------------------------------

struct BcsiCommonSpec {
    StateChannel channel;  // constant state (ns == 1), binary input
    Pmf input;             // P_X
    int n = 0, k = 2;
    double r0 = 0.0, r1 = 0.0, r2 = 0.0;
    PolarSets sets;  // rx[0] = receiver 1, rx[1] = receiver 2
    ChainPlan plan;
    JointPmf prior_law, dec1_law, dec2_law;

    long m0_bits() const { return plan.m0_bits; }
    long m1_bits() const { return plan.m1_bits; }
    long m2_bits() const { return plan.m2_bits; }
};

BcsiCommonSpec build_bcsi_common_spec(const StateChannel& ch, const Pmf& input, int n, int k,
                                      double r0, double r1, double r2, int samples,
                                      const SetPolicy& policy, uint64_t seed, int threads = 1,
                                      const PolarSets* sets_override = nullptr);

struct BcsiCommonFrame {
    std::vector<BitBlock> u;
    std::vector<std::vector<int>> x;
};

BcsiCommonFrame bcsi_common_encode(const BcsiCommonSpec& spec, const BcsiMessages& msgs,
                                   const SharedRandomness& sr);

struct BcsiDecodeOutput {
    BitBlock m0, mprivate;  // receiver 1 recovers M1, receiver 2 recovers M2
    bool ok = true;
    std::vector<uint8_t> block_ok;
    std::vector<BitBlock> u_hat, u2_hat;  // recovered synthetic planes (debug/tests)
};

// `side_info` is the other user's private message (known a priori here).
BcsiDecodeOutput bcsi_common_decode(const BcsiCommonSpec& spec, int receiver,
                                    const std::vector<std::vector<int>>& y,
                                    const BitBlock& side_info, const SharedRandomness& sr);

// ---- noncausal state, two layers, dual chains ---------------------------

struct BcsiStateSpec {
    StateChannel channel;
    AuxStrategy strategy;  // binary V1, V2
    int n = 0, k = 2;
    double r0 = 0.0, r1 = 0.0, r2 = 0.0;
    double layer2_rate = -1.0;
    PolarSets sets;    // layer 1: rx[0], rx[1]
    PolarSets sets2;   // layer 2: rx[0] only
    ChainPlan plan;
    CausalStrategy pre1, pre2;
    PolarSets pre1_sets, pre2_sets;
    StateRegion region;  // corner and strict-condition flags of the strategy

    JointPmf l1_enc, l1_dec1, l1_dec2;
    JointPmf l2_enc, l2_dec1;
    JointPmf pre1_prior, pre1_dec, pre2_prior, pre2_dec;
};

// `sets_override`: tests may supply handcrafted partitions (layer 1 with
// two receivers, then layer 2) instead of Monte Carlo construction.
BcsiStateSpec build_bcsi_state_spec(const StateChannel& ch, const AuxStrategy& st, int n, int k,
                                    double r0, double r1, double r2, double layer2_rate,
                                    int samples, const SetPolicy& policy, uint64_t seed,
                                    int threads = 1, const PolarSets* sets_override = nullptr,
                                    const PolarSets* sets2_override = nullptr);

struct BcsiStateFrame {
    std::vector<BitBlock> u1, u2;        // payload layers, k blocks each
    std::vector<BitBlock> u_pre1, u_pre2;
    std::vector<std::vector<int>> x;     // k + 2t blocks in transmit order
};

BcsiStateFrame bcsi_state_encode(const BcsiStateSpec& spec, const BcsiMessages& msgs,
                                 const std::vector<std::vector<int>>& states,
                                 const SharedRandomness& sr);

BcsiDecodeOutput bcsi_state_decode(const BcsiStateSpec& spec, int receiver,
                                   const std::vector<std::vector<int>>& y,
                                   const BitBlock& side_info, const SharedRandomness& sr);

}  // namespace polargp
