#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "polargp/channels.hpp"
#include "polargp/pmf.hpp"
#include "polargp/strategy.hpp"

namespace polargp {

// A rate point or code plan that cannot be realized; the CLI maps this to
// its own exit code.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Monte Carlo estimate of Z(U^i | obs^{1:n}, U^{1:i-1}) for each index,
// sampled with genie-aided true prefixes.
struct ZProfile {
    int n = 0;
    std::vector<double> z;
    std::string conditioning;   // label, e.g. "U1|S" or "U|Y1"
    double h_cond = 0.0;        // exact H(X|obs) of the underlying joint
    std::vector<double> var;    // per-index sample variance of the z draws
    int samples = 0;
};

ZProfile estimate_z_profile(const JointPmf& joint, int n, int samples, uint64_t seed,
                            const std::string& label, int threads = 1);

// Four-way index partition for one receiver.
struct SetPartition {
    std::vector<int> info;      // I   = H_state & L_out
    std::vector<int> f_approx;  // F_a = H_state & ~L_out
    std::vector<int> f_relay;   // F_r = ~H_state & ~L_out  (needs chaining)
    std::vector<int> f_free;    // F_f = ~H_state & L_out
    std::vector<int> info_ranked;  // info sorted most reliable first
    std::vector<double> z_out;     // output-side z per index (may be empty)
};

struct PolarSets {
    int n = 0;
    std::vector<int> h_state, l_state;            // raw sets, state-side conditioning
    std::vector<std::vector<int>> h_out, l_out;   // raw sets per receiver
    std::vector<SetPartition> rx;

    void validate_partition() const;  // throws unless each rx partitions [0,n)
};

struct SetPolicy {
    enum class Mode { Threshold, RateTarget } mode = Mode::RateTarget;
    double beta = 0.45;  // threshold mode: delta_n = 2^{-n^beta}
};

// state_profile supplies the H side; out_profiles one L side per receiver.
PolarSets build_polar_sets(const ZProfile& state_profile,
                           const std::vector<ZProfile>& out_profiles, const SetPolicy& policy);

// Capacity of the channel to `receiver` with causal state at the encoder:
// max over P_V and deterministic f: VxS -> X of I(V;Y). Enumeration over f
// (deduplicated by induced conditional), Blahut-Arimoto inner loop.
struct CausalStrategy {
    int v_size = 0;
    std::vector<int> f;  // [v * ns + s] -> x
    Pmf pv;
    double capacity = 0.0;  // bits
};

CausalStrategy causal_capacity(const StateChannel& ch, int receiver, int v_bound = 0,
                               bool ignore_state = false, long f_budget = 4000000);

// ---- chain planning ----------------------------------------------------

enum class SchemeKind { P2p, GpSingle, BcsiCommon, BcsiState };

enum class SlotKind : uint8_t {
    Common,   // equivalent-common-message stream (M0')
    Private,  // receiver-1 private stream placed directly (M11 / M101)
    Chain,    // copy of another block's bit
    Xor,      // case (b): W'1 xor W'2
    Lambda,   // frozen by the conditioned map
    Gamma,    // frozen by the shared fair coin
};

struct BlockRoles {
    std::vector<uint8_t> kind;        // SlotKind per index
    std::vector<int32_t> chain_src;   // Chain: source index in the adjacent block
    std::vector<int8_t> chain_delta;  // Chain: -1 previous block, +1 next block
    std::vector<int32_t> stream_pos;  // Common/Private: offset into the stream; Xor: 0..w-1

    void init(int n);
};

struct ChainPlan {
    SchemeKind scheme = SchemeKind::P2p;
    int n = 0, k = 0, t = 0;
    char case_mark = '-';
    int overlap = 0;  // w = |W'| bits per payload block in case (b)

    std::vector<int> i1, i2, i11;          // operative (shrunk) info sets
    std::vector<int> r1, r2, r11;          // chain sets
    std::vector<int> d1, d2, d10;          // network-coding sets
    std::vector<int> xor_slots;            // O, case (b)
    std::vector<int> f1r, f2r, f11r;       // relay-frozen sets (copied from partitions)

    std::vector<BlockRoles> layer1;        // payload blocks, local ids 0..k-1
    std::vector<BlockRoles> layer2;        // BcsiState only

    std::vector<int> pre1_slots, pre2_slots;  // info positions used per pre block
    int pre1_per_block = 0, pre2_per_block = 0;

    long m0_bits = 0, m1_bits = 0, m2_bits = 0;
    long m10_bits = 0, m101_bits = 0, m11_bits = 0;  // splits of M1
    long m0p_bits = 0;                               // |M0'| = m0 + m2
    long common_capacity = 0, private_capacity = 0, layer2_capacity = 0;

    int blocks_total() const {
        return scheme == SchemeKind::BcsiState ? k + 2 * t
             : scheme == SchemeKind::GpSingle  ? k + t
                                               : k;
    }
};

struct PlanRequest {
    SchemeKind scheme = SchemeKind::P2p;
    int n = 0, k = 1;
    double r0 = 0.0, r1 = 0.0, r2 = 0.0;
    double layer2_rate = -1.0;  // BcsiState: requested R11; negative = auto split
    // free-frozen indices whose output-side z exceeds this ride the chain
    // instead of being trusted to the MAP rule (1.0 disables the guard)
    double relay_guard = 0.25;
    const PolarSets* sets = nullptr;
    const SetPartition* layer2 = nullptr;            // BcsiState
    std::vector<int> pre1_info_ranked, pre2_info_ranked;  // full pre-phase info sets
};

ChainPlan plan_chain(const PlanRequest& req);

}  // namespace polargp
