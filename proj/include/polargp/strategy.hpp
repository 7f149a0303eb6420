#pragma once

#include <vector>

#include "polargp/channels.hpp"
#include "polargp/pmf.hpp"

namespace polargp {

// Single auxiliary layer for channels with encoder state: a conditional
// law P(V|S) and a symbol map x = f(v,s). v_size is 2 for everything the
// polar codecs touch; rate evaluations accept any small alphabet.
struct GpStrategy {
    int v_size = 2;
    std::vector<double> pv_given_s;  // [s * v_size + v]
    std::vector<int> f;              // [v * ns + s] -> x index

    void validate(const StateChannel& ch) const;
    static GpStrategy dirty_paper_xor();  // V uniform independent, x = v ^ s
};

// Two-layer superposition strategy: P(V1|S), P(V2|V1,S), x = f(v1,v2,s).
struct AuxStrategy {
    int v1_size = 2, v2_size = 2;
    std::vector<double> pv1_given_s;    // [s * v1_size + v1]
    std::vector<double> pv2_given_v1s;  // [(v1 * ns + s) * v2_size + v2]
    std::vector<int> f;                 // [(v1 * v2_size + v2) * ns + s] -> x

    void validate(const StateChannel& ch) const;
    GpStrategy layer1_as_gp(const StateChannel& ch) const;  // V2 marginalized out
    static AuxStrategy from_gp(const GpStrategy& s, const StateChannel& ch);  // constant V2
};

// The canonical two-layer strategy for the stuck-memory channel: V2 equals
// the stuck symbol (uniform when the cell is writable), V1 is its coarse
// half, and the written value is V2 itself.
AuxStrategy stuck_memory_strategy();

// Composite observation index conventions used by the two-layer codec.
inline int fuse_v1s(int v1, int s, int ns) { return v1 * ns + s; }
inline int fuse_v1y(int v1, int y, int ny) { return v1 * ny + y; }

// Per-symbol polarization laws induced by a strategy on a channel.
// Layer 1, encoder side: (V1, S).
JointPmf law_v1_state(const StateChannel& ch, const AuxStrategy& st);
// Layer 1, decoder side: (V1, Y_receiver), everything else marginalized.
JointPmf law_v1_output(const StateChannel& ch, const AuxStrategy& st, int receiver);
// Layer 2, encoder side: (V2, (V1,S)) over the fused alphabet.
JointPmf law_v2_state(const StateChannel& ch, const AuxStrategy& st);
// Layer 2, decoder side: (V2, (V1,Y1)).
JointPmf law_v2_output(const StateChannel& ch, const AuxStrategy& st);

// Single-layer variants for the Gelfand-Pinsker codec (binary V).
JointPmf law_gp_state(const StateChannel& ch, const GpStrategy& st);
JointPmf law_gp_output(const StateChannel& ch, const GpStrategy& st, int receiver);

// Causal pre-phase laws: V' independent of S, x = f(v,s).
JointPmf law_causal_prior(const GpStrategy& st, const Pmf& pv);
JointPmf law_causal_output(const StateChannel& ch, const GpStrategy& st, const Pmf& pv,
                           int receiver);

}  // namespace polargp
