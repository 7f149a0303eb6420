#pragma once

#include "polargp/channels.hpp"
#include "polargp/strategy.hpp"

namespace polargp {

struct RegionCorner {
    double r1 = 0.0;  // bound on R1 + R0
    double r2 = 0.0;  // bound on R2 + R0
};

// Stateless broadcast corner (I(X;Y1), I(X;Y2)) for a given input pmf.
RegionCorner region_bcsi_common(const StateChannel& ch, const Pmf& input);

// Gelfand-Pinsker rate I(U;Y_receiver) - I(U;S) of one strategy.
double region_gp(const StateChannel& ch, int receiver, const GpStrategy& st);

// Two-layer corner plus the strict-inequality conditions on (V1, V2).
struct StateRegion {
    RegionCorner corner;  // (I(V1,V2;Y1)-I(V1,V2;S), I(V1;Y2)-I(V1;S))
    double c3_gap = 0.0;  // I(V2;Y1|V1) - I(V2;S|V1)
    double c4_gap = 0.0;  // I(V1;Y1) - I(V1;S)
    double c5_gap = 0.0;  // I(V1;Y2) - I(V1;S)
    bool c3 = false, c4 = false, c5 = false;
    bool boundary = false;  // some gap within 1e-9 of zero: neither accepted nor rejected
};
StateRegion region_bcsi_state(const StateChannel& ch, const AuxStrategy& st);

// Deterministic grid/enumeration search over strategies with the given
// alphabet sizes. Symbol maps are enumerated per state column and
// deduplicated by their induced channel slice; conditional laws run over
// 1/grid-step simplex grids. Feasibility means corner.r2 >= r2_floor; the
// best feasible corner under weight*R1 + (1-weight)*R2 wins, ties toward
// the earlier enumeration point. v2_size = 1 searches the constant-V2
// (single auxiliary) family of the classical extension.
struct SearchResult {
    RegionCorner best;
    AuxStrategy strategy;
    long evaluations = 0;
    bool found = false;
};
SearchResult search_strategies(const StateChannel& ch, int v1_size, int v2_size, int grid,
                               double weight_r1, double r2_floor, long budget, int threads = 1);

}  // namespace polargp
