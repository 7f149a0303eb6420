#pragma once

#include <array>
#include <optional>
#include <string>

#include "polargp/bcsi_scheme.hpp"
#include "polargp/gp_scheme.hpp"

namespace polargp {

// Configuration-driven Monte Carlo experiment: encode, transmit, decode
// `trials` frames per rate point and report frame-error estimates.
struct ExperimentConfig {
    int schema = 1;
    std::string scheme;  // p2p | gp | bcsi-common | bcsi-state
    StateChannel channel;
    int n = 1024, k = 8;
    int receiver = 1;    // p2p/gp target
    SetPolicy policy;
    int samples = 2000;
    std::vector<std::array<double, 3>> rates;  // (R0, R1, R2); p2p/gp read R1
    double layer2_rate = -1.0;
    long trials = 100;
    std::string seed_hex = "0";
    int threads = 1;
    Pmf input;                               // bcsi-common input pmf (default uniform)
    std::optional<GpStrategy> gp_strategy;   // gp; absent = optimizer
    std::optional<AuxStrategy> aux_strategy; // bcsi-state; absent = optimizer
    std::string cache_dir;                   // resolved from POLARGP_CACHE_DIR when empty
};

struct ResultRow {
    double rate = 0.0;  // R0 + R_receiver at this point
    int receiver = 1;
    double fer = 0.0;
    double ci95 = 0.0;
    long trials = 0;
    double wall_ms = 0.0;
    bool feasible = true;
};

// Monte Carlo construction for the configured scheme: the estimated
// profiles and the polarization sets they induce.
struct ConstructionArtifacts {
    std::vector<ZProfile> profiles;
    PolarSets sets;
    std::optional<PolarSets> sets2;  // bcsi-state layer 2
    GpStrategy gp_strategy;          // resolved strategy (p2p/gp)
    AuxStrategy aux_strategy;        // resolved strategy (bcsi-state)
};
ConstructionArtifacts build_construction(const ExperimentConfig& cfg);

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// RFC-4180 rows, LF endings, '.' decimals; wall time is intentionally not
// a column so identical configs produce identical bytes.
std::string results_to_csv(const std::vector<ResultRow>& rows);

}  // namespace polargp
