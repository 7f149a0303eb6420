#pragma once

#include <json.hpp>

#include "polargp/construction.hpp"
#include "polargp/experiment.hpp"
#include "polargp/strategy.hpp"

namespace polargp {

// Malformed configuration input; the CLI maps this to its own exit code.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

using json = nlohmann::ordered_json;

json to_json(const Pmf& p);
Pmf pmf_from_json(const json& j);

json to_json(const JointPmf& p);
JointPmf joint_from_json(const json& j);

json to_json(const StateChannel& ch);
// accepts {"preset": "bsc-interference", "p1":..., "p2":..., "q":...},
// {"preset": "stuck-memory", "p":...}, or an inline table
StateChannel channel_from_json(const json& j);

json to_json(const ZProfile& z);
ZProfile zprofile_from_json(const json& j);

json to_json(const PolarSets& s);
PolarSets polar_sets_from_json(const json& j);

json to_json(const GpStrategy& s);
GpStrategy gp_strategy_from_json(const json& j);

json to_json(const AuxStrategy& s);
AuxStrategy aux_strategy_from_json(const json& j);

json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_from_json(const json& j);

uint64_t channel_hash(const StateChannel& ch);

}  // namespace polargp
