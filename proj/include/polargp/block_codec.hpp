#pragma once

#include <functional>
#include <optional>

#include "polargp/sc_engine.hpp"
#include "polargp/shared_randomness.hpp"

namespace polargp {

// Encoder-side slot classes. External covers everything whose value the
// scheme supplies (message, chain copy, network copy, XOR); Lambda bits
// come from the conditioned shared map, Gamma bits from the shared coin.
enum class EncSlot : uint8_t { External, Lambda, Gamma };

// Decoder-side rules. Known covers chain copies and message side
// information; LambdaRecompute replays the encoder's map and is only legal
// when the map's conditioning is available at this decoder.
enum class DecSlot : uint8_t { Map, Known, LambdaRecompute, Gamma };

// Stepwise single-block encoder. Lambda bits are drawn against
// `lambda_model` conditioned on `lambda_obs`; External bits are pulled
// from a resolver which may defer (returns nullopt), allowing several
// cross-linked blocks to be encoded as a dataflow.
class BlockEncoder {
public:
    BlockEncoder(const JointPmf& lambda_model, std::vector<int> lambda_obs,
                 const std::vector<EncSlot>* slots, const SharedRandomness& sr, uint32_t block_id);

    // Runs until done or until an External slot's value is not yet
    // available. Returns true when the block is complete.
    bool advance(const std::function<std::optional<uint8_t>(int)>& resolver);

    bool done() const { return pos_ == n_; }
    int position() const { return pos_; }
    const BitBlock& u() const { return u_; }

private:
    ScEvaluator eval_;
    const std::vector<EncSlot>* slots_;
    SharedRandomness sr_;
    uint32_t block_;
    BitBlock u_;
    int n_, pos_ = 0;
};

// One-shot encode: all External values pre-resolved in `values`.
// Returns the synthetic sequence u and the transformed block x = u G_n.
struct EncodeResult {
    BitBlock u, x;
};
EncodeResult encode_block(const std::vector<EncSlot>& slots, const BitBlock& values,
                          const JointPmf& lambda_model, const std::vector<int>& lambda_obs,
                          const SharedRandomness& sr, uint32_t block_id);

// Successive-cancellation decode of one block. Map slots are decided by
// the MAP rule against `map_model`/`map_obs`; Known slots take known(i);
// LambdaRecompute replays the map against `lambda_model` (pass nullptr
// when the role map has no such slots). ok=false reports an impossible
// conditioning context (counted as a block erasure by callers).
struct DecodeResult {
    BitBlock u;
    bool ok = true;
};
DecodeResult decode_block(const JointPmf& map_model, const std::vector<int>& map_obs,
                          const std::vector<DecSlot>& slots,
                          const std::function<uint8_t(int)>& known,
                          const JointPmf* lambda_model, const std::vector<int>* lambda_obs,
                          const SharedRandomness& sr, uint32_t block_id);

}  // namespace polargp
