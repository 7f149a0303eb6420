#include "polargp/block_codec.hpp"

#include <stdexcept>

namespace polargp {

BlockEncoder::BlockEncoder(const JointPmf& lambda_model, std::vector<int> lambda_obs,
                           const std::vector<EncSlot>* slots, const SharedRandomness& sr,
                           uint32_t block_id)
    : eval_(lambda_model, std::move(lambda_obs)), slots_(slots), sr_(sr), block_(block_id) {
    n_ = eval_.length();
    if (static_cast<int>(slots_->size()) != n_)
        throw std::invalid_argument("BlockEncoder: slot map length mismatch");
    u_.resize(n_);
}

bool BlockEncoder::advance(const std::function<std::optional<uint8_t>(int)>& resolver) {
    while (pos_ < n_) {
        uint8_t bit;
        switch (static_cast<EncSlot>((*slots_)[pos_])) {
            case EncSlot::External: {
                auto v = resolver(pos_);
                if (!v) return false;  // suspended on a not-yet-encoded source
                bit = *v & 1;
                break;
            }
            case EncSlot::Lambda: {
                auto cond = eval_.next_conditional();
                if (!cond) throw std::logic_error("BlockEncoder: impossible lambda context");
                bit = frozen_lambda(sr_, block_, uint32_t(pos_), *cond);
                break;
            }
            case EncSlot::Gamma:
                bit = frozen_gamma(sr_, block_, uint32_t(pos_));
                break;
            default:
                throw std::logic_error("BlockEncoder: bad slot");
        }
        u_[pos_] = bit;
        eval_.push(bit);
        ++pos_;
    }
    return true;
}

EncodeResult encode_block(const std::vector<EncSlot>& slots, const BitBlock& values,
                          const JointPmf& lambda_model, const std::vector<int>& lambda_obs,
                          const SharedRandomness& sr, uint32_t block_id) {
    if (values.size() != slots.size())
        throw std::invalid_argument("encode_block: values length mismatch");
    BlockEncoder enc(lambda_model, lambda_obs, &slots, sr, block_id);
    bool ok = enc.advance([&](int i) { return std::optional<uint8_t>(values[i]); });
    if (!ok) throw std::logic_error("encode_block: unresolved external slot");
    EncodeResult out;
    out.u = enc.u();
    out.x = polar_transform(out.u);
    return out;
}

DecodeResult decode_block(const JointPmf& map_model, const std::vector<int>& map_obs,
                          const std::vector<DecSlot>& slots,
                          const std::function<uint8_t(int)>& known,
                          const JointPmf* lambda_model, const std::vector<int>* lambda_obs,
                          const SharedRandomness& sr, uint32_t block_id) {
    ScEvaluator map_eval(map_model, map_obs);
    const int n = map_eval.length();
    if (static_cast<int>(slots.size()) != n)
        throw std::invalid_argument("decode_block: slot map length mismatch");
    std::optional<ScEvaluator> lam_eval;
    if (lambda_model) lam_eval.emplace(*lambda_model, *lambda_obs);

    DecodeResult out;
    out.u.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        uint8_t bit = 0;
        switch (static_cast<DecSlot>(slots[i])) {
            case DecSlot::Map: {
                auto cond = map_eval.next_conditional();
                if (!cond) {
                    out.ok = false;
                    return out;
                }
                bit = cond->map_decision();
                break;
            }
            case DecSlot::Known:
                bit = known(i) & 1;
                break;
            case DecSlot::LambdaRecompute: {
                if (!lam_eval) throw std::logic_error("decode_block: no lambda model supplied");
                auto cond = lam_eval->next_conditional();
                if (!cond) {
                    out.ok = false;
                    return out;
                }
                bit = frozen_lambda(sr, block_id, uint32_t(i), *cond);
                break;
            }
            case DecSlot::Gamma:
                bit = frozen_gamma(sr, block_id, uint32_t(i));
                break;
            default:
                throw std::logic_error("decode_block: bad slot");
        }
        out.u[i] = bit;
        map_eval.push(bit);
        if (lam_eval) lam_eval->push(bit);
    }
    return out;
}

}  // namespace polargp
