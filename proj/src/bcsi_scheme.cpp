#include "polargp/bcsi_scheme.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "scheme_common.hpp"

namespace polargp {

using detail::enc_slots_of;
using detail::mask;
using detail::padded_stream;
using detail::rank_map;

namespace {

BitBlock slice(const BitBlock& v, long lo, long hi) {
    return BitBlock(v.begin() + lo, v.begin() + hi);
}

BitBlock xor_bits(const BitBlock& a, const BitBlock& b) {
    BitBlock out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

// W'1 bits of the first payload block carry no information: they are the
// R1 gammas of that block, extended with fresh labels if the overlap is
// wider than the chain.
uint8_t w1_gamma(const SharedRandomness& sr_l1, const ChainPlan& plan, long a) {
    uint32_t label = a < long(plan.r1.size()) ? uint32_t(plan.r1[a]) : uint32_t(plan.n + a);
    return frozen_gamma(sr_l1, uint32_t(plan.t), label);
}

}  // namespace

// ---- common message ------------------------------------------------------

BcsiCommonSpec build_bcsi_common_spec(const StateChannel& ch, const Pmf& input, int n, int k,
                                      double r0, double r1, double r2, int samples,
                                      const SetPolicy& policy, uint64_t seed, int threads,
                                      const PolarSets* sets_override) {
    if (ch.ns() != 1) throw std::invalid_argument("bcsi-common requires a constant-state channel");
    if (ch.nx() != 2) throw std::invalid_argument("bcsi-common codec requires binary input");
    BcsiCommonSpec spec;
    spec.channel = ch;
    spec.input = input;
    spec.n = n;
    spec.k = k;
    spec.r0 = r0;
    spec.r1 = r1;
    spec.r2 = r2;
    spec.prior_law = JointPmf::with_constant_obs(input);
    spec.dec1_law = JointPmf::from_channel(input, ch.marginal(1), ch.ny1());
    spec.dec2_law = JointPmf::from_channel(input, ch.marginal(2), ch.ny2());

    if (sets_override) {
        spec.sets = *sets_override;
    } else {
        auto prior_prof =
            estimate_z_profile(spec.prior_law, n, samples, mix64(seed ^ 0xa1), "U|0", threads);
        auto out1 =
            estimate_z_profile(spec.dec1_law, n, samples, mix64(seed ^ 0xa2), "U|Y1", threads);
        auto out2 =
            estimate_z_profile(spec.dec2_law, n, samples, mix64(seed ^ 0xa3), "U|Y2", threads);
        spec.sets = build_polar_sets(prior_prof, {out1, out2}, policy);
    }

    PlanRequest req;
    req.scheme = SchemeKind::BcsiCommon;
    req.n = n;
    req.k = k;
    req.r0 = r0;
    req.r1 = r1;
    req.r2 = r2;
    req.sets = &spec.sets;
    spec.plan = plan_chain(req);
    return spec;
}

BcsiCommonFrame bcsi_common_encode(const BcsiCommonSpec& spec, const BcsiMessages& msgs,
                                   const SharedRandomness& sr) {
    const ChainPlan& plan = spec.plan;
    const int n = plan.n, k = plan.k;
    if (long(msgs.m0.size()) != plan.m0_bits || long(msgs.m1.size()) != plan.m1_bits ||
        long(msgs.m2.size()) != plan.m2_bits)
        throw std::invalid_argument("bcsi_common_encode: message length mismatch");

    BitBlock m10 = slice(msgs.m1, 0, plan.m10_bits);
    BitBlock m11 = slice(msgs.m1, plan.m10_bits, plan.m1_bits);
    BitBlock m0p = xor_bits(m10, msgs.m2);
    m0p.insert(m0p.end(), msgs.m0.begin(), msgs.m0.end());

    BitBlock common = padded_stream(m0p, plan.common_capacity, sr.fork("pad-common"));
    BitBlock priv = padded_stream(m11, plan.private_capacity, sr.fork("pad-private"));
    auto sr_l1 = sr.fork("layer1");

    std::vector<int> cobs(n, 0);
    BcsiCommonFrame frame;
    frame.u.resize(k);
    frame.x.resize(k);
    for (int b = 0; b < k; ++b) {
        auto slots = enc_slots_of(plan.layer1[b]);
        const auto& roles = plan.layer1[b];
        BlockEncoder enc(spec.prior_law, cobs, &slots, sr_l1, uint32_t(b));
        bool done = enc.advance([&](int i) -> std::optional<uint8_t> {
            switch (static_cast<SlotKind>(roles.kind[i])) {
                case SlotKind::Common: return common[roles.stream_pos[i]];
                case SlotKind::Private: return priv[roles.stream_pos[i]];
                default: return frame.u[b - 1][roles.chain_src[i]];
            }
        });
        if (!done) throw std::logic_error("bcsi_common_encode: stalled chain");
        frame.u[b] = enc.u();
        BitBlock x = polar_transform(frame.u[b]);
        frame.x[b].assign(x.begin(), x.end());
    }
    return frame;
}

BcsiDecodeOutput bcsi_common_decode(const BcsiCommonSpec& spec, int receiver,
                                    const std::vector<std::vector<int>>& y,
                                    const BitBlock& side_info, const SharedRandomness& sr) {
    const ChainPlan& plan = spec.plan;
    const int n = plan.n, k = plan.k;
    if (int(y.size()) != k) throw std::invalid_argument("bcsi_common_decode: block count mismatch");
    auto sr_l1 = sr.fork("layer1");
    std::vector<int> cobs(n, 0);

    auto in_i1 = mask(plan.i1, n);
    auto d2_rank = rank_map(plan.d2, n);

    BcsiDecodeOutput out;
    out.block_ok.assign(k, 1);
    std::vector<BitBlock> u_hat(k);

    if (receiver == 1) {
        if (long(side_info.size()) != plan.m2_bits)
            throw std::invalid_argument("receiver 1 side information must be M2");
        for (int b = k - 1; b >= 0; --b) {
            const auto& roles = plan.layer1[b];
            std::vector<DecSlot> slots(n, DecSlot::LambdaRecompute);
            for (int i = 0; i < n; ++i) {
                switch (static_cast<SlotKind>(roles.kind[i])) {
                    case SlotKind::Common:
                        slots[i] = in_i1[i] ? DecSlot::Map : DecSlot::Known;
                        break;
                    case SlotKind::Private:
                    case SlotKind::Chain:
                        slots[i] = DecSlot::Map;
                        break;
                    case SlotKind::Lambda:
                        slots[i] = DecSlot::LambdaRecompute;
                        break;
                    default:
                        slots[i] = DecSlot::Gamma;
                        break;
                }
            }
            auto res = decode_block(
                spec.dec1_law, y[b], slots,
                [&](int i) { return u_hat[b + 1][plan.d10[d2_rank[i]]]; }, &spec.prior_law,
                &cobs, sr_l1, uint32_t(b));
            u_hat[b] = std::move(res.u);
            if (!res.ok) {
                out.ok = false;
                out.block_ok[b] = 0;
            }
        }
    } else {
        if (long(side_info.size()) != plan.m1_bits)
            throw std::invalid_argument("receiver 2 side information must be M1");
        BitBlock m11_side = slice(side_info, plan.m10_bits, plan.m1_bits);
        BitBlock priv_side = padded_stream(m11_side, plan.private_capacity, sr.fork("pad-private"));
        for (int b = 0; b < k; ++b) {
            const auto& roles = plan.layer1[b];
            std::vector<DecSlot> slots(n, DecSlot::LambdaRecompute);
            for (int i = 0; i < n; ++i) {
                switch (static_cast<SlotKind>(roles.kind[i])) {
                    case SlotKind::Common: slots[i] = DecSlot::Map; break;
                    case SlotKind::Private:
                    case SlotKind::Chain: slots[i] = DecSlot::Known; break;
                    case SlotKind::Lambda: slots[i] = DecSlot::LambdaRecompute; break;
                    default: slots[i] = DecSlot::Gamma; break;
                }
            }
            auto res = decode_block(
                spec.dec2_law, y[b], slots,
                [&](int i) {
                    if (roles.kind[i] == uint8_t(SlotKind::Private))
                        return priv_side[roles.stream_pos[i]];
                    return u_hat[b - 1][roles.chain_src[i]];
                },
                &spec.prior_law, &cobs, sr_l1, uint32_t(b));
            u_hat[b] = std::move(res.u);
            if (!res.ok) {
                out.ok = false;
                out.block_ok[b] = 0;
            }
        }
    }

    // common stream, then the message algebra
    BitBlock m0p(plan.m0p_bits, 0);
    BitBlock m11(plan.m11_bits, 0);
    for (int b = 0; b < k; ++b) {
        const auto& roles = plan.layer1[b];
        for (int i = 0; i < n; ++i) {
            if (roles.kind[i] == uint8_t(SlotKind::Common) && roles.stream_pos[i] < plan.m0p_bits)
                m0p[roles.stream_pos[i]] = u_hat[b][i];
            if (roles.kind[i] == uint8_t(SlotKind::Private) && roles.stream_pos[i] < plan.m11_bits)
                m11[roles.stream_pos[i]] = u_hat[b][i];
        }
    }
    out.m0 = slice(m0p, plan.m2_bits, plan.m0p_bits);
    BitBlock xorpart = slice(m0p, 0, plan.m2_bits);
    if (receiver == 1) {
        out.mprivate = xor_bits(xorpart, side_info);  // M10 = (M10^M2)^M2
        out.mprivate.insert(out.mprivate.end(), m11.begin(), m11.end());
    } else {
        BitBlock m10_side = slice(side_info, 0, plan.m10_bits);
        out.mprivate = xor_bits(xorpart, m10_side);  // M2
    }
    out.u_hat = std::move(u_hat);
    return out;
}

// ---- noncausal state -----------------------------------------------------

BcsiStateSpec build_bcsi_state_spec(const StateChannel& ch, const AuxStrategy& st, int n, int k,
                                    double r0, double r1, double r2, double layer2_rate,
                                    int samples, const SetPolicy& policy, uint64_t seed,
                                    int threads, const PolarSets* sets_override,
                                    const PolarSets* sets2_override) {
    if (ch.nx() != 2) throw std::invalid_argument("bcsi-state codec requires binary input");
    if (st.v1_size != 2 || st.v2_size != 2)
        throw std::invalid_argument("bcsi-state codec requires binary V1, V2");
    st.validate(ch);

    BcsiStateSpec spec;
    spec.channel = ch;
    spec.strategy = st;
    spec.n = n;
    spec.k = k;
    spec.r0 = r0;
    spec.r1 = r1;
    spec.r2 = r2;
    spec.layer2_rate = layer2_rate;
    spec.l1_enc = law_v1_state(ch, st);
    spec.l1_dec1 = law_v1_output(ch, st, 1);
    spec.l1_dec2 = law_v1_output(ch, st, 2);
    spec.l2_enc = law_v2_state(ch, st);
    spec.l2_dec1 = law_v2_output(ch, st);
    spec.region = region_bcsi_state(ch, st);
    if (spec.region.c4_gap < -1e-9 || spec.region.c5_gap < -1e-9)
        throw InfeasibleError("bcsi-state: layer-1 strategy violates the strict rate conditions");

    if (sets_override) {
        spec.sets = *sets_override;
    } else {
        auto sp = estimate_z_profile(spec.l1_enc, n, samples, mix64(seed ^ 0xb1), "U1|S", threads);
        auto o1 = estimate_z_profile(spec.l1_dec1, n, samples, mix64(seed ^ 0xb2), "U1|Y1", threads);
        auto o2 = estimate_z_profile(spec.l1_dec2, n, samples, mix64(seed ^ 0xb3), "U1|Y2", threads);
        spec.sets = build_polar_sets(sp, {o1, o2}, policy);
    }
    if (sets2_override) {
        spec.sets2 = *sets2_override;
    } else {
        auto sp2 = estimate_z_profile(spec.l2_enc, n, samples, mix64(seed ^ 0xb4), "U2|S,U1", threads);
        auto o21 = estimate_z_profile(spec.l2_dec1, n, samples, mix64(seed ^ 0xb5), "U2|Y1,U1", threads);
        spec.sets2 = build_polar_sets(sp2, {o21}, policy);
    }

    PlanRequest req;
    req.scheme = SchemeKind::BcsiState;
    req.n = n;
    req.k = k;
    req.r0 = r0;
    req.r1 = r1;
    req.r2 = r2;
    req.layer2_rate = layer2_rate;
    req.sets = &spec.sets;
    req.layer2 = &spec.sets2.rx[0];

    auto build_pre = [&](int receiver, CausalStrategy& pre, PolarSets& pre_sets,
                         JointPmf& prior, JointPmf& dec, std::vector<int>& ranked,
                         uint64_t salt) {
        pre = causal_capacity(ch, receiver, 2);
        GpStrategy pre_st;
        pre_st.v_size = 2;
        pre_st.pv_given_s.resize(size_t(ch.ns()) * 2);
        for (int s = 0; s < ch.ns(); ++s)
            for (int v = 0; v < 2; ++v) pre_st.pv_given_s[size_t(s) * 2 + v] = pre.pv[v];
        pre_st.f = pre.f;
        prior = law_causal_prior(pre_st, pre.pv);
        dec = law_causal_output(ch, pre_st, pre.pv, receiver);
        auto ps = estimate_z_profile(prior, n, samples, mix64(seed ^ salt), "U'|0", threads);
        auto po = estimate_z_profile(dec, n, samples, mix64(seed ^ (salt + 1)),
                                     receiver == 1 ? "U'|Y1" : "U'|Y2", threads);
        pre_sets = build_polar_sets(ps, {po}, policy);
        ranked = pre_sets.rx[0].info_ranked;
    };
    spec.pre1_prior = JointPmf::with_constant_obs(Pmf::bernoulli(0.5));
    spec.pre1_dec = spec.pre1_prior;
    spec.pre2_prior = spec.pre1_prior;
    spec.pre2_dec = spec.pre1_prior;
    if (!spec.sets.rx[0].f_relay.empty() || !spec.sets2.rx[0].f_relay.empty())
        build_pre(1, spec.pre1, spec.pre1_sets, spec.pre1_prior, spec.pre1_dec,
                  req.pre1_info_ranked, 0xc1);
    if (!spec.sets.rx[1].f_relay.empty())
        build_pre(2, spec.pre2, spec.pre2_sets, spec.pre2_prior, spec.pre2_dec,
                  req.pre2_info_ranked, 0xd1);

    spec.plan = plan_chain(req);
    if (spec.plan.m11_bits > 0 && spec.region.c3_gap < -1e-9)
        throw InfeasibleError("bcsi-state: layer-2 strategy violates its strict rate condition");
    return spec;
}

BcsiStateFrame bcsi_state_encode(const BcsiStateSpec& spec, const BcsiMessages& msgs,
                                 const std::vector<std::vector<int>>& states,
                                 const SharedRandomness& sr) {
    const ChainPlan& plan = spec.plan;
    const int n = plan.n, k = plan.k, t = plan.t, ns = spec.channel.ns();
    if (long(msgs.m0.size()) != plan.m0_bits || long(msgs.m1.size()) != plan.m1_bits ||
        long(msgs.m2.size()) != plan.m2_bits)
        throw std::invalid_argument("bcsi_state_encode: message length mismatch");
    if (int(states.size()) != k + 2 * t)
        throw std::invalid_argument("bcsi_state_encode: need one state block per transmitted block");

    BitBlock m100 = slice(msgs.m1, 0, plan.m2_bits);
    BitBlock m101 = slice(msgs.m1, plan.m2_bits, plan.m10_bits);
    BitBlock m11 = slice(msgs.m1, plan.m10_bits, plan.m1_bits);
    BitBlock m0p = xor_bits(m100, msgs.m2);
    m0p.insert(m0p.end(), msgs.m0.begin(), msgs.m0.end());

    BitBlock common = padded_stream(m0p, plan.common_capacity, sr.fork("pad-common"));
    BitBlock priv = padded_stream(m101, plan.private_capacity, sr.fork("pad-private"));
    BitBlock l2s = padded_stream(m11, plan.layer2_capacity, sr.fork("pad-layer2"));
    auto sr_l1 = sr.fork("layer1");
    auto sr_l2 = sr.fork("layer2");
    auto sr_p1 = sr.fork("pre1");
    auto sr_p2 = sr.fork("pre2");
    auto xor_rank = rank_map(plan.xor_slots, n);

    BcsiStateFrame frame;
    frame.x.assign(k + 2 * t, {});
    frame.u1.resize(k);
    frame.u2.resize(k);

    // layer 1: blocks form a dataflow through the two opposite chains;
    // encode them as a round-robin of single-bit steps with suspension
    std::vector<std::vector<EncSlot>> slotvecs(k);
    std::vector<std::unique_ptr<BlockEncoder>> encs(k);
    for (int b = 0; b < k; ++b) {
        slotvecs[b] = enc_slots_of(plan.layer1[b]);
        encs[b] = std::make_unique<BlockEncoder>(spec.l1_enc, states[t + b], &slotvecs[b], sr_l1,
                                                 uint32_t(t + b));
    }
    int done = 0;
    while (done < k) {
        bool progress = false;
        for (int b = 0; b < k; ++b) {
            if (encs[b]->done()) continue;
            const auto& roles = plan.layer1[b];
            int before = encs[b]->position();
            bool fin = encs[b]->advance([&](int i) -> std::optional<uint8_t> {
                switch (static_cast<SlotKind>(roles.kind[i])) {
                    case SlotKind::Common: return common[roles.stream_pos[i]];
                    case SlotKind::Private: return priv[roles.stream_pos[i]];
                    case SlotKind::Chain: {
                        int sb = b + roles.chain_delta[i];
                        if (encs[sb]->position() <= roles.chain_src[i]) return std::nullopt;
                        return encs[sb]->u()[roles.chain_src[i]];
                    }
                    case SlotKind::Xor: {
                        if (encs[b + 1]->position() <= roles.chain_src[i]) return std::nullopt;
                        uint8_t w2 = encs[b + 1]->u()[roles.chain_src[i]];
                        uint8_t w1 = roles.stream_pos[i] >= 0
                                         ? priv[roles.stream_pos[i]]
                                         : w1_gamma(sr_l1, plan, xor_rank[i]);
                        return uint8_t(w1 ^ w2);
                    }
                    default: return std::nullopt;
                }
            });
            if (fin) ++done;
            if (encs[b]->position() != before) progress = true;
        }
        if (!progress)
            throw InfeasibleError("bcsi_state_encode: chain dependency deadlock between blocks");
    }
    for (int b = 0; b < k; ++b) frame.u1[b] = encs[b]->u();

    // layer 2 rides on the finished layer-1 sequence, single forward chain
    for (int b = 0; b < k; ++b) {
        BitBlock v1 = polar_transform(frame.u1[b]);
        std::vector<int> obs2(n);
        for (int i = 0; i < n; ++i) obs2[i] = fuse_v1s(v1[i], states[t + b][i], ns);
        auto slots = enc_slots_of(plan.layer2[b]);
        const auto& roles = plan.layer2[b];
        BlockEncoder enc(spec.l2_enc, obs2, &slots, sr_l2, uint32_t(t + b));
        bool fin = enc.advance([&](int i) -> std::optional<uint8_t> {
            if (roles.kind[i] == uint8_t(SlotKind::Private)) return l2s[roles.stream_pos[i]];
            return frame.u2[b - 1][roles.chain_src[i]];
        });
        if (!fin) throw std::logic_error("bcsi_state_encode: layer-2 stall");
        frame.u2[b] = enc.u();
        BitBlock v2 = polar_transform(frame.u2[b]);
        frame.x[t + b].resize(n);
        for (int i = 0; i < n; ++i)
            frame.x[t + b][i] =
                spec.strategy.f[(size_t(v1[i]) * 2 + v2[i]) * ns + states[t + b][i]];
    }

    // pre-phases: receiver 2's relay bits of the first payload block ride
    // ahead of it; receiver 1's (plus layer 2's) ride behind the last
    auto causal_blocks = [&](const BitBlock& payload, const std::vector<int>& slots_ranked,
                             int per_block, const JointPmf& prior, const CausalStrategy& strat,
                             const SharedRandomness& srp, int first_block,
                             std::vector<BitBlock>& u_out) {
        int blocks = t;
        u_out.resize(blocks);
        for (int pb = 0; pb < blocks; ++pb) {
            long lo = long(pb) * per_block;
            long hi = std::min<long>(long(payload.size()), lo + per_block);
            std::vector<EncSlot> slots(n, EncSlot::Lambda);
            for (long a = lo; a < hi; ++a) slots[slots_ranked[a - lo]] = EncSlot::External;
            std::vector<int> cobs(n, 0);
            BlockEncoder enc(prior, cobs, &slots, srp, uint32_t(first_block + pb));
            bool fin = enc.advance([&](int i) -> std::optional<uint8_t> {
                long a = lo + (std::lower_bound(slots_ranked.begin(),
                                                slots_ranked.begin() + (hi - lo), i) -
                               slots_ranked.begin());
                return payload[a];
            });
            if (!fin) throw std::logic_error("bcsi_state_encode: pre-phase stall");
            u_out[pb] = enc.u();
            BitBlock v = polar_transform(u_out[pb]);
            int g = first_block + pb;
            frame.x[g].resize(n);
            for (int i = 0; i < n; ++i)
                frame.x[g][i] = strat.f[size_t(v[i]) * ns + states[g][i]];
        }
    };
    if (t > 0) {
        BitBlock pay2;
        for (int i : plan.f2r) pay2.push_back(frame.u1[0][i]);
        causal_blocks(pay2, plan.pre2_slots, plan.pre2_per_block, spec.pre2_prior, spec.pre2,
                      sr_p2, 0, frame.u_pre2);
        BitBlock pay1;
        for (int i : plan.f1r) pay1.push_back(frame.u1[k - 1][i]);
        for (int i : plan.f11r) pay1.push_back(frame.u2[k - 1][i]);
        causal_blocks(pay1, plan.pre1_slots, plan.pre1_per_block, spec.pre1_prior, spec.pre1,
                      sr_p1, t + k, frame.u_pre1);
    }
    return frame;
}

BcsiDecodeOutput bcsi_state_decode(const BcsiStateSpec& spec, int receiver,
                                   const std::vector<std::vector<int>>& y,
                                   const BitBlock& side_info, const SharedRandomness& sr) {
    const ChainPlan& plan = spec.plan;
    const int n = plan.n, k = plan.k, t = plan.t;
    const long w = plan.overlap;
    if (int(y.size()) != k + 2 * t)
        throw std::invalid_argument("bcsi_state_decode: block count mismatch");
    auto sr_l1 = sr.fork("layer1");
    auto sr_l2 = sr.fork("layer2");
    auto sr_p1 = sr.fork("pre1");
    auto sr_p2 = sr.fork("pre2");
    std::vector<int> cobs(n, 0);

    BcsiDecodeOutput out;
    out.block_ok.assign(k + 2 * t, 1);

    auto decode_pre = [&](BitBlock& payload, const std::vector<int>& slots_ranked, int per_block,
                          const JointPmf& dec, const JointPmf& prior,
                          const SharedRandomness& srp, int first_block) {
        for (int pb = 0; pb < t; ++pb) {
            long lo = long(pb) * per_block;
            long hi = std::min<long>(long(payload.size()), lo + per_block);
            std::vector<DecSlot> slots(n, DecSlot::LambdaRecompute);
            for (long a = lo; a < hi; ++a) slots[slots_ranked[a - lo]] = DecSlot::Map;
            auto res = decode_block(dec, y[first_block + pb], slots, nullptr, &prior, &cobs, srp,
                                    uint32_t(first_block + pb));
            if (!res.ok) {
                out.ok = false;
                out.block_ok[first_block + pb] = 0;
                continue;
            }
            for (long a = lo; a < hi; ++a) payload[a] = res.u[slots_ranked[a - lo]];
        }
    };

    auto f1r_rank = rank_map(plan.f1r, n);
    auto f2r_rank = rank_map(plan.f2r, n);
    auto f11r_rank = rank_map(plan.f11r, n);
    auto r2_rank = rank_map(plan.r2, n);
    auto d2_rank = rank_map(plan.d2, n);
    auto in_i1 = mask(plan.i1, n);

    std::vector<BitBlock> u1_hat(k), u2_hat(k);

    if (receiver == 2) {
        if (long(side_info.size()) != plan.m1_bits)
            throw std::invalid_argument("receiver 2 side information must be M1");
        BitBlock m101_side = slice(side_info, plan.m2_bits, plan.m10_bits);
        BitBlock priv_side = padded_stream(m101_side, plan.private_capacity, sr.fork("pad-private"));

        BitBlock relay2(plan.f2r.size(), 0);
        decode_pre(relay2, plan.pre2_slots, plan.pre2_per_block, spec.pre2_dec, spec.pre2_prior,
                   sr_p2, 0);

        for (int b = 0; b < k; ++b) {
            const auto& roles = plan.layer1[b];
            std::vector<DecSlot> slots(n, DecSlot::Gamma);
            for (int i = 0; i < n; ++i) {
                switch (static_cast<SlotKind>(roles.kind[i])) {
                    case SlotKind::Common:
                    case SlotKind::Xor:
                        slots[i] = DecSlot::Map;
                        break;
                    case SlotKind::Private:
                        slots[i] = DecSlot::Known;
                        break;
                    case SlotKind::Chain:
                        slots[i] = roles.chain_delta[i] < 0 ? DecSlot::Known : DecSlot::Map;
                        break;
                    case SlotKind::Lambda:
                        slots[i] = f2r_rank[i] < 0 ? DecSlot::Map : DecSlot::Known;
                        break;
                    default:
                        slots[i] = DecSlot::Gamma;
                        break;
                }
            }
            auto res = decode_block(
                spec.l1_dec2, y[t + b], slots,
                [&](int i) -> uint8_t {
                    if (roles.kind[i] == uint8_t(SlotKind::Private))
                        return priv_side[roles.stream_pos[i]];
                    if (roles.kind[i] == uint8_t(SlotKind::Chain))
                        return u1_hat[b - 1][roles.chain_src[i]];
                    return relay2[f2r_rank[i]];  // relay-frozen bits of this block
                },
                nullptr, nullptr, sr_l1, uint32_t(t + b));
            u1_hat[b] = std::move(res.u);
            if (!res.ok) {
                out.ok = false;
                out.block_ok[t + b] = 0;
            }
            if (b + 1 < k) {
                // assemble the next block's relay bits: XOR head, direct tail
                const auto& cur = plan.layer1[b];
                for (long a = 0; a < long(plan.f2r.size()); ++a) {
                    if (a < w) {
                        int slot = plan.xor_slots[a];
                        uint8_t w1 = cur.stream_pos[slot] >= 0
                                         ? priv_side[cur.stream_pos[slot]]
                                         : w1_gamma(sr_l1, plan, a);
                        relay2[a] = u1_hat[b][slot] ^ w1;
                    } else {
                        relay2[a] = u1_hat[b][plan.r2[a - w]];
                    }
                }
            }
        }
        // receiver 2 never needs layer 2
        BitBlock m0p(plan.m0p_bits, 0);
        for (int b = 0; b < k; ++b) {
            const auto& roles = plan.layer1[b];
            for (int i = 0; i < n; ++i)
                if (roles.kind[i] == uint8_t(SlotKind::Common) &&
                    roles.stream_pos[i] < plan.m0p_bits)
                    m0p[roles.stream_pos[i]] = u1_hat[b][i];
        }
        out.m0 = slice(m0p, plan.m2_bits, plan.m0p_bits);
        out.mprivate = xor_bits(slice(m0p, 0, plan.m2_bits), slice(side_info, 0, plan.m2_bits));
        out.u_hat = std::move(u1_hat);
        return out;
    }

    // receiver 1
    if (long(side_info.size()) != plan.m2_bits)
        throw std::invalid_argument("receiver 1 side information must be M2");
    BitBlock relay1(plan.f1r.size() + plan.f11r.size(), 0);
    decode_pre(relay1, plan.pre1_slots, plan.pre1_per_block, spec.pre1_dec, spec.pre1_prior,
               sr_p1, t + k);
    BitBlock relay11 = slice(relay1, plan.f1r.size(), relay1.size());
    relay1.resize(plan.f1r.size());

    const int ny1 = spec.channel.ny1();
    for (int b = k - 1; b >= 0; --b) {
        const auto& roles = plan.layer1[b];
        std::vector<DecSlot> slots(n, DecSlot::Gamma);
        for (int i = 0; i < n; ++i) {
            switch (static_cast<SlotKind>(roles.kind[i])) {
                case SlotKind::Common:
                    slots[i] = in_i1[i] ? DecSlot::Map : DecSlot::Known;
                    break;
                case SlotKind::Xor:
                case SlotKind::Private:
                    slots[i] = DecSlot::Map;
                    break;
                case SlotKind::Chain:
                    slots[i] = roles.chain_delta[i] < 0 ? DecSlot::Map : DecSlot::Known;
                    break;
                case SlotKind::Lambda:
                    slots[i] = f1r_rank[i] < 0 ? DecSlot::Map : DecSlot::Known;
                    break;
                default:
                    slots[i] = DecSlot::Gamma;
                    break;
            }
        }
        auto res = decode_block(
            spec.l1_dec1, y[t + b], slots,
            [&](int i) -> uint8_t {
                switch (static_cast<SlotKind>(roles.kind[i])) {
                    case SlotKind::Common:  // D2 copies live in the next block's D10
                        return u1_hat[b + 1][plan.d10[d2_rank[i]]];
                    case SlotKind::Chain:   // R2 carries the next block's relay tail
                        return u1_hat[b + 1][plan.f2r[w + r2_rank[i]]];
                    default:                // relay-frozen bits of this block
                        return b == k - 1 ? relay1[f1r_rank[i]]
                                          : u1_hat[b + 1][plan.r1[f1r_rank[i]]];
                }
            },
            nullptr, nullptr, sr_l1, uint32_t(t + b));
        u1_hat[b] = std::move(res.u);
        if (!res.ok) {
            out.ok = false;
            out.block_ok[t + b] = 0;
        }

        // layer 2 of the same block, conditioned on the recovered layer 1
        BitBlock v1 = polar_transform(u1_hat[b]);
        std::vector<int> obs2(n);
        for (int i = 0; i < n; ++i) obs2[i] = fuse_v1y(v1[i], y[t + b][i], ny1);
        const auto& roles2 = plan.layer2[b];
        std::vector<DecSlot> slots2(n, DecSlot::Gamma);
        for (int i = 0; i < n; ++i) {
            switch (static_cast<SlotKind>(roles2.kind[i])) {
                case SlotKind::Private:
                case SlotKind::Chain:
                    slots2[i] = DecSlot::Map;
                    break;
                case SlotKind::Lambda:
                    slots2[i] = f11r_rank[i] < 0 ? DecSlot::Map : DecSlot::Known;
                    break;
                default:
                    slots2[i] = DecSlot::Gamma;
                    break;
            }
        }
        auto res2 = decode_block(
            spec.l2_dec1, obs2, slots2,
            [&](int i) -> uint8_t {
                return b == k - 1 ? relay11[f11r_rank[i]] : u2_hat[b + 1][plan.r11[f11r_rank[i]]];
            },
            nullptr, nullptr, sr_l2, uint32_t(t + b));
        u2_hat[b] = std::move(res2.u);
        if (!res2.ok) {
            out.ok = false;
            out.block_ok[t + b] = 0;
        }
    }

    BitBlock m0p(plan.m0p_bits, 0);
    BitBlock m101(plan.m101_bits, 0);
    BitBlock m11(plan.m11_bits, 0);
    for (int b = 0; b < k; ++b) {
        const auto& roles = plan.layer1[b];
        for (int i = 0; i < n; ++i) {
            if (roles.kind[i] == uint8_t(SlotKind::Common) && roles.stream_pos[i] < plan.m0p_bits)
                m0p[roles.stream_pos[i]] = u1_hat[b][i];
            if (roles.kind[i] == uint8_t(SlotKind::Private) && roles.stream_pos[i] < plan.m101_bits)
                m101[roles.stream_pos[i]] = u1_hat[b][i];
        }
        const auto& roles2 = plan.layer2[b];
        for (int i = 0; i < n; ++i)
            if (roles2.kind[i] == uint8_t(SlotKind::Private) &&
                roles2.stream_pos[i] < plan.m11_bits)
                m11[roles2.stream_pos[i]] = u2_hat[b][i];
    }
    // XOR-borne private bits, recovered with the already-decoded relay head
    for (int b = 0; b + 1 < k; ++b) {
        const auto& roles = plan.layer1[b];
        for (long a = 0; a < w; ++a) {
            int slot = plan.xor_slots[a];
            if (roles.stream_pos[slot] >= 0 && roles.stream_pos[slot] < plan.m101_bits)
                m101[roles.stream_pos[slot]] = u1_hat[b][slot] ^ u1_hat[b + 1][plan.f2r[a]];
        }
    }
    out.m0 = slice(m0p, plan.m2_bits, plan.m0p_bits);
    out.mprivate = xor_bits(slice(m0p, 0, plan.m2_bits), side_info);  // M100
    out.mprivate.insert(out.mprivate.end(), m101.begin(), m101.end());
    out.mprivate.insert(out.mprivate.end(), m11.begin(), m11.end());
    out.u_hat = std::move(u1_hat);
    out.u2_hat = std::move(u2_hat);
    return out;
}

}  // namespace polargp
