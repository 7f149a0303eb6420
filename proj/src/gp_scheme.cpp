#include "polargp/gp_scheme.hpp"

#include <algorithm>
#include <stdexcept>

#include "scheme_common.hpp"

namespace polargp {

using detail::enc_slots_of;
using detail::padded_stream;
using detail::rank_map;

StateChannel p2p_channel(const std::vector<double>& w, int ny) {
    StateChannel ch;
    ch.x_alphabet = {0, 1};
    ch.s_alphabet = {0};
    ch.y1_alphabet.resize(ny);
    for (int y = 0; y < ny; ++y) ch.y1_alphabet[y] = y;
    ch.y2_alphabet = {0};
    ch.state = Pmf({1.0});
    if (w.size() != size_t(2) * ny) throw std::invalid_argument("p2p_channel: bad table");
    ch.trans.assign(size_t(2) * ny, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < ny; ++y) ch.trans[((size_t(x) * 1 + 0) * ny + y) * 1 + 0] = w[size_t(x) * ny + y];
    return ch;
}

GpStrategy p2p_strategy(int ns) {
    GpStrategy st;
    st.v_size = 2;
    st.pv_given_s.assign(size_t(ns) * 2, 0.5);
    st.f.resize(size_t(2) * ns);
    for (int v = 0; v < 2; ++v)
        for (int s = 0; s < ns; ++s) st.f[size_t(v) * ns + s] = v;
    return st;
}

GpCodeSpec build_gp_spec(const StateChannel& ch, const GpStrategy& st, int receiver, int n,
                         int k, double rate, int samples, const SetPolicy& policy,
                         uint64_t seed, int threads, SchemeKind kind,
                         const PolarSets* sets_override) {
    if (ch.nx() != 2) throw std::invalid_argument("gp codec requires a binary channel input");
    st.validate(ch);
    GpCodeSpec spec;
    spec.channel = ch;
    spec.strategy = st;
    spec.receiver = receiver;
    spec.n = n;
    spec.k = k;
    spec.rate = rate;
    spec.kind = kind;
    spec.enc_law = law_gp_state(ch, st);
    spec.dec_law = law_gp_output(ch, st, receiver);

    if (sets_override) {
        spec.sets = *sets_override;
    } else {
        auto state_prof =
            estimate_z_profile(spec.enc_law, n, samples, mix64(seed ^ 0x11), "U|S", threads);
        auto out_prof = estimate_z_profile(spec.dec_law, n, samples, mix64(seed ^ 0x22),
                                           receiver == 1 ? "U|Y1" : "U|Y2", threads);
        spec.sets = build_polar_sets(state_prof, {out_prof}, policy);
    }

    PlanRequest req;
    req.scheme = kind;
    req.n = n;
    req.k = k;
    req.r1 = rate;
    req.sets = &spec.sets;

    if (!spec.sets.rx[0].f_relay.empty()) {
        spec.pre = causal_capacity(ch, receiver, 2);
        GpStrategy pre_st;
        pre_st.v_size = 2;
        pre_st.pv_given_s.resize(size_t(ch.ns()) * 2);
        for (int s = 0; s < ch.ns(); ++s)
            for (int v = 0; v < 2; ++v) pre_st.pv_given_s[size_t(s) * 2 + v] = spec.pre.pv[v];
        pre_st.f = spec.pre.f;
        spec.pre_prior = law_causal_prior(pre_st, spec.pre.pv);
        spec.pre_dec = law_causal_output(ch, pre_st, spec.pre.pv, receiver);
        auto pre_state = estimate_z_profile(spec.pre_prior, n, samples, mix64(seed ^ 0x33),
                                            "U'|0", threads);
        auto pre_out = estimate_z_profile(spec.pre_dec, n, samples, mix64(seed ^ 0x44),
                                          receiver == 1 ? "U'|Y1" : "U'|Y2", threads);
        spec.pre_sets = build_polar_sets(pre_state, {pre_out}, policy);
        req.pre1_info_ranked = spec.pre_sets.rx[0].info_ranked;
    } else {
        spec.pre_prior = JointPmf::with_constant_obs(Pmf::bernoulli(0.5));
        spec.pre_dec = spec.pre_prior;
    }
    spec.plan = plan_chain(req);
    return spec;
}

GpFrame gp_encode(const GpCodeSpec& spec, const BitBlock& message,
                  const std::vector<std::vector<int>>& states, const SharedRandomness& sr) {
    const ChainPlan& plan = spec.plan;
    const int n = plan.n, k = plan.k, t = plan.t, ns = spec.channel.ns();
    if (long(message.size()) != plan.m1_bits)
        throw std::invalid_argument("gp_encode: message length mismatch");
    if (int(states.size()) != k + t)
        throw std::invalid_argument("gp_encode: need one state block per transmitted block");

    auto sr_l1 = sr.fork("layer1");
    auto sr_pre = sr.fork("pre1");
    BitBlock stream = padded_stream(message, plan.private_capacity, sr.fork("pad-private"));

    GpFrame frame;
    frame.u.resize(k);
    frame.x.resize(k + t);
    for (int b = 0; b < k; ++b) {
        auto slots = enc_slots_of(plan.layer1[b]);
        BlockEncoder enc(spec.enc_law, states[b], &slots, sr_l1, uint32_t(b));
        const auto& roles = plan.layer1[b];
        bool done = enc.advance([&](int i) -> std::optional<uint8_t> {
            if (roles.kind[i] == uint8_t(SlotKind::Private)) return stream[roles.stream_pos[i]];
            // forward chain: the source block is already complete
            return frame.u[b - 1][roles.chain_src[i]];
        });
        if (!done) throw std::logic_error("gp_encode: stalled on a forward chain");
        frame.u[b] = enc.u();
        BitBlock v = polar_transform(frame.u[b]);
        frame.x[b].resize(n);
        for (int i = 0; i < n; ++i)
            frame.x[b][i] = spec.strategy.f[size_t(v[i]) * ns + states[b][i]];
    }

    if (t > 0) {
        BitBlock payload;
        for (int i : plan.f1r) payload.push_back(frame.u[k - 1][i]);
        frame.u_pre.resize(t);
        for (int pb = 0; pb < t; ++pb) {
            long lo = long(pb) * plan.pre1_per_block;
            long hi = std::min<long>(payload.size(), lo + plan.pre1_per_block);
            std::vector<EncSlot> slots(n, EncSlot::Lambda);
            for (long a = lo; a < hi; ++a) slots[plan.pre1_slots[a - lo]] = EncSlot::External;
            std::vector<int> cobs(n, 0);
            BlockEncoder enc(spec.pre_prior, cobs, &slots, sr_pre, uint32_t(k + pb));
            bool done = enc.advance([&](int i) -> std::optional<uint8_t> {
                long a = lo + (std::lower_bound(plan.pre1_slots.begin(),
                                                plan.pre1_slots.begin() + (hi - lo), i) -
                               plan.pre1_slots.begin());
                return payload[a];
            });
            if (!done) throw std::logic_error("gp_encode: pre-phase stall");
            frame.u_pre[pb] = enc.u();
            BitBlock v = polar_transform(frame.u_pre[pb]);
            frame.x[k + pb].resize(n);
            for (int i = 0; i < n; ++i)
                frame.x[k + pb][i] = spec.pre.f[size_t(v[i]) * ns + states[k + pb][i]];
        }
    }
    return frame;
}

GpDecodeOutput gp_decode(const GpCodeSpec& spec, const std::vector<std::vector<int>>& y,
                         const SharedRandomness& sr, const BitBlock* genie_relay) {
    const ChainPlan& plan = spec.plan;
    const int n = plan.n, k = plan.k, t = plan.t;
    if (int(y.size()) != k + t) throw std::invalid_argument("gp_decode: block count mismatch");
    auto sr_l1 = sr.fork("layer1");
    auto sr_pre = sr.fork("pre1");

    GpDecodeOutput out;
    out.block_ok.assign(k + t, 1);

    // relay bits of the last payload block come from the pre-phase
    BitBlock relay(plan.f1r.size(), 0);
    if (genie_relay) {
        relay = *genie_relay;
    } else {
        for (int pb = 0; pb < t; ++pb) {
            long lo = long(pb) * plan.pre1_per_block;
            long hi = std::min<long>(long(relay.size()), lo + plan.pre1_per_block);
            std::vector<DecSlot> slots(n, DecSlot::LambdaRecompute);
            for (long a = lo; a < hi; ++a) slots[plan.pre1_slots[a - lo]] = DecSlot::Map;
            std::vector<int> cobs(n, 0);
            auto res = decode_block(spec.pre_dec, y[k + pb], slots, nullptr, &spec.pre_prior,
                                    &cobs, sr_pre, uint32_t(k + pb));
            if (!res.ok) {
                out.ok = false;
                out.block_ok[k + pb] = 0;
                continue;
            }
            for (long a = lo; a < hi; ++a) relay[a] = res.u[plan.pre1_slots[a - lo]];
        }
    }

    auto f1r_rank = rank_map(plan.f1r, n);

    std::vector<BitBlock> u_hat(k);
    for (int b = k - 1; b >= 0; --b) {
        const auto& roles = plan.layer1[b];
        std::vector<DecSlot> slots(n, DecSlot::Gamma);
        for (int i = 0; i < n; ++i) {
            switch (static_cast<SlotKind>(roles.kind[i])) {
                case SlotKind::Private:
                case SlotKind::Chain:
                    slots[i] = DecSlot::Map;
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
            spec.dec_law, y[b], slots,
            [&](int i) {
                int a = f1r_rank[i];
                return b == k - 1 ? relay[a] : u_hat[b + 1][plan.r1[a]];
            },
            nullptr, nullptr, sr_l1, uint32_t(b));
        u_hat[b] = std::move(res.u);
        if (!res.ok) {
            out.ok = false;
            out.block_ok[b] = 0;
        }
    }

    out.message.assign(plan.m1_bits, 0);
    for (int b = 0; b < k; ++b) {
        const auto& roles = plan.layer1[b];
        for (int i = 0; i < n; ++i)
            if (roles.kind[i] == uint8_t(SlotKind::Private) && roles.stream_pos[i] < plan.m1_bits)
                out.message[roles.stream_pos[i]] = u_hat[b][i];
    }
    return out;
}

}  // namespace polargp
