#pragma once

#include "polargp/block_codec.hpp"
#include "polargp/construction.hpp"

namespace polargp::detail {

inline BitBlock padded_stream(const BitBlock& bits, long capacity, const SharedRandomness& pad) {
    BitBlock out(bits);
    out.reserve(capacity);
    for (long i = long(bits.size()); i < capacity; ++i)
        out.push_back(frozen_gamma(pad, uint32_t(i >> 16), uint32_t(i & 0xffff)));
    return out;
}

inline std::vector<EncSlot> enc_slots_of(const BlockRoles& roles) {
    std::vector<EncSlot> out(roles.kind.size());
    for (size_t i = 0; i < out.size(); ++i) {
        switch (static_cast<SlotKind>(roles.kind[i])) {
            case SlotKind::Lambda: out[i] = EncSlot::Lambda; break;
            case SlotKind::Gamma: out[i] = EncSlot::Gamma; break;
            default: out[i] = EncSlot::External; break;
        }
    }
    return out;
}

inline std::vector<int> rank_map(const std::vector<int>& set, int n) {
    std::vector<int> rank(n, -1);
    for (size_t a = 0; a < set.size(); ++a) rank[set[a]] = int(a);
    return rank;
}

inline std::vector<bool> mask(const std::vector<int>& set, int n) {
    std::vector<bool> m(n, false);
    for (int i : set) m[i] = true;
    return m;
}

}  // namespace polargp::detail
