#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "polargp/sc_engine.hpp"

namespace polargp {

// Seed material shared verbatim by encoder and decoders. Every frozen-map
// bit is a pure function of (seed, stream label, block j, index i), so a
// decoder that reaches the same (j,i) with the same conditional reproduces
// the encoder's bit exactly; nothing per-prefix is ever stored.
struct SharedRandomness {
    std::array<uint64_t, 4> seed{};  // 256-bit master
    uint64_t stream = 0;             // derived label (scheme/trial/...)

    static SharedRandomness from_hex(std::string_view hex, std::string_view label = "");

    SharedRandomness fork(std::string_view label) const;
    SharedRandomness fork(std::string_view label, uint64_t index) const;

    uint64_t u64(uint32_t block, uint32_t index) const;
    double u01(uint32_t block, uint32_t index) const;  // [0,1), 53-bit

private:
    uint64_t key() const;
};

// Lambda map: 1 iff the label uniform falls below P(U^i = 1 | ...). The
// conditional must be the exact engine output for this (j,i) under the
// map's conditioning model.
uint8_t frozen_lambda(const SharedRandomness& sr, uint32_t j, uint32_t i,
                      const BitConditional& conditional);

// Gamma map: fair shared coin; identical to frozen_lambda at conditional
// one half, which the degenerate-scheme equivalences rely on.
uint8_t frozen_gamma(const SharedRandomness& sr, uint32_t j, uint32_t i);

}  // namespace polargp
