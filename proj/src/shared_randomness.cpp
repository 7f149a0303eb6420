#include "polargp/shared_randomness.hpp"

#include <stdexcept>
#include <string>

#include "polargp/rng.hpp"

namespace polargp {

SharedRandomness SharedRandomness::from_hex(std::string_view hex, std::string_view label) {
    if (hex.size() > 64) throw std::invalid_argument("seed hex longer than 256 bits");
    SharedRandomness sr;
    // big-endian nibbles packed right-aligned into the 4 words
    std::string padded(64 - hex.size(), '0');
    padded.append(hex);
    for (int w = 0; w < 4; ++w) {
        uint64_t v = 0;
        for (int c = 0; c < 16; ++c) {
            char ch = padded[w * 16 + c];
            int nib;
            if (ch >= '0' && ch <= '9') nib = ch - '0';
            else if (ch >= 'a' && ch <= 'f') nib = ch - 'a' + 10;
            else if (ch >= 'A' && ch <= 'F') nib = ch - 'A' + 10;
            else throw std::invalid_argument("seed is not hex");
            v = (v << 4) | static_cast<uint64_t>(nib);
        }
        sr.seed[w] = v;
    }
    sr.stream = label.empty() ? 0 : hash_str64(std::string(label).c_str());
    return sr;
}

uint64_t SharedRandomness::key() const {
    uint64_t k = mix64(seed[0] ^ 0x706f6c6172677031ULL);
    k = mix64(k ^ seed[1]);
    k = mix64(k ^ seed[2]);
    k = mix64(k ^ seed[3]);
    return mix64(k ^ stream);
}

SharedRandomness SharedRandomness::fork(std::string_view label) const {
    SharedRandomness out = *this;
    out.stream = mix64(key() ^ hash_str64(std::string(label).c_str()));
    return out;
}

SharedRandomness SharedRandomness::fork(std::string_view label, uint64_t index) const {
    SharedRandomness out = *this;
    out.stream = mix64(mix64(key() ^ hash_str64(std::string(label).c_str())) + index);
    return out;
}

uint64_t SharedRandomness::u64(uint32_t block, uint32_t index) const {
    uint64_t x = mix64(key() ^ ((uint64_t(block) << 32) | uint64_t(index)));
    return mix64(x + 0x1d8af066a0f6d6a5ULL);
}

double SharedRandomness::u01(uint32_t block, uint32_t index) const {
    return static_cast<double>(u64(block, index) >> 11) * 0x1.0p-53;
}

uint8_t frozen_lambda(const SharedRandomness& sr, uint32_t j, uint32_t i,
                      const BitConditional& conditional) {
    return sr.u01(j, i) < conditional.p1 ? 1 : 0;
}

uint8_t frozen_gamma(const SharedRandomness& sr, uint32_t j, uint32_t i) {
    return sr.u01(j, i) < 0.5 ? 1 : 0;
}

}  // namespace polargp
