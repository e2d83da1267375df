#pragma once

// Internal little-endian primitives shared by the binary codecs.

#include <bit>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>

namespace rainsr::wire {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

inline void put_u32le(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {
        static_cast<unsigned char>(v & 0xff),
        static_cast<unsigned char>((v >> 8) & 0xff),
        static_cast<unsigned char>((v >> 16) & 0xff),
        static_cast<unsigned char>((v >> 24) & 0xff),
    };
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline uint32_t get_u32le(const unsigned char* b) {
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

inline void put_f32le(std::ostream& out, float v) {
    put_u32le(out, std::bit_cast<uint32_t>(v));
}

inline float f32_from_le(const unsigned char* b) {
    return std::bit_cast<float>(get_u32le(b));
}

} // namespace rainsr::wire
