#ifndef QPATCH_BINIO_HPP
#define QPATCH_BINIO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "qpatch/errors.hpp"

namespace qpatch::binio {

// Byte-explicit fixed-width IO. File formats here are pinned little-endian
// (IDX headers are the big-endian exception), independent of host order.

inline void put_u16(std::ostream& out, std::uint16_t v) {
    const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    out.write(bytes, 2);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(bytes, 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}

inline void put_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

inline void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

inline void need(std::istream& in, const std::string& what) {
    if (!in) throw FormatError("truncated input while reading " + what);
}

inline std::uint16_t get_u16(std::istream& in, const std::string& what) {
    unsigned char bytes[2];
    in.read(reinterpret_cast<char*>(bytes), 2);
    need(in, what);
    return static_cast<std::uint16_t>(bytes[0] | (bytes[1] << 8));
}

inline std::uint32_t get_u32(std::istream& in, const std::string& what) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    need(in, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

inline std::uint64_t get_u64(std::istream& in, const std::string& what) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    need(in, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

inline float get_f32(std::istream& in, const std::string& what) {
    const std::uint32_t bits = get_u32(in, what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

inline double get_f64(std::istream& in, const std::string& what) {
    const std::uint64_t bits = get_u64(in, what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

inline std::uint32_t get_be_u32(std::istream& in, const std::string& what) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    need(in, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes[i];
    return v;
}

}  // namespace qpatch::binio

#endif  // QPATCH_BINIO_HPP
