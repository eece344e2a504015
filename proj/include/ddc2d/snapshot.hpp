#pragma once

#include <bit>
#include <cstring>
#include <fstream>

#include "ddc2d/core.hpp"

namespace ddc {

// Field snapshot format, fixed little-endian regardless of host:
//   magic "DDC1"
//   u32 nx, u32 nz, u32 field_count, f64 time
//   field_count row-major f64 fields in per-level order omega, T, S, psi
// One level stores 4 fields, a restart pair (earlier level first) 8.
// Row counts follow the layouts: omega/psi nz+1 rows, T/S nz rows.

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_f64(std::string& out, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    if constexpr (std::endian::native == std::endian::big)
        v = __builtin_bswap64(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline std::uint32_t get_u32(const char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}
inline double get_f64(const char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    if constexpr (std::endian::native == std::endian::big)
        v = __builtin_bswap64(v);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

inline void put_field(std::string& out, const Field& f) {
    for (double x : f.v) put_f64(out, x);
}

} // namespace detail

inline std::string encode_snapshot(const Grid& g, std::span<const State> levels) {
    if (levels.empty() || levels.size() > 2)
        throw std::invalid_argument("encode_snapshot: one or two levels");
    std::string out = "DDC1";
    detail::put_u32(out, static_cast<std::uint32_t>(g.nx));
    detail::put_u32(out, static_cast<std::uint32_t>(g.nz));
    detail::put_u32(out, static_cast<std::uint32_t>(4 * levels.size()));
    detail::put_f64(out, levels.back().time);
    for (const State& s : levels) {
        detail::put_field(out, s.omega);
        detail::put_field(out, s.temp);
        detail::put_field(out, s.salt);
        detail::put_field(out, s.psi);
    }
    return out;
}

struct Snapshot {
    int nx = 0, nz = 0;
    double time = 0.0;
    std::vector<State> levels; // times/indices unset; the caller knows its k
};

inline Snapshot decode_snapshot(const std::string& bytes) {
    if (bytes.size() < 24 || bytes.compare(0, 4, "DDC1") != 0)
        throw FormatError("snapshot: bad magic");
    Snapshot snap;
    snap.nx = static_cast<int>(detail::get_u32(bytes.data() + 4));
    snap.nz = static_cast<int>(detail::get_u32(bytes.data() + 8));
    const std::uint32_t nfields = detail::get_u32(bytes.data() + 12);
    snap.time = detail::get_f64(bytes.data() + 16);
    if (snap.nx < 2 || snap.nz < 2 || (nfields != 4 && nfields != 8))
        throw FormatError("snapshot: bad header");
    const std::size_t node = static_cast<std::size_t>(snap.nx) * (snap.nz + 1);
    const std::size_t cent = static_cast<std::size_t>(snap.nx) * snap.nz;
    const std::size_t per_level = 2 * node + 2 * cent;
    const std::size_t expect = 24 + 8 * per_level * (nfields / 4);
    if (bytes.size() != expect)
        throw FormatError("snapshot: truncated or oversized payload");

    const char* p = bytes.data() + 24;
    auto take = [&](Field& f) {
        for (double& x : f.v) {
            x = detail::get_f64(p);
            p += 8;
        }
    };
    const Grid g(snap.nx, snap.nz, 1.0); // xi only matters for quadrature, not layout
    for (std::uint32_t lev = 0; lev < nfields / 4; ++lev) {
        State s = State::zeros(g);
        take(s.omega);
        take(s.temp);
        take(s.salt);
        take(s.psi);
        snap.levels.push_back(std::move(s));
    }
    return snap;
}

inline void write_snapshot(const std::string& path, const Grid& g, std::span<const State> levels) {
    const std::string bytes = encode_snapshot(g, levels);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw FormatError("snapshot: cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw FormatError("snapshot: write failed for '" + path + "'");
}

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError("snapshot: cannot open '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_snapshot(bytes);
}

} // namespace ddc
