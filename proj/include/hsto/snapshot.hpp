#pragma once

#include <filesystem>
#include <iosfwd>

#include "hsto/grid.hpp"

namespace hsto {

/// Binary snapshot: "HSTO", u32 version, u32 N1 N2 Nz, u32 field count, then per
/// field a 16-byte NUL-padded name and N1*N2*Nz little-endian f64 values (i fastest).
/// Grid lengths and time follow the header as three f64 and one f64.
inline constexpr std::uint32_t snapshot_version = 1;

void write_snapshot(std::ostream& out, const State& U);
void write_snapshot(const std::filesystem::path& path, const State& U);

/// Throws io_error on a malformed or truncated file.
State read_snapshot(std::istream& in);
State read_snapshot(const std::filesystem::path& path);

} // namespace hsto
