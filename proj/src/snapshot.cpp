#include "hsto/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "hsto/error.hpp"

namespace hsto {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error(ErrorKind::io_error, "truncated snapshot");
    return v;
}

} // namespace

void write_snapshot(std::ostream& out, const State& U) {
    const Grid& g = U.grid();
    out.write("HSTO", 4);
    put<std::uint32_t>(out, snapshot_version);
    put<std::uint32_t>(out, g.n1());
    put<std::uint32_t>(out, g.n2());
    put<std::uint32_t>(out, g.nz());
    put<std::uint32_t>(out, 4);
    put<double>(out, g.spec().L1);
    put<double>(out, g.spec().L2);
    put<double>(out, g.spec().h);
    put<double>(out, U.time);
    for (Component c : all_components) {
        std::array<char, 16> name{};
        const std::string_view n = to_string(c);
        std::memcpy(name.data(), n.data(), n.size());
        out.write(name.data(), name.size());
        for (double v : U[c].interior_values()) put<double>(out, v);
    }
    if (!out) throw Error(ErrorKind::io_error, "snapshot write failed");
}

void write_snapshot(const std::filesystem::path& path, const State& U) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io_error, "cannot open " + path.string());
    write_snapshot(out, U);
}

State read_snapshot(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "HSTO", 4) != 0)
        throw Error(ErrorKind::io_error, "not a snapshot file");
    if (get<std::uint32_t>(in) != snapshot_version) throw Error(ErrorKind::io_error, "unsupported snapshot version");
    GridSpec spec;
    spec.N1 = static_cast<int>(get<std::uint32_t>(in));
    spec.N2 = static_cast<int>(get<std::uint32_t>(in));
    spec.Nz = static_cast<int>(get<std::uint32_t>(in));
    if (get<std::uint32_t>(in) != 4) throw Error(ErrorKind::io_error, "snapshot must hold 4 fields");
    spec.L1 = get<double>(in);
    spec.L2 = get<double>(in);
    spec.h = get<double>(in);
    const Grid g = make_grid(spec);
    State U(g);
    U.time = get<double>(in);
    for (Component c : all_components) {
        std::array<char, 16> name{};
        if (!in.read(name.data(), name.size())) throw Error(ErrorKind::io_error, "truncated snapshot");
        const std::string_view got(name.data(), strnlen(name.data(), name.size()));
        if (got != to_string(c)) throw Error(ErrorKind::io_error, "unexpected field '" + std::string(got) + "'");
        Field& f = U[c];
        for (int k = 0; k < g.nz(); ++k)
            for (int j = 0; j < g.n2(); ++j)
                for (int i = 0; i < g.n1(); ++i) f(i, j, k) = get<double>(in);
        fill_ghosts(f);
    }
    return U;
}

State read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
    return read_snapshot(in);
}

} // namespace hsto
