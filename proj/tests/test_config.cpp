#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsto/cli.hpp"
#include "hsto/config.hpp"
#include "hsto/error.hpp"
#include "hsto/snapshot.hpp"
#include "test_support.hpp"

using namespace hsto;
namespace fs = std::filesystem;

namespace {

constexpr const char* minimal = "[grid]\nN1 = 8\nN2 = 8\nNz = 4\n[run]\nseed = 5\n";

ErrorKind kind_of(std::string_view text) {
    try {
        (void)parse_config_string(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::io_error;
}

std::string message_of(std::string_view text) {
    try {
        (void)parse_config_string(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hsto_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "hsto");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_text) *err_text = err.str();
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("minimal file fills defaults") {
    const RunConfig c = parse_config_string(minimal);
    CHECK(c.grid.N1 == 8);
    CHECK(c.grid.Nz == 4);
    CHECK(c.seed == 5);
    CHECK(c.dt == RunConfig{}.dt);
    CHECK(c.noise.K == 8);
    CHECK(c.physics.mu_v == PhysParams{}.mu_v);
}

TEST_CASE("errors name the key") {
    CHECK(kind_of(std::string(minimal) + "[physics]\nmu_vv = 1.0\n") == ErrorKind::unknown_key);
    CHECK(message_of(std::string(minimal) + "[physics]\nmu_vv = 1.0\n").find("[physics].mu_vv") != std::string::npos);
    CHECK(message_of("[grid]\nN1 = 8\nN2 = 8\nNz = 4\n[run]\nseed = 5\ndt = -1\n").find("[run].dt") != std::string::npos);
    CHECK(kind_of("[grid]\nN1 = 8\nN2 = 8\nNz = 4\n[run]\nseed = 5\ndt = -1\n") == ErrorKind::invalid_value);
    CHECK(kind_of("[grid]\nN1 = 8\nN2 = 8\n[run]\nseed = 5\n") == ErrorKind::invalid_value);
    CHECK(kind_of("[grid]\nN1 = 8\nN2 = 8\nNz = 4\n") == ErrorKind::invalid_value);
    CHECK(kind_of(std::string(minimal) + "[extra]\n") == ErrorKind::unknown_key);
    CHECK(kind_of(std::string(minimal) + "[noise]\nkind = \"cubic\"\n") == ErrorKind::unsupported_kind);
    CHECK(kind_of(std::string(minimal) + "[noise]\nK = 2.5\n") == ErrorKind::invalid_value);
    CHECK(kind_of("[grid]\nN1 = 8\nN2 = 8\nNz = 4\n[run]\nseed = 5\nmode = \"sideways\"\n") == ErrorKind::invalid_value);
    const std::string syntax = message_of("[grid]\nN1 = = 8\n");
    CHECK(kind_of("[grid]\nN1 = = 8\n") == ErrorKind::parse_error);
    CHECK(syntax.find(":2:") != std::string::npos);
}

TEST_CASE("echo round-trips") {
    RunConfig c = parse_config_string(std::string(minimal) +
                                      "[noise]\nkind = \"linear_multiplicative\"\nK = 3\namplitudes = [0.1, 0.2]\n"
                                      "[physics]\nadvection = false\nmu_v = 0.013\n");
    const RunConfig d = parse_config_string(config_to_toml(c));
    CHECK(config_to_toml(d) == config_to_toml(c));
    CHECK(d.noise.kind == NoiseKind::linear_multiplicative);
    CHECK(d.noise.amplitudes == std::vector<double>{0.1, 0.2});
    CHECK(d.physics.mu_v == 0.013);
    CHECK_FALSE(d.physics.advection);
}

TEST_CASE("snapshot round trip") {
    const Grid g = make_grid({1, 2, 0.5, 5, 4, 4});
    State U(g);
    int n = 0;
    for (Component c : all_components)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j)
                for (int i = 0; i < 5; ++i) U[c](i, j, k) = 0.1 * ++n;
    U.time = 1.25;
    std::stringstream buf;
    write_snapshot(buf, U);
    CHECK(buf.str().size() == 4 + 5 * 4 + 4 * 8 + 4 * (16 + 80 * 8));
    const State V = read_snapshot(buf);
    CHECK(V.time == 1.25);
    CHECK(V.grid() == g);
    for (Component c : all_components) CHECK(V[c].interior_values() == U[c].interior_values());
    std::stringstream bad("HSTX");
    CHECK_THROWS_AS(read_snapshot(bad), Error);
}

TEST_CASE("cli run and exit codes") {
    const fs::path dir = scratch("cli");
    const fs::path cfg = dir / "c.toml";
    std::ofstream(cfg) << minimal << "steps = 4\ndt = 0.05\n";
    CHECK(cli({"run", "--config", cfg.string(), "--out", (dir / "a").string()}) == 0);
    CHECK(cli({"run", "--config", cfg.string(), "--out", (dir / "b").string()}) == 0);
    CHECK(fs::exists(dir / "a" / "diagnostics.csv"));
    CHECK(fs::exists(dir / "a" / "manifest.json"));
    CHECK(fs::exists(dir / "a" / "config.toml"));
    CHECK(fs::exists(dir / "a" / "snapshots" / "step_000004.bin"));
    CHECK(slurp(dir / "a" / "diagnostics.csv") == slurp(dir / "b" / "diagnostics.csv"));
    CHECK(read_snapshot(dir / "a" / "snapshots" / "step_000004.bin").time == doctest::Approx(0.2));

    std::string err;
    CHECK(cli({"ensemble", "--config", cfg.string(), "--out", (dir / "e").string(), "--runs", "0"}, &err) == 1);
    CHECK(err.rfind("error:", 0) == 0);
    CHECK(std::count(err.begin(), err.end(), '\n') == 1);

    CHECK(cli({"ensemble", "--config", cfg.string(), "--out", (dir / "e").string(), "--runs", "3"}) == 0);
    CHECK(fs::exists(dir / "e" / "run_0002" / "diagnostics.csv"));
    CHECK(fs::exists(dir / "e" / "moments.csv"));

    std::ofstream(dir / "bad.toml") << minimal << "dt = -1\n";
    CHECK(cli({"run", "--config", (dir / "bad.toml").string(), "--out", (dir / "x").string()}, &err) == 1);
    CHECK(err.find("[run].dt") != std::string::npos);
    CHECK(cli({"bogus"}) == 1);
    CHECK(cli({"gronwall", "--runs", "20"}) == 0);
    CHECK(cli({"verify", "--grid", "8", "--samples", "2", "--out", (dir / "v").string()}) == 0);
    CHECK(fs::exists(dir / "v" / "verify_N8.csv"));
}

}
