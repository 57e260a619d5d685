#include "hsto/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "hsto/analysis.hpp"
#include "hsto/config.hpp"
#include "hsto/error.hpp"
#include "hsto/pressure.hpp"
#include "hsto/snapshot.hpp"
#include "hsto/stepping.hpp"

#ifndef HSTO_GIT_HASH
#define HSTO_GIT_HASH "unknown"
#endif

namespace fs = std::filesystem;

namespace hsto {

int thread_cap() {
    const char* env = std::getenv("HSTO_THREADS");
    const int hw = std::max(1u, std::thread::hardware_concurrency());
    if (!env || !*env) return hw;
    int n = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || ptr != s.data() + s.size() || n < 1) {
        throw Error(ErrorKind::invalid_value, "HSTO_THREADS must be a positive integer");
    }
    return n;
}

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid;
    std::optional<std::string> mode;
};

RunConfig load(const Overrides& o) {
    RunConfig c = parse_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.grid) {
        if (*o.grid < 2) throw Error(ErrorKind::invalid_value, "--grid must be >= 2");
        c.grid.N1 = c.grid.N2 = c.grid.Nz = *o.grid;
    }
    if (o.mode) c.mode = parse_run_mode(*o.mode);
    c.validate();
    return c;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::io_error, "cannot write " + path.string());
    f << text;
    if (!f) throw Error(ErrorKind::io_error, "write failed for " + path.string());
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io_error, "cannot create " + dir.string() + ": " + ec.message());
}

std::string snapshot_name(int step) {
    std::ostringstream s;
    s << "step_" << std::setw(6) << std::setfill('0') << step << ".bin";
    return s.str();
}

TrajectoryResult run_to_dir(const RunConfig& cfg, const fs::path& dir, const std::string& command) {
    make_dir(dir / "snapshots");
    write_file(dir / "config.toml", config_to_toml(cfg));
    std::vector<std::string> snaps;
    const TrajectoryResult res = run_trajectory(cfg, [&](int step, double, const State& U) {
        const std::string name = snapshot_name(step);
        write_snapshot(dir / "snapshots" / name, U);
        snaps.push_back("snapshots/" + name);
    });
    {
        std::ostringstream csv;
        write_csv_header(csv);
        for (const DiagnosticsRecord& r : res.records) {
            write_csv_row(csv, r);
        }
        write_file(dir / "diagnostics.csv", csv.str());
    }
    nlohmann::ordered_json m;
    m["command"] = command;
    m["git_hash"] = HSTO_GIT_HASH;
    m["seed"] = cfg.seed;
    m["mode"] = std::string(to_string(cfg.mode));
    m["grid"] = {cfg.grid.N1, cfg.grid.N2, cfg.grid.Nz};
    m["dt"] = cfg.dt;
    m["steps_requested"] = cfg.steps;
    m["steps_taken"] = res.steps_taken;
    m["blowup"] = res.blowup;
    m["max_barotropic_divergence"] = res.max_barotropic_divergence;
    m["files"] = {{"config", "config.toml"}, {"diagnostics", "diagnostics.csv"}, {"snapshots", snaps}};
    write_file(dir / "manifest.json", m.dump(2) + "\n");
    return res;
}

std::string fmt(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

int cmd_run(const Overrides& o, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load(o);
    const TrajectoryResult res = run_to_dir(cfg, o.out, "run");
    out << "steps=" << res.steps_taken << " records=" << res.records.size()
        << " blowup=" << (res.blowup ? 1 : 0) << '\n';
    if (res.blowup) err << "warning: blow-up detected at t=" << fmt(res.records.back().t) << '\n';
    return 0;
}

int cmd_ensemble(const Overrides& o, int runs, std::ostream& out) {
    if (runs < 1) throw Error(ErrorKind::invalid_value, "--runs must be >= 1");
    const RunConfig base = load(o);
    const fs::path root(o.out);
    make_dir(root);
    std::vector<std::vector<DiagnosticsRecord>> series(runs);
    std::vector<int> blown(runs, 0);
    std::atomic<int> next{0};
    std::mutex fail_mu;
    std::exception_ptr failure;
    auto worker = [&] {
        for (int r = next++; r < runs; r = next++) {
            try {
                RunConfig cfg = base;
                cfg.seed = base.seed + static_cast<std::uint64_t>(r);
                std::ostringstream name;
                name << "run_" << std::setw(4) << std::setfill('0') << r;
                const TrajectoryResult res = run_to_dir(cfg, root / name.str(), "ensemble");
                series[r] = res.records;
                blown[r] = res.blowup;
            } catch (...) {
                std::lock_guard lock(fail_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int workers = std::min(thread_cap(), runs);
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::ostringstream mom;
    mom << "p,runs,sup_moment,sup_moment_se,int_moment,int_moment_se\n";
    for (double p : {2.0, 4.0}) {
        const MomentReport m = ensemble_stats(series, p);
        mom << fmt(p) << ',' << m.runs << ',' << fmt(m.sup_moment) << ',' << fmt(m.sup_moment_se) << ','
            << fmt(m.int_moment) << ',' << fmt(m.int_moment_se) << '\n';
    }
    write_file(root / "moments.csv", mom.str());

    const std::vector<double> Ks{1.0, 10.0, 100.0, 1000.0};
    std::ostringstream st;
    st << "run,K,tau_W,tau_1,tau_2,tau_z,tau_T,tau,tau_M\n";
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
    for (int r = 0; r < runs; ++r) {
        const StoppingReport rep = stopping_times(series[r], Ks);
        for (const StoppingHits& h : rep.hits)
            st << r << ',' << fmt(h.K) << ',' << opt(h.tau_W) << ',' << opt(h.tau_1) << ',' << opt(h.tau_2)
               << ',' << opt(h.tau_z) << ',' << opt(h.tau_T) << ',' << opt(h.tau) << ',' << opt(h.tau_M) << '\n';
    }
    write_file(root / "stopping_times.csv", st.str());

    nlohmann::ordered_json m;
    m["command"] = "ensemble";
    m["git_hash"] = HSTO_GIT_HASH;
    m["seed"] = base.seed;
    m["runs"] = runs;
    m["blowups"] = std::count(blown.begin(), blown.end(), 1);
    write_file(root / "manifest.json", m.dump(2) + "\n");
    out << "runs=" << runs << " blowups=" << m["blowups"].get<long>() << '\n';
    return 0;
}

void emit(const std::string& out_dir, const std::string& name, const std::string& text, std::ostream& out) {
    if (out_dir.empty()) {
        out << text;
        return;
    }
    make_dir(out_dir);
    write_file(fs::path(out_dir) / name, text);
}

int cmd_verify(int N, std::uint64_t seed, int samples, const std::string& out_dir, std::ostream& out) {
    if (N < 4) throw Error(ErrorKind::invalid_value, "--grid must be >= 4");
    const std::vector<VerifyRow> rows = verify_battery(N, seed, samples);
    std::ostringstream csv;
    write_verify_csv(csv, rows);
    emit(out_dir, "verify_N" + std::to_string(N) + ".csv", csv.str(), out);
    return 0;
}

int cmd_pressure(int N, int cases, std::uint64_t seed, const std::string& out_dir, std::ostream& out) {
    if (N < 4) throw Error(ErrorKind::invalid_value, "--grid must be >= 4");
    if (cases < 1) throw Error(ErrorKind::invalid_value, "--cases must be >= 1");
    StokesCheckOptions opt;
    opt.N = N;
    const std::vector<StokesRatio> rows = stokes_pressure_check(make_stokes_cases(cases, seed), opt);
    std::ostringstream csv;
    write_stokes_csv(csv, rows);
    emit(out_dir, "stokes_N" + std::to_string(N) + ".csv", csv.str(), out);
    return 0;
}

int cmd_gronwall(int count, std::uint64_t seed, std::ostream& out) {
    if (count < 1) throw Error(ErrorKind::invalid_value, "--runs must be >= 1");
    const GronwallSuiteReport r = gronwall_suite(count, seed);
    out << "cases=" << r.cases << " hypothesis_ok=" << r.hypothesis_ok << " conclusion_ok=" << r.conclusion_ok
        << " max_ratio=" << fmt(r.max_ratio) << '\n';
    if (r.conclusion_ok != r.hypothesis_ok) {
        throw Error(ErrorKind::hypothesis_violation,
                    "bound failed in " + std::to_string(r.hypothesis_ok - r.conclusion_ok) + " cases");
    }
    return 0;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"hsto: stochastic primitive equations simulator"};
    app.require_subcommand(1);
    Overrides o;
    std::uint64_t seed = 0;
    int runs = 1, grid = 16, samples = 100, cases = 20;
    std::string mode;

    auto* run = app.add_subcommand("run", "run one trajectory");
    auto* ens = app.add_subcommand("ensemble", "run seeds seed..seed+runs-1");
    for (auto* sub : {run, ens}) {
        sub->add_option("--config", o.config, "TOML config")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory")->required();
        sub->add_option("--seed", seed, "override [run].seed");
        sub->add_option("--grid", grid, "override N1 = N2 = Nz");
        sub->add_option("--mode", mode, "direct|split|both");
    }
    ens->add_option("--runs", runs, "number of trajectories");

    auto* ver = app.add_subcommand("verify", "identity and inequality battery on N^3");
    ver->add_option("--grid", grid, "N");
    ver->add_option("--seed", seed);
    ver->add_option("--samples", samples);
    auto* pre = app.add_subcommand("pressure-check", "Stokes pressure estimate cases");
    pre->add_option("--grid", grid, "N");
    pre->add_option("--seed", seed);
    pre->add_option("--cases", cases);
    auto* gro = app.add_subcommand("gronwall", "Gronwall bound property suite");
    gro->add_option("--runs", runs, "number of instances");
    gro->add_option("--seed", seed);
    std::string out_dir;
    for (auto* sub : {ver, pre}) sub->add_option("--out", out_dir, "output directory (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return 1;
    }

    try {
        auto sub = [&](CLI::App* a) { return a->parsed(); };
        if (sub(run) || sub(ens)) {
            CLI::App* a = sub(run) ? run : ens;
            if (a->count("--seed")) o.seed = seed;
            if (a->count("--grid")) o.grid = grid;
            if (a->count("--mode")) o.mode = mode;
            if (sub(run)) return cmd_run(o, out, err);
            if (!ens->count("--runs")) throw Error(ErrorKind::invalid_value, "--runs is required");
            return cmd_ensemble(o, runs, out);
        }
        if (sub(ver)) return cmd_verify(grid, seed, samples, out_dir, out);
        if (sub(pre)) return cmd_pressure(grid, cases, seed, out_dir, out);
        if (sub(gro)) return cmd_gronwall(gro->count("--runs") ? runs : 1000, seed, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << '\n';
        return e.is_validation() ? 1 : 2;
    } catch (const std::exception& e) {
        err << "error: runtime: " << one_line(e.what()) << '\n';
        return 2;
    }
    return 2;
}

} // namespace hsto
