// Acceptance suite: one line per criterion, exit status 0 only when every selected criterion passes.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hsto/analysis.hpp"
#include "hsto/cli.hpp"
#include "hsto/config.hpp"
#include "hsto/pressure.hpp"
#include "hsto/stepping.hpp"

using namespace hsto;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void parallel_for(int count, const std::function<void(int)>& body) {
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) body(i);
    };
    const int workers = std::max(1, std::min(thread_cap(), count));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

double fit_order(const std::vector<double>& h, const std::vector<double>& e) {
    const std::size_t n = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(h[i]), y = std::log(e[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Grid cube(int N) { return make_grid({1, 1, 1, N, N, N}); }

Outcome c01_self_adjoint() {
    const Grid g = cube(16);
    const PhysParams p;
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        const State a = random_smooth_state(g, 101, 2 * s), b = random_smooth_state(g, 101, 2 * s + 1);
        const Tendency A = apply_A(a, p);
        double lhs = 0.0;
        for (Component c : all_components) lhs += inner(A[c], b[c], InnerKind::L2);
        const double scale = norm(a, NormKind::h1(), p) * norm(b, NormKind::h1(), p);
        worst = std::max(worst, std::abs(lhs - inner(a, b, InnerKind::V, p)) / scale);
    }
    return {worst <= 1e-10, "max relative defect " + num(worst) + " (limit 1e-10)"};
}

Outcome c02_coriolis() {
    const Grid g = cube(16);
    const PhysParams p;
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        const State a = random_smooth_state(g, 202, s, s % 2 == 0);
        const Tendency E = apply_E(a, p);
        double e = 0.0;
        for (Component c : all_components) e += inner(E[c], a[c], InnerKind::L2);
        worst = std::max(worst, std::abs(e) / (std::abs(p.f) * std::pow(norm(a, NormKind::l2()), 2)));
    }
    return {worst <= 1e-14, "max |<EU,U>| / (f |U|^2) = " + num(worst) + " (limit 1e-14)"};
}

Outcome c03_cancellation() {
    const std::vector<int> Ns{16, 32, 64};
    const int samples = 4;
    bool ok = true;
    std::string detail;
    for (int r : {1, 3}) {
        std::vector<double> h, e;
        for (int N : Ns) {
            const Grid g = cube(N);
            double worst = 0.0;
            for (int s = 0; s < samples; ++s) {
                const CancellationResult c =
                    cancellation_residual(random_smooth_state(g, 303, 2 * s), random_smooth_state(g, 303, 2 * s + 1), r);
                worst = std::max(worst, std::abs(c.residual) / c.scale);
            }
            h.push_back(1.0 / N);
            e.push_back(worst);
        }
        const double order = fit_order(h, e);
        ok = ok && order >= 1.8 && e.back() <= 1e-3;
        detail += "r=" + std::to_string(r) + " order " + num(order) + " rel@64 " + num(e.back()) + "; ";
    }
    return {ok, detail + "(limits order >= 1.8, rel <= 1e-3)"};
}

Outcome c04_barotropic() {
    RunConfig c;
    c.grid = {1, 1, 1, 32, 32, 16};
    c.seed = 404;
    c.dt = 0.02;
    c.steps = 500;
    c.forcing = {0.2, 0.1, 0.1};
    c.record_every = 50;
    const TrajectoryResult r = run_trajectory(c);
    const double final_div = barotropic_divergence(r.final_state).interior_max_abs();
    const double worst = std::max(r.max_barotropic_divergence, final_div);
    return {worst <= 1e-8 && r.steps_taken == 500,
            "max barotropic divergence " + num(worst) + " over " + std::to_string(r.steps_taken) + " steps (limit 1e-8)"};
}

Outcome c05_ou_variance() {
    const Grid g = cube(8);
    PhysParams p;
    const double a = 0.5;
    std::vector<NoiseMode> modes = lowest_modes(g, p, 4, NoiseTarget::T);
    for (auto& m : modes) m.amplitude = a;
    const NoiseModel model(g, NoiseKind::additive, modes);
    std::vector<double> lam;
    for (const auto& m : modes) lam.push_back(mode_eigenvalue(g, m, p));
    const double lam_min = *std::min_element(lam.begin(), lam.end());
    const double lam_max = *std::max_element(lam.begin(), lam.end());
    const double horizon = 5.0 / lam_min;
    const int steps = static_cast<int>(std::ceil(horizon * lam_max / 0.02));
    const double dt = horizon / steps;

    const int runs = 1000;
    std::vector<std::vector<double>> sq(runs, std::vector<double>(modes.size()));
    parallel_for(runs, [&](int r) {
        const BrownianPath path(505, static_cast<std::uint32_t>(r));
        State U(g);
        for (int n = 0; n < steps; ++n) {
            const auto dW = path.increment(n, dt, model.size());
            U = step_ou(U, dt, model.apply(U, dW), p);
        }
        for (std::size_t k = 0; k < modes.size(); ++k) {
            const double c = inner(U.T, model.shape(static_cast<int>(k)), InnerKind::L2);
            sq[r][k] = c * c;
        }
    });
    bool ok = true;
    std::string detail;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        double s = 0, s2 = 0;
        for (int r = 0; r < runs; ++r) {
            s += sq[r][k];
            s2 += sq[r][k] * sq[r][k];
        }
        const double mean = s / runs, se = std::sqrt((s2 / runs - mean * mean) / (runs - 1));
        const double oracle = a * a / (2 * lam[k]);
        const double z = (mean - oracle) / se;
        ok = ok && std::abs(z) <= 3.0;
        detail += "mode" + std::to_string(k) + " z=" + num(z) + " ";
    }
    return {ok, detail + "(" + std::to_string(steps) + " steps to t=" + num(horizon) + ", limit |z| <= 3)"};
}

Outcome c06_ito() {
    const Grid g = cube(8);
    const PhysParams p;
    const State U = random_smooth_state(g, 606, 0);
    bool ok = true;
    std::string detail;
    for (NoiseKind kind : {NoiseKind::additive, NoiseKind::linear_multiplicative, NoiseKind::lipschitz_functional}) {
        NoiseSpec spec{kind, 4, 0.3, NoiseTarget::all, {}};
        const NoiseModel model = NoiseModel::from_spec(g, p, spec);
        const IsometryReport r = ito_isometry_check(model, U, 0.01, 20, 2000, 606);
        ok = ok && std::abs(r.deviation) <= 3.0 && r.rhs > 0.0;
        detail += std::string(to_string(kind)) + " dev=" + num(r.deviation) + " ";
    }
    return {ok, detail + "(SE units, limit 3)"};
}

Outcome c07_splitting() {
    const std::vector<double> dts{0.1, 0.05, 0.025};
    const std::vector<int> subs{4, 2, 1};
    const int seeds = 4;
    std::vector<double> sq(dts.size() * seeds);
    parallel_for(static_cast<int>(sq.size()), [&](int job) {
        const int d = job / seeds, s = job % seeds;
        RunConfig c;
        c.grid = {1, 1, 1, 16, 16, 16};
        c.mode = RunMode::both;
        c.seed = 700 + s;
        c.noise.kind = NoiseKind::linear_multiplicative;
        c.noise.amplitude = 0.2;
        c.forcing = {0.2, 0.1, 0.1};
        c.init.amp_v = 0.3;
        c.dt = dts[d];
        c.substeps = subs[d];
        c.steps = static_cast<int>(std::lround(1.0 / c.dt));
        c.record_every = c.steps;
        const double gap = *run_trajectory(c).records.back().split_gap;
        sq[job] = gap * gap;
    });
    std::vector<double> rms;
    for (std::size_t d = 0; d < dts.size(); ++d) {
        double s = 0;
        for (int k = 0; k < seeds; ++k) s += sq[d * seeds + k];
        rms.push_back(std::sqrt(s / seeds));
    }
    const double order = fit_order(dts, rms);
    return {order >= 0.9, "RMS gap " + num(rms[0]) + " " + num(rms[1]) + " " + num(rms[2]) + ", order " + num(order) +
                              " (limit >= 0.9)"};
}

Outcome c08_gronwall() {
    const GronwallSuiteReport r = gronwall_suite(1000, 808);
    return {r.hypothesis_ok == 1000 && r.conclusion_ok == 1000,
            std::to_string(r.conclusion_ok) + "/" + std::to_string(r.hypothesis_ok) + " bounds hold, max sup X / bound " +
                num(r.max_ratio)};
}

Outcome c09_stokes() {
    const auto cases = make_stokes_cases(20, 909);
    StokesCheckOptions o;
    o.N = 16;
    const auto coarse = stokes_pressure_check(cases, o);
    o.N = 32;
    const auto fine = stokes_pressure_check(cases, o);
    double coarse_max = 0.0, fine_max = 0.0;
    for (const auto& r : coarse) coarse_max = std::max(coarse_max, r.ratio);
    for (const auto& r : fine) fine_max = std::max(fine_max, r.ratio);
    const double C = std::max(coarse_max, fine_max);
    bool all = true;
    for (const auto* set : {&coarse, &fine})
        for (const auto& r : *set) all = all && std::isfinite(r.ratio) && r.ratio <= C;
    const double growth = fine_max / coarse_max - 1.0;
    return {all && growth < 0.1,
            "constant " + num(C) + ", max ratio " + num(coarse_max) + " (N=16) -> " + num(fine_max) + " (N=32), growth " + num(100 * growth) + "%"};
}

Outcome c10_refinement() {
    const PhysParams p;
    const int samples = 100;
    double q[2], b[2];
    int idx = 0;
    for (int N : {16, 32}) {
        const Grid g = cube(N);
        std::vector<State> a;
        std::vector<BTriple> t;
        for (int s = 0; s < samples; ++s) {
            a.push_back(random_smooth_state(g, 1010, 3 * s));
            t.push_back({a.back(), random_smooth_state(g, 1010, 3 * s + 1), random_smooth_state(g, 1010, 3 * s + 2, false)});
        }
        q[idx] = verify_aniso_embedding(a, 12.0, p).max_ratio;
        b[idx] = verify_B_bound(t, p).max_ratio;
        ++idx;
    }
    const double dq = std::abs(q[1] / q[0] - 1), db = std::abs(b[1] / b[0] - 1);
    return {dq < 0.1 && db < 0.1, "aniso q=12 " + num(q[0]) + " -> " + num(q[1]) + " (" + num(100 * dq) +
                                      "%), trilinear " + num(b[0]) + " -> " + num(b[1]) + " (" + num(100 * db) + "%)"};
}

Outcome c11_dissipation() {
    const Grid g = cube(16);
    const PhysParams p;
    int ok = 0;
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        const DissipationCheck d = verify_dissipation(random_smooth_state(g, 1111, s), p);
        ok += d.lhs <= d.rhs;
        worst = std::max(worst, d.lhs / d.rhs);
    }
    return {ok == 100, std::to_string(ok) + "/100 fields, max lhs/rhs " + num(worst)};
}

Outcome c12_boundedness() {
    const int seeds = 50;
    struct Row {
        bool finite = true, blowup = false;
        double l4 = 0, dz = 0, idz = 0;
    };
    std::vector<Row> rows(seeds);
    parallel_for(seeds, [&](int s) {
        RunConfig c;
        c.grid = {1, 1, 1, 32, 32, 16};
        c.seed = 1200 + s;
        c.noise.kind = NoiseKind::linear_multiplicative;
        c.noise.amplitude = 0.1;
        c.forcing = {0.05, 0.05, 0.05};
        c.dt = 0.1;
        c.steps = 100;
        const TrajectoryResult r = run_trajectory(c);
        Row row;
        const auto& r0 = r.records.front();
        const double l4_0 = std::pow(r0.l4_v, 4), dz_0 = r0.l2_dzU * r0.l2_dzU;
        for (const auto& rec : r.records) {
            const double l4 = std::pow(rec.l4_v, 4), dz = rec.l2_dzU * rec.l2_dzU;
            row.finite = row.finite && std::isfinite(l4) && std::isfinite(dz) && std::isfinite(rec.int_dzV2);
            row.blowup = row.blowup || rec.blowup;
            row.l4 = std::max(row.l4, l4 / l4_0);
            row.dz = std::max(row.dz, dz / dz_0);
            row.idz = std::max(row.idz, rec.int_dzV2 / dz_0);
        }
        row.blowup = row.blowup || r.blowup || r.steps_taken != 100;
        rows[s] = row;
    });
    bool ok = true;
    int flags = 0;
    double l4 = 0, dz = 0, idz = 0;
    for (const Row& r : rows) {
        ok = ok && r.finite;
        flags += r.blowup;
        l4 = std::max(l4, r.l4);
        dz = std::max(dz, r.dz);
        idz = std::max(idz, r.idz);
    }
    ok = ok && flags == 0 && l4 < 10 && dz < 10 && idz < 10;
    return {ok, "max over 50 seeds of |v|_4^4 " + num(l4) + "x, |dzU|^2 " + num(dz) + "x, int||dzU||^2 " + num(idz) +
                    "x initial scale; blow-up flags " + std::to_string(flags)};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "hsto");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome c13_determinism() {
    const fs::path dir = fs::temp_directory_path() / "hsto_acceptance_13";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "c.toml";
    std::ofstream(cfg) << "[grid]\nN1 = 16\nN2 = 16\nNz = 8\n"
                          "[noise]\nkind = \"lipschitz_functional\"\namplitude = 0.2\n"
                          "[forcing]\namp_v = 0.1\n"
                          "[run]\nseed = 1313\ndt = 0.05\nsteps = 40\nmode = \"both\"\n";
    const int a = invoke({"run", "--config", cfg.string(), "--out", (dir / "a").string()});
    const int b = invoke({"run", "--config", cfg.string(), "--out", (dir / "b").string()});
    const std::string da = slurp(dir / "a" / "diagnostics.csv"), db = slurp(dir / "b" / "diagnostics.csv");
    const bool same = a == 0 && b == 0 && !da.empty() && da == db;
    fs::remove_all(dir);
    return {same, same ? "diagnostics.csv byte-identical (" + std::to_string(da.size()) + " bytes)" : "outputs differ"};
}

} // namespace

int main(int argc, char** argv) {
    const std::map<int, std::function<Outcome()>> criteria{
        {1, c01_self_adjoint}, {2, c02_coriolis},   {3, c03_cancellation}, {4, c04_barotropic},
        {5, c05_ou_variance},  {6, c06_ito},        {7, c07_splitting},    {8, c08_gronwall},
        {9, c09_stokes},       {10, c10_refinement}, {11, c11_dissipation}, {12, c12_boundedness},
        {13, c13_determinism},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (!criteria.count(id)) {
            std::fprintf(stderr, "error: unknown criterion '%s'\n", argv[i]);
            return 1;
        }
        selected.push_back(id);
    }
    if (selected.empty())
        for (const auto& [id, fn] : criteria) selected.push_back(id);

    bool all = true;
    for (int id : selected) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria.at(id)();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2d: %s  %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), sec);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
