#include "hsto/stepping.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hsto/cg.hpp"
#include "hsto/error.hpp"
#include "hsto/pressure.hpp"

namespace hsto {

std::string_view to_string(RunMode mode) {
    switch (mode) {
    case RunMode::direct: return "direct";
    case RunMode::split: return "split";
    case RunMode::both: return "both";
    }
    return "?";
}

RunMode parse_run_mode(std::string_view name) {
    if (name == "direct") return RunMode::direct;
    if (name == "split") return RunMode::split;
    if (name == "both") return RunMode::both;
    throw Error(ErrorKind::invalid_value, "mode must be direct, split or both, got '" +
                                              std::string(name) + "'");
}

namespace {

constexpr double pi = std::numbers::pi;

double interior_dot(const Field& a, const Field& b) {
    const Grid& g = a.grid();
    double s = 0.0;
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j) {
            const std::size_t n0 = g.index(0, j, k);
            for (int i = 0; i < g.n1(); ++i) s += a[n0 + i] * b[n0 + i];
        }
    return s;
}

void helmholtz(Field& x, Field& y, double dt, Diffusivity d) {
    fill_ghosts(x);
    const Grid& g = x.grid();
    const double cx = dt * d.mu / (g.dx1() * g.dx1());
    const double cy = dt * d.mu / (g.dx2() * g.dx2());
    const double cz = dt * d.nu / (g.dz() * g.dz());
    const std::ptrdiff_t sx = g.stride_x(), sy = g.stride_y(), sz = g.stride_z();
    const double diag = 1.0 + 2.0 * (cx + cy + cz);
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j) {
            std::size_t n = g.index(0, j, k);
            for (int i = 0; i < g.n1(); ++i, ++n)
                y[n] = diag * x[n] - cx * (x[n + sx] + x[n - sx]) - cy * (x[n + sy] + x[n - sy]) -
                       cz * (x[n + sz] + x[n - sz]);
        }
}

void subtract_tracer_means(State& U) {
    const double inv = 1.0 / static_cast<double>(U.grid().interior_count());
    for (Field* f : {&U.T, &U.S}) {
        const double mean = f->interior_sum() * inv;
        const Grid& g = f->grid();
        for (int k = 0; k < g.nz(); ++k)
            for (int j = 0; j < g.n2(); ++j)
                for (int i = 0; i < g.n1(); ++i) (*f)(i, j, k) -= mean;
    }
}

// Projection, tracer mean removal and ghost fill shared by every step.
void finish_step(State& x, double dt, const PhysParams& params, StepInfo* info, double tol) {
    CgResult cg;
    SurfaceField phi = project_barotropic(x, tol, &cg);
    subtract_tracer_means(x);
    apply_bcs_in_place(x);
    if (info) {
        info->cg_iterations += cg.iterations;
        info->barotropic_divergence = barotropic_divergence(x).interior_max_abs();
        SurfaceField ps = phi;
        ps *= params.rho0 / dt;
        info->p_s = std::move(ps);
        info->phi = std::move(phi);
    }
}

} // namespace

int solve_implicit_diffusion(State& x, const State& rhs, double dt, const PhysParams& params,
                             double tol) {
    int iterations = 0;
    CgOptions opt;
    opt.tol = tol;
    opt.max_iter = 10 * static_cast<int>(x.grid().interior_count());
    auto no_deflation = [](Field&) {};
    for (Component c : all_components) {
        const Diffusivity d = params.diffusivity(c);
        auto apply = [&](Field& in, Field& out) { helmholtz(in, out, dt, d); };
        iterations += conjugate_gradient(apply, rhs[c], x[c], opt, interior_dot, no_deflation).iterations;
        fill_ghosts(x[c]);
    }
    return iterations;
}

Tendency explicit_drift(const State& U, const Tendency& F, const PhysParams& params) {
    Tendency drift = F;
    if (params.advection) drift -= apply_B(U, U);
    drift -= apply_Ap(U, params);
    drift -= apply_E(U, params);
    return drift;
}

State step_direct(const State& U, const Tendency& F, double dt, const Tendency& stochastic,
                  const PhysParams& params, StepInfo* info, double tol) {
    State rhs = U;
    const Tendency drift = explicit_drift(U, F, params);
    for (Component c : all_components) {
        rhs[c].axpy(dt, drift[c]);
        rhs[c] += stochastic[c];
    }
    State x = rhs;
    const int it = solve_implicit_diffusion(x, rhs, dt, params, tol);
    if (info) info->cg_iterations = it;
    finish_step(x, dt, params, info, tol);
    x.time = U.time + dt;
    return x;
}

State step_ou(const State& U_check, double dt, const Tendency& stochastic, const PhysParams& params,
              StepInfo* info, double tol) {
    State rhs = U_check;
    for (Component c : all_components) rhs[c] += stochastic[c];
    State x = rhs;
    const int it = solve_implicit_diffusion(x, rhs, dt, params, tol);
    if (info) info->cg_iterations = it;
    finish_step(x, dt, params, info, tol);
    x.time = U_check.time + dt;
    return x;
}

State step_ou(const State& U_check, double dt, const NoiseModel& model, std::span<const double> dW,
              const State& sigma_eval_state, const PhysParams& params, StepInfo* info, double tol) {
    return step_ou(U_check, dt, model.apply(sigma_eval_state, dW), params, info, tol);
}

State step_residual(const State& U_hat, const State& U_check, const Tendency& F, double dt,
                    const PhysParams& params, StepInfo* info, double tol) {
    State full = U_hat;
    full += U_check;
    const Tendency drift = explicit_drift(full, F, params);
    State rhs = U_hat;
    for (Component c : all_components) rhs[c].axpy(dt, drift[c]);
    State x = rhs;
    const int it = solve_implicit_diffusion(x, rhs, dt, params, tol);
    if (info) info->cg_iterations = it;
    finish_step(x, dt, params, info, tol);
    x.time = U_hat.time + dt;
    return x;
}

// ---------------------------------------------------------------------------

Tendency make_forcing(const Grid& g, const ForcingSpec& spec) {
    const double L1 = g.spec().L1, L2 = g.spec().L2, h = g.depth();
    Tendency F(g);
    F.du = Field::from_function(g, BcKind::velocity, [&](double x, double y, double) {
        return spec.amp_v * std::sin(pi * x / L1) * std::sin(2 * pi * y / L2);
    });
    F.dv = Field::from_function(g, BcKind::velocity, [&](double x, double y, double) {
        return -spec.amp_v * std::sin(2 * pi * x / L1) * std::sin(pi * y / L2);
    });
    F.dT = Field::from_function(g, BcKind::tracer, [&](double x, double, double z) {
        return spec.amp_T * std::cos(pi * x / L1) * std::cos(pi * (z + h) / h);
    });
    F.dS = Field::from_function(g, BcKind::tracer, [&](double, double y, double z) {
        return spec.amp_S * std::cos(pi * y / L2) * std::cos(pi * (z + h) / h);
    });
    F.fill_ghosts();
    return F;
}

State make_initial_state(const Grid& g, const PhysParams& params, const InitSpec& spec) {
    State U(g);
    const GaussianStream gauss(spec.seed, 1);
    const int per = std::max(spec.modes, 0);
    const std::pair<Component, double> parts[] = {{Component::u, spec.amp_v},
                                                  {Component::v, spec.amp_v},
                                                  {Component::T, spec.amp_T},
                                                  {Component::S, spec.amp_S}};
    std::uint32_t draw = 0;
    for (const auto& [c, amp] : parts) {
        if (amp == 0.0 || per == 0) continue;
        std::vector<NoiseMode> mine = component_modes(g, params, c, per);
        for (NoiseMode& m : mine) m.amplitude = 1.0;
        const NoiseModel shapes(g, NoiseKind::additive, mine);
        for (int k = 0; k < shapes.size(); ++k) {
            const double w = amp * gauss.normal(draw++, static_cast<std::uint32_t>(c)) / std::sqrt(per);
            U[c].axpy(w, shapes.shape(k));
        }
    }
    apply_bcs_in_place(U);
    project_barotropic(U);
    subtract_tracer_means(U);
    apply_bcs_in_place(U);
    return U;
}

void RunConfig::validate() const {
    auto require = [](bool ok, const std::string& key, const char* what) {
        if (!ok) throw Error(ErrorKind::invalid_value, key + " " + what);
    };
    (void)make_grid(grid);
    physics.validate();
    require(dt > 0.0 && std::isfinite(dt), "[run].dt", "must be > 0");
    require(steps >= 0, "[run].steps", "must be >= 0");
    require(substeps >= 1, "[run].substeps", "must be >= 1");
    require(record_every >= 1, "[output].record_every", "must be >= 1");
    require(snapshot_every >= 0, "[output].snapshot_every", "must be >= 0");
    require(blowup_ceiling > 0.0, "[output].blowup_ceiling", "must be > 0");
    require(tol > 0.0 && tol < 1.0, "[run].tol", "must lie in (0, 1)");
    require(noise.K >= 0, "[noise].K", "must be >= 0");
    require(std::isfinite(noise.amplitude), "[noise].amplitude", "must be finite");
    require(init.modes >= 0, "[run].init_modes", "must be >= 0");
}

TrajectoryResult run_trajectory(const RunConfig& cfg, const SnapshotSink& sink) {
    cfg.validate();
    const Grid grid = make_grid(cfg.grid);
    const PhysParams& params = cfg.physics;
    const NoiseModel model = NoiseModel::from_spec(grid, params, cfg.noise);
    const Tendency F = make_forcing(grid, cfg.forcing);
    const double F_l4 = norm(as_state(F), NormKind::lp(4.0));
    const BrownianPath path(cfg.seed);

    const bool direct = cfg.mode != RunMode::split;
    const bool split = cfg.mode != RunMode::direct;

    State U = make_initial_state(grid, params, cfg.init);
    State U_hat = U;
    State U_check(grid);

    auto combined = [&]() {
        State s = U_hat;
        s += U_check;
        s.time = U_hat.time;
        apply_bcs_in_place(s);
        return s;
    };
    auto gap = [&]() -> std::optional<double> {
        if (cfg.mode != RunMode::both) return std::nullopt;
        State d = U;
        d -= combined();
        return norm(d, NormKind::l2());
    };
    auto reported = [&]() { return direct ? U : combined(); };

    TrajectoryResult result{State(grid), std::nullopt, {}, false, 0, 0.0};
    Monitor monitor(params, F_l4, cfg.blowup_ceiling);
    monitor.observe(reported(), 0.0);
    result.records.push_back(monitor.current(gap()));
    if (sink && cfg.snapshot_every > 0) sink(0, 0.0, reported());

    for (int n = 0; n < cfg.steps && !monitor.blown_up(); ++n) {
        const std::vector<double> dW =
            path.increment(static_cast<std::uint64_t>(n), cfg.dt, model.size(), cfg.substeps);
        try {
            StepInfo info;
            if (direct) {
                const Tendency stoch = model.apply(U, dW);
                U = step_direct(U, F, cfg.dt, stoch, params, &info, cfg.tol);
                result.max_barotropic_divergence =
                    std::max(result.max_barotropic_divergence, info.barotropic_divergence);
                if (split) {
                    U_check = step_ou(U_check, cfg.dt, stoch, params, nullptr, cfg.tol);
                }
            } else {
                const Tendency stoch = model.apply(combined(), dW);
                U_check = step_ou(U_check, cfg.dt, stoch, params, nullptr, cfg.tol);
            }
            if (split) {
                StepInfo rinfo;
                U_hat = step_residual(U_hat, U_check, F, cfg.dt, params, &rinfo, cfg.tol);
                if (!direct) {
                    result.max_barotropic_divergence =
                        std::max(result.max_barotropic_divergence, rinfo.barotropic_divergence);
                }
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::solver_divergence) {
                throw Error(e.kind(), "step " + std::to_string(n) + ": " + e.what());
            }
            throw;
        }
        const double t = (n + 1) * cfg.dt;
        U.time = U_hat.time = U_check.time = t;
        monitor.observe(reported(), t);
        result.steps_taken = n + 1;
        const bool last = n + 1 == cfg.steps || monitor.blown_up();
        if ((n + 1) % cfg.record_every == 0 || last) result.records.push_back(monitor.current(gap()));
        if (sink && cfg.snapshot_every > 0 && (n + 1) % cfg.snapshot_every == 0 && !last) {
            sink(n + 1, t, reported());
        }
    }
    result.blowup = monitor.blown_up();
    result.final_state = direct ? U : combined();
    if (split) result.split_final = combined();
    if (sink) sink(result.steps_taken, result.steps_taken * cfg.dt, result.final_state);
    return result;
}

} // namespace hsto
