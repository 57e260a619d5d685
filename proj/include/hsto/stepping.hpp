#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hsto/diagnostics.hpp"
#include "hsto/grid.hpp"
#include "hsto/noise.hpp"
#include "hsto/operators.hpp"

namespace hsto {

enum class RunMode { direct, split, both };

std::string_view to_string(RunMode mode);
/// Throws invalid_value on an unknown name.
RunMode parse_run_mode(std::string_view name);

/// Steady forcing on fixed smooth modes, one amplitude per equation.
struct ForcingSpec {
    double amp_v = 0.0;
    double amp_T = 0.0;
    double amp_S = 0.0;
};

Tendency make_forcing(const Grid& grid, const ForcingSpec& spec);

/// Random smooth admissible initial state: the lowest modes with Gaussian weights.
struct InitSpec {
    double amp_v = 0.1;
    double amp_T = 0.1;
    double amp_S = 0.1;
    std::uint64_t seed = 1;
    int modes = 6;  // per component
};

State make_initial_state(const Grid& grid, const PhysParams& params, const InitSpec& spec);

struct RunConfig {
    GridSpec grid;
    PhysParams physics;
    NoiseSpec noise;
    ForcingSpec forcing;
    InitSpec init;
    double dt = 0.01;
    int steps = 100;
    RunMode mode = RunMode::direct;
    std::uint64_t seed = 0;
    /// Brownian increments are sums of this many fine draws (couples runs across dt).
    int substeps = 1;
    int record_every = 1;
    /// Snapshot cadence in steps; 0 writes the final state only.
    int snapshot_every = 0;
    double blowup_ceiling = 1e12;
    double tol = 1e-10;

    /// Throws invalid_value naming the offending [section].key.
    void validate() const;
};

struct StepInfo {
    int cg_iterations = 0;
    /// max |div of the vertical mean| after the projection.
    double barotropic_divergence = 0.0;
    /// Surface pressure of the step, rho0 * phi / dt.
    std::optional<SurfaceField> p_s;
    /// Projection potential phi (v <- v - grad phi).
    std::optional<SurfaceField> phi;
};

/// Solves (I + dt A) x = rhs component-wise by conjugate gradients, warm-started at x.
int solve_implicit_diffusion(State& x, const State& rhs, double dt, const PhysParams& params,
                             double tol = 1e-10);

/// Semi-implicit Euler-Maruyama step of the full system.
///
/// `stochastic` is the already evaluated sigma(U) dW. A is implicit, B, A_p, E and F
/// explicit at U, followed by the barotropic projection and the tracer mean removal.
State step_direct(const State& U, const Tendency& F, double dt, const Tendency& stochastic,
                  const PhysParams& params, StepInfo* info = nullptr, double tol = 1e-10);

/// Implicit step of dU + AU dt = sigma dW for the Ornstein-Uhlenbeck part.
State step_ou(const State& U_check, double dt, const Tendency& stochastic, const PhysParams& params,
              StepInfo* info = nullptr, double tol = 1e-10);
/// As above with sigma evaluated at `sigma_eval_state`.
State step_ou(const State& U_check, double dt, const NoiseModel& model, std::span<const double> dW,
              const State& sigma_eval_state, const PhysParams& params, StepInfo* info = nullptr,
              double tol = 1e-10);

/// Deterministic step of the residual equation with nonlinear, Coriolis and
/// tracer-pressure terms evaluated at U_hat + U_check.
State step_residual(const State& U_hat, const State& U_check, const Tendency& F, double dt,
                    const PhysParams& params, StepInfo* info = nullptr, double tol = 1e-10);

/// F - B(U, U) - A_p U - E U, the explicit part of every step.
Tendency explicit_drift(const State& U, const Tendency& F, const PhysParams& params);

struct TrajectoryResult {
    State final_state;
    std::optional<State> split_final;  // U_hat + U_check in split and both modes
    std::vector<DiagnosticsRecord> records;
    bool blowup = false;
    int steps_taken = 0;
    double max_barotropic_divergence = 0.0;
};

/// Called with (step index, time, state) at each snapshot point.
using SnapshotSink = std::function<void(int, double, const State&)>;

/// Steps the configured mode, recording diagnostics at the cadence.
///
/// The reported state is U in direct and both modes and U_hat + U_check in split
/// mode. Stops cleanly with a flagged final record when blow-up is detected.
TrajectoryResult run_trajectory(const RunConfig& config, const SnapshotSink& sink = {});

} // namespace hsto
