#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "hsto/cg.hpp"
#include "hsto/grid.hpp"
#include "hsto/operators.hpp"

namespace hsto {

/// Column mean (1/h) int_{-h}^0 f dz by the midpoint rule.
SurfaceField vertical_average(const Field& f);

/// Centred divergence of a horizontal vector field with homogeneous Dirichlet ghosts.
SurfaceField surface_divergence(const SurfaceField& qx, const SurfaceField& qy);

/// Divergence of the vertical mean of (u, v); zero at every node for admissible states.
SurfaceField barotropic_divergence(const State& U);

/// div(grad p) with the Neumann ghost for p and the Dirichlet ghost for grad p.
SurfaceField surface_laplacian(const SurfaceField& p);

struct PoissonSolve {
    SurfaceField solution;
    CgResult cg;
};

/// Solves div(grad p) = rhs with homogeneous Neumann data; returns the zero-mean solution.
///
/// Conjugate residual iteration with mean deflation; the cap is 10 * N1 * N2. `rhs`
/// must be orthogonal to constants up to rounding (its mean is removed).
PoissonSolve solve_neumann_poisson(const SurfaceField& rhs, double tol = 1e-10,
                                   bool keep_history = false);

/// Surface pressure p_s making the vertical mean of the momentum drift divergence-free.
///
/// Solves div(grad p_s / rho0) = div(A(non-pressure momentum tendency)) and returns
/// the zero-mean p_s. Throws solver_divergence when the cap is hit.
SurfaceField solve_surface_pressure(const State& U, const Tendency& F, const PhysParams& params,
                                    double tol = 1e-10, CgResult* info = nullptr);

/// Removes the gradient part of the vertical mean of (u, v) in place.
///
/// Returns the potential phi with v <- v - grad phi at every level; the matching
/// surface pressure of a step of length dt is rho0 * phi / dt.
SurfaceField project_barotropic(State& U, double tol = 1e-10, CgResult* info = nullptr);

/// G(U) = G1(U) + G2(U), the forcing of the vertically averaged Stokes system.
std::pair<SurfaceField, SurfaceField> averaged_forcing_G(const State& U, const Tendency& F,
                                                         const PhysParams& params);

// --- Stokes pressure estimate ----------------------------------------------

/// One smooth, time-dependent forcing and initial velocity on M0 = [0,L1] x [0,L2].
struct StokesCase {
    int id = 0;
    // forcing: sum of four sine modes per component plus one boundary-active cosine mode
    std::vector<double> fx, fy;
    double omega = 1.0;
    double phase = 0.0;
    // initial velocity q0 = amplitude * curl(sin^2 sin^2)
    double q0_amplitude = 0.0;

    double forcing_x(double x, double y, double t, double L1, double L2) const;
    double forcing_y(double x, double y, double t, double L1, double L2) const;
    double q0_x(double x, double y, double L1, double L2) const;
    double q0_y(double x, double y, double L1, double L2) const;
};

/// Deterministic family of randomized smooth cases.
std::vector<StokesCase> make_stokes_cases(int count, std::uint64_t seed);

struct StokesRatio {
    int case_id = 0;
    double lhs = 0.0;  // int |grad p|_{L^r}^2 ds
    double rhs = 0.0;  // ||q(t0)||^2 + int |f|_{L^r}^2 ds
    double ratio = 0.0;
    int grid_N = 0;
};

struct StokesCheckOptions {
    double L1 = 1.0;
    double L2 = 1.0;
    int N = 16;
    double nu = 0.1;
    double r = 4.0 / 3.0;
    double horizon = 1.0;
    int steps = 512;
    double tol = 1e-10;
};

/// Integrates dq/dt - nu lap q + grad p = f, div q = 0, q = 0 on the boundary by
/// implicit Euler with a pressure projection and reports both sides of the
/// L^2_t L^r_x pressure estimate per case. r must lie in (1, 2).
std::vector<StokesRatio> stokes_pressure_check(const std::vector<StokesCase>& cases,
                                               const StokesCheckOptions& options);

void write_stokes_csv(std::ostream& out, const std::vector<StokesRatio>& rows);

} // namespace hsto
