#pragma once

#include "hsto/grid.hpp"
#include "hsto/params.hpp"

namespace hsto {

/// Time derivative contribution for every prognostic component.
struct Tendency {
    explicit Tendency(const Grid& grid);

    Field du, dv, dT, dS;

    const Grid& grid() const { return du.grid(); }
    Field& operator[](Component c);
    const Field& operator[](Component c) const;

    Tendency& operator+=(const Tendency& other);
    Tendency& operator-=(const Tendency& other);
    Tendency& operator*=(double a);
    void axpy(double a, const Tendency& x);
    void fill_ghosts();
    bool finite() const;
};

/// View of a tendency as a state (same component layout) and back.
State as_state(const Tendency& t);
Tendency as_tendency(const State& s);

// --- discrete calculus -----------------------------------------------------

/// Centred horizontal/vertical first differences at cell centres (ghosts must be filled).
Field ddx1(const Field& f);
Field ddx2(const Field& f);
Field ddz(const Field& f);

/// Vertical midpoint integral from the cell centre up to the surface, int_z^0 src dz'.
Field integrate_to_surface(const Field& src);

/// -mu * (d11 + d22) f - nu * d33 f with the compact three-point stencils.
Field diffusion(const Field& f, Diffusivity coef);

// --- operators of the abstract equation -------------------------------------

/// rho = rho0 (1 + beta_T T' + beta_S S') for anomaly fields T', S'.
Field density(const Field& T_anom, const Field& S_anom, const PhysParams& params);

/// w(v) = int_z^0 div v dz'; zero at the surface by construction.
Field diagnostic_w(const Field& u, const Field& v);

/// p(z) = p_s + g int_z^0 rho dz'.
Field hydrostatic_pressure(const Field& T_anom, const Field& S_anom, const SurfaceField& p_s,
                           const PhysParams& params);

Tendency apply_A(const State& U, const PhysParams& params);

/// B(U, U#) = (v . grad) U# + w(v) dz U#, convective form.
Tendency apply_B(const State& U, const State& U_sharp);

/// Momentum part -g int_z^0 (beta_T grad T + beta_S grad S) dz'; zero on tracers.
Tendency apply_Ap(const State& U, const PhysParams& params);

/// Coriolis term f k x v = f (-v, u); zero on tracers.
Tendency apply_E(const State& U, const PhysParams& params);

/// Centred gradient of a Neumann surface field (filled in place).
std::pair<SurfaceField, SurfaceField> surface_gradient(const SurfaceField& p);

/// F - A U - B(U, U) - A_p U - E U - grad p_s / rho0.
///
/// B is skipped when params.advection is false.
Tendency full_drift(const State& U, const Tendency& F, const SurfaceField& p_s,
                    const PhysParams& params);

} // namespace hsto
