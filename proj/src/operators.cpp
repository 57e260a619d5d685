#include "hsto/operators.hpp"

#include <cmath>

#include "hsto/error.hpp"

namespace hsto {

Tendency::Tendency(const Grid& grid)
    : du(grid, BcKind::velocity), dv(grid, BcKind::velocity), dT(grid, BcKind::tracer),
      dS(grid, BcKind::tracer) {}

Field& Tendency::operator[](Component c) {
    switch (c) {
    case Component::u: return du;
    case Component::v: return dv;
    case Component::T: return dT;
    case Component::S: return dS;
    }
    return du;
}

const Field& Tendency::operator[](Component c) const { return const_cast<Tendency&>(*this)[c]; }

Tendency& Tendency::operator+=(const Tendency& other) {
    axpy(1.0, other);
    return *this;
}

Tendency& Tendency::operator-=(const Tendency& other) {
    axpy(-1.0, other);
    return *this;
}

Tendency& Tendency::operator*=(double a) {
    for (Component c : all_components) (*this)[c] *= a;
    return *this;
}

void Tendency::axpy(double a, const Tendency& x) {
    for (Component c : all_components) (*this)[c].axpy(a, x[c]);
}

void Tendency::fill_ghosts() {
    for (Component c : all_components) hsto::fill_ghosts((*this)[c]);
}

bool Tendency::finite() const {
    for (Component c : all_components)
        if (!(*this)[c].interior_finite()) return false;
    return true;
}

State as_state(const Tendency& t) {
    State s(t.grid());
    for (Component c : all_components) s[c] = t[c];
    return s;
}

Tendency as_tendency(const State& s) {
    Tendency t(s.grid());
    for (Component c : all_components) t[c] = s[c];
    return t;
}

// ---------------------------------------------------------------------------

namespace {

template <class Kernel>
void for_interior(const Grid& g, Kernel&& kernel) {
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j) {
            std::size_t n = g.index(0, j, k);
            for (int i = 0; i < g.n1(); ++i, ++n) kernel(n);
        }
}

Field centred_difference(const Field& f, std::ptrdiff_t stride, double spacing) {
    Field out(f.grid(), f.bc());
    const double c = 0.5 / spacing;
    for_interior(f.grid(), [&](std::size_t n) { out[n] = c * (f[n + stride] - f[n - stride]); });
    return out;
}

} // namespace

Field ddx1(const Field& f) { return centred_difference(f, f.grid().stride_x(), f.grid().dx1()); }
Field ddx2(const Field& f) { return centred_difference(f, f.grid().stride_y(), f.grid().dx2()); }
Field ddz(const Field& f) { return centred_difference(f, f.grid().stride_z(), f.grid().dz()); }

Field integrate_to_surface(const Field& src) {
    const Grid& g = src.grid();
    Field out(g, BcKind::tracer);
    const double dz = g.dz();
    for (int j = 0; j < g.n2(); ++j)
        for (int i = 0; i < g.n1(); ++i) {
            double above = 0.0;
            for (int k = g.nz() - 1; k >= 0; --k) {
                const double s = src(i, j, k);
                out(i, j, k) = above + 0.5 * dz * s;
                above += dz * s;
            }
        }
    return out;
}

Field diffusion(const Field& f, Diffusivity coef) {
    const Grid& g = f.grid();
    Field out(g, f.bc());
    const double cx = coef.mu / (g.dx1() * g.dx1());
    const double cy = coef.mu / (g.dx2() * g.dx2());
    const double cz = coef.nu / (g.dz() * g.dz());
    const std::ptrdiff_t sx = g.stride_x(), sy = g.stride_y(), sz = g.stride_z();
    for_interior(g, [&](std::size_t n) {
        const double c = f[n];
        out[n] = -cx * (f[n + sx] - 2.0 * c + f[n - sx]) - cy * (f[n + sy] - 2.0 * c + f[n - sy]) -
                 cz * (f[n + sz] - 2.0 * c + f[n - sz]);
    });
    return out;
}

Field density(const Field& T_anom, const Field& S_anom, const PhysParams& params) {
    Field rho(T_anom.grid(), BcKind::tracer);
    for_interior(T_anom.grid(), [&](std::size_t n) {
        rho[n] = params.rho0 * (1.0 + params.beta_T * T_anom[n] + params.beta_S * S_anom[n]);
    });
    fill_ghosts(rho);
    return rho;
}

Field diagnostic_w(const Field& u, const Field& v) {
    const Grid& g = u.grid();
    if (!(g == v.grid())) throw Error(ErrorKind::grid_mismatch, "u and v on different grids");
    Field div(g, BcKind::tracer);
    const double cx = 0.5 / g.dx1(), cy = 0.5 / g.dx2();
    const std::ptrdiff_t sx = g.stride_x(), sy = g.stride_y();
    for_interior(g, [&](std::size_t n) {
        div[n] = cx * (u[n + sx] - u[n - sx]) + cy * (v[n + sy] - v[n - sy]);
    });
    return integrate_to_surface(div);
}

Field hydrostatic_pressure(const Field& T_anom, const Field& S_anom, const SurfaceField& p_s,
                           const PhysParams& params) {
    const Grid& g = T_anom.grid();
    Field p = integrate_to_surface(density(T_anom, S_anom, params));
    p *= params.g;
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j)
            for (int i = 0; i < g.n1(); ++i) p(i, j, k) += p_s(i, j);
    fill_ghosts(p);
    return p;
}

Tendency apply_A(const State& U, const PhysParams& params) {
    Tendency out(U.grid());
    for (Component c : all_components) out[c] = diffusion(U[c], params.diffusivity(c));
    out.fill_ghosts();
    return out;
}

Tendency apply_B(const State& U, const State& U_sharp) {
    const Grid& g = U.grid();
    if (!(g == U_sharp.grid())) throw Error(ErrorKind::grid_mismatch, "B operands on different grids");
    const Field w = diagnostic_w(U.u, U.v);
    const double cx = 0.5 / g.dx1(), cy = 0.5 / g.dx2(), cz = 0.5 / g.dz();
    const std::ptrdiff_t sx = g.stride_x(), sy = g.stride_y(), sz = g.stride_z();
    Tendency out(g);
    for (Component c : all_components) {
        const Field& phi = U_sharp[c];
        Field& dst = out[c];
        for_interior(g, [&](std::size_t n) {
            dst[n] = U.u[n] * cx * (phi[n + sx] - phi[n - sx]) +
                     U.v[n] * cy * (phi[n + sy] - phi[n - sy]) +
                     w[n] * cz * (phi[n + sz] - phi[n - sz]);
        });
    }
    out.fill_ghosts();
    return out;
}

Tendency apply_Ap(const State& U, const PhysParams& params) {
    const Grid& g = U.grid();
    Tendency out(g);
    const double cx = 0.5 / g.dx1(), cy = 0.5 / g.dx2();
    const std::ptrdiff_t sx = g.stride_x(), sy = g.stride_y();
    Field bx(g, BcKind::tracer), by(g, BcKind::tracer);
    for_interior(g, [&](std::size_t n) {
        bx[n] = cx * (params.beta_T * (U.T[n + sx] - U.T[n - sx]) +
                      params.beta_S * (U.S[n + sx] - U.S[n - sx]));
        by[n] = cy * (params.beta_T * (U.T[n + sy] - U.T[n - sy]) +
                      params.beta_S * (U.S[n + sy] - U.S[n - sy]));
    });
    const Field ix = integrate_to_surface(bx);
    const Field iy = integrate_to_surface(by);
    for_interior(g, [&](std::size_t n) {
        out.du[n] = -params.g * ix[n];
        out.dv[n] = -params.g * iy[n];
    });
    out.fill_ghosts();
    return out;
}

Tendency apply_E(const State& U, const PhysParams& params) {
    Tendency out(U.grid());
    for_interior(U.grid(), [&](std::size_t n) {
        out.du[n] = -params.f * U.v[n];
        out.dv[n] = params.f * U.u[n];
    });
    out.fill_ghosts();
    return out;
}

std::pair<SurfaceField, SurfaceField> surface_gradient(const SurfaceField& p_in) {
    SurfaceField p = p_in;
    p.fill_ghosts();
    const Grid& g = p.grid();
    SurfaceField gx(g, SurfaceField::Bc::dirichlet), gy(g, SurfaceField::Bc::dirichlet);
    const double cx = 0.5 / g.dx1(), cy = 0.5 / g.dx2();
    for (int j = 0; j < g.n2(); ++j)
        for (int i = 0; i < g.n1(); ++i) {
            gx(i, j) = cx * (p(i + 1, j) - p(i - 1, j));
            gy(i, j) = cy * (p(i, j + 1) - p(i, j - 1));
        }
    gx.fill_ghosts();
    gy.fill_ghosts();
    return {gx, gy};
}

Tendency full_drift(const State& U, const Tendency& F, const SurfaceField& p_s,
                    const PhysParams& params) {
    Tendency drift = F;
    drift -= apply_A(U, params);
    if (params.advection) drift -= apply_B(U, U);
    drift -= apply_Ap(U, params);
    drift -= apply_E(U, params);
    const auto [gx, gy] = surface_gradient(p_s);
    const Grid& g = U.grid();
    const double inv_rho = 1.0 / params.rho0;
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j)
            for (int i = 0; i < g.n1(); ++i) {
                drift.du(i, j, k) -= inv_rho * gx(i, j);
                drift.dv(i, j, k) -= inv_rho * gy(i, j);
            }
    drift.fill_ghosts();
    return drift;
}

} // namespace hsto
