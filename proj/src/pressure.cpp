#include "hsto/pressure.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "hsto/error.hpp"

namespace hsto {

SurfaceField vertical_average(const Field& f) {
    const Grid& g = f.grid();
    SurfaceField avg(g, f.bc() == BcKind::velocity ? SurfaceField::Bc::dirichlet
                                                   : SurfaceField::Bc::neumann);
    const double inv = 1.0 / g.nz();
    for (int j = 0; j < g.n2(); ++j)
        for (int i = 0; i < g.n1(); ++i) {
            double s = 0.0;
            for (int k = 0; k < g.nz(); ++k) s += f(i, j, k);
            avg(i, j) = s * inv;
        }
    avg.fill_ghosts();
    return avg;
}

SurfaceField surface_divergence(const SurfaceField& qx_in, const SurfaceField& qy_in) {
    SurfaceField qx = qx_in, qy = qy_in;
    qx.fill_ghosts();
    qy.fill_ghosts();
    const Grid& g = qx.grid();
    SurfaceField div(g, SurfaceField::Bc::neumann);
    const double cx = 0.5 / g.dx1(), cy = 0.5 / g.dx2();
    for (int j = 0; j < g.n2(); ++j)
        for (int i = 0; i < g.n1(); ++i)
            div(i, j) = cx * (qx(i + 1, j) - qx(i - 1, j)) + cy * (qy(i, j + 1) - qy(i, j - 1));
    div.fill_ghosts();
    return div;
}

SurfaceField barotropic_divergence(const State& U) {
    return surface_divergence(vertical_average(U.u), vertical_average(U.v));
}

SurfaceField surface_laplacian(const SurfaceField& p) {
    const auto [gx, gy] = surface_gradient(p);
    return surface_divergence(gx, gy);
}

namespace {

// y = -div(grad x); refreshes the Neumann ghosts of x.
void negative_laplacian(SurfaceField& x, SurfaceField& y, SurfaceField& gx, SurfaceField& gy) {
    const Grid& g = x.grid();
    const int N1 = g.n1(), N2 = g.n2();
    x.fill_ghosts();
    const double cx = 0.5 / g.dx1(), cy = 0.5 / g.dx2();
    for (int j = 0; j < N2; ++j)
        for (int i = 0; i < N1; ++i) {
            gx(i, j) = cx * (x(i + 1, j) - x(i - 1, j));
            gy(i, j) = cy * (x(i, j + 1) - x(i, j - 1));
        }
    gx.fill_ghosts();
    gy.fill_ghosts();
    for (int j = 0; j < N2; ++j)
        for (int i = 0; i < N1; ++i)
            y(i, j) = -(cx * (gx(i + 1, j) - gx(i - 1, j)) + cy * (gy(i, j + 1) - gy(i, j - 1)));
}

double interior_dot(const SurfaceField& a, const SurfaceField& b) {
    double s = 0.0;
    for (int j = 0; j < a.n2(); ++j)
        for (int i = 0; i < a.n1(); ++i) s += a(i, j) * b(i, j);
    return s;
}

} // namespace

PoissonSolve solve_neumann_poisson(const SurfaceField& rhs, double tol, bool keep_history) {
    const Grid& g = rhs.grid();
    SurfaceField gx(g, SurfaceField::Bc::dirichlet), gy(g, SurfaceField::Bc::dirichlet);
    SurfaceField b = rhs;
    b *= -1.0;
    SurfaceField x(g, SurfaceField::Bc::neumann);
    CgOptions opt;
    opt.tol = tol;
    opt.max_iter = 10 * g.n1() * g.n2();
    opt.keep_history = keep_history;
    auto apply = [&](SurfaceField& in, SurfaceField& out) { negative_laplacian(in, out, gx, gy); };
    auto deflate = [](SurfaceField& r) { r.subtract_mean(); };
    CgResult cg = conjugate_residual(apply, b, x, opt, interior_dot, deflate);
    x.subtract_mean();
    return {std::move(x), std::move(cg)};
}

namespace {

// Momentum drift without the surface-pressure gradient.
Tendency non_pressure_drift(const State& U, const Tendency& F, const PhysParams& params) {
    Tendency drift = F;
    drift -= apply_A(U, params);
    if (params.advection) drift -= apply_B(U, U);
    drift -= apply_Ap(U, params);
    drift -= apply_E(U, params);
    return drift;
}

} // namespace

SurfaceField solve_surface_pressure(const State& U, const Tendency& F, const PhysParams& params,
                                    double tol, CgResult* info) {
    const Tendency drift = non_pressure_drift(U, F, params);
    SurfaceField rhs = surface_divergence(vertical_average(drift.du), vertical_average(drift.dv));
    rhs *= params.rho0;
    PoissonSolve solve = solve_neumann_poisson(rhs, tol);
    if (info) *info = solve.cg;
    solve.solution.fill_ghosts();
    return solve.solution;
}

SurfaceField project_barotropic(State& U, double tol, CgResult* info) {
    const Grid& g = U.grid();
    const SurfaceField rhs = barotropic_divergence(U);
    PoissonSolve solve = solve_neumann_poisson(rhs, tol);
    if (info) *info = solve.cg;
    const auto [gx, gy] = surface_gradient(solve.solution);
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j)
            for (int i = 0; i < g.n1(); ++i) {
                U.u(i, j, k) -= gx(i, j);
                U.v(i, j, k) -= gy(i, j);
            }
    fill_ghosts(U.u);
    fill_ghosts(U.v);
    return std::move(solve.solution);
}

std::pair<SurfaceField, SurfaceField> averaged_forcing_G(const State& U, const Tendency& F,
                                                         const PhysParams& params) {
    const Grid& g = U.grid();
    const Field ux = ddx1(U.u), uy = ddx2(U.u);
    const Field vx = ddx1(U.v), vy = ddx2(U.v);
    Field adv_u(g, BcKind::velocity), adv_v(g, BcKind::velocity);
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j)
            for (int i = 0; i < g.n1(); ++i) {
                const double u = U.u(i, j, k), v = U.v(i, j, k);
                const double div = ux(i, j, k) + vy(i, j, k);
                adv_u(i, j, k) = u * ux(i, j, k) + v * uy(i, j, k) + div * u;
                adv_v(i, j, k) = u * vx(i, j, k) + v * vy(i, j, k) + div * v;
            }
    Tendency rest = F;
    rest -= apply_Ap(U, params);
    rest -= apply_E(U, params);

    SurfaceField gx = vertical_average(rest.du);
    SurfaceField gy = vertical_average(rest.dv);
    gx.axpy(-1.0, vertical_average(adv_u));
    gy.axpy(-1.0, vertical_average(adv_v));
    gx *= params.rho0;
    gy *= params.rho0;
    gx.fill_ghosts();
    gy.fill_ghosts();
    return {gx, gy};
}

// ---------------------------------------------------------------------------
// Stokes pressure estimate

namespace {

constexpr double pi = std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double forcing_component(const std::vector<double>& c, double x, double y, double t, double omega,
                         double phase, double L1, double L2) {
    // c[0..3]: sin(a pi x) sin(b pi y) for (a,b) in {1,2}^2, c[4]: cos(pi x) cos(pi y)
    const double sx1 = std::sin(pi * x / L1), sx2 = std::sin(2 * pi * x / L1);
    const double sy1 = std::sin(pi * y / L2), sy2 = std::sin(2 * pi * y / L2);
    const double steady = c[0] * sx1 * sy1 + c[1] * sx2 * sy1 + c[2] * sx1 * sy2 + c[3] * sx2 * sy2 +
                          c[4] * std::cos(pi * x / L1) * std::cos(pi * y / L2);
    return steady * (1.0 + 0.5 * std::sin(omega * t + phase));
}

// Dirichlet-form seminorm int |grad q|^2 for a component with Dirichlet ghosts.
double gradient_energy(const SurfaceField& q_in) {
    SurfaceField q = q_in;
    q.fill_ghosts();
    const Grid& g = q.grid();
    const int N1 = g.n1(), N2 = g.n2();
    double sx = 0.0, sy = 0.0;
    for (int j = 0; j < N2; ++j)
        for (int i = -1; i < N1; ++i) {
            const double w = (i == -1 || i == N1 - 1) ? 0.5 : 1.0;
            const double d = q(i + 1, j) - q(i, j);
            sx += w * d * d;
        }
    for (int j = -1; j < N2; ++j)
        for (int i = 0; i < N1; ++i) {
            const double w = (j == -1 || j == N2 - 1) ? 0.5 : 1.0;
            const double d = q(i, j + 1) - q(i, j);
            sy += w * d * d;
        }
    return (sx / (g.dx1() * g.dx1()) + sy / (g.dx2() * g.dx2())) * g.cell_area();
}

double vector_lr_norm(const SurfaceField& a, const SurfaceField& b, double r) {
    double s = 0.0;
    for (int j = 0; j < a.n2(); ++j)
        for (int i = 0; i < a.n1(); ++i) {
            const double m2 = a(i, j) * a(i, j) + b(i, j) * b(i, j);
            s += std::pow(m2, 0.5 * r);
        }
    return std::pow(s * a.grid().cell_area(), 1.0 / r);
}

// (I - c lap) x with Dirichlet ghosts; refreshes the ghosts of x.
void helmholtz_2d(SurfaceField& x, SurfaceField& y, double c) {
    x.fill_ghosts();
    const Grid& g = x.grid();
    const double cx = c / (g.dx1() * g.dx1()), cy = c / (g.dx2() * g.dx2());
    for (int j = 0; j < g.n2(); ++j)
        for (int i = 0; i < g.n1(); ++i) {
            const double m = x(i, j);
            y(i, j) = m - cx * (x(i + 1, j) - 2 * m + x(i - 1, j)) -
                      cy * (x(i, j + 1) - 2 * m + x(i, j - 1));
        }
}

} // namespace

double StokesCase::forcing_x(double x, double y, double t, double L1, double L2) const {
    return forcing_component(fx, x, y, t, omega, phase, L1, L2);
}

double StokesCase::forcing_y(double x, double y, double t, double L1, double L2) const {
    return forcing_component(fy, x, y, t, omega, phase, L1, L2);
}

double StokesCase::q0_x(double x, double y, double L1, double L2) const {
    // psi = sin^2(pi x) sin^2(pi y); q = (d psi / dy, -d psi / dx)
    const double sx = std::sin(pi * x / L1), sy = std::sin(pi * y / L2);
    return q0_amplitude * sx * sx * 2 * sy * std::cos(pi * y / L2) * pi / L2;
}

double StokesCase::q0_y(double x, double y, double L1, double L2) const {
    const double sx = std::sin(pi * x / L1), sy = std::sin(pi * y / L2);
    return -q0_amplitude * sy * sy * 2 * sx * std::cos(pi * x / L1) * pi / L1;
}

std::vector<StokesCase> make_stokes_cases(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<StokesCase> cases;
    cases.reserve(count);
    for (int n = 0; n < count; ++n) {
        StokesCase c;
        c.id = n;
        c.fx.resize(5);
        c.fy.resize(5);
        for (double& a : c.fx) a = uniform(rng, -1.0, 1.0);
        for (double& a : c.fy) a = uniform(rng, -1.0, 1.0);
        c.omega = uniform(rng, 0.5, 6.0);
        c.phase = uniform(rng, 0.0, 2 * pi);
        c.q0_amplitude = (n % 2 == 0) ? uniform(rng, -0.2, 0.2) : 0.0;
        cases.push_back(std::move(c));
    }
    return cases;
}

std::vector<StokesRatio> stokes_pressure_check(const std::vector<StokesCase>& cases,
                                               const StokesCheckOptions& o) {
    if (!(o.r > 1.0 && o.r < 2.0)) {
        throw Error(ErrorKind::invalid_value, "pressure estimate exponent r must lie in (1, 2)");
    }
    if (!(o.horizon > 0.0) || o.steps < 1) {
        throw Error(ErrorKind::invalid_value, "pressure check needs horizon > 0 and steps >= 1");
    }
    const Grid g(GridSpec{o.L1, o.L2, 1.0, o.N, o.N, 4});
    const double dt = o.horizon / o.steps;
    std::vector<StokesRatio> rows;
    rows.reserve(cases.size());

    for (const StokesCase& sc : cases) {
        SurfaceField qx(g, SurfaceField::Bc::dirichlet), qy(g, SurfaceField::Bc::dirichlet);
        for (int j = 0; j < g.n2(); ++j)
            for (int i = 0; i < g.n1(); ++i) {
                qx(i, j) = sc.q0_x(g.x1(i), g.x2(j), o.L1, o.L2);
                qy(i, j) = sc.q0_y(g.x1(i), g.x2(j), o.L1, o.L2);
            }
        qx.fill_ghosts();
        qy.fill_ghosts();

        double lhs = 0.0;
        double rhs = gradient_energy(qx) + gradient_energy(qy);
        SurfaceField fx(g, SurfaceField::Bc::dirichlet), fy(g, SurfaceField::Bc::dirichlet);
        CgOptions opt;
        opt.tol = o.tol;
        opt.max_iter = 10 * g.n1() * g.n2();
        const double c = dt * o.nu;
        auto apply = [c](SurfaceField& in, SurfaceField& out) { helmholtz_2d(in, out, c); };
        auto no_deflation = [](SurfaceField&) {};

        for (int n = 1; n <= o.steps; ++n) {
            const double t = n * dt;
            for (int j = 0; j < g.n2(); ++j)
                for (int i = 0; i < g.n1(); ++i) {
                    fx(i, j) = sc.forcing_x(g.x1(i), g.x2(j), t, o.L1, o.L2);
                    fy(i, j) = sc.forcing_y(g.x1(i), g.x2(j), t, o.L1, o.L2);
                }
            SurfaceField bx = qx, by = qy;
            bx.axpy(dt, fx);
            by.axpy(dt, fy);
            conjugate_gradient(apply, bx, qx, opt, interior_dot, no_deflation);
            conjugate_gradient(apply, by, qy, opt, interior_dot, no_deflation);

            PoissonSolve phi = solve_neumann_poisson(surface_divergence(qx, qy), o.tol);
            auto [px, py] = surface_gradient(phi.solution);
            qx.axpy(-1.0, px);
            qy.axpy(-1.0, py);
            qx.fill_ghosts();
            qy.fill_ghosts();
            px *= 1.0 / dt;
            py *= 1.0 / dt;
            const double gp = vector_lr_norm(px, py, o.r);
            const double fr = vector_lr_norm(fx, fy, o.r);
            lhs += dt * gp * gp;
            rhs += dt * fr * fr;
        }
        rows.push_back({sc.id, lhs, rhs, rhs > 0.0 ? lhs / rhs : 0.0, o.N});
    }
    return rows;
}

void write_stokes_csv(std::ostream& out, const std::vector<StokesRatio>& rows) {
    out << "case_id,lhs,rhs,ratio,grid_N\n";
    out.precision(17);
    for (const StokesRatio& r : rows)
        out << r.case_id << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << ',' << r.grid_N << '\n';
}

} // namespace hsto
