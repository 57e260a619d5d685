#include "hsto/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "hsto/diagnostics.hpp"
#include "hsto/error.hpp"
#include "hsto/pressure.hpp"

namespace hsto {

namespace {

constexpr double pi = std::numbers::pi;

void remove_mean(Field& f) {
    const Grid& g = f.grid();
    const double mean = f.interior_sum() / static_cast<double>(g.interior_count());
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j)
            for (int i = 0; i < g.n1(); ++i) f(i, j, k) -= mean;
    fill_ghosts(f);
}

} // namespace

State random_smooth_state(const Grid& g, std::uint64_t seed, int index, bool project) {
    const GaussianStream rng(seed, 7);
    std::uint64_t ctr = 0;
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * rng.uniform(ctr++, static_cast<std::uint32_t>(index));
    };
    const double L1 = g.spec().L1, L2 = g.spec().L2, h = g.depth();
    State U(g);

    // barotropic part: curl of a stream function vanishing to second order on the walls
    const double c = uni(0.5, 2.0), b1 = uni(-1, 1), b2 = uni(-1, 1), q1 = uni(0, 2 * pi), q2 = uni(0, 2 * pi);
    auto psi_parts = [=](double x, double y) {
        const double sx = std::sin(pi * x / L1), cx = std::cos(pi * x / L1);
        const double sy = std::sin(pi * y / L2), cy = std::cos(pi * y / L2);
        const double q = std::exp(b1 * std::cos(pi * x / L1 + q1) + b2 * std::cos(pi * y / L2 + q2));
        const double qx = -b1 * pi / L1 * std::sin(pi * x / L1 + q1);
        const double qy = -b2 * pi / L2 * std::sin(pi * y / L2 + q2);
        const double dpx = c * q * sy * sy * (2 * pi / L1 * sx * cx + sx * sx * qx);
        const double dpy = c * q * sx * sx * (2 * pi / L2 * sy * cy + sy * sy * qy);
        return std::pair{dpx, dpy};
    };

    for (Component comp : all_components) {
        const double amp = uni(0.5, 1.5);
        const double a1 = uni(-1, 1), a2 = uni(-1, 1), p1 = uni(0, 2 * pi), p2 = uni(0, 2 * pi);
        const double d0 = uni(-1, 1), d1 = uni(-1, 1), d2 = uni(-0.5, 0.5);
        const double e = uni(-0.5, 0.5);
        const int k1 = 1 + static_cast<int>(uni(0, 3)), k2 = 1 + static_cast<int>(uni(0, 3));
        const int m = 1 + static_cast<int>(uni(0, 2));
        if (is_velocity(comp)) {
            const bool is_u = comp == Component::u;
            U[comp] = Field::from_function(g, BcKind::velocity, [=](double x, double y, double z) {
                const double zeta = pi * (z + h) / h;
                const double wall = std::sin(pi * x / L1) * std::sin(pi * y / L2);
                const double body = std::exp(a1 * std::cos(pi * x / L1 + p1) + a2 * std::cos(pi * y / L2 + p2));
                const auto [dpx, dpy] = psi_parts(x, y);
                return amp * wall * body * (d1 * std::cos(zeta) + d2 * std::cos(2 * zeta)) +
                       e * std::sin(k1 * pi * x / L1) * std::sin(k2 * pi * y / L2) * std::cos(m * zeta) +
                       (is_u ? dpy : -dpx);
            });
        } else {
            U[comp] = Field::from_function(g, BcKind::tracer, [=](double x, double y, double z) {
                const double zeta = pi * (z + h) / h;
                const double body = std::exp(a1 * std::cos(pi * x / L1) + a2 * std::cos(pi * y / L2));
                return amp * body * (d0 + d1 * std::cos(zeta) + d2 * std::cos(2 * zeta)) +
                       e * std::cos(k1 * pi * x / L1) * std::cos(k2 * pi * y / L2) * std::cos(m * zeta);
            });
        }
        fill_ghosts(U[comp]);
    }
    remove_mean(U.T);
    remove_mean(U.S);
    if (project) project_barotropic(U);
    apply_bcs_in_place(U);
    return U;
}

// ---------------------------------------------------------------------------
// Gronwall

namespace {

void check_input(const GronwallInput& in) {
    const std::size_t n = in.f.size();
    if (!(in.t > 0.0) || !(in.p >= 1.0)) {
        throw Error(ErrorKind::invalid_value, "gronwall input needs t > 0 and p >= 1");
    }
    if (n < 2 || in.g.size() != n || in.h.size() != n || in.X.size() != n) {
        throw Error(ErrorKind::invalid_value, "gronwall samples f, g, h, X must share a length >= 2");
    }
    for (std::size_t l = 0; l < n; ++l) {
        if (!(in.f[l] >= 0 && in.g[l] >= 0 && in.h[l] >= 0 && in.X[l] >= 0) ||
            !std::isfinite(in.f[l] + in.g[l] + in.h[l] + in.X[l])) {
            throw Error(ErrorKind::invalid_value, "gronwall samples must be finite and non-negative");
        }
    }
}

std::vector<double> cumulative(const std::vector<double>& v, double dt) {
    std::vector<double> c(v.size(), 0.0);
    for (std::size_t l = 1; l < v.size(); ++l) c[l] = c[l - 1] + 0.5 * dt * (v[l - 1] + v[l]);
    return c;
}

} // namespace

GronwallResult gronwall_bound(const GronwallInput& in) {
    check_input(in);
    const int S = static_cast<int>(in.f.size()) - 1;
    const double dt = in.t / S;
    const std::vector<double> G = cumulative(in.g, dt);
    const std::vector<double> H = cumulative(in.h, dt);

    GronwallResult r;
    // largest window span m (in samples) with every integral of g below 1/2
    int m_star = 0;
    for (int m = 1; m <= S; ++m) {
        double worst = 0.0;
        for (int i = 0; i + m <= S; ++i) worst = std::max(worst, G[i + m] - G[i]);
        if (!(worst < 0.5)) break;
        m_star = m;
    }
    if (m_star == S) {
        r.epsilon = std::numeric_limits<double>::infinity();
        r.n = 1;
    } else {
        if (m_star == 0) {
            throw Error(ErrorKind::invalid_value, "g is under-resolved: one sample step integrates to >= 1/2");
        }
        r.epsilon = m_star * dt;
        r.n = static_cast<int>(std::floor(2.0 * in.t / r.epsilon)) + 1;
    }

    // minimal M above max(2, |f(0)|) whose exceedance set has measure < t / (4n)
    const double budget = in.t / (4.0 * r.n);
    int allowed = static_cast<int>(std::ceil(budget / dt)) - 1;
    allowed = std::max(allowed, 0);
    std::vector<double> sorted(in.f.size());
    std::transform(in.f.begin(), in.f.end(), sorted.begin(), [](double x) { return std::abs(x); });
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double M = std::max(2.0, std::abs(in.f.front()));
    if (allowed < static_cast<int>(sorted.size())) M = std::max(M, sorted[allowed]);
    r.M = M + 1e-9;
    r.c = 2.0 * std::pow(r.M, in.p);
    r.int_h = H.back();
    r.bound = r.c * (1.0 + r.int_h);
    return r;
}

std::optional<GronwallViolation> check_gronwall_hypothesis(const GronwallInput& in) {
    check_input(in);
    const int S = static_cast<int>(in.f.size()) - 1;
    const double dt = in.t / S;
    const std::vector<double> G = cumulative(in.g, dt);
    const std::vector<double> H = cumulative(in.h, dt);
    for (int a = 0; a <= S; ++a) {
        const double fa = std::pow(in.f[a], in.p);
        double sup = 0.0;
        for (int b = a; b <= S; ++b) {
            sup = std::max(sup, in.X[b]);
            const double rhs = fa + sup * (G[b] - G[a]) + (H[b] - H[a]);
            if (sup > rhs * (1.0 + 1e-12)) return GronwallViolation{a, b, sup, rhs};
        }
    }
    return std::nullopt;
}

GronwallResult gronwall_bound_checked(const GronwallInput& in) {
    if (const auto v = check_gronwall_hypothesis(in)) {
        throw Error(ErrorKind::hypothesis_violation,
                    "hypothesis fails on window [" + std::to_string(v->a) + ", " + std::to_string(v->b) +
                        "]: sup X = " + std::to_string(v->lhs) + " > " + std::to_string(v->rhs));
    }
    return gronwall_bound(in);
}

GronwallInput generate_gronwall_instance(std::uint64_t seed, int index, int samples) {
    if (samples < 3) throw Error(ErrorKind::invalid_value, "gronwall instance needs >= 3 samples");
    const GaussianStream rng(seed, 11);
    std::uint64_t ctr = 0;
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * rng.uniform(ctr++, static_cast<std::uint32_t>(index));
    };
    GronwallInput in;
    in.t = uni(0.5, 4.0);
    const double ps[] = {1.0, 1.5, 2.0, 3.0};
    in.p = ps[static_cast<int>(uni(0, 4)) % 4];
    const int S = samples - 1;
    const double dt = in.t / S;

    const double f0 = uni(0.2, 3.0), f_osc = uni(0.0, 0.8), f_w = uni(0.5, 10.0), f_ph = uni(0, 2 * pi);
    const bool spike = uni(0, 1) < 0.5;
    const double sp_at = uni(0.1, 0.9) * in.t, sp_width = uni(0.002, 0.03) * in.t, sp_h = uni(2.0, 20.0);
    const double G_tot = uni(0.0, 3.0), g_osc = uni(0.0, 0.9), g_w = uni(0.5, 10.0), g_ph = uni(0, 2 * pi);
    const double h_amp = uni(0, 1) < 0.2 ? 0.0 : uni(0.0, 2.0), h_w = uni(0.5, 10.0);
    const double x_w = uni(0.5, 20.0), x_ph = uni(0, 2 * pi), x_lo = uni(0.1, 0.9);

    in.f.resize(samples);
    in.g.resize(samples);
    in.h.resize(samples);
    in.X.resize(samples);
    for (int l = 0; l <= S; ++l) {
        const double s = l * dt;
        double f = f0 * (1.0 + f_osc * std::sin(f_w * s + f_ph));
        if (spike && std::abs(s - sp_at) < sp_width) f += sp_h;
        in.f[l] = f;
        in.g[l] = G_tot / in.t * (1.0 + g_osc * std::sin(g_w * s + g_ph));
        in.h[l] = h_amp * (1.0 + 0.5 * std::cos(h_w * s));
    }
    const std::vector<double> G = cumulative(in.g, dt);
    const std::vector<double> H = cumulative(in.h, dt);
    for (int l = 0; l <= S; ++l) {
        double B = std::numeric_limits<double>::infinity();
        for (int i = l; i >= 0; --i) {
            const double gi = G[l] - G[i];
            if (gi >= 1.0) break;
            B = std::min(B, (std::pow(in.f[i], in.p) + H[l] - H[i]) / (1.0 - gi));
        }
        const double u = x_lo + (1.0 - x_lo) * (0.5 + 0.5 * std::sin(x_w * l * dt + x_ph));
        in.X[l] = u * B;
    }
    return in;
}

GronwallSuiteReport gronwall_suite(int count, std::uint64_t seed, int samples) {
    GronwallSuiteReport rep;
    for (int c = 0; c < count; ++c) {
        const GronwallInput in = generate_gronwall_instance(seed, c, samples);
        ++rep.cases;
        if (check_gronwall_hypothesis(in)) continue;
        ++rep.hypothesis_ok;
        const GronwallResult r = gronwall_bound(in);
        const double sup = *std::max_element(in.X.begin(), in.X.end());
        rep.max_ratio = std::max(rep.max_ratio, sup / r.bound);
        if (sup <= r.bound) ++rep.conclusion_ok;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Inequalities

namespace {

void finish_report(RatioReport& rep) {
    double s = 0.0;
    for (double r : rep.ratios) {
        rep.max_ratio = std::max(rep.max_ratio, r);
        s += r;
    }
    rep.mean_ratio = rep.ratios.empty() ? 0.0 : s / rep.ratios.size();
}

double dz_norm2_all(const State& U) {
    double s = 0.0;
    for (Component c : all_components) s += dz_l2_squared(U[c]);
    return s;
}

double dz_vnorm2_all(const State& U, const PhysParams& params) {
    double s = 0.0;
    for (Component c : all_components) s += dz_v_squared(U[c], params.diffusivity(c));
    return s;
}

} // namespace

RatioReport verify_aniso_embedding(std::span<const State> fields, double q, const PhysParams& params) {
    if (!(q >= 2.0)) throw Error(ErrorKind::invalid_value, "embedding exponent q must be >= 2");
    const double s = 1.0 - 2.0 / q;
    RatioReport rep;
    for (const State& U : fields) {
        const double lhs = velocity_norm(U, NormKind::aniso(q, 2.0));
        const double l2 = velocity_norm(U, NormKind::l2());
        const double h1 = velocity_norm(U, NormKind::h1(), params);
        const double rhs = std::pow(l2, 1.0 - s) * std::pow(h1, s);
        if (rhs == 0.0) {
            ++rep.skipped;
            continue;
        }
        rep.ratios.push_back(lhs / rhs);
    }
    finish_report(rep);
    return rep;
}

RatioReport verify_B_bound(std::span<const BTriple> triples, const PhysParams& params) {
    RatioReport rep;
    for (const BTriple& t : triples) {
        const Tendency B = apply_B(t.U, t.U_sharp);
        double lhs = 0.0;
        for (Component c : all_components) lhs += inner(B[c], t.U_flat[c], InnerKind::L2);
        lhs = std::abs(lhs);

        const double flat = norm(t.U_flat, NormKind::l2());
        const double v_l4 = velocity_norm(t.U, NormKind::lp(4.0));
        const double sh_V = norm(t.U_sharp, NormKind::h1(), params);
        const double sh_A = norm(as_state(apply_A(t.U_sharp, params)), NormKind::l2());
        const double v_V = velocity_norm(t.U, NormKind::h1(), params);
        const Tendency Av = apply_A(t.U, params);
        const double v_A = std::sqrt(std::pow(norm(Av.du, NormKind::l2()), 2) +
                                     std::pow(norm(Av.dv, NormKind::l2()), 2));
        const double sh_dz = std::sqrt(dz_norm2_all(t.U_sharp));
        const double sh_dzV = std::sqrt(dz_vnorm2_all(t.U_sharp, params));
        const double rhs = v_l4 * std::pow(sh_V, 0.25) * std::pow(sh_A, 0.75) * flat +
                           std::sqrt(v_V) * std::sqrt(v_A) * std::sqrt(sh_dz) * std::sqrt(sh_dzV) * flat;
        if (rhs == 0.0) {
            if (lhs == 0.0) rep.ratios.push_back(0.0);
            else ++rep.skipped;
            continue;
        }
        rep.ratios.push_back(lhs / rhs);
    }
    finish_report(rep);
    return rep;
}

DissipationCheck verify_dissipation(const State& v_hat, const PhysParams& params) {
    DissipationCheck out;
    out.kappa = std::min(params.mu_v, params.nu_v) / 8.0;
    const Grid& g = v_hat.grid();
    const int N1 = g.n1(), N2 = g.n2(), Nz = g.nz();
    double lhs = 0.0, rhs = 0.0;
    auto face = [&](double a, double b, double d, double coef, double w) {
        const double grad = (b - a) / d;
        const double grad_sq = (b * b - a * a) / d;
        lhs += w * out.kappa * grad_sq * grad_sq;
        rhs += w * 0.5 * coef * grad * grad * 0.5 * (a * a + b * b);
    };
    for (const Field* pf : {&v_hat.u, &v_hat.v}) {
        Field f = *pf;
        fill_ghosts(f);
        for (int k = 0; k < Nz; ++k)
            for (int j = 0; j < N2; ++j)
                for (int i = -1; i < N1; ++i)
                    face(f(i, j, k), f(i + 1, j, k), g.dx1(), params.mu_v,
                         (i == -1 || i == N1 - 1) ? 0.5 : 1.0);
        for (int k = 0; k < Nz; ++k)
            for (int j = -1; j < N2; ++j)
                for (int i = 0; i < N1; ++i)
                    face(f(i, j, k), f(i, j + 1, k), g.dx2(), params.mu_v,
                         (j == -1 || j == N2 - 1) ? 0.5 : 1.0);
        for (int k = -1; k < Nz; ++k)
            for (int j = 0; j < N2; ++j)
                for (int i = 0; i < N1; ++i)
                    face(f(i, j, k), f(i, j, k + 1), g.dz(), params.nu_v,
                         (k == -1 || k == Nz - 1) ? 0.5 : 1.0);
    }
    out.lhs = lhs * g.cell_volume();
    out.rhs = rhs * g.cell_volume();
    return out;
}

CancellationResult cancellation_residual(const State& v_in, const State& sharp_in, int r) {
    if (r < 1) throw Error(ErrorKind::invalid_value, "cancellation power r must be >= 1");
    const State v = apply_bcs(v_in);
    const State s = apply_bcs(sharp_in);
    const Grid& g = v.grid();
    const Field w = diagnostic_w(s.u, s.v);
    CancellationResult out;
    for (const Field* pf : {&v.u, &v.v}) {
        const Field& f = *pf;
        const Field fx = ddx1(f), fy = ddx2(f), fz = ddz(f);
        for (int k = 0; k < g.nz(); ++k)
            for (int j = 0; j < g.n2(); ++j)
                for (int i = 0; i < g.n1(); ++i) {
                    const double pw = std::pow(f(i, j, k), r);
                    const double a = s.u(i, j, k) * fx(i, j, k) * pw;
                    const double b = s.v(i, j, k) * fy(i, j, k) * pw;
                    const double c = w(i, j, k) * fz(i, j, k) * pw;
                    out.residual += a + b + c;
                    out.scale += std::abs(a) + std::abs(b) + std::abs(c);
                }
    }
    out.residual *= g.cell_volume();
    out.scale *= g.cell_volume();
    return out;
}

double poincare_constant(std::span<const State> states, const PhysParams& params) {
    double c = 0.0;
    for (const State& U : states) {
        const double v = norm(U, NormKind::h1(), params);
        if (v > 0.0) c = std::max(c, norm(U, NormKind::l2()) / v);
    }
    return c;
}

// ---------------------------------------------------------------------------
// L4 evolution

namespace {

Field cube(const Field& f) {
    Field out = f;
    for (double& x : out.raw()) x = x * x * x;
    fill_ghosts(out);
    return out;
}

} // namespace

L4Sample l4_terms(const State& U_hat_in, const State& U_check_in, const SurfaceField& phi, double dt,
                  const Tendency& F, const PhysParams& params) {
    const State U_hat = apply_bcs(U_hat_in);
    State V = U_hat;
    V += U_check_in;
    apply_bcs_in_place(V);
    const State U_check = apply_bcs(U_check_in);
    const Grid& g = V.grid();

    L4Sample s;
    s.t = U_hat.time;
    s.has_terms = true;
    const Field u3 = cube(U_hat.u), v3 = cube(U_hat.v);
    s.quarter_l4 = 0.25 * std::pow(velocity_norm(U_hat, NormKind::lp(4.0)), 4);
    const Diffusivity dv = params.diffusivity(Component::u);
    s.dissipation = inner(U_hat.u, u3, InnerKind::V, dv) + inner(U_hat.v, v3, InnerKind::V, dv);

    auto vel_dot = [&](const Field& a, const Field& b) {
        return inner(a, u3, InnerKind::L2) + inner(b, v3, InnerKind::L2);
    };
    if (params.advection) {
        const Field w = diagnostic_w(V.u, V.v);
        Field h_u(g, BcKind::velocity), h_v(g, BcKind::velocity), z_u(g, BcKind::velocity),
            z_v(g, BcKind::velocity);
        const Field cux = ddx1(U_check.u), cuy = ddx2(U_check.u), cuz = ddz(U_check.u);
        const Field cvx = ddx1(U_check.v), cvy = ddx2(U_check.v), cvz = ddz(U_check.v);
        for (int k = 0; k < g.nz(); ++k)
            for (int j = 0; j < g.n2(); ++j)
                for (int i = 0; i < g.n1(); ++i) {
                    const double a = V.u(i, j, k), b = V.v(i, j, k), c = w(i, j, k);
                    h_u(i, j, k) = a * cux(i, j, k) + b * cuy(i, j, k);
                    h_v(i, j, k) = a * cvx(i, j, k) + b * cvy(i, j, k);
                    z_u(i, j, k) = c * cuz(i, j, k);
                    z_v(i, j, k) = c * cvz(i, j, k);
                }
        s.J[0] = -vel_dot(h_u, h_v);
        s.J[1] = -vel_dot(z_u, z_v);
        const Tendency Bh = apply_B(V, U_hat);
        s.cancelled = -vel_dot(Bh.du, Bh.dv);
    }
    {
        const auto [gx, gy] = surface_gradient(phi);
        Field px(g, BcKind::velocity), py(g, BcKind::velocity);
        for (int k = 0; k < g.nz(); ++k)
            for (int j = 0; j < g.n2(); ++j)
                for (int i = 0; i < g.n1(); ++i) {
                    px(i, j, k) = gx(i, j) / dt;
                    py(i, j, k) = gy(i, j) / dt;
                }
        s.J[2] = -vel_dot(px, py);
    }
    const Tendency Ap = apply_Ap(V, params);
    s.J[3] = -vel_dot(Ap.du, Ap.dv);
    const Tendency E = apply_E(V, params);
    s.J[4] = -vel_dot(E.du, E.dv);
    s.J[5] = vel_dot(F.du, F.dv);
    return s;
}

std::vector<double> l4_identity_residual(std::span<const L4Sample> series) {
    std::vector<double> out;
    if (series.size() < 2) return out;
    out.reserve(series.size() - 1);
    for (std::size_t n = 0; n + 1 < series.size(); ++n) {
        const L4Sample& s = series[n];
        if (!s.has_terms) {
            throw Error(ErrorKind::missing_terms, "L4 sample " + std::to_string(n) + " lacks right-hand terms");
        }
        const double dt = series[n + 1].t - s.t;
        if (!(dt > 0.0)) throw Error(ErrorKind::unsorted_series, "L4 series is not time-ordered");
        double J = s.cancelled;
        for (double x : s.J) J += x;
        out.push_back((series[n + 1].quarter_l4 - s.quarter_l4) / dt + s.dissipation - J);
    }
    return out;
}

std::vector<L4Sample> split_l4_series(const RunConfig& cfg) {
    cfg.validate();
    const Grid grid = make_grid(cfg.grid);
    const PhysParams& params = cfg.physics;
    const NoiseModel model = NoiseModel::from_spec(grid, params, cfg.noise);
    const Tendency F = make_forcing(grid, cfg.forcing);
    const BrownianPath path(cfg.seed);
    State U_hat = make_initial_state(grid, params, cfg.init);
    State U_check(grid);
    std::vector<L4Sample> out;
    for (int n = 0; n < cfg.steps; ++n) {
        const std::vector<double> dW = path.increment(n, cfg.dt, model.size(), cfg.substeps);
        State full = U_hat;
        full += U_check;
        apply_bcs_in_place(full);
        const State next_check = step_ou(U_check, cfg.dt, model.apply(full, dW), params, nullptr, cfg.tol);
        StepInfo info;
        const State next_hat = step_residual(U_hat, next_check, F, cfg.dt, params, &info, cfg.tol);
        L4Sample s = l4_terms(U_hat, next_check, *info.phi, cfg.dt, F, params);
        s.t = n * cfg.dt;
        out.push_back(s);
        U_hat = next_hat;
        U_check = next_check;
    }
    L4Sample last;
    last.t = cfg.steps * cfg.dt;
    last.quarter_l4 = 0.25 * std::pow(velocity_norm(U_hat, NormKind::lp(4.0)), 4);
    out.push_back(last);
    return out;
}

// ---------------------------------------------------------------------------
// Vertical-gradient balance

namespace {

double dz_inner(const Field& a, const Field& b) {
    const Grid& g = a.grid();
    double s = 0.0;
    for (int k = 0; k + 1 < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j)
            for (int i = 0; i < g.n1(); ++i)
                s += (a(i, j, k + 1) - a(i, j, k)) * (b(i, j, k + 1) - b(i, j, k));
    return s / (g.dz() * g.dz()) * g.cell_volume();
}

template <class Fn>
double over(std::initializer_list<Component> comps, Fn&& fn) {
    double s = 0.0;
    for (Component c : comps) s += fn(c);
    return s;
}

} // namespace

std::vector<DzSample> direct_dz_series(const RunConfig& cfg) {
    cfg.validate();
    const Grid grid = make_grid(cfg.grid);
    const PhysParams& params = cfg.physics;
    const NoiseModel model = NoiseModel::from_spec(grid, params, cfg.noise);
    const Tendency F = make_forcing(grid, cfg.forcing);
    const BrownianPath path(cfg.seed);
    State U = make_initial_state(grid, params, cfg.init);
    const auto vel = {Component::u, Component::v};
    const auto tem = {Component::T};

    std::vector<DzSample> out;
    auto balance = [&](std::initializer_list<Component> comps, const Tendency& N, const Tendency& stoch,
                       const std::vector<Tendency>& cols) {
        DzBalance b;
        b.q = over(comps, [&](Component c) { return dz_l2_squared(U[c]); });
        b.dissipation = 2.0 * over(comps, [&](Component c) { return dz_v_squared(U[c], params.diffusivity(c)); });
        b.drift = 2.0 * over(comps, [&](Component c) { return dz_inner(N[c], U[c]); });
        b.martingale = 2.0 * over(comps, [&](Component c) { return dz_inner(stoch[c], U[c]); });
        for (const Tendency& col : cols) b.ito += over(comps, [&](Component c) { return dz_l2_squared(col[c]); });
        return b;
    };
    for (int n = 0; n < cfg.steps; ++n) {
        const std::vector<double> dW = path.increment(n, cfg.dt, model.size(), cfg.substeps);
        const Tendency stoch = model.apply(U, dW);
        const Tendency N = explicit_drift(U, F, params);
        std::vector<Tendency> cols;
        for (int k = 0; k < model.size(); ++k) cols.push_back(model.column(k, U));
        DzSample s;
        s.t = n * cfg.dt;
        s.has_terms = true;
        s.v = balance(vel, N, stoch, cols);
        s.T = balance(tem, N, stoch, cols);
        out.push_back(s);
        U = step_direct(U, F, cfg.dt, stoch, params, nullptr, cfg.tol);
    }
    DzSample last;
    last.t = cfg.steps * cfg.dt;
    last.v.q = over(vel, [&](Component c) { return dz_l2_squared(U[c]); });
    last.T.q = over(tem, [&](Component c) { return dz_l2_squared(U[c]); });
    out.push_back(last);
    return out;
}

DzResidual dz_identity_residual(std::span<const DzSample> series) {
    DzResidual out;
    for (std::size_t n = 0; n + 1 < series.size(); ++n) {
        const DzSample& s = series[n];
        if (!s.has_terms) {
            throw Error(ErrorKind::missing_terms, "dz sample " + std::to_string(n) + " lacks balance terms");
        }
        const double dt = series[n + 1].t - s.t;
        if (!(dt > 0.0)) throw Error(ErrorKind::unsorted_series, "dz series is not time-ordered");
        auto res = [dt](const DzBalance& b, double q_next) {
            return q_next - b.q + b.dissipation * dt - b.drift * dt - b.ito * dt - b.martingale;
        };
        out.v.push_back(res(s.v, series[n + 1].v.q));
        out.T.push_back(res(s.T, series[n + 1].T.q));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Battery

std::vector<VerifyRow> verify_battery(int N, std::uint64_t seed, int samples) {
    if (samples < 1) throw Error(ErrorKind::invalid_value, "verify needs at least one sample");
    const Grid g = make_grid({1.0, 1.0, 1.0, N, N, N});
    PhysParams params;
    std::vector<State> a, b, c;
    a.reserve(samples);
    for (int s = 0; s < samples; ++s) {
        a.push_back(random_smooth_state(g, seed, 3 * s));
        b.push_back(random_smooth_state(g, seed, 3 * s + 1));
        c.push_back(random_smooth_state(g, seed, 3 * s + 2, false));
    }
    std::vector<VerifyRow> rows;
    auto row = [&](std::string name, double stat, double thr, bool pass) {
        rows.push_back({std::move(name), N, samples, stat, thr, pass});
    };

    double sa = 0.0, cor = 0.0, c1 = 0.0, c3 = 0.0, diss = 0.0, q2 = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Tendency AU = apply_A(a[s], params);
        double lhs = 0.0;
        for (Component k : all_components) lhs += inner(AU[k], b[s][k], InnerKind::L2);
        const double rhs = inner(a[s], b[s], InnerKind::V, params);
        const double scale = norm(a[s], NormKind::h1(), params) * norm(b[s], NormKind::h1(), params);
        sa = std::max(sa, std::abs(lhs - rhs) / scale);

        const Tendency E = apply_E(a[s], params);
        double e = 0.0;
        for (Component k : all_components) e += inner(E[k], a[s][k], InnerKind::L2);
        cor = std::max(cor, std::abs(e) / (std::abs(params.f) * std::pow(norm(a[s], NormKind::l2()), 2)));

        const CancellationResult r1 = cancellation_residual(a[s], b[s], 1);
        const CancellationResult r3 = cancellation_residual(a[s], b[s], 3);
        c1 = std::max(c1, std::abs(r1.residual) / r1.scale);
        c3 = std::max(c3, std::abs(r3.residual) / r3.scale);

        const DissipationCheck d = verify_dissipation(a[s], params);
        diss = std::max(diss, d.lhs / d.rhs);
    }
    const RatioReport q2r = verify_aniso_embedding(a, 2.0, params);
    for (double r : q2r.ratios) q2 = std::max(q2, std::abs(r - 1.0));
    const RatioReport q12 = verify_aniso_embedding(a, 12.0, params);
    std::vector<BTriple> triples;
    for (int s = 0; s < samples; ++s) triples.push_back({a[s], b[s], c[s]});
    const RatioReport bb = verify_B_bound(triples, params);
    const double cp = poincare_constant(a, params);

    row("self_adjoint_A", sa, 1e-10, sa <= 1e-10);
    row("coriolis_neutral", cor, 1e-13, cor <= 1e-13);
    row("cancellation_r1", c1, 1e-3, c1 <= 1e-3);
    row("cancellation_r3", c3, 1e-3, c3 <= 1e-3);
    row("dissipation_ratio", diss, 1.0, diss <= 1.0);
    row("aniso_q2_collapse", q2, 1e-12, q2 <= 1e-12);
    row("aniso_q12_max_ratio", q12.max_ratio, 0.0, std::isfinite(q12.max_ratio));
    row("B_bound_max_ratio", bb.max_ratio, 0.0, std::isfinite(bb.max_ratio));
    row("poincare_constant", cp, 0.0, std::isfinite(cp));
    return rows;
}

void write_verify_csv(std::ostream& out, std::span<const VerifyRow> rows) {
    out << "check,grid_N,samples,statistic,threshold,pass\n";
    out.precision(17);
    for (const VerifyRow& r : rows)
        out << r.check << ',' << r.grid_N << ',' << r.samples << ',' << r.statistic << ','
            << r.threshold << ',' << (r.pass ? 1 : 0) << '\n';
}

} // namespace hsto
