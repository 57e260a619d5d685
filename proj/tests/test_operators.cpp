#include <doctest.h>

#include "hsto/operators.hpp"
#include "test_support.hpp"

using namespace hsto;
using namespace hsto::test;

TEST_SUITE("operators") {

TEST_CASE("density reference state and constant anomalies") {
    const Grid g = cube(4);
    PhysParams p;
    Field T(g, BcKind::tracer), S(g, BcKind::tracer);
    CHECK(max_abs_diff(density(T, S, p), sample(g, BcKind::tracer, [](double, double, double) { return 1000.0; })) == 0.0);

    T.fill(5.0);
    S.fill(-1.0);
    const Field rho = density(T, S, p);
    for (int k = 0; k < 4; ++k) CHECK(rho(1, 2, k) == doctest::Approx(1000.2).epsilon(1e-14));

    p.beta_T = p.beta_S = 0;
    CHECK(density(T, S, p)(0, 0, 0) == 1000.0);
}

TEST_CASE("diagnostic_w") {
    const Grid g = cube(8);
    Field u(g, BcKind::velocity), v(g, BcKind::velocity);
    CHECK(max_abs(diagnostic_w(u, v)) == 0.0);

    u = Field::from_function(g, BcKind::velocity, [](double x, double, double) { return x; });
    const Field w = diagnostic_w(u, v);
    // away from the walls div v = 1 and w(z) = -z
    for (int k = 0; k < g.nz(); ++k)
        for (int i = 2; i < g.n1() - 2; ++i) CHECK(w(i, 3, k) == doctest::Approx(-g.z(k)).epsilon(1e-12));
}

TEST_CASE("hydrostatic pressure") {
    const Grid g = cube(16);
    PhysParams p;
    Field T(g, BcKind::tracer), S(g, BcKind::tracer);
    SurfaceField ps(g);
    {
        const Field P = hydrostatic_pressure(T, S, ps, p);
        for (int k = 0; k < g.nz(); ++k) CHECK(P(3, 3, k) == doctest::Approx(-p.rho0 * p.g * g.z(k)));
    }
    {
        PhysParams q = p;
        q.g = 0.0;
        ps.fill(7.0);
        T.fill(3.0);
        const Field P = hydrostatic_pressure(T, S, ps, q);
        for (int k = 0; k < g.nz(); ++k) CHECK(P(1, 5, k) == doctest::Approx(7.0));
    }
    {
        const double alpha = 2.0;
        ps.fill(1.5);
        T = sample(g, BcKind::tracer, [&](double, double, double z) { return alpha * z; });
        S.fill(0.0);
        const Field P = hydrostatic_pressure(T, S, ps, p);
        for (int k = 0; k < g.nz(); ++k) {
            const double z = g.z(k);
            const double exact = 1.5 - p.rho0 * p.g * z - p.rho0 * p.g * p.beta_T * alpha * z * z / 2;
            CHECK(P(2, 2, k) == doctest::Approx(exact).epsilon(1e-5));
        }
    }
}

TEST_CASE("apply_A: zero and horizontal eigenmode") {
    const PhysParams p;
    State Z(cube(4));
    const Tendency AZ = apply_A(Z, p);
    for (Component c : all_components) CHECK(max_abs(AZ[c]) == 0.0);

    std::vector<double> h, err;
    for (int N : {8, 16, 32}) {
        const Grid g = cube(N);
        State U(g);
        U.u = sample(g, BcKind::velocity, [](double x, double, double) { return std::sin(pi * x); });
        const Tendency A = apply_A(U, p);
        double e = 0.0;
        // rows not touching the y walls see no y-curvature
        for (int k = 0; k < N; ++k)
            for (int j = 1; j < N - 1; ++j)
                for (int i = 0; i < N; ++i)
                    e = std::max(e, std::abs(A.du(i, j, k) - p.mu_v * pi * pi * U.u(i, j, k)));
        h.push_back(1.0 / N);
        err.push_back(e);
    }
    CHECK(observed_order(h, err) > 1.8);
}

TEST_CASE("apply_B vanishes for zero or constant arguments") {
    const Grid g = cube(6);
    State U(g), C(g);
    U.u = sample(g, BcKind::velocity, [](double x, double y, double) { return std::sin(pi * x) * std::sin(pi * y); });
    U.v = sample(g, BcKind::velocity, [](double x, double y, double) { return std::sin(2 * pi * x) * std::sin(pi * y); });
    C.T.fill(2.0);
    C.S.fill(-1.0);
    const Tendency B1 = apply_B(U, C);
    const Tendency B0 = apply_B(State(g), U);
    for (Component c : all_components) {
        CHECK(max_abs(B0[c]) == 0.0);
        if (!is_velocity(c)) CHECK(max_abs(B1[c]) < 1e-14);
    }
}

TEST_CASE("apply_Ap") {
    const Grid g = cube(16);
    PhysParams p;
    State U(g);
    U.T = sample(g, BcKind::tracer, [](double, double, double z) { return 3.0 + z; });
    CHECK(max_abs(apply_Ap(U, p).du) == 0.0);

    U.T = sample(g, BcKind::tracer, [](double x, double, double) { return x; });
    const Tendency A = apply_Ap(U, p);
    for (int k = 0; k < g.nz(); ++k)
        for (int i = 1; i < g.n1() - 1; ++i) {
            CHECK(A.du(i, 4, k) == doctest::Approx(p.g * p.beta_T * g.z(k)).epsilon(1e-10));
            CHECK(A.dv(i, 4, k) == doctest::Approx(0.0));
        }
    p.beta_T = p.beta_S = 0;
    CHECK(max_abs(apply_Ap(U, p).du) == 0.0);
}

TEST_CASE("apply_E") {
    const Grid g = cube(4);
    PhysParams p;
    p.f = 1.0;
    State U(g);
    U.u.fill(1.0);
    const Tendency E = apply_E(U, p);
    CHECK(E.du(1, 1, 1) == 0.0);
    CHECK(E.dv(1, 1, 1) == 1.0);
    p.f = 0.0;
    CHECK(max_abs(apply_E(U, p).dv) == 0.0);
}

TEST_CASE("full_drift: zero and linear regime") {
    const Grid g = cube(8);
    PhysParams p;
    Tendency F(g);
    SurfaceField ps(g);
    const Tendency D0 = full_drift(State(g), F, ps, p);
    for (Component c : all_components) CHECK(max_abs(D0[c]) == 0.0);

    p.advection = false;
    p.f = 0.0;
    p.beta_T = p.beta_S = 0.0;
    State U(g);
    U.u = sample(g, BcKind::velocity, [](double x, double y, double z) { return std::sin(pi * x) * std::sin(pi * y) * z; });
    U.T = sample(g, BcKind::tracer, [](double x, double, double z) { return std::cos(pi * x) * z * z; });
    F.du.fill(0.3);
    F.dT.fill(-0.2);
    const Tendency D = full_drift(U, F, ps, p);
    Tendency expect = F;
    expect.axpy(-1.0, apply_A(U, p));
    for (Component c : all_components) CHECK(max_abs_diff(D[c], expect[c]) < 1e-13);
}

TEST_CASE("integrate_to_surface of a constant") {
    const Grid g = cube(8);
    Field one(g, BcKind::tracer);
    one.fill(1.0);
    const Field I = integrate_to_surface(one);
    for (int k = 0; k < g.nz(); ++k) CHECK(I(0, 0, k) == doctest::Approx(-g.z(k)));
}

}
