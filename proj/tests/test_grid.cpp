#include <doctest.h>

#include "hsto/error.hpp"
#include "hsto/grid.hpp"
#include "test_support.hpp"

using namespace hsto;
using namespace hsto::test;

TEST_SUITE("grid") {

TEST_CASE("make_grid spacing and node count") {
    const Grid g = make_grid({1, 1, 1, 4, 4, 4});
    CHECK(g.interior_count() == 64);
    CHECK(g.dx1() == 0.25);

    const Grid g2 = make_grid({2, 1, 0.5, 8, 4, 4});
    CHECK(g2.dz() == 0.125);
    const std::vector<double> lv = g2.z_levels();
    REQUIRE(lv.size() == 5);
    CHECK(lv.front() == doctest::Approx(-0.5));
    CHECK(lv.back() == doctest::Approx(0.0));
    for (std::size_t k = 1; k < lv.size(); ++k) CHECK(lv[k] - lv[k - 1] == doctest::Approx(0.125));
}

TEST_CASE("make_grid rejects too few cells") {
    try {
        (void)make_grid({1, 1, 1, 2, 4, 4});
        FAIL("expected invalid_spec");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_spec);
    }
    CHECK_THROWS_AS((void)make_grid({-1, 1, 1, 4, 4, 4}), Error);
}

TEST_CASE("apply_bcs: Dirichlet walls, Neumann surface, idempotent") {
    const Grid g = cube(6);
    State U(g);
    std::uint32_t s = 12345;
    for (Component c : all_components)
        for (double& x : U[c].raw()) {
            s = s * 1664525u + 1013904223u;
            x = (s >> 8) * 1e-7 - 0.8;
        }
    const State A = apply_bcs(U);
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j) {
            // face value (ghost + interior) / 2 vanishes on the lateral walls
            CHECK(A.u(-1, j, k) + A.u(0, j, k) == 0.0);
            CHECK(A.v(g.n1(), j, k) + A.v(g.n1() - 1, j, k) == 0.0);
        }
    for (int j = 0; j < g.n2(); ++j)
        for (int i = 0; i < g.n1(); ++i) {
            CHECK(A.T(i, j, g.nz()) - A.T(i, j, g.nz() - 1) == 0.0);
            CHECK(A.u(i, j, -1) - A.u(i, j, 0) == 0.0);
        }
    const State B = apply_bcs(A);
    for (Component c : all_components) {
        const auto a = A[c].raw(), b = B[c].raw();
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
}

TEST_CASE("norms of simple fields") {
    const Grid g = cube(8);
    Field c(g, BcKind::tracer);
    c.fill(3.0);
    CHECK(norm(c, NormKind::l2()) == doctest::Approx(3.0));
    CHECK(norm(c, NormKind::lp(4)) == doctest::Approx(3.0));
    State Z(g);
    CHECK(norm(Z, NormKind::l2()) == 0.0);
    CHECK(norm(Z, NormKind::h1()) == 0.0);
    CHECK(norm(Z, NormKind::aniso(12, 2)) == 0.0);
}

TEST_CASE("L2 norm of sin(2 pi x) converges at second order") {
    std::vector<double> h, err;
    for (int N : {16, 32, 64}) {
        const Grid g = make_grid({1, 1, 1, N, 4, 4});
        const Field f = sample(g, BcKind::tracer, [](double x, double, double) { return std::sin(2 * pi * x); });
        h.push_back(1.0 / N);
        err.push_back(std::abs(norm(f, NormKind::l2()) - 1.0 / std::sqrt(2.0)) + 1e-300);
    }
    // midpoint rule integrates sin^2 exactly on a uniform periodic-compatible grid
    CHECK(err.back() < 1e-12);
}

TEST_CASE("V inner product of a Fourier mode matches the gradient integral") {
    // u = sin(pi x) sin(pi y) cos(pi (z+1)), ((u,u)) = mu (2 pi^2) |u|^2 + nu pi^2 |u|^2, |u|^2 = 1/8
    const PhysParams p;
    const double exact = (p.mu_v * 2 * pi * pi + p.nu_v * pi * pi) / 8.0;
    std::vector<double> h, err;
    for (int N : {8, 16, 32}) {
        const Grid g = cube(N);
        const Field u = sample(g, BcKind::velocity, [](double x, double y, double z) {
            return std::sin(pi * x) * std::sin(pi * y) * std::cos(pi * (z + 1));
        });
        h.push_back(1.0 / N);
        err.push_back(std::abs(inner(u, u, InnerKind::V, p.diffusivity(Component::u)) - exact));
    }
    CHECK(observed_order(h, err) > 1.8);
}

TEST_CASE("anisotropic norm with q = p_z = 2 is the L2 norm") {
    const Grid g = cube(8);
    const Field f = sample(g, BcKind::tracer, [](double x, double y, double z) { return x * x + std::cos(y) * z; });
    CHECK(norm(f, NormKind::aniso(2, 2)) == doctest::Approx(norm(f, NormKind::l2())).epsilon(1e-13));
}

}
