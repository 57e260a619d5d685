#include <doctest.h>

#include <limits>

#include "hsto/analysis.hpp"
#include "hsto/error.hpp"
#include "test_support.hpp"

using namespace hsto;
using namespace hsto::test;

namespace {

GronwallInput constant_input(double f, double g, double h, double X, int S = 200, double t = 1.0, double p = 1.0) {
    GronwallInput in;
    in.t = t;
    in.p = p;
    in.f.assign(S + 1, f);
    in.g.assign(S + 1, g);
    in.h.assign(S + 1, h);
    in.X.assign(S + 1, X);
    return in;
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("random smooth states are admissible and grid independent") {
    const Grid g = cube(16);
    const State U = random_smooth_state(g, 1, 0);
    CHECK(std::abs(U.T.interior_sum()) < 1e-9);
    CHECK(U.u(-1, 3, 3) + U.u(0, 3, 3) == 0.0);
    const State V = random_smooth_state(g, 1, 0);
    CHECK(norm(U, NormKind::l2()) == norm(V, NormKind::l2()));
    const State W = random_smooth_state(cube(32), 1, 0);
    CHECK(norm(W, NormKind::l2()) == doctest::Approx(norm(U, NormKind::l2())).epsilon(2e-2));
}

TEST_CASE("Gronwall constant data by hand") {
    const GronwallResult r = gronwall_bound(constant_input(1.0, 0.0, 0.0, 1.0));
    CHECK(std::isinf(r.epsilon));
    CHECK(r.n == 1);
    CHECK(r.M > 2.0);
    CHECK(r.M < 2.0 + 1e-6);
    CHECK(r.c == doctest::Approx(4.0));
    CHECK(r.bound == doctest::Approx(2 * r.M));
}

TEST_CASE("Gronwall bound is affine in int h") {
    GronwallInput in = constant_input(1.5, 0.3, 0.4, 1.0, 300, 2.0, 2.0);
    const GronwallResult a = gronwall_bound(in);
    for (double& x : in.h) x *= 2;
    const GronwallResult b = gronwall_bound(in);
    CHECK(a.c == b.c);
    CHECK(b.bound - b.c == doctest::Approx(2 * (a.bound - a.c)));
    CHECK(b.int_h == doctest::Approx(2 * a.int_h));
}

TEST_CASE("Gronwall epsilon from the window of g") {
    // g = 1 on [0, 2]: windows of length < 1/2 qualify, eps is the largest sampled one
    const GronwallResult r = gronwall_bound(constant_input(1.0, 1.0, 0.0, 1.0, 400, 2.0));
    CHECK(r.epsilon < 0.5);
    CHECK(r.epsilon > 0.49);
    CHECK(r.n == static_cast<int>(std::floor(4.0 / r.epsilon)) + 1);
}

TEST_CASE("Gronwall hypothesis check and errors") {
    const GronwallInput ok = constant_input(1.0, 0.0, 0.0, 1.0);
    CHECK_FALSE(check_gronwall_hypothesis(ok).has_value());
    GronwallInput bad = ok;
    bad.X[50] = 3.0;
    const auto v = check_gronwall_hypothesis(bad);
    REQUIRE(v.has_value());
    CHECK(v->b >= 50);
    try {
        (void)gronwall_bound_checked(bad);
        FAIL("expected hypothesis_violation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::hypothesis_violation);
    }
    GronwallInput neg = ok;
    neg.g[3] = -1.0;
    CHECK_THROWS_AS(gronwall_bound(neg), Error);
    CHECK_THROWS_AS(gronwall_bound(constant_input(1.0, 1e6, 0.0, 1.0, 10)), Error);
}

TEST_CASE("generated Gronwall instances satisfy the hypothesis and the bound") {
    const GronwallSuiteReport r = gronwall_suite(100, 7);
    CHECK(r.cases == 100);
    CHECK(r.hypothesis_ok == 100);
    CHECK(r.conclusion_ok == 100);
    CHECK(r.max_ratio <= 1.0);
}

TEST_CASE("anisotropic embedding degenerate cases") {
    const Grid g = cube(8);
    std::vector<State> fs{random_smooth_state(g, 2, 0), random_smooth_state(g, 2, 1), State(g)};
    const RatioReport q2 = verify_aniso_embedding(fs, 2.0);
    CHECK(q2.skipped == 1);
    for (double r : q2.ratios) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(verify_aniso_embedding(fs, 1.0), Error);
}

TEST_CASE("trilinear bound degenerate cases") {
    const Grid g = cube(8);
    const State a = random_smooth_state(g, 3, 0), b = random_smooth_state(g, 3, 1);
    std::vector<BTriple> t{{State(g), a, b}};
    const RatioReport z = verify_B_bound(t);
    REQUIRE(z.ratios.size() == 1);
    CHECK(z.ratios[0] == 0.0);

    // U_flat supported on a component B never touches
    State flat(g);
    const Tendency Bab = apply_B(a, b);
    flat.u = sample(g, BcKind::velocity, [](double x, double y, double) { return std::sin(pi * x) * std::sin(pi * y); });
    Field proj = Bab.du;
    const double coef = inner(Bab.du, flat.u, InnerKind::L2) / inner(Bab.du, Bab.du, InnerKind::L2);
    flat.u.axpy(-coef, proj);
    std::vector<BTriple> o{{a, b, flat}};
    CHECK(verify_B_bound(o).max_ratio < 1e-12);
}

TEST_CASE("dissipation bound") {
    const Grid g = cube(8);
    const PhysParams p;
    const DissipationCheck z = verify_dissipation(State(g), p);
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);
    CHECK(z.kappa == doctest::Approx(std::min(p.mu_v, p.nu_v) / 8));
    for (int s = 0; s < 10; ++s) {
        const DissipationCheck d = verify_dissipation(random_smooth_state(g, 4, s), p);
        CHECK(d.lhs <= d.rhs);
    }
}

TEST_CASE("cancellation residual converges") {
    std::vector<double> h, e;
    for (int N : {8, 16, 32}) {
        const Grid g = cube(N);
        const CancellationResult r = cancellation_residual(random_smooth_state(g, 6, 0), random_smooth_state(g, 6, 1), 3);
        h.push_back(1.0 / N);
        e.push_back(std::abs(r.residual) / r.scale);
    }
    CHECK(observed_order(h, e) > 1.8);
    CHECK_THROWS_AS(cancellation_residual(State(cube(4)), State(cube(4)), 0), Error);
}

TEST_CASE("L4 and dz identities on a zero trajectory") {
    RunConfig c;
    c.grid = {1, 1, 1, 6, 6, 6};
    c.seed = 1;
    c.steps = 4;
    c.noise.K = 0;
    c.init.amp_v = c.init.amp_T = c.init.amp_S = 0.0;
    for (double r : l4_identity_residual(split_l4_series(c))) CHECK(r == 0.0);
    const DzResidual d = dz_identity_residual(direct_dz_series(c));
    for (double r : d.v) CHECK(r == 0.0);
    for (double r : d.T) CHECK(r == 0.0);
}

TEST_CASE("L4 identity residual shrinks with dt") {
    std::vector<double> res;
    for (int m : {1, 2, 4}) {
        RunConfig c;
        c.grid = {1, 1, 1, 8, 8, 8};
        c.seed = 3;
        c.noise.amplitude = 0.02;
        c.forcing = {0.2, 0.1, 0.1};
        c.init.amp_v = 0.3;
        c.dt = 0.04 / m;
        c.steps = 5 * m;
        const auto s = split_l4_series(c);
        const auto r = l4_identity_residual(s);
        double worst = 0.0;
        for (double x : r) worst = std::max(worst, std::abs(x));
        res.push_back(worst);
    }
    MESSAGE("L4 residuals " << res[0] << " " << res[1] << " " << res[2]);
    CHECK(std::log2(res[0] / res[1]) > 0.9);
    CHECK(std::log2(res[1] / res[2]) > 0.9);
}

TEST_CASE("missing terms are rejected") {
    std::vector<L4Sample> s(3);
    s[1].t = 0.1;
    s[2].t = 0.2;
    CHECK_THROWS_AS(l4_identity_residual(s), Error);
    std::vector<DzSample> d(2);
    d[1].t = 0.1;
    CHECK_THROWS_AS(dz_identity_residual(d), Error);
}

TEST_CASE("dz balance: deterministic residual halves with dt") {
    std::vector<double> res;
    for (int m : {1, 2, 4}) {
        RunConfig c;
        c.grid = {1, 1, 1, 8, 8, 8};
        c.seed = 3;
        c.noise.K = 0;
        c.forcing = {0.2, 0.1, 0.1};
        c.init.amp_v = 0.3;
        c.dt = 0.04 / m;
        c.steps = 5 * m;
        const DzResidual r = dz_identity_residual(direct_dz_series(c));
        double sum = 0.0;
        for (double x : r.v) sum += x;
        res.push_back(std::abs(sum));
    }
    CHECK(std::log2(res[0] / res[1]) > 0.9);
    CHECK(std::log2(res[1] / res[2]) > 0.9);
}

TEST_CASE("dz balance: Ito correction is needed in the noisy mean") {
    // mean residual over paths is zero within 3 SE; dropping the Ito term biases it
    const int paths = 200;
    double s = 0, s2 = 0, b = 0, b2 = 0;
    for (int r = 0; r < paths; ++r) {
        RunConfig c;
        c.grid = {1, 1, 1, 6, 6, 6};
        c.seed = 500 + r;
        c.noise = {NoiseKind::additive, 8, 0.2, NoiseTarget::all, {}};
        c.init.amp_v = 0.05;
        c.dt = 0.002;
        c.steps = 5;
        const auto series = direct_dz_series(c);
        const DzResidual res = dz_identity_residual(series);
        double x = 0.0, y = 0.0;
        for (std::size_t n = 0; n < res.v.size(); ++n) {
            x += res.v[n] + res.T[n];
            y += res.v[n] + res.T[n] + (series[n].v.ito + series[n].T.ito) * c.dt;
        }
        s += x;
        s2 += x * x;
        b += y;
        b2 += y * y;
    }
    const double mean = s / paths, se = std::sqrt((s2 / paths - mean * mean) / (paths - 1));
    const double mb = b / paths, seb = std::sqrt((b2 / paths - mb * mb) / (paths - 1));
    MESSAGE("with Ito " << mean << " +- " << se << ", without " << mb << " +- " << seb);
    CHECK(std::abs(mean) < 3 * se);
    CHECK(std::abs(mb) > 3 * seb);
}

TEST_CASE("verify battery rows") {
    const auto rows = verify_battery(8, 1, 4);
    CHECK(rows.size() == 9);
    for (const auto& r : rows) CHECK(std::isfinite(r.statistic));
    CHECK(rows[0].check == "self_adjoint_A");
    CHECK(rows[0].pass);
}

}
