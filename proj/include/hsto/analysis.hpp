#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsto/grid.hpp"
#include "hsto/noise.hpp"
#include "hsto/operators.hpp"
#include "hsto/stepping.hpp"

namespace hsto {

// --- random smooth test fields --------------------------------------------------

/// Analytic random field family; the same (seed, index) gives the same continuum
/// field on every grid. Velocity vanishes on the lateral walls, every component
/// has zero vertical derivative at top and bottom, tracers have zero mean.
State random_smooth_state(const Grid& grid, std::uint64_t seed, int index, bool project = true);

// --- Gronwall lemma ----------------------------------------------------------------

/// f, g, h, X sampled at t_l = l * t / (n_samples - 1).
struct GronwallInput {
    double t = 1.0;
    double p = 1.0;
    std::vector<double> f, g, h, X;
};

struct GronwallResult {
    double epsilon = 0.0;  // +inf when g integrates to < 1/2 over [0, t]
    int n = 1;
    double M = 0.0;
    double c = 0.0;  // 2 M^p
    double int_h = 0.0;
    double bound = 0.0;  // c (1 + int h)
};

struct GronwallViolation {
    int a = 0, b = 0;  // sample window
    double lhs = 0.0, rhs = 0.0;
};

/// Builds the constructive constant. Throws invalid_value on malformed input.
GronwallResult gronwall_bound(const GronwallInput& in);
/// Brute-force search over every sample window for a counterexample to the hypothesis.
std::optional<GronwallViolation> check_gronwall_hypothesis(const GronwallInput& in);
/// Checks the hypothesis first; throws hypothesis_violation naming the window.
GronwallResult gronwall_bound_checked(const GronwallInput& in);
/// Random instance whose X satisfies the hypothesis by construction.
GronwallInput generate_gronwall_instance(std::uint64_t seed, int index, int samples = 401);

struct GronwallSuiteReport {
    int cases = 0;
    int hypothesis_ok = 0;
    int conclusion_ok = 0;
    double max_ratio = 0.0;  // max sup X / bound
};

GronwallSuiteReport gronwall_suite(int count, std::uint64_t seed, int samples = 401);

// --- inequality ratio reports ------------------------------------------------------

struct RatioReport {
    std::vector<double> ratios;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    int skipped = 0;  // degenerate 0/0 inputs
};

/// |v|_{L^q_x L^2_z} / (|v|^{1-s} ||v||^s) with s = 1 - 2/q on the velocity of each state.
RatioReport verify_aniso_embedding(std::span<const State> fields, double q,
                                   const PhysParams& params = {});

struct BTriple {
    State U, U_sharp, U_flat;
};

/// |<B(U, U#), U_flat>| over the right side of the trilinear bound, with |A v| as
/// the H2-type seminorm of v.
RatioReport verify_B_bound(std::span<const BTriple> triples, const PhysParams& params = {});

struct DissipationCheck {
    double kappa = 0.0;
    double lhs = 0.0;  // kappa |grad_3 (v^2)|^2
    double rhs = 0.0;  // mu/2 sum (d_j v_k)^2 v_k^2 + nu/2 sum (dz v_k)^2 v_k^2
};

/// Face quadrature of both sides with kappa = min(mu_v, nu_v) / 8.
DissipationCheck verify_dissipation(const State& v_hat, const PhysParams& params);

struct CancellationResult {
    double residual = 0.0;  // int (v# . grad v + w(v#) dz v) . v^r
    double scale = 0.0;     // int of the absolute integrands
};

/// Trilinear transport integral against the component-wise power v^r.
CancellationResult cancellation_residual(const State& v, const State& v_sharp, int r);

/// max |U| / ||U|| over the states (Poincare constant estimate).
double poincare_constant(std::span<const State> states, const PhysParams& params);

// --- L4 evolution of the residual velocity -----------------------------------------

struct L4Sample {
    double t = 0.0;
    double quarter_l4 = 0.0;  // |v_hat|_{L4}^4 / 4
    bool has_terms = false;
    double dissipation = 0.0;  // 3 mu sum (d v)^2 v^2 + 3 nu sum (dz v)^2 v^2
    std::array<double, 6> J{};
    double cancelled = 0.0;  // -<B(v_hat + v_check, v_hat), v_hat^3>, zero in the continuum
};

/// Right-hand terms at one step: U_hat at the current level, U_check at the level
/// used by the residual step, phi the projection potential of that step.
L4Sample l4_terms(const State& U_hat, const State& U_check, const SurfaceField& phi, double dt,
                  const Tendency& F, const PhysParams& params);

/// (E_{n+1} - E_n) / dt + D_n - sum J_n - C_n. Throws missing_terms.
std::vector<double> l4_identity_residual(std::span<const L4Sample> series);

/// Runs the split scheme for `config` and records an L4 sample at every step.
std::vector<L4Sample> split_l4_series(const RunConfig& config);

// --- vertical-gradient balance ------------------------------------------------------

/// One step of d|dz q|^2 + 2||dz q||^2 dt = drift dt + ito dt + martingale for a group.
struct DzBalance {
    double q = 0.0;            // |dz q|^2 at the step start
    double dissipation = 0.0;  // 2 ||dz q||^2
    double drift = 0.0;        // 2 <dz N, dz q>, N the explicit drift
    double ito = 0.0;          // sum_k |dz sigma_k|^2
    double martingale = 0.0;   // 2 <dz (sigma dW), dz q>
};

struct DzSample {
    double t = 0.0;
    bool has_terms = false;
    DzBalance v;  // horizontal velocity
    DzBalance T;  // temperature
};

/// Direct-mode run recording the vertical-gradient balance at every step.
std::vector<DzSample> direct_dz_series(const RunConfig& config);

struct DzResidual {
    std::vector<double> v;
    std::vector<double> T;
};

/// q_{n+1} - q_n + dissipation dt - drift dt - ito dt - martingale. Throws missing_terms.
DzResidual dz_identity_residual(std::span<const DzSample> series);

// --- battery -------------------------------------------------------------------------

struct VerifyRow {
    std::string check;
    int grid_N = 0;
    int samples = 0;
    double statistic = 0.0;  // max ratio or max relative error
    double threshold = 0.0;
    bool pass = false;
};

/// Identity and inequality checks on random smooth fields at resolution N^3.
std::vector<VerifyRow> verify_battery(int N, std::uint64_t seed, int samples = 100);
void write_verify_csv(std::ostream& out, std::span<const VerifyRow> rows);

} // namespace hsto
