#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hsto/grid.hpp"
#include "hsto/operators.hpp"
#include "hsto/rng.hpp"

namespace hsto {

enum class NoiseKind { additive, linear_multiplicative, lipschitz_functional };

std::string_view to_string(NoiseKind kind);
/// Throws unsupported_kind on an unknown name.
NoiseKind parse_noise_kind(std::string_view name);

/// One spatial mode e_k living on a single component.
///
/// Velocity modes are sin(m1 pi x/L1) sin(m2 pi y/L2) cos(m3 pi (z+h)/h) with all
/// m >= 1; tracer modes use cosines in every direction. Shapes are normalized to
/// unit discrete L2 norm and are exact eigenvectors of the discrete A.
struct NoiseMode {
    Component component = Component::T;
    int m1 = 0, m2 = 0, m3 = 0;
    double amplitude = 0.0;
};

/// Which components receive modes when building a default family.
enum class NoiseTarget { all, velocity, tracer, T };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::additive;
    int K = 8;
    double amplitude = 0.05;
    NoiseTarget target = NoiseTarget::all;
    /// Optional per-mode amplitudes; overrides `amplitude` for the first entries.
    std::vector<double> amplitudes;
};

/// Eigenvalue of the discrete A on a mode of the given component.
double mode_eigenvalue(const Grid& grid, const NoiseMode& mode, const PhysParams& params);

/// The `count` lowest modes of one component, ordered by continuum eigenvalue.
std::vector<NoiseMode> component_modes(const Grid& grid, const PhysParams& params, Component c,
                                       int count);

/// The K lowest modes (by continuum eigenvalue) for the target, round-robin over components.
std::vector<NoiseMode> lowest_modes(const Grid& grid, const PhysParams& params, int K,
                                    NoiseTarget target);

/// Truncated cylindrical Wiener process with a sigma-operator family.
class NoiseModel {
public:
    NoiseModel(const Grid& grid, NoiseKind kind, std::vector<NoiseMode> modes);
    static NoiseModel from_spec(const Grid& grid, const PhysParams& params, const NoiseSpec& spec);

    NoiseKind kind() const { return kind_; }
    int size() const { return static_cast<int>(modes_.size()); }
    const std::vector<NoiseMode>& modes() const { return modes_; }
    const Field& shape(int k) const { return shapes_[k]; }
    const Grid& grid() const { return grid_; }

    /// Declared Lipschitz constant of U -> sigma(U) into Hilbert-Schmidt operators.
    double lipschitz_bound() const;

    /// The k-th column sigma_k(U) (ghosts filled).
    Tendency column(int k, const State& U) const;
    /// sum_k sigma_k(U) dW_k.
    Tendency apply(const State& U, std::span<const double> dW) const;
    /// sum_k |sigma_k(U)|^2, the squared Hilbert-Schmidt norm.
    double hs_norm2(const State& U) const;

private:
    double coefficient(int k, const State& U) const;

    Grid grid_;
    NoiseKind kind_;
    std::vector<NoiseMode> modes_;
    std::vector<Field> shapes_;
};

/// sum_k sigma_k(U) dW_k.
Tendency apply_sigma(const NoiseModel& model, const State& U, std::span<const double> dW);

/// K independent N(0, dt) draws for trajectory `seed` at step `step`.
std::vector<double> sample_increment(const BrownianPath& path, std::uint64_t step, double dt, int K);

struct IsometryReport {
    double lhs = 0.0;        // Monte-Carlo mean of |sum sigma dW|^2
    double rhs = 0.0;        // sum_k |sigma_k|^2 * steps * dt
    double std_error = 0.0;  // standard error of lhs
    double deviation = 0.0;  // (lhs - rhs) / std_error, 0 when both vanish
    int runs = 0;
};

/// Monte-Carlo check of E|int sigma(U) dW|^2 = sum_k |sigma_k(U)|^2 t with U frozen.
IsometryReport ito_isometry_check(const NoiseModel& model, const State& U_fixed, double dt,
                                  int steps, int runs, std::uint64_t seed);

} // namespace hsto
