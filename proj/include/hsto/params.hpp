#pragma once

#include <array>
#include <string_view>

namespace hsto {

/// Prognostic components of the state, in storage order.
enum class Component { u = 0, v = 1, T = 2, S = 3 };

inline constexpr std::array<Component, 4> all_components{Component::u, Component::v,
                                                         Component::T, Component::S};

inline constexpr bool is_velocity(Component c) {
    return c == Component::u || c == Component::v;
}

std::string_view to_string(Component c);

/// Horizontal (mu) and vertical (nu) diffusion coefficients of one component.
struct Diffusivity {
    double mu = 1.0;
    double nu = 1.0;
};

/// Physical constants of the hydrostatic Boussinesq system.
///
/// Tracers are carried as anomalies about (T_r, S_r); the density law is
/// rho = rho0 * (1 + beta_T * (T - T_r) + beta_S * (S - S_r)) with the signs of
/// beta_T and beta_S left to the caller.
struct PhysParams {
    double mu_v = 0.01;
    double nu_v = 0.01;
    double mu_T = 0.01;
    double nu_T = 0.01;
    double mu_S = 0.01;
    double nu_S = 0.01;
    double f = 0.1;
    double g = 9.81;
    double rho0 = 1000.0;
    double beta_T = 2.0e-4;
    double beta_S = 8.0e-4;
    double T_r = 0.0;
    double S_r = 0.0;
    /// Switches the quadratic transport term B off (linear regime).
    bool advection = true;

    Diffusivity diffusivity(Component c) const {
        switch (c) {
        case Component::u:
        case Component::v:
            return {mu_v, nu_v};
        case Component::T:
            return {mu_T, nu_T};
        case Component::S:
            return {mu_S, nu_S};
        }
        return {};
    }

    /// Throws invalid_value when a coefficient violates its sign constraint.
    void validate() const;
};

} // namespace hsto
