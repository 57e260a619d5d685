#include "hsto/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "hsto/error.hpp"

namespace hsto {

std::string_view to_string(NoiseKind kind) {
    switch (kind) {
    case NoiseKind::additive: return "additive";
    case NoiseKind::linear_multiplicative: return "linear_multiplicative";
    case NoiseKind::lipschitz_functional: return "lipschitz_functional";
    }
    return "?";
}

NoiseKind parse_noise_kind(std::string_view name) {
    if (name == "additive") return NoiseKind::additive;
    if (name == "linear_multiplicative") return NoiseKind::linear_multiplicative;
    if (name == "lipschitz_functional") return NoiseKind::lipschitz_functional;
    throw Error(ErrorKind::unsupported_kind, "unknown noise kind '" + std::string(name) + "'");
}

namespace {

constexpr double pi = std::numbers::pi;

double sin2_half(int m, int N) {
    const double s = std::sin(m * pi / (2.0 * N));
    return s * s;
}

double continuum_eigenvalue(const Grid& g, const NoiseMode& m, const PhysParams& params) {
    const Diffusivity d = params.diffusivity(m.component);
    const double a = m.m1 * pi / g.spec().L1, b = m.m2 * pi / g.spec().L2, c = m.m3 * pi / g.depth();
    return d.mu * (a * a + b * b) + d.nu * c * c;
}

Field mode_shape(const Grid& g, const NoiseMode& m) {
    const double L1 = g.spec().L1, L2 = g.spec().L2, h = g.depth();
    const bool vel = is_velocity(m.component);
    Field f = Field::from_function(g, bc_kind_of(m.component), [&](double x, double y, double z) {
        const double hx = vel ? std::sin(m.m1 * pi * x / L1) : std::cos(m.m1 * pi * x / L1);
        const double hy = vel ? std::sin(m.m2 * pi * y / L2) : std::cos(m.m2 * pi * y / L2);
        return hx * hy * std::cos(m.m3 * pi * (z + h) / h);
    });
    fill_ghosts(f);
    const double n = norm(f, NormKind::l2());
    f *= 1.0 / n;
    return f;
}

std::vector<NoiseMode> candidates(const Grid& g, const PhysParams& params, Component c, int count) {
    const bool vel = is_velocity(c);
    const int lo = vel ? 1 : 0;
    const int reach = std::max(2, count + 1);
    const int hi1 = std::min(reach, g.n1() / 2), hi2 = std::min(reach, g.n2() / 2),
              hi3 = std::min(reach, g.nz() / 2);
    std::vector<NoiseMode> out;
    for (int m3 = lo; m3 <= hi3; ++m3)
        for (int m2 = lo; m2 <= hi2; ++m2)
            for (int m1 = lo; m1 <= hi1; ++m1) {
                if (!vel && m1 == 0 && m2 == 0 && m3 == 0) continue;
                out.push_back({c, m1, m2, m3, 0.0});
            }
    std::stable_sort(out.begin(), out.end(), [&](const NoiseMode& a, const NoiseMode& b) {
        const double la = continuum_eigenvalue(g, a, params), lb = continuum_eigenvalue(g, b, params);
        if (la != lb) return la < lb;
        return std::tie(a.m3, a.m2, a.m1) < std::tie(b.m3, b.m2, b.m1);
    });
    return out;
}

} // namespace

double mode_eigenvalue(const Grid& g, const NoiseMode& m, const PhysParams& params) {
    const Diffusivity d = params.diffusivity(m.component);
    return d.mu * (4.0 / (g.dx1() * g.dx1()) * sin2_half(m.m1, g.n1()) +
                   4.0 / (g.dx2() * g.dx2()) * sin2_half(m.m2, g.n2())) +
           d.nu * 4.0 / (g.dz() * g.dz()) * sin2_half(m.m3, g.nz());
}

std::vector<NoiseMode> component_modes(const Grid& g, const PhysParams& params, Component c,
                                       int count) {
    std::vector<NoiseMode> list = candidates(g, params, c, count);
    if (static_cast<int>(list.size()) < count) {
        throw Error(ErrorKind::invalid_value, "requested more modes than the grid resolves");
    }
    list.resize(static_cast<std::size_t>(std::max(count, 0)));
    return list;
}

std::vector<NoiseMode> lowest_modes(const Grid& g, const PhysParams& params, int K,
                                    NoiseTarget target) {
    if (K < 0) throw Error(ErrorKind::invalid_value, "[noise].K must be >= 0");
    std::vector<Component> comps;
    switch (target) {
    case NoiseTarget::all: comps = {Component::u, Component::v, Component::T, Component::S}; break;
    case NoiseTarget::velocity: comps = {Component::u, Component::v}; break;
    case NoiseTarget::tracer: comps = {Component::T, Component::S}; break;
    case NoiseTarget::T: comps = {Component::T}; break;
    }
    const int per = (K + static_cast<int>(comps.size()) - 1) / static_cast<int>(comps.size());
    std::vector<std::vector<NoiseMode>> lists;
    for (Component c : comps) lists.push_back(candidates(g, params, c, per));
    std::vector<NoiseMode> out;
    for (int k = 0; k < K; ++k) {
        const auto& list = lists[k % comps.size()];
        const std::size_t idx = k / comps.size();
        if (idx >= list.size()) {
            throw Error(ErrorKind::invalid_value, "[noise].K exceeds the resolvable modes of the grid");
        }
        out.push_back(list[idx]);
    }
    return out;
}

NoiseModel::NoiseModel(const Grid& grid, NoiseKind kind, std::vector<NoiseMode> modes)
    : grid_(grid), kind_(kind), modes_(std::move(modes)) {
    shapes_.reserve(modes_.size());
    for (const NoiseMode& m : modes_) {
        if (!std::isfinite(m.amplitude)) {
            throw Error(ErrorKind::invalid_value, "noise amplitude must be finite");
        }
        shapes_.push_back(mode_shape(grid_, m));
    }
}

NoiseModel NoiseModel::from_spec(const Grid& grid, const PhysParams& params, const NoiseSpec& spec) {
    std::vector<NoiseMode> modes = lowest_modes(grid, params, spec.K, spec.target);
    for (std::size_t k = 0; k < modes.size(); ++k)
        modes[k].amplitude = k < spec.amplitudes.size() ? spec.amplitudes[k] : spec.amplitude;
    return NoiseModel(grid, spec.kind, std::move(modes));
}

double NoiseModel::lipschitz_bound() const {
    double s = 0.0;
    for (int k = 0; k < size(); ++k) {
        const double a = modes_[k].amplitude;
        switch (kind_) {
        case NoiseKind::additive: break;
        case NoiseKind::linear_multiplicative: {
            const double e = shapes_[k].interior_max_abs();
            s += a * a * e * e;
            break;
        }
        case NoiseKind::lipschitz_functional: s += a * a; break;
        }
    }
    return std::sqrt(s);
}

double NoiseModel::coefficient(int k, const State& U) const {
    const NoiseMode& m = modes_[k];
    if (kind_ != NoiseKind::lipschitz_functional) return m.amplitude;
    return m.amplitude * std::tanh(inner(U[m.component], shapes_[k], InnerKind::L2));
}

Tendency NoiseModel::column(int k, const State& U) const {
    Tendency out(grid_);
    const NoiseMode& m = modes_[k];
    Field& dst = out[m.component];
    const Field& e = shapes_[k];
    if (kind_ == NoiseKind::linear_multiplicative) {
        const Field& src = U[m.component];
        const double a = m.amplitude;
        for (int kk = 0; kk < grid_.nz(); ++kk)
            for (int j = 0; j < grid_.n2(); ++j)
                for (int i = 0; i < grid_.n1(); ++i) dst(i, j, kk) = a * e(i, j, kk) * src(i, j, kk);
        fill_ghosts(dst);
    } else {
        dst.axpy(coefficient(k, U), e);
    }
    return out;
}

Tendency NoiseModel::apply(const State& U, std::span<const double> dW) const {
    if (static_cast<int>(dW.size()) != size()) {
        throw Error(ErrorKind::invalid_value, "increment length does not match the noise model");
    }
    Tendency out(grid_);
    for (int k = 0; k < size(); ++k) {
        if (dW[k] == 0.0) continue;
        const NoiseMode& m = modes_[k];
        Field& dst = out[m.component];
        const Field& e = shapes_[k];
        if (kind_ == NoiseKind::linear_multiplicative) {
            const Field& src = U[m.component];
            const double a = m.amplitude * dW[k];
            for (int kk = 0; kk < grid_.nz(); ++kk)
                for (int j = 0; j < grid_.n2(); ++j)
                    for (int i = 0; i < grid_.n1(); ++i) dst(i, j, kk) += a * e(i, j, kk) * src(i, j, kk);
        } else {
            dst.axpy(coefficient(k, U) * dW[k], e);
        }
    }
    out.fill_ghosts();
    return out;
}

double NoiseModel::hs_norm2(const State& U) const {
    double s = 0.0;
    for (int k = 0; k < size(); ++k) {
        const Tendency c = column(k, U);
        const double n = norm(c[modes_[k].component], NormKind::l2());
        s += n * n;
    }
    return s;
}

Tendency apply_sigma(const NoiseModel& model, const State& U, std::span<const double> dW) {
    return model.apply(U, dW);
}

std::vector<double> sample_increment(const BrownianPath& path, std::uint64_t step, double dt, int K) {
    if (!(dt > 0.0)) throw Error(ErrorKind::invalid_value, "increment requires dt > 0");
    return path.increment(step, dt, K);
}

IsometryReport ito_isometry_check(const NoiseModel& model, const State& U_fixed, double dt,
                                  int steps, int runs, std::uint64_t seed) {
    if (runs < 2 || steps < 1 || !(dt > 0.0)) {
        throw Error(ErrorKind::invalid_value, "isometry check needs runs >= 2, steps >= 1, dt > 0");
    }
    const int K = model.size();
    std::vector<Tendency> cols;
    cols.reserve(K);
    for (int k = 0; k < K; ++k) cols.push_back(model.column(k, U_fixed));
    std::vector<double> gram(static_cast<std::size_t>(K) * K, 0.0);
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b) {
            double s = 0.0;
            for (Component c : all_components) s += inner(cols[a][c], cols[b][c], InnerKind::L2);
            gram[a * K + b] = s;
        }

    IsometryReport rep;
    rep.runs = runs;
    for (int k = 0; k < K; ++k) rep.rhs += gram[k * K + k];
    rep.rhs *= steps * dt;

    double sum = 0.0, sum2 = 0.0;
    std::vector<double> W(K);
    for (int r = 0; r < runs; ++r) {
        const BrownianPath path(seed, static_cast<std::uint32_t>(r));
        std::fill(W.begin(), W.end(), 0.0);
        for (int n = 0; n < steps; ++n) {
            const std::vector<double> dW = path.increment(n, dt, K);
            for (int k = 0; k < K; ++k) W[k] += dW[k];
        }
        double q = 0.0;
        for (int a = 0; a < K; ++a)
            for (int b = 0; b < K; ++b) q += W[a] * gram[a * K + b] * W[b];
        sum += q;
        sum2 += q * q;
    }
    rep.lhs = sum / runs;
    const double var = std::max(0.0, (sum2 - runs * rep.lhs * rep.lhs) / (runs - 1));
    rep.std_error = std::sqrt(var / runs);
    rep.deviation = rep.std_error > 0.0 ? (rep.lhs - rep.rhs) / rep.std_error : 0.0;
    return rep;
}

} // namespace hsto
