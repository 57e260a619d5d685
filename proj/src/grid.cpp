#include "hsto/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hsto/error.hpp"

namespace hsto {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::unsupported_kind: return "unsupported-kind";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::solver_divergence: return "solver-divergence";
    case ErrorKind::hypothesis_violation: return "hypothesis-violation";
    case ErrorKind::missing_terms: return "missing-terms";
    case ErrorKind::unsorted_series: return "unsorted-series";
    case ErrorKind::empty_set: return "empty-set";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::unknown_key: return "unknown-key";
    case ErrorKind::invalid_value: return "invalid-value";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::blowup_detected: return "blow-up-detected";
    }
    return "unknown";
}

std::string_view to_string(Component c) {
    switch (c) {
    case Component::u: return "u";
    case Component::v: return "v";
    case Component::T: return "T";
    case Component::S: return "S";
    }
    return "?";
}

void PhysParams::validate() const {
    auto require = [](bool ok, const char* key, const char* what) {
        if (!ok) {
            throw Error(ErrorKind::invalid_value, std::string("[physics].") + key + " " + what);
        }
    };
    require(mu_v > 0, "mu_v", "must be > 0");
    require(nu_v > 0, "nu_v", "must be > 0");
    require(mu_T > 0, "mu_T", "must be > 0");
    require(nu_T > 0, "nu_T", "must be > 0");
    require(mu_S > 0, "mu_S", "must be > 0");
    require(nu_S > 0, "nu_S", "must be > 0");
    require(rho0 > 0, "rho0", "must be > 0");
    require(g >= 0, "g", "must be >= 0");
    require(std::isfinite(f) && std::isfinite(beta_T) && std::isfinite(beta_S), "f/beta",
            "must be finite");
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(const GridSpec& spec)
    : spec_(spec),
      dx1_(spec.L1 / spec.N1),
      dx2_(spec.L2 / spec.N2),
      dz_(spec.h / spec.Nz),
      sx_(spec.N1 + 2),
      sy_(spec.N2 + 2),
      sz_(spec.Nz + 2) {
    if (!(spec.L1 > 0 && spec.L2 > 0 && spec.h > 0) || spec.N1 < 4 || spec.N2 < 4 ||
        spec.Nz < 4) {
        std::ostringstream msg;
        msg << "invalid grid spec: extents (" << spec.L1 << ", " << spec.L2 << ", " << spec.h
            << ") must be positive and counts (" << spec.N1 << ", " << spec.N2 << ", " << spec.Nz
            << ") at least 4";
        throw Error(ErrorKind::invalid_spec, msg.str());
    }
}

std::vector<double> Grid::z_levels() const {
    std::vector<double> z(spec_.Nz + 1);
    for (int k = 0; k <= spec_.Nz; ++k) z[k] = -spec_.h + k * dz_;
    z.back() = 0.0;
    return z;
}

std::vector<std::uint8_t> Grid::boundary_mask(Boundary which) const {
    std::vector<std::uint8_t> mask(interior_count(), 0);
    std::size_t n = 0;
    for (int k = 0; k < spec_.Nz; ++k)
        for (int j = 0; j < spec_.N2; ++j)
            for (int i = 0; i < spec_.N1; ++i, ++n) {
                switch (which) {
                case Boundary::top: mask[n] = k == spec_.Nz - 1; break;
                case Boundary::bottom: mask[n] = k == 0; break;
                case Boundary::lateral:
                    mask[n] = i == 0 || j == 0 || i == spec_.N1 - 1 || j == spec_.N2 - 1;
                    break;
                }
            }
    return mask;
}

Grid make_grid(const GridSpec& spec) { return Grid(spec); }

BcKind bc_kind_of(Component c) { return is_velocity(c) ? BcKind::velocity : BcKind::tracer; }

// ---------------------------------------------------------------------------
// Field

Field::Field(const Grid& grid, BcKind bc) : grid_(grid), bc_(bc), data_(grid.padded_count(), 0.0) {}

Field Field::from_function(const Grid& grid, BcKind bc,
                           const std::function<double(double, double, double)>& fn) {
    Field f(grid, bc);
    for (int k = -1; k <= grid.nz(); ++k)
        for (int j = -1; j <= grid.n2(); ++j)
            for (int i = -1; i <= grid.n1(); ++i) f(i, j, k) = fn(grid.x1(i), grid.x2(j), grid.z(k));
    return f;
}

std::vector<double> Field::interior_values() const {
    std::vector<double> out;
    out.reserve(grid_.interior_count());
    for (int k = 0; k < grid_.nz(); ++k)
        for (int j = 0; j < grid_.n2(); ++j) {
            const std::size_t n0 = grid_.index(0, j, k);
            out.insert(out.end(), data_.begin() + n0, data_.begin() + n0 + grid_.n1());
        }
    return out;
}

void Field::set_interior_values(std::span<const double> values) {
    if (values.size() != grid_.interior_count()) {
        throw Error(ErrorKind::grid_mismatch, "interior value count does not match the grid");
    }
    auto it = values.begin();
    for (int k = 0; k < grid_.nz(); ++k)
        for (int j = 0; j < grid_.n2(); ++j) {
            const std::size_t n0 = grid_.index(0, j, k);
            std::copy(it, it + grid_.n1(), data_.begin() + n0);
            it += grid_.n1();
        }
}

void Field::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Field& Field::operator+=(const Field& other) {
    axpy(1.0, other);
    return *this;
}

Field& Field::operator-=(const Field& other) {
    axpy(-1.0, other);
    return *this;
}

Field& Field::operator*=(double a) {
    for (double& x : data_) x *= a;
    return *this;
}

void Field::axpy(double a, const Field& x) {
    if (!(grid_ == x.grid_)) throw Error(ErrorKind::grid_mismatch, "fields live on different grids");
    const double* xs = x.data_.data();
    double* ys = data_.data();
    const std::size_t n = data_.size();
    for (std::size_t m = 0; m < n; ++m) ys[m] += a * xs[m];
}

void Field::xpay(double a, const Field& x) {
    if (!(grid_ == x.grid_)) throw Error(ErrorKind::grid_mismatch, "fields live on different grids");
    const double* xs = x.data_.data();
    double* ys = data_.data();
    const std::size_t n = data_.size();
    for (std::size_t m = 0; m < n; ++m) ys[m] = xs[m] + a * ys[m];
}

double Field::interior_sum() const {
    double s = 0.0;
    for (int k = 0; k < grid_.nz(); ++k)
        for (int j = 0; j < grid_.n2(); ++j) {
            const double* row = data_.data() + grid_.index(0, j, k);
            for (int i = 0; i < grid_.n1(); ++i) s += row[i];
        }
    return s;
}

double Field::interior_max_abs() const {
    double m = 0.0;
    for (int k = 0; k < grid_.nz(); ++k)
        for (int j = 0; j < grid_.n2(); ++j) {
            const double* row = data_.data() + grid_.index(0, j, k);
            for (int i = 0; i < grid_.n1(); ++i) m = std::max(m, std::abs(row[i]));
        }
    return m;
}

bool Field::interior_finite() const {
    for (int k = 0; k < grid_.nz(); ++k)
        for (int j = 0; j < grid_.n2(); ++j) {
            const double* row = data_.data() + grid_.index(0, j, k);
            for (int i = 0; i < grid_.n1(); ++i)
                if (!std::isfinite(row[i])) return false;
        }
    return true;
}

void fill_ghosts(Field& f) {
    const Grid& g = f.grid();
    const int N1 = g.n1(), N2 = g.n2(), Nz = g.nz();
    const double lateral_sign = f.bc() == BcKind::velocity ? -1.0 : 1.0;
    // x faces over interior (j, k)
    for (int k = 0; k < Nz; ++k)
        for (int j = 0; j < N2; ++j) {
            f(-1, j, k) = lateral_sign * f(0, j, k);
            f(N1, j, k) = lateral_sign * f(N1 - 1, j, k);
        }
    // y faces, including the x ghosts so edges are consistent
    for (int k = 0; k < Nz; ++k)
        for (int i = -1; i <= N1; ++i) {
            f(i, -1, k) = lateral_sign * f(i, 0, k);
            f(i, N2, k) = lateral_sign * f(i, N2 - 1, k);
        }
    // z faces: Neumann for every kind
    for (int j = -1; j <= N2; ++j)
        for (int i = -1; i <= N1; ++i) {
            f(i, j, -1) = f(i, j, 0);
            f(i, j, Nz) = f(i, j, Nz - 1);
        }
}

// ---------------------------------------------------------------------------
// SurfaceField

SurfaceField::SurfaceField(const Grid& grid, Bc bc)
    : grid_(grid), bc_(bc), data_(static_cast<std::size_t>(grid.n1() + 2) * (grid.n2() + 2), 0.0) {}

void SurfaceField::fill_ghosts() {
    const int N1 = grid_.n1(), N2 = grid_.n2();
    const double s = bc_ == Bc::dirichlet ? -1.0 : 1.0;
    for (int j = 0; j < N2; ++j) {
        (*this)(-1, j) = s * (*this)(0, j);
        (*this)(N1, j) = s * (*this)(N1 - 1, j);
    }
    for (int i = -1; i <= N1; ++i) {
        (*this)(i, -1) = s * (*this)(i, 0);
        (*this)(i, N2) = s * (*this)(i, N2 - 1);
    }
}

void SurfaceField::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void SurfaceField::axpy(double a, const SurfaceField& x) {
    for (std::size_t m = 0; m < data_.size(); ++m) data_[m] += a * x.data_[m];
}

void SurfaceField::xpay(double a, const SurfaceField& x) {
    for (std::size_t m = 0; m < data_.size(); ++m) data_[m] = x.data_[m] + a * data_[m];
}

SurfaceField& SurfaceField::operator*=(double a) {
    for (double& x : data_) x *= a;
    return *this;
}

double SurfaceField::interior_sum() const {
    double s = 0.0;
    for (int j = 0; j < n2(); ++j)
        for (int i = 0; i < n1(); ++i) s += (*this)(i, j);
    return s;
}

double SurfaceField::interior_mean() const {
    return interior_sum() / (static_cast<double>(n1()) * n2());
}

double SurfaceField::interior_max_abs() const {
    double m = 0.0;
    for (int j = 0; j < n2(); ++j)
        for (int i = 0; i < n1(); ++i) m = std::max(m, std::abs((*this)(i, j)));
    return m;
}

void SurfaceField::subtract_mean() {
    const double mean = interior_mean();
    for (int j = 0; j < n2(); ++j)
        for (int i = 0; i < n1(); ++i) (*this)(i, j) -= mean;
    fill_ghosts();
}

double dot(const SurfaceField& a, const SurfaceField& b) {
    double s = 0.0;
    for (int j = 0; j < a.n2(); ++j)
        for (int i = 0; i < a.n1(); ++i) s += a(i, j) * b(i, j);
    return s * a.grid().cell_area();
}

// ---------------------------------------------------------------------------
// State

State::State(const Grid& grid)
    : u(grid, BcKind::velocity), v(grid, BcKind::velocity), T(grid, BcKind::tracer),
      S(grid, BcKind::tracer) {}

Field& State::operator[](Component c) {
    switch (c) {
    case Component::u: return u;
    case Component::v: return v;
    case Component::T: return T;
    case Component::S: return S;
    }
    return u;
}

const Field& State::operator[](Component c) const {
    return const_cast<State&>(*this)[c];
}

State& State::operator+=(const State& other) {
    axpy(1.0, other);
    return *this;
}

State& State::operator-=(const State& other) {
    axpy(-1.0, other);
    return *this;
}

State& State::operator*=(double a) {
    for (Component c : all_components) (*this)[c] *= a;
    return *this;
}

void State::axpy(double a, const State& x) {
    for (Component c : all_components) (*this)[c].axpy(a, x[c]);
}

bool State::finite() const {
    for (Component c : all_components)
        if (!(*this)[c].interior_finite()) return false;
    return true;
}

State apply_bcs(State state) {
    apply_bcs_in_place(state);
    return state;
}

void apply_bcs_in_place(State& state) {
    for (Component c : all_components) fill_ghosts(state[c]);
}

// ---------------------------------------------------------------------------
// Norms and inner products

namespace {

void check_same_grid(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid())) {
        throw Error(ErrorKind::grid_mismatch, "operands live on different grids");
    }
}

double l2_inner(const Field& a, const Field& b) {
    const Grid& g = a.grid();
    double s = 0.0;
    for (int k = 0; k < g.nz(); ++k)
        for (int j = 0; j < g.n2(); ++j) {
            const std::size_t n0 = g.index(0, j, k);
            for (int i = 0; i < g.n1(); ++i) s += a[n0 + i] * b[n0 + i];
        }
    return s * g.cell_volume();
}

// Face-based Dirichlet form; boundary faces carry half weight so that the form
// equals <A a, b> for the compact three-point stencils with the ghost fill.
double dirichlet_form(const Field& a, const Field& b, Diffusivity coef) {
    const Grid& g = a.grid();
    const int N1 = g.n1(), N2 = g.n2(), Nz = g.nz();
    const double cx = coef.mu / (g.dx1() * g.dx1());
    const double cy = coef.mu / (g.dx2() * g.dx2());
    const double cz = coef.nu / (g.dz() * g.dz());
    double sx = 0.0, sy = 0.0, sz = 0.0;
    for (int k = 0; k < Nz; ++k)
        for (int j = 0; j < N2; ++j)
            for (int i = -1; i < N1; ++i) {
                const double w = (i == -1 || i == N1 - 1) ? 0.5 : 1.0;
                sx += w * (a(i + 1, j, k) - a(i, j, k)) * (b(i + 1, j, k) - b(i, j, k));
            }
    for (int k = 0; k < Nz; ++k)
        for (int j = -1; j < N2; ++j)
            for (int i = 0; i < N1; ++i) {
                const double w = (j == -1 || j == N2 - 1) ? 0.5 : 1.0;
                sy += w * (a(i, j + 1, k) - a(i, j, k)) * (b(i, j + 1, k) - b(i, j, k));
            }
    for (int k = -1; k < Nz; ++k) {
        const double w = (k == -1 || k == Nz - 1) ? 0.5 : 1.0;
        for (int j = 0; j < N2; ++j)
            for (int i = 0; i < N1; ++i)
                sz += w * (a(i, j, k + 1) - a(i, j, k)) * (b(i, j, k + 1) - b(i, j, k));
    }
    return (cx * sx + cy * sy + cz * sz) * g.cell_volume();
}

void check_exponents(NormKind kind) {
    if (kind.type == NormKind::Type::Lp && !(kind.p >= 1.0)) {
        throw Error(ErrorKind::unsupported_kind, "Lp norm requires p >= 1");
    }
    if (kind.type == NormKind::Type::Aniso && !(kind.p >= 1.0 && kind.q >= 1.0)) {
        throw Error(ErrorKind::unsupported_kind, "anisotropic norm requires q, p >= 1");
    }
}

} // namespace

double norm(std::span<const Field* const> parts, NormKind kind, std::span<const Diffusivity> coefs) {
    check_exponents(kind);
    if (parts.empty()) return 0.0;
    for (const Field* f : parts) check_same_grid(*parts.front(), *f);
    const Grid& g = parts.front()->grid();
    switch (kind.type) {
    case NormKind::Type::L2: {
        double s = 0.0;
        for (const Field* f : parts) s += l2_inner(*f, *f);
        return std::sqrt(s);
    }
    case NormKind::Type::H1: {
        double s = 0.0;
        for (std::size_t m = 0; m < parts.size(); ++m) {
            const Diffusivity c = m < coefs.size() ? coefs[m] : Diffusivity{};
            s += dirichlet_form(*parts[m], *parts[m], c);
        }
        return std::sqrt(std::max(s, 0.0));
    }
    case NormKind::Type::Lp: {
        const double p = kind.p;
        double s = 0.0;
        for (const Field* f : parts)
            for (int k = 0; k < g.nz(); ++k)
                for (int j = 0; j < g.n2(); ++j)
                    for (int i = 0; i < g.n1(); ++i) s += std::pow(std::abs((*f)(i, j, k)), p);
        return std::pow(s * g.cell_volume(), 1.0 / p);
    }
    case NormKind::Type::Aniso: {
        const double p = kind.p, q = kind.q;
        double outer = 0.0;
        for (int j = 0; j < g.n2(); ++j)
            for (int i = 0; i < g.n1(); ++i) {
                double column = 0.0;
                for (const Field* f : parts)
                    for (int k = 0; k < g.nz(); ++k) column += std::pow(std::abs((*f)(i, j, k)), p);
                column *= g.dz();
                outer += std::pow(column, q / p);
            }
        return std::pow(outer * g.cell_area(), 1.0 / q);
    }
    }
    throw Error(ErrorKind::unsupported_kind, "unknown norm kind");
}

double norm(const Field& f, NormKind kind, Diffusivity coef) {
    const Field* parts[] = {&f};
    const Diffusivity coefs[] = {coef};
    return norm(parts, kind, coefs);
}

double norm(const State& U, NormKind kind, const PhysParams& params) {
    const Field* parts[] = {&U.u, &U.v, &U.T, &U.S};
    const Diffusivity coefs[] = {params.diffusivity(Component::u), params.diffusivity(Component::v),
                                 params.diffusivity(Component::T), params.diffusivity(Component::S)};
    return norm(parts, kind, coefs);
}

double velocity_norm(const State& U, NormKind kind, const PhysParams& params) {
    const Field* parts[] = {&U.u, &U.v};
    const Diffusivity coefs[] = {params.diffusivity(Component::u), params.diffusivity(Component::v)};
    return norm(parts, kind, coefs);
}

double inner(const Field& a, const Field& b, InnerKind kind, Diffusivity coef) {
    check_same_grid(a, b);
    return kind == InnerKind::L2 ? l2_inner(a, b) : dirichlet_form(a, b, coef);
}

double inner(const State& a, const State& b, InnerKind kind, const PhysParams& params) {
    double s = 0.0;
    for (Component c : all_components) s += inner(a[c], b[c], kind, params.diffusivity(c));
    return s;
}

} // namespace hsto
