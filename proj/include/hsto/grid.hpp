#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hsto/params.hpp"

namespace hsto {

/// Extents and cell counts of the box [0,L1] x [0,L2] x (-h,0).
struct GridSpec {
    double L1 = 1.0;
    double L2 = 1.0;
    double h = 1.0;
    int N1 = 0;
    int N2 = 0;
    int Nz = 0;

    bool operator==(const GridSpec&) const = default;
};

/// Which part of the boundary a cell touches.
enum class Boundary { top, bottom, lateral };

/// Uniform cell-centred grid with one ghost layer on every face.
///
/// Interior cells are indexed i in [0,N1), j in [0,N2), k in [0,Nz) with k = 0
/// at the bottom. Ghost cells sit at index -1 and N on each axis.
class Grid {
public:
    explicit Grid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    int n1() const { return spec_.N1; }
    int n2() const { return spec_.N2; }
    int nz() const { return spec_.Nz; }
    double dx1() const { return dx1_; }
    double dx2() const { return dx2_; }
    double dz() const { return dz_; }
    double depth() const { return spec_.h; }
    double cell_volume() const { return dx1_ * dx2_ * dz_; }
    double cell_area() const { return dx1_ * dx2_; }

    double x1(int i) const { return (i + 0.5) * dx1_; }
    double x2(int j) const { return (j + 0.5) * dx2_; }
    double z(int k) const { return -spec_.h + (k + 0.5) * dz_; }

    /// Cell-face levels from -h up to 0 (Nz + 1 values).
    std::vector<double> z_levels() const;

    std::size_t interior_count() const {
        return static_cast<std::size_t>(spec_.N1) * spec_.N2 * spec_.Nz;
    }
    std::size_t padded_count() const { return static_cast<std::size_t>(sx_) * sy_ * sz_; }

    std::ptrdiff_t stride_x() const { return 1; }
    std::ptrdiff_t stride_y() const { return sx_; }
    std::ptrdiff_t stride_z() const { return static_cast<std::ptrdiff_t>(sx_) * sy_; }

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k + 1) * sy_ + static_cast<std::size_t>(j + 1)) * sx_ +
               static_cast<std::size_t>(i + 1);
    }

    /// Interior mask (i fastest, then j, then k) of cells adjacent to a boundary part.
    std::vector<std::uint8_t> boundary_mask(Boundary which) const;

    bool operator==(const Grid& other) const { return spec_ == other.spec_; }

private:
    GridSpec spec_;
    double dx1_, dx2_, dz_;
    int sx_, sy_, sz_;
};

/// Validates the spec (extents > 0, counts >= 4) and builds the grid.
Grid make_grid(const GridSpec& spec);

/// Boundary-condition family of a stored field.
///
/// tracer: homogeneous Neumann on every face.
/// velocity: homogeneous Dirichlet on the lateral faces, Neumann top and bottom.
/// surface2d: z-independent field with Neumann lateral faces.
enum class BcKind { tracer, velocity, surface2d };

BcKind bc_kind_of(Component c);

/// Real values on the padded grid of one scalar quantity.
class Field {
public:
    Field(const Grid& grid, BcKind bc);

    /// Samples fn(x1, x2, z) at every cell centre, including ghost cells.
    static Field from_function(const Grid& grid, BcKind bc,
                               const std::function<double(double, double, double)>& fn);

    const Grid& grid() const { return grid_; }
    BcKind bc() const { return bc_; }

    double& operator()(int i, int j, int k) { return data_[grid_.index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[grid_.index(i, j, k)]; }
    double& operator[](std::size_t n) { return data_[n]; }
    double operator[](std::size_t n) const { return data_[n]; }

    std::span<double> raw() { return data_; }
    std::span<const double> raw() const { return data_; }

    /// Interior values in snapshot order (i fastest, k slowest).
    std::vector<double> interior_values() const;
    void set_interior_values(std::span<const double> values);

    void fill(double value);
    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double a);
    /// this += a * x over the whole padded array.
    void axpy(double a, const Field& x);
    /// this = x + a * this over the whole padded array.
    void xpay(double a, const Field& x);

    double interior_sum() const;
    double interior_max_abs() const;
    bool interior_finite() const;

private:
    Grid grid_;
    BcKind bc_;
    std::vector<double> data_;
};

/// Fills the ghost layers of a field from its interior values according to its BcKind.
void fill_ghosts(Field& f);

/// z-independent field on the horizontal cross-section M0, one ghost layer per side.
class SurfaceField {
public:
    enum class Bc { neumann, dirichlet };

    SurfaceField(const Grid& grid, Bc bc = Bc::neumann);

    const Grid& grid() const { return grid_; }
    Bc bc() const { return bc_; }
    int n1() const { return grid_.n1(); }
    int n2() const { return grid_.n2(); }

    double& operator()(int i, int j) { return data_[index(i, j)]; }
    double operator()(int i, int j) const { return data_[index(i, j)]; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j + 1) * (grid_.n1() + 2) + static_cast<std::size_t>(i + 1);
    }

    std::span<double> raw() { return data_; }
    std::span<const double> raw() const { return data_; }

    void fill_ghosts();
    void fill(double value);
    void axpy(double a, const SurfaceField& x);
    void xpay(double a, const SurfaceField& x);
    SurfaceField& operator*=(double a);

    double interior_sum() const;
    double interior_mean() const;
    double interior_max_abs() const;
    void subtract_mean();

private:
    Grid grid_;
    Bc bc_;
    std::vector<double> data_;
};

/// Area-weighted interior inner product of two surface fields.
double dot(const SurfaceField& a, const SurfaceField& b);

/// Prognostic state U = (u, v, T, S) with T, S stored as anomalies about T_r, S_r.
struct State {
    explicit State(const Grid& grid);

    Field u, v, T, S;
    double time = 0.0;

    const Grid& grid() const { return u.grid(); }
    Field& operator[](Component c);
    const Field& operator[](Component c) const;

    State& operator+=(const State& other);
    State& operator-=(const State& other);
    State& operator*=(double a);
    void axpy(double a, const State& x);
    bool finite() const;
};

/// Returns a copy with all ghost layers filled; idempotent, interior untouched.
State apply_bcs(State state);
void apply_bcs_in_place(State& state);

/// Norm selector for norm().
struct NormKind {
    enum class Type { L2, H1, Lp, Aniso };
    Type type = Type::L2;
    /// Lp exponent; inner vertical exponent for Aniso.
    double p = 2.0;
    /// Outer horizontal exponent for Aniso.
    double q = 2.0;

    static NormKind l2() { return {Type::L2, 2.0, 2.0}; }
    static NormKind h1() { return {Type::H1, 2.0, 2.0}; }
    static NormKind lp(double p) { return {Type::Lp, p, p}; }
    static NormKind aniso(double q, double p_z) { return {Type::Aniso, p_z, q}; }
};

enum class InnerKind { L2, V };

/// Midpoint-rule norm of one field. H1 is the weighted form with coefficients `coef`.
double norm(const Field& f, NormKind kind, Diffusivity coef = {});
/// Norm of a set of components treated as one vector field.
double norm(std::span<const Field* const> parts, NormKind kind,
            std::span<const Diffusivity> coefs = {});
/// Norm of the whole state; H1 uses the component coefficients from params.
double norm(const State& U, NormKind kind, const PhysParams& params = {});
/// Norm of the horizontal velocity (u, v) only.
double velocity_norm(const State& U, NormKind kind, const PhysParams& params = {});

/// L2 inner product or the weighted Dirichlet form ((a, b)); requires filled ghosts for V.
double inner(const Field& a, const Field& b, InnerKind kind, Diffusivity coef = {});
double inner(const State& a, const State& b, InnerKind kind, const PhysParams& params = {});

} // namespace hsto
