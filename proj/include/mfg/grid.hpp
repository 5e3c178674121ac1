#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfg {

/// Uniform space-time grid on [0,T] x T^d (flat torus with unit side).
///
/// Scalar unknowns such as the density m and the potential u live on the
/// Nt+1 time nodes t_k = k*ht; momentum-like quantities (w, the price p,
/// time derivatives) live on the Nt interval midpoints. Space is collocated
/// with centered periodic differences, which keeps the discrete
/// gradient/divergence pair exactly adjoint.
struct Grid {
    int d = 1;       // spatial dimension, 1 or 2
    int nx = 4;      // cells per spatial axis
    int nt = 4;      // time intervals
    double T = 1.0;  // horizon

    double hx() const { return 1.0 / nx; }
    double ht() const { return T / nt; }
    int n_space() const { return d == 1 ? nx : nx * nx; }
    double cell_volume() const { return d == 1 ? hx() : hx() * hx(); }

    void validate() const {
        if (d != 1 && d != 2) throw std::invalid_argument("d must be 1 or 2");
        if (nx < 4) throw std::invalid_argument("Nx >= 4 required");
        if (nt < 4) throw std::invalid_argument("Nt >= 4 required");
        if (!(T > 0.0)) throw std::invalid_argument("T > 0 required");
    }

    bool operator==(const Grid& o) const {
        return d == o.d && nx == o.nx && nt == o.nt && T == o.T;
    }

    /// Flatten a spatial multi-index (row-major, periodic not applied here).
    int index(int ix, int iy = 0) const { return d == 1 ? ix : iy * nx + ix; }

    /// Periodic neighbor of flat index i along `axis`, offset by `step` cells.
    int neighbor(int i, int axis, int step) const {
        if (d == 1) {
            int j = (i + step) % nx;
            return j < 0 ? j + nx : j;
        }
        int ix = i % nx, iy = i / nx;
        if (axis == 0) {
            ix = (ix + step) % nx;
            if (ix < 0) ix += nx;
        } else {
            iy = (iy + step) % nx;
            if (iy < 0) iy += nx;
        }
        return iy * nx + ix;
    }
};

/// Scalar values on `nt_slices` time slices of a grid's spatial nodes.
/// nt_slices is grid.nt+1 for node-centered fields, grid.nt for
/// interval-centered ones, and 1 for purely spatial data.
struct ScalarField {
    Grid grid;
    int nt_slices = 0;
    std::vector<double> v;

    ScalarField() = default;
    ScalarField(const Grid& g, int slices)
        : grid(g), nt_slices(slices), v(static_cast<size_t>(slices) * g.n_space(), 0.0) {}

    static ScalarField nodes(const Grid& g) { return ScalarField(g, g.nt + 1); }
    static ScalarField intervals(const Grid& g) { return ScalarField(g, g.nt); }
    static ScalarField spatial(const Grid& g) { return ScalarField(g, 1); }

    double& at(int k, int i) { return v[static_cast<size_t>(k) * grid.n_space() + i]; }
    double at(int k, int i) const { return v[static_cast<size_t>(k) * grid.n_space() + i]; }
    double* slice(int k) { return v.data() + static_cast<size_t>(k) * grid.n_space(); }
    const double* slice(int k) const { return v.data() + static_cast<size_t>(k) * grid.n_space(); }
};

/// d spatial components per (time slice, space node). Layout: [k][axis][space].
struct VectorField {
    Grid grid;
    int nt_slices = 0;
    std::vector<double> v;

    VectorField() = default;
    VectorField(const Grid& g, int slices)
        : grid(g), nt_slices(slices),
          v(static_cast<size_t>(slices) * g.d * g.n_space(), 0.0) {}

    static VectorField intervals(const Grid& g) { return VectorField(g, g.nt); }
    static VectorField nodes(const Grid& g) { return VectorField(g, g.nt + 1); }
    static VectorField spatial(const Grid& g) { return VectorField(g, 1); }

    double& at(int k, int a, int i) {
        return v[(static_cast<size_t>(k) * grid.d + a) * grid.n_space() + i];
    }
    double at(int k, int a, int i) const {
        return v[(static_cast<size_t>(k) * grid.d + a) * grid.n_space() + i];
    }
    double* comp(int k, int a) {
        return v.data() + (static_cast<size_t>(k) * grid.d + a) * grid.n_space();
    }
    const double* comp(int k, int a) const {
        return v.data() + (static_cast<size_t>(k) * grid.d + a) * grid.n_space();
    }
};

// ---- discrete calculus ----------------------------------------------------

/// Centered periodic spatial gradient, slice by slice.
VectorField gradient_x(const ScalarField& f);

/// Centered periodic divergence; exact negative adjoint of gradient_x.
ScalarField divergence_x(const VectorField& w);

/// Forward time difference (f_{k+1}-f_k)/ht, node field -> interval field.
ScalarField time_derivative(const ScalarField& f);

/// Interval time average (f_k+f_{k+1})/2, node field -> interval field.
ScalarField time_average(const ScalarField& f);

/// Residual of the discrete integration-by-parts identity
///   <Du, mu> - <u, D^T mu> - boundary(t=0) - boundary(t=T)
/// where D = (d_t, grad o time_average) and mu = (a, b) is an interval pair.
/// Exactly zero up to roundoff for compatible shapes.
double adjoint_pair_check(const ScalarField& u, const ScalarField& a, const VectorField& b);

/// f(t, x + zeta(t)*delta*hx) with periodic linear interpolation for
/// fractional cell offsets. zeta is sampled once per slice of f.
ScalarField shift_space(const ScalarField& f, const std::array<double, 2>& delta_cells,
                        const std::vector<double>& zeta);

/// Integral of slice k over the torus: hx^d * sum.
double integrate_slice(const ScalarField& f, int k);

/// Periodic (bi)linear interpolation of a spatial slice at point x in [0,1)^d.
double interp_spatial(const Grid& g, const double* slice, const std::array<double, 2>& x);

}  // namespace mfg
