#include "mfg/grid.hpp"

#include <cmath>

namespace mfg {

VectorField gradient_x(const ScalarField& f) {
    const Grid& g = f.grid;
    VectorField out(g, f.nt_slices);
    const int n = g.n_space();
    const double inv2h = 1.0 / (2.0 * g.hx());
    for (int k = 0; k < f.nt_slices; ++k) {
        const double* fs = f.slice(k);
        for (int a = 0; a < g.d; ++a) {
            double* oa = out.comp(k, a);
            for (int i = 0; i < n; ++i) {
                oa[i] = (fs[g.neighbor(i, a, +1)] - fs[g.neighbor(i, a, -1)]) * inv2h;
            }
        }
    }
    return out;
}

ScalarField divergence_x(const VectorField& w) {
    const Grid& g = w.grid;
    ScalarField out(g, w.nt_slices);
    const int n = g.n_space();
    const double inv2h = 1.0 / (2.0 * g.hx());
    for (int k = 0; k < w.nt_slices; ++k) {
        double* os = out.slice(k);
        for (int a = 0; a < g.d; ++a) {
            const double* wa = w.comp(k, a);
            for (int i = 0; i < n; ++i) {
                os[i] += (wa[g.neighbor(i, a, +1)] - wa[g.neighbor(i, a, -1)]) * inv2h;
            }
        }
    }
    return out;
}

ScalarField time_derivative(const ScalarField& f) {
    const Grid& g = f.grid;
    if (f.nt_slices != g.nt + 1) throw std::invalid_argument("time_derivative: node field expected");
    ScalarField out = ScalarField::intervals(g);
    const int n = g.n_space();
    const double invht = 1.0 / g.ht();
    for (int k = 0; k < g.nt; ++k) {
        const double* a = f.slice(k);
        const double* b = f.slice(k + 1);
        double* o = out.slice(k);
        for (int i = 0; i < n; ++i) o[i] = (b[i] - a[i]) * invht;
    }
    return out;
}

ScalarField time_average(const ScalarField& f) {
    const Grid& g = f.grid;
    if (f.nt_slices != g.nt + 1) throw std::invalid_argument("time_average: node field expected");
    ScalarField out = ScalarField::intervals(g);
    const int n = g.n_space();
    for (int k = 0; k < g.nt; ++k) {
        const double* a = f.slice(k);
        const double* b = f.slice(k + 1);
        double* o = out.slice(k);
        for (int i = 0; i < n; ++i) o[i] = 0.5 * (a[i] + b[i]);
    }
    return out;
}

double adjoint_pair_check(const ScalarField& u, const ScalarField& a, const VectorField& b) {
    const Grid& g = u.grid;
    if (!(a.grid == g) || !(b.grid == g) || u.nt_slices != g.nt + 1 ||
        a.nt_slices != g.nt || b.nt_slices != g.nt) {
        throw std::invalid_argument("adjoint_pair_check: shape mismatch");
    }
    const int n = g.n_space();
    const double ht = g.ht(), vol = g.cell_volume();

    ScalarField du = time_derivative(u);
    VectorField gu = gradient_x(time_average(u));

    double lhs = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        const double* as = a.slice(k);
        const double* ds = du.slice(k);
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += as[i] * ds[i];
        for (int ax = 0; ax < g.d; ++ax) {
            const double* bs = b.comp(k, ax);
            const double* gs = gu.comp(k, ax);
            for (int i = 0; i < n; ++i) s += bs[i] * gs[i];
        }
        lhs += ht * vol * s;
    }

    ScalarField divb = divergence_x(b);
    // interior rows of D^T mu, plus explicit boundary terms at t=0, t=T
    double rhs = 0.0;
    for (int j = 1; j < g.nt; ++j) {
        const double* us = u.slice(j);
        const double* am = a.slice(j - 1);
        const double* ap = a.slice(j);
        const double* dm = divb.slice(j - 1);
        const double* dp = divb.slice(j);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            s += us[i] * (-(ap[i] - am[i]) - 0.5 * ht * (dm[i] + dp[i]));
        }
        rhs += vol * s;
    }
    double bnd = 0.0;
    {
        const double* u0 = u.slice(0);
        const double* a0 = a.slice(0);
        const double* d0 = divb.slice(0);
        const double* uT = u.slice(g.nt);
        const double* aT = a.slice(g.nt - 1);
        const double* dT = divb.slice(g.nt - 1);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            s += u0[i] * (-a0[i] - 0.5 * ht * d0[i]);
            s += uT[i] * (aT[i] - 0.5 * ht * dT[i]);
        }
        bnd = vol * s;
    }
    return lhs - rhs - bnd;
}

double interp_spatial(const Grid& g, const double* slice, const std::array<double, 2>& x) {
    auto wrap = [](double t) {
        double r = t - std::floor(t);
        return r;
    };
    if (g.d == 1) {
        double p = wrap(x[0]) * g.nx;
        int i0 = static_cast<int>(std::floor(p)) % g.nx;
        double f = p - std::floor(p);
        int i1 = (i0 + 1) % g.nx;
        return (1.0 - f) * slice[i0] + f * slice[i1];
    }
    double px = wrap(x[0]) * g.nx, py = wrap(x[1]) * g.nx;
    int ix = static_cast<int>(std::floor(px)) % g.nx;
    int iy = static_cast<int>(std::floor(py)) % g.nx;
    double fx = px - std::floor(px), fy = py - std::floor(py);
    int jx = (ix + 1) % g.nx, jy = (iy + 1) % g.nx;
    double v00 = slice[iy * g.nx + ix], v10 = slice[iy * g.nx + jx];
    double v01 = slice[jy * g.nx + ix], v11 = slice[jy * g.nx + jx];
    return (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
}

namespace {

// Shift one slice by a (possibly fractional) number of cells per axis.
void shift_slice(const Grid& g, const double* in, double* out, const std::array<double, 2>& cells) {
    const int nx = g.nx;
    auto split = [nx](double c, int& base, double& frac) {
        double fl = std::floor(c);
        frac = c - fl;
        base = static_cast<int>(fl) % nx;
        if (base < 0) base += nx;
    };
    if (g.d == 1) {
        int b;
        double f;
        split(cells[0], b, f);
        for (int i = 0; i < nx; ++i) {
            int i0 = (i + b) % nx;
            int i1 = (i0 + 1) % nx;
            out[i] = (1.0 - f) * in[i0] + f * in[i1];
        }
        return;
    }
    int bx, by;
    double fx, fy;
    split(cells[0], bx, fx);
    split(cells[1], by, fy);
    for (int iy = 0; iy < nx; ++iy) {
        int y0 = (iy + by) % nx, y1 = (y0 + 1) % nx;
        for (int ix = 0; ix < nx; ++ix) {
            int x0 = (ix + bx) % nx, x1 = (x0 + 1) % nx;
            double v00 = in[y0 * nx + x0], v10 = in[y0 * nx + x1];
            double v01 = in[y1 * nx + x0], v11 = in[y1 * nx + x1];
            out[iy * nx + ix] =
                (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11);
        }
    }
}

}  // namespace

ScalarField shift_space(const ScalarField& f, const std::array<double, 2>& delta_cells,
                        const std::vector<double>& zeta) {
    if (static_cast<int>(zeta.size()) != f.nt_slices) {
        throw std::invalid_argument("shift_space: zeta must have one value per slice");
    }
    ScalarField out(f.grid, f.nt_slices);
    for (int k = 0; k < f.nt_slices; ++k) {
        std::array<double, 2> c = {zeta[k] * delta_cells[0], zeta[k] * delta_cells[1]};
        shift_slice(f.grid, f.slice(k), out.slice(k), c);
    }
    return out;
}

double integrate_slice(const ScalarField& f, int k) {
    if (k < 0 || k >= f.nt_slices) throw std::out_of_range("integrate_slice: bad time index");
    const double* s = f.slice(k);
    const int n = f.grid.n_space();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += s[i];
    return sum * f.grid.cell_volume();
}

}  // namespace mfg
