#include "mfg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <numbers>

namespace mfg {

Spectral::Spectral(const Grid& g) : grid_(g) {
    const int nx = g.nx;
    const int nc = nx / 2 + 1;
    n_modes_ = (g.d == 1) ? nc : nx * nc;
    real_buf_.resize(g.n_space());
    cplx_buf_.resize(n_modes_);

    auto* in = real_buf_.data();
    auto* out = reinterpret_cast<fftw_complex*>(cplx_buf_.data());
    if (g.d == 1) {
        plan_fwd_ = fftw_plan_dft_r2c_1d(nx, in, out, FFTW_ESTIMATE);
        plan_inv_ = fftw_plan_dft_c2r_1d(nx, out, in, FFTW_ESTIMATE);
    } else {
        plan_fwd_ = fftw_plan_dft_r2c_2d(nx, nx, in, out, FFTW_ESTIMATE);
        plan_inv_ = fftw_plan_dft_c2r_2d(nx, nx, out, in, FFTW_ESTIMATE);
    }

    symbol_.resize(n_modes_);
    const double hx = g.hx();
    auto sin2 = [&](int k) {
        double sn = std::sin(2.0 * std::numbers::pi * k / nx) / hx;
        return sn * sn;
    };
    if (g.d == 1) {
        for (int k = 0; k < nc; ++k) symbol_[k] = sin2(k);
    } else {
        for (int ky = 0; ky < nx; ++ky) {
            int kyy = ky <= nx / 2 ? ky : ky - nx;
            for (int kx = 0; kx < nc; ++kx) {
                symbol_[ky * nc + kx] = sin2(kx) + sin2(std::abs(kyy));
            }
        }
    }
}

Spectral::~Spectral() {
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void Spectral::forward(const double* slice, std::complex<double>* modes) const {
    std::memcpy(real_buf_.data(), slice, sizeof(double) * grid_.n_space());
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    const double scale = 1.0 / grid_.n_space();
    for (int m = 0; m < n_modes_; ++m) modes[m] = cplx_buf_[m] * scale;
}

void Spectral::inverse(const std::complex<double>* modes, double* slice) const {
    std::memcpy(cplx_buf_.data(), modes, sizeof(std::complex<double>) * n_modes_);
    fftw_execute(static_cast<fftw_plan>(plan_inv_));
    std::memcpy(slice, real_buf_.data(), sizeof(double) * grid_.n_space());
}

void solve_tridiagonal(std::vector<double> diag, const std::vector<double>& sub,
                       std::vector<double> super, std::complex<double>* rhs, int n) {
    for (int i = 1; i < n; ++i) {
        double m = sub[i - 1] / diag[i - 1];
        diag[i] -= m * super[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i) {
        rhs[i] = (rhs[i] - super[i] * rhs[i + 1]) / diag[i];
    }
}

ScalarField elliptic_solve(const ScalarField& rhs, const ScalarField& neumann0,
                           const ScalarField& dirichletT, double r) {
    const Grid& g = rhs.grid;
    if (!(r > 0.0)) throw std::invalid_argument("elliptic_solve: r > 0 required");
    if (rhs.nt_slices != g.nt + 1 || neumann0.nt_slices != 1 || dirichletT.nt_slices != 1) {
        throw std::invalid_argument("elliptic_solve: shape mismatch");
    }
    Spectral spec(g);
    const int nt = g.nt, nm = spec.n_modes();
    const double ht = g.ht();
    const double iht2 = 1.0 / (ht * ht);

    // transform rhs rows 0..nt-1, boundary data
    std::vector<std::complex<double>> rhat(static_cast<size_t>(nt) * nm);
    std::vector<std::complex<double>> nhat(nm), dhat(nm);
    for (int k = 0; k < nt; ++k) spec.forward(rhs.slice(k), rhat.data() + static_cast<size_t>(k) * nm);
    spec.forward(neumann0.slice(0), nhat.data());
    spec.forward(dirichletT.slice(0), dhat.data());

    ScalarField u = ScalarField::nodes(g);
    std::vector<std::complex<double>> uhat(static_cast<size_t>(nt + 1) * nm);
    std::vector<std::complex<double>> col(nt);
    std::vector<double> diag(nt), sub(nt - 1), super(nt - 1);

    for (int m = 0; m < nm; ++m) {
        const double lam = spec.grad_symbol_sq(m);
        // rows j=0..nt-1; u_nt = dhat known. Row 0 carries the ghost-node
        // Neumann closure (coefficient -2 on u_1).
        for (int j = 0; j < nt; ++j) diag[j] = r * (2.0 * iht2 + lam);
        for (int j = 0; j + 1 < nt; ++j) {
            sub[j] = -r * iht2;
            super[j] = -r * iht2;
        }
        super[0] = -2.0 * r * iht2;
        for (int j = 0; j < nt; ++j) col[j] = rhat[static_cast<size_t>(j) * nm + m];
        col[0] -= 2.0 * r / ht * nhat[m];
        col[nt - 1] += r * iht2 * dhat[m];
        solve_tridiagonal(diag, sub, super, col.data(), nt);
        for (int j = 0; j < nt; ++j) uhat[static_cast<size_t>(j) * nm + m] = col[j];
        uhat[static_cast<size_t>(nt) * nm + m] = dhat[m];
    }
    for (int k = 0; k <= nt; ++k) spec.inverse(uhat.data() + static_cast<size_t>(k) * nm, u.slice(k));
    return u;
}

ScalarField elliptic_apply(const ScalarField& u, const ScalarField& neumann0, double r) {
    const Grid& g = u.grid;
    const int nt = g.nt, n = g.n_space();
    const double ht = g.ht(), iht2 = 1.0 / (ht * ht);
    ScalarField out = ScalarField::nodes(g);

    // -Lap = div(grad) with centered stencils, applied slice by slice
    VectorField gu = gradient_x(u);
    ScalarField lap = divergence_x(gu);

    for (int j = 0; j < nt; ++j) {
        const double* uj = u.slice(j);
        const double* lj = lap.slice(j);
        double* oj = out.slice(j);
        if (j == 0) {
            const double* u1 = u.slice(1);
            const double* nn = neumann0.slice(0);
            for (int i = 0; i < n; ++i) {
                oj[i] = r * ((2.0 * uj[i] - 2.0 * u1[i]) * iht2 + 2.0 * nn[i] / ht - lj[i]);
            }
        } else {
            const double* um = u.slice(j - 1);
            const double* up = u.slice(j + 1);
            for (int i = 0; i < n; ++i) {
                oj[i] = r * (-(um[i] - 2.0 * uj[i] + up[i]) * iht2 - lj[i]);
            }
        }
    }
    return out;
}

}  // namespace mfg
