#pragma once

#include <complex>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Real-to-complex DFT of spatial slices plus the centered-difference
/// gradient symbol per retained mode. Wraps FFTW with plans created once
/// per grid; transforms are deterministic for a fixed build.
class Spectral {
public:
    explicit Spectral(const Grid& g);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    int n_modes() const { return n_modes_; }

    void forward(const double* slice, std::complex<double>* modes) const;
    void inverse(const std::complex<double>* modes, double* slice) const;

    /// |grad|^2 symbol of the centered difference: sum_a sin^2(theta_a)/hx^2.
    double grad_symbol_sq(int mode) const { return symbol_[mode]; }

private:
    Grid grid_;
    int n_modes_ = 0;
    std::vector<double> symbol_;
    void* plan_fwd_ = nullptr;
    void* plan_inv_ = nullptr;
    mutable std::vector<double> real_buf_;
    mutable std::vector<std::complex<double>> cplx_buf_;
};

/// Solve a tridiagonal system (Thomas algorithm). diag has n entries,
/// sub/super have n-1; rhs is overwritten with the solution.
void solve_tridiagonal(std::vector<double> diag, const std::vector<double>& sub,
                       std::vector<double> super, std::complex<double>* rhs, int n);

/// Solve r(-d_tt - Lap)u = rhs on the grid, periodic in space, with
/// du/dt(0,.) = neumann0 (second-order ghost closure) and u(T,.) = dirichletT.
/// rhs is a node field whose final slice is ignored (that row is the
/// essential condition). Implemented by DFT in space and one tridiagonal
/// solve in time per mode.
ScalarField elliptic_solve(const ScalarField& rhs, const ScalarField& neumann0,
                           const ScalarField& dirichletT, double r);

/// Apply the discrete operator used by elliptic_solve to u (rows 0..Nt-1,
/// including the Neumann closure at t=0). Row Nt of the result is zero.
ScalarField elliptic_apply(const ScalarField& u, const ScalarField& neumann0, double r);

}  // namespace mfg
