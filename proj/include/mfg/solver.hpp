#pragma once

#include <utility>
#include <vector>

#include "mfg/congestion.hpp"
#include "mfg/spectral.hpp"
#include "mfg/transport.hpp"

namespace mfg {

/// Problem data: grid, congestion model, terminal cost Psi (spatial slice),
/// initial density m0 (spatial slice, unit mass), and solver knobs.
struct ProblemSpec {
    Grid grid;
    CongestionModel model = CongestionModel::quadratic();
    ScalarField psi;  // 1 slice
    ScalarField m0;   // 1 slice, >= 0, mass 1
    double r = 1.0;   // augmented-Lagrangian penalty, fixed per run
    int max_iter = 5000;
    double tol = 1e-6;             // relative duality gap
    double tol_continuity = 1e-8;  // discrete continuity residual

    void validate() const;
};

/// Potential u on time nodes with u(T,.) = Psi, and the induced price
/// p = -d_t u + |grad ubar|^2 / 2 on time intervals (ubar = interval
/// time average of u).
struct DualState {
    ScalarField u;
    ScalarField p;
};

struct SolveReport {
    int iterations = 0;
    bool converged = false;
    double primal_value = 0.0;  // B(m, w)
    double dual_value = 0.0;    // -A(u, p)
    double gap = 0.0;           // A + B
    double relative_gap = 0.0;
    double splitting_residual = 0.0;  // ||Du - q||, weighted L2
    double continuity = 0.0;
    double comp_price = 0.0;    // ||p - g(m)||_{L2({m > rho})}, rho = 1e-3
    double comp_kinetic = 0.0;  // int int m |v + grad u|^2
    std::vector<double> gap_history;       // raw per-iteration gap
    std::vector<double> residual_history;  // splitting residual
};

struct SolveResult {
    PrimalState primal;
    DualState dual;
    SolveReport report;
};

/// Primal energy B = sum ht hx^d [ |w|^2/(2 mbar) + G(mbar) ] + int Psi dm_T,
/// where mbar is the interval time average of the nodal density. Conventions:
/// kinetic term is 0 at (0,0) and +inf if w != 0 where mbar <= 1e-12;
/// returns +inf if any mbar < -1e-8 (the solver's recovered density is
/// nonnegative up to that level at convergence; smaller undershoots are
/// clamped to 0).
double evaluate_B(const ProblemSpec& spec, const PrimalState& state);

/// Dual energy A = sum ht hx^d G*(p) - int u(0,.) dm0. Throws if the
/// essential condition u(T,.) = Psi is violated beyond 1e-12.
double evaluate_A(const ProblemSpec& spec, const DualState& dual);

/// Price induced by a potential: p = -d_t u + |grad ubar|^2 / 2.
DualState make_dual(const ProblemSpec& spec, const ScalarField& u);

/// (fenchel_term, kinetic_term) with
///   fenchel = sum ht hx^d (G(mbar) + G*(p) - mbar p)        >= -1e-8
///   kinetic = sum ht hx^d mbar |v + grad ubar|^2 / 2        >= 0
/// and fenchel + kinetic = A + B to 1e-9 relative whenever the primal pair
/// satisfies the discrete continuity equation with m(0,.) = m0 (exact
/// discrete integration by parts; see adjoint_pair_check).
std::pair<double, double> gap_decomposition(const ProblemSpec& spec, const PrimalState& primal,
                                            const DualState& dual);

/// Optimality-system residuals: ||p - g(mbar)||_{L2({mbar > rho})} and
/// int int mbar |v + grad ubar|^2. Both vanish with the duality gap.
std::pair<double, double> mfg_residuals(const ProblemSpec& spec, const PrimalState& primal,
                                        const DualState& dual, double rho);

/// Augmented-Lagrangian splitting on the dual problem (constraint q = Du,
/// D = (d_t, grad o time-average)): alternates a space-time elliptic solve
/// for u, the pointwise prox of H(a,b) = G*(-a + |b|^2/2), and a multiplier
/// update whose multipliers carry the primal pair (mbar = -sigma_a,
/// w = -sigma_b). The nodal density integrates the continuity equation
/// exactly from m0, so mass is conserved to roundoff at every iterate.
/// Returns the best-gap iterate; non-convergence is flagged, never thrown.
SolveResult solve(const ProblemSpec& spec);

}  // namespace mfg
