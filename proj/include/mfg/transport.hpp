#pragma once

#include <span>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Density/momentum pair of the primal problem: m on time nodes,
/// w = m v on time intervals.
struct PrimalState {
    ScalarField m;
    VectorField w;
};

/// Positions on the torus sampled at the grid's time nodes.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::array<double, 2>> positions;  // wrapped to [0,1)^d
};

/// max_k L1-norm of (m_{k+1}-m_k)/ht + div w_k, plus the L1 mismatch of
/// slice 0 with m0. Zero for exactly conservative pairs.
double continuity_residual(const PrimalState& state, const ScalarField& m0);

/// Exact 2-Wasserstein distance on the unit circle between two densities
/// given as cell values (piecewise constant on cells, mass = value/N). Minimizes
/// the quantile-coupling cost over the rotation offset: coarse scan at
/// 1/(4N) resolution, then ternary refinement (the cost is convex in the
/// offset). Throws on mass mismatch > 1e-8 or negative input.
double w2_circle(std::span<const double> mu, std::span<const double> nu);

enum class SpeedMethod { W2, Kinetic };

/// Metric speed of the density curve, one value per time node.
/// W2 route (d=1 only): centered difference quotient of w2_circle.
/// Kinetic route (any d): sqrt(int |w|^2/m dx), an upper bound for the
/// metric derivative; node values average the adjacent intervals.
std::vector<double> metric_speed(const PrimalState& state, SpeedMethod method);

/// Density of (R_delta)_# m_T with R_delta(x) = x - delta*v(x), via the
/// change-of-variables formula m_T(x)/det(Id - delta Dv(x)) evaluated at
/// x = R_delta^{-1}(y). Requires delta*Lip(v) < 1/2. The discrete result
/// is rescaled to the input mass (quadrature drift removal); nonnegativity
/// is preserved exactly.
ScalarField pushforward_terminal(const ScalarField& m_T, const VectorField& v, double delta);

/// Integrate x' = -grad u(t, x) with classic fourth-order Runge-Kutta,
/// bilinear space and linear time interpolation of grad u.
std::vector<Trajectory> flow_trajectories(const ScalarField& u,
                                          std::span<const std::array<double, 2>> starts);

}  // namespace mfg
