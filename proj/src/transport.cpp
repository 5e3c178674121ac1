#include "mfg/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfg {

double continuity_residual(const PrimalState& state, const ScalarField& m0) {
    const Grid& g = state.m.grid;
    if (!(state.w.grid == g) || state.m.nt_slices != g.nt + 1 || state.w.nt_slices != g.nt ||
        !(m0.grid == g) || m0.nt_slices != 1) {
        throw std::invalid_argument("continuity_residual: shape mismatch");
    }
    const int n = g.n_space();
    const double invht = 1.0 / g.ht(), vol = g.cell_volume();
    ScalarField divw = divergence_x(state.w);
    double worst = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        const double* a = state.m.slice(k);
        const double* b = state.m.slice(k + 1);
        const double* dv = divw.slice(k);
        double l1 = 0.0;
        for (int i = 0; i < n; ++i) l1 += std::abs((b[i] - a[i]) * invht + dv[i]);
        worst = std::max(worst, l1 * vol);
    }
    double mismatch = 0.0;
    for (int i = 0; i < n; ++i) mismatch += std::abs(state.m.at(0, i) - m0.at(0, i));
    return worst + mismatch * vol;
}

namespace {

// Piecewise-linear quantile of a 1-D circular density that is piecewise
// constant on the grid cells [i/n, (i+1)/n); zero-mass cells become jumps.
// Treating the input as a density (rather than atoms at cell centers) keeps
// sub-cell displacements first order in the transport cost.
struct Quantile {
    std::vector<double> cum;    // cumulative mass after each segment, last = M
    std::vector<double> left;   // left edge position of each segment
    std::vector<double> slope;  // dQ/dt = 1/density on each segment

    double total() const { return cum.back(); }

    // Extended quantile: Q(t + k*total) = Q(t) + k.
    double eval(double t) const {
        double M = total();
        double k = std::floor(t / M);
        double tf = t - k * M;
        size_t j = std::upper_bound(cum.begin(), cum.end(), tf) - cum.begin();
        if (j >= left.size()) j = left.size() - 1;
        double t0 = (j == 0) ? 0.0 : cum[j - 1];
        return left[j] + (tf - t0) * slope[j] + k;
    }
};

Quantile build_quantile(std::span<const double> density) {
    const int n = static_cast<int>(density.size());
    Quantile q;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double mass = density[i] / n;
        if (mass <= 0.0) continue;
        acc += mass;
        q.cum.push_back(acc);
        q.left.push_back(static_cast<double>(i) / n);
        q.slope.push_back(1.0 / density[i]);
    }
    if (q.cum.empty()) throw std::invalid_argument("w2_circle: zero-mass input");
    return q;
}

// Exact integral of (Q_mu(t) - Q_nu(t + alpha))^2 over t in (0, M): the
// integrand is quadratic between merged breakpoints, so 3-point Gauss
// quadrature (interior nodes, no jump ambiguity) is exact per segment.
double coupling_cost(const Quantile& mu, const Quantile& nu, double alpha) {
    const double M = mu.total();
    std::vector<double> bp;
    bp.reserve(mu.cum.size() + 3 * nu.cum.size() + 2);
    bp.push_back(0.0);
    bp.push_back(M);
    for (double c : mu.cum) {
        if (c > 0.0 && c < M) bp.push_back(c);
    }
    for (double c : nu.cum) {
        for (int k = -2; k <= 2; ++k) {
            double t = c - alpha + k * M;
            if (t > 0.0 && t < M) bp.push_back(t);
        }
    }
    std::sort(bp.begin(), bp.end());
    constexpr double kGaussOff = 0.38729833462074169;  // sqrt(3/5)/2
    constexpr double kWMid = 8.0 / 18.0, kWOut = 5.0 / 18.0;
    double cost = 0.0;
    for (size_t s = 0; s + 1 < bp.size(); ++s) {
        double len = bp[s + 1] - bp[s];
        if (len <= 0.0) continue;
        double tm = 0.5 * (bp[s] + bp[s + 1]);
        double acc = 0.0;
        const double nodes[3] = {tm - kGaussOff * len, tm, tm + kGaussOff * len};
        const double wts[3] = {kWOut, kWMid, kWOut};
        for (int qn = 0; qn < 3; ++qn) {
            double diff = mu.eval(nodes[qn]) - nu.eval(nodes[qn] + alpha);
            acc += wts[qn] * diff * diff;
        }
        cost += acc * len;
    }
    return cost;
}

}  // namespace

double w2_circle(std::span<const double> mu, std::span<const double> nu) {
    if (mu.size() != nu.size()) throw std::invalid_argument("w2_circle: size mismatch");
    const int n = static_cast<int>(mu.size());
    double ma = 0.0, mb = 0.0;
    for (int i = 0; i < n; ++i) {
        if (mu[i] < 0.0 || nu[i] < 0.0) throw std::invalid_argument("w2_circle: negative input");
        ma += mu[i] / n;
        mb += nu[i] / n;
    }
    if (std::abs(ma - mb) > 1e-8) throw std::invalid_argument("w2_circle: mass mismatch");

    Quantile qm = build_quantile(mu), qn = build_quantile(nu);
    const double M = qm.total();

    // coarse scan of the (convex) offset cost, then ternary refinement
    const double step = 1.0 / (4.0 * n);
    double best_a = 0.0, best_c = coupling_cost(qm, qn, 0.0);
    for (double a = -M; a <= M + 1e-15; a += step * M) {
        double c = coupling_cost(qm, qn, a);
        if (c < best_c) {
            best_c = c;
            best_a = a;
        }
    }
    double lo = best_a - step * M, hi = best_a + step * M;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        double a1 = lo + (hi - lo) / 3.0, a2 = hi - (hi - lo) / 3.0;
        if (coupling_cost(qm, qn, a1) <= coupling_cost(qm, qn, a2)) hi = a2;
        else lo = a1;
    }
    double c = coupling_cost(qm, qn, 0.5 * (lo + hi));
    return std::sqrt(std::min(c, best_c));
}

std::vector<double> metric_speed(const PrimalState& state, SpeedMethod method) {
    const Grid& g = state.m.grid;
    const int nt = g.nt, n = g.n_space();
    const double ht = g.ht();
    std::vector<double> out(nt + 1, 0.0);

    if (method == SpeedMethod::W2) {
        if (g.d != 1) throw std::invalid_argument("metric_speed: w2 route requires d = 1");
        auto slice = [&](int k) { return std::span<const double>(state.m.slice(k), n); };
        out[0] = w2_circle(slice(0), slice(1)) / ht;
        out[nt] = w2_circle(slice(nt - 1), slice(nt)) / ht;
        for (int k = 1; k < nt; ++k) out[k] = w2_circle(slice(k - 1), slice(k + 1)) / (2.0 * ht);
        return out;
    }

    // kinetic proxy sqrt(int |w|^2/m dx), an upper bound on |m'|(t)
    ScalarField mbar = time_average(state.m);
    std::vector<double> e(nt, 0.0);
    for (int k = 0; k < nt; ++k) {
        const double* mb = mbar.slice(k);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            if (mb[i] <= 1e-12) continue;
            double w2sum = 0.0;
            for (int a = 0; a < g.d; ++a) {
                double wv = state.w.at(k, a, i);
                w2sum += wv * wv;
            }
            s += w2sum / mb[i];
        }
        e[k] = std::sqrt(s * g.cell_volume());
    }
    out[0] = e[0];
    out[nt] = e[nt - 1];
    for (int k = 1; k < nt; ++k) out[k] = 0.5 * (e[k - 1] + e[k]);
    return out;
}

ScalarField pushforward_terminal(const ScalarField& m_T, const VectorField& v, double delta) {
    const Grid& g = m_T.grid;
    if (m_T.nt_slices != 1 || v.nt_slices != 1 || !(v.grid == g)) {
        throw std::invalid_argument("pushforward_terminal: spatial fields expected");
    }
    if (delta < 0.0) throw std::invalid_argument("pushforward_terminal: delta >= 0 required");
    const int n = g.n_space();

    // Dv (d x d per point) via centered differences; Frobenius bound for Lip
    std::vector<VectorField> dv;  // dv[a] = grad of component a
    for (int a = 0; a < g.d; ++a) {
        ScalarField comp = ScalarField::spatial(g);
        for (int i = 0; i < n; ++i) comp.at(0, i) = v.at(0, a, i);
        dv.push_back(gradient_x(comp));
    }
    double lip = 0.0;
    for (int i = 0; i < n; ++i) {
        double fro = 0.0;
        for (int a = 0; a < g.d; ++a)
            for (int b = 0; b < g.d; ++b) {
                double e = dv[a].at(0, b, i);
                fro += e * e;
            }
        lip = std::max(lip, std::sqrt(fro));
    }
    if (delta * lip >= 0.5) {
        throw std::invalid_argument("pushforward_terminal: delta*Lip(v) >= 1/2");
    }

    ScalarField out = ScalarField::spatial(g);
    double mass_in = integrate_slice(m_T, 0);
    for (int i = 0; i < n; ++i) {
        std::array<double, 2> y = {0.0, 0.0};
        if (g.d == 1) {
            y[0] = (i + 0.0) * g.hx();
        } else {
            y[0] = (i % g.nx) * g.hx();
            y[1] = (i / g.nx) * g.hx();
        }
        // invert y = x - delta v(x) by fixed point
        std::array<double, 2> x = y;
        for (int it = 0; it < 100; ++it) {
            std::array<double, 2> nx = y;
            double move = 0.0;
            for (int a = 0; a < g.d; ++a) {
                nx[a] = y[a] + delta * interp_spatial(g, v.comp(0, a), x);
            }
            for (int a = 0; a < g.d; ++a) {
                move = std::max(move, std::abs(nx[a] - x[a]));
                x[a] = nx[a];
            }
            if (move < 1e-15) break;
        }
        double det;
        if (g.d == 1) {
            det = 1.0 - delta * interp_spatial(g, dv[0].comp(0, 0), x);
        } else {
            double a00 = interp_spatial(g, dv[0].comp(0, 0), x);
            double a01 = interp_spatial(g, dv[0].comp(0, 1), x);
            double a10 = interp_spatial(g, dv[1].comp(0, 0), x);
            double a11 = interp_spatial(g, dv[1].comp(0, 1), x);
            det = (1.0 - delta * a00) * (1.0 - delta * a11) - delta * delta * a01 * a10;
        }
        out.at(0, i) = interp_spatial(g, m_T.slice(0), x) / det;
    }
    double mass_out = integrate_slice(out, 0);
    if (mass_out > 0.0) {
        double scale = mass_in / mass_out;
        for (int i = 0; i < n; ++i) out.at(0, i) *= scale;
    }
    return out;
}

std::vector<Trajectory> flow_trajectories(const ScalarField& u,
                                          std::span<const std::array<double, 2>> starts) {
    const Grid& g = u.grid;
    if (u.nt_slices != g.nt + 1) throw std::invalid_argument("flow_trajectories: node field expected");
    VectorField gu = gradient_x(u);
    const double ht = g.ht();

    auto velocity = [&](double t, const std::array<double, 2>& x, std::array<double, 2>& out) {
        double s = std::clamp(t / ht, 0.0, static_cast<double>(g.nt));
        int k = std::min(static_cast<int>(s), g.nt - 1);
        double f = s - k;
        for (int a = 0; a < g.d; ++a) {
            double v0 = interp_spatial(g, gu.comp(k, a), x);
            double v1 = interp_spatial(g, gu.comp(k + 1, a), x);
            out[a] = -((1.0 - f) * v0 + f * v1);
        }
    };

    std::vector<Trajectory> trajs;
    trajs.reserve(starts.size());
    for (const auto& x0 : starts) {
        Trajectory tr;
        std::array<double, 2> x = x0;
        for (int a = 0; a < g.d; ++a) x[a] -= std::floor(x[a]);
        tr.times.push_back(0.0);
        tr.positions.push_back(x);
        for (int k = 0; k < g.nt; ++k) {
            double t = k * ht;
            std::array<double, 2> k1{}, k2{}, k3{}, k4{}, xt{};
            velocity(t, x, k1);
            for (int a = 0; a < g.d; ++a) xt[a] = x[a] + 0.5 * ht * k1[a];
            velocity(t + 0.5 * ht, xt, k2);
            for (int a = 0; a < g.d; ++a) xt[a] = x[a] + 0.5 * ht * k2[a];
            velocity(t + 0.5 * ht, xt, k3);
            for (int a = 0; a < g.d; ++a) xt[a] = x[a] + ht * k3[a];
            velocity(t + ht, xt, k4);
            for (int a = 0; a < g.d; ++a) {
                x[a] += ht / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
                x[a] -= std::floor(x[a]);
            }
            tr.times.push_back((k + 1) * ht);
            tr.positions.push_back(x);
        }
        trajs.push_back(std::move(tr));
    }
    return trajs;
}

}  // namespace mfg
