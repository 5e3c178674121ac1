#include "mfg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void ProblemSpec::validate() const {
    grid.validate();
    if (psi.nt_slices != 1 || !(psi.grid == grid)) {
        throw std::invalid_argument("psi must be a single spatial slice on the grid");
    }
    if (m0.nt_slices != 1 || !(m0.grid == grid)) {
        throw std::invalid_argument("m0 must be a single spatial slice on the grid");
    }
    double mass = integrate_slice(m0, 0);
    if (std::abs(mass - 1.0) > 1e-8) throw std::invalid_argument("m0 must have unit mass");
    for (double v : m0.v) {
        if (v < -1e-12) throw std::invalid_argument("m0 must be nonnegative");
    }
    if (!(r > 0.0)) throw std::invalid_argument("r > 0 required");
    if (max_iter < 1) throw std::invalid_argument("max_iter >= 1 required");
    if (!(tol > 0.0) || !(tol_continuity > 0.0)) throw std::invalid_argument("tol > 0 required");
}

double evaluate_B(const ProblemSpec& spec, const PrimalState& state) {
    const Grid& g = spec.grid;
    const int n = g.n_space();
    const double ht = g.ht(), vol = g.cell_volume();

    ScalarField mbar = time_average(state.m);
    double running = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        const double* mb = mbar.slice(k);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double m = mb[i];
            if (m < -1e-8) return kInf;
            if (m < 0.0) m = 0.0;
            double w2 = 0.0;
            for (int a = 0; a < g.d; ++a) {
                double wv = state.w.at(k, a, i);
                w2 += wv * wv;
            }
            if (m <= 1e-12) {
                if (w2 > 1e-24) return kInf;
            } else {
                s += 0.5 * w2 / m;
            }
            s += spec.model.G(m);
        }
        running += ht * vol * s;
    }

    const double* mT = state.m.slice(g.nt);
    const double* psi = spec.psi.slice(0);
    double term = 0.0;
    for (int i = 0; i < n; ++i) term += psi[i] * mT[i];
    return running + vol * term;
}

double evaluate_A(const ProblemSpec& spec, const DualState& dual) {
    const Grid& g = spec.grid;
    const int n = g.n_space();
    const double ht = g.ht(), vol = g.cell_volume();

    const double* uT = dual.u.slice(g.nt);
    const double* psi = spec.psi.slice(0);
    for (int i = 0; i < n; ++i) {
        if (std::abs(uT[i] - psi[i]) > 1e-12) {
            throw std::invalid_argument("evaluate_A: u(T,.) != Psi");
        }
    }

    double conj_sum = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        const double* pk = dual.p.slice(k);
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += spec.model.conj(pk[i]);
        conj_sum += ht * vol * s;
    }
    const double* u0 = dual.u.slice(0);
    const double* m0 = spec.m0.slice(0);
    double pair0 = 0.0;
    for (int i = 0; i < n; ++i) pair0 += u0[i] * m0[i];
    return conj_sum - vol * pair0;
}

DualState make_dual(const ProblemSpec& spec, const ScalarField& u) {
    const Grid& g = spec.grid;
    DualState dual;
    dual.u = u;
    dual.p = time_derivative(u);
    VectorField gu = gradient_x(time_average(u));
    const int n = g.n_space();
    for (int k = 0; k < g.nt; ++k) {
        double* pk = dual.p.slice(k);
        for (int i = 0; i < n; ++i) {
            double g2 = 0.0;
            for (int a = 0; a < g.d; ++a) {
                double gv = gu.at(k, a, i);
                g2 += gv * gv;
            }
            pk[i] = -pk[i] + 0.5 * g2;
        }
    }
    return dual;
}

std::pair<double, double> gap_decomposition(const ProblemSpec& spec, const PrimalState& primal,
                                            const DualState& dual) {
    const Grid& g = spec.grid;
    const int n = g.n_space();
    const double ht = g.ht(), vol = g.cell_volume();

    ScalarField mbar = time_average(primal.m);
    VectorField gu = gradient_x(time_average(dual.u));

    double fen = 0.0, kin = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        const double* mb = mbar.slice(k);
        const double* pk = dual.p.slice(k);
        double sf = 0.0, sk = 0.0;
        for (int i = 0; i < n; ++i) {
            double m = std::max(mb[i], 0.0);
            sf += spec.model.G(m) + spec.model.conj(pk[i]) - m * pk[i];
            double q = 0.0;
            for (int a = 0; a < g.d; ++a) {
                double v = m > 1e-12 ? primal.w.at(k, a, i) / m : 0.0;
                double z = v + gu.at(k, a, i);
                q += z * z;
            }
            sk += 0.5 * m * q;
        }
        fen += ht * vol * sf;
        kin += ht * vol * sk;
    }
    return {fen, kin};
}

std::pair<double, double> mfg_residuals(const ProblemSpec& spec, const PrimalState& primal,
                                        const DualState& dual, double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("mfg_residuals: rho > 0 required");
    const Grid& g = spec.grid;
    const int n = g.n_space();
    const double ht = g.ht(), vol = g.cell_volume();

    ScalarField mbar = time_average(primal.m);
    VectorField gu = gradient_x(time_average(dual.u));

    double price2 = 0.0, kin = 0.0;
    for (int k = 0; k < g.nt; ++k) {
        const double* mb = mbar.slice(k);
        const double* pk = dual.p.slice(k);
        for (int i = 0; i < n; ++i) {
            double m = mb[i];
            if (m > rho) {
                double diff = pk[i] - spec.model.g(m);
                price2 += ht * vol * diff * diff;
            }
            if (m > 1e-12) {
                double q = 0.0;
                for (int a = 0; a < g.d; ++a) {
                    double z = primal.w.at(k, a, i) / m + gu.at(k, a, i);
                    q += z * z;
                }
                kin += ht * vol * m * q;
            }
        }
    }
    return {std::sqrt(price2), kin};
}

SolveResult solve(const ProblemSpec& spec) {
    spec.validate();
    const Grid& g = spec.grid;
    const int n = g.n_space(), nt = g.nt, d = g.d;
    const double ht = g.ht(), vol = g.cell_volume(), r = spec.r;
    const double tau = 1.0 / r;

    Spectral sp(g);
    const int nm = sp.n_modes();
    std::vector<std::complex<double>> psihat(nm);
    sp.forward(spec.psi.slice(0), psihat.data());

    // splitting variables: q = (qa, qb) approximates Du = (d_t u, grad ubar);
    // sigma are the multipliers carrying the primal pair.
    ScalarField u = ScalarField::nodes(g);
    for (int k = 0; k <= nt; ++k) {
        std::copy(spec.psi.slice(0), spec.psi.slice(0) + n, u.slice(k));
    }
    ScalarField qa = time_derivative(u);
    VectorField qb = gradient_x(time_average(u));
    ScalarField sa = ScalarField::intervals(g);
    VectorField sb = VectorField::intervals(g);
    for (int k = 0; k < nt; ++k) {
        const double* m0 = spec.m0.slice(0);
        double* s = sa.slice(k);
        for (int i = 0; i < n; ++i) s[i] = -m0[i];
    }

    // tridiagonal scratch for the potential step
    std::vector<std::complex<double>> rhat(static_cast<size_t>(nt) * nm);
    std::vector<std::complex<double>> col(nt);
    std::vector<double> diag(nt), sub(nt > 1 ? nt - 1 : 0), super(nt > 1 ? nt - 1 : 0);
    ScalarField rhs = ScalarField::nodes(g);  // rows 0..nt-1 used

    SolveReport rep;
    PrimalState best_primal{ScalarField::nodes(g), VectorField::intervals(g)};
    DualState best_dual;
    double best_gap = kInf, best_B = kInf, best_A = kInf;
    double best_res = kInf, best_cont = kInf;
    bool have_best = false;

    PrimalState cur{ScalarField::nodes(g), VectorField::intervals(g)};

    int iter = 0;
    for (; iter < spec.max_iter; ++iter) {
        // --- potential step:  r ht D^T D u = m0 delta_{t=0} + ht D^T (r q - sigma)
        ScalarField s_a = ScalarField::intervals(g);
        VectorField s_b = VectorField::intervals(g);
        for (size_t j = 0; j < s_a.v.size(); ++j) s_a.v[j] = r * qa.v[j] - sa.v[j];
        for (size_t j = 0; j < s_b.v.size(); ++j) s_b.v[j] = r * qb.v[j] - sb.v[j];
        ScalarField div_sb = divergence_x(s_b);

        for (int j = 0; j < nt; ++j) {
            double* rj = rhs.slice(j);
            const double* aj = s_a.slice(j);
            const double* dj = div_sb.slice(j);
            const double* am = j > 0 ? s_a.slice(j - 1) : nullptr;
            const double* dm = j > 0 ? div_sb.slice(j - 1) : nullptr;
            const double* m0 = spec.m0.slice(0);
            for (int i = 0; i < n; ++i) {
                double v = (j == 0 ? m0[i] : am[i]) - aj[i];
                double dsum = dj[i] + (j > 0 ? dm[i] : 0.0);
                rj[i] = v - 0.5 * ht * dsum;
            }
        }
        for (int j = 0; j < nt; ++j) {
            sp.forward(rhs.slice(j), rhat.data() + static_cast<size_t>(j) * nm);
        }
        for (int m = 0; m < nm; ++m) {
            const double lam = sp.grad_symbol_sq(m);
            const double off = r * ht * (-1.0 / (ht * ht) + 0.25 * lam);
            diag[0] = r * ht * (1.0 / (ht * ht) + 0.25 * lam);
            for (int j = 1; j < nt; ++j) diag[j] = r * ht * (2.0 / (ht * ht) + 0.5 * lam);
            for (int j = 0; j + 1 < nt; ++j) {
                sub[j] = off;
                super[j] = off;
            }
            for (int j = 0; j < nt; ++j) col[j] = rhat[static_cast<size_t>(j) * nm + m];
            col[nt - 1] -= off * psihat[m];
            solve_tridiagonal(diag, sub, super, col.data(), nt);
            for (int j = 0; j < nt; ++j) rhat[static_cast<size_t>(j) * nm + m] = col[j];
        }
        for (int j = 0; j < nt; ++j) {
            sp.inverse(rhat.data() + static_cast<size_t>(j) * nm, u.slice(j));
        }
        std::copy(spec.psi.slice(0), spec.psi.slice(0) + n, u.slice(nt));

        // --- prox step on Du shifted by the multipliers
        ScalarField da = time_derivative(u);
        VectorField gb = gradient_x(time_average(u));
        for (int k = 0; k < nt; ++k) {
            for (int i = 0; i < n; ++i) {
                double at = da.at(k, i) + sa.at(k, i) / r;
                std::array<double, 2> bt = {0.0, 0.0};
                for (int a = 0; a < d; ++a) bt[a] = gb.at(k, a, i) + sb.at(k, a, i) / r;
                ProxResult pr = prox_hamiltonian(spec.model, tau, at, bt, d);
                qa.at(k, i) = pr.a;
                for (int a = 0; a < d; ++a) qb.at(k, a, i) = pr.b[a];
            }
        }

        // --- multiplier update; sigma = (-(density), density * b) pointwise
        double split2 = 0.0;
        for (size_t j = 0; j < sa.v.size(); ++j) {
            double e = da.v[j] - qa.v[j];
            sa.v[j] += r * e;
            split2 += e * e;
        }
        for (size_t j = 0; j < sb.v.size(); ++j) {
            double e = gb.v[j] - qb.v[j];
            sb.v[j] += r * e;
            split2 += e * e;
        }
        double split = std::sqrt(ht * vol * split2);

        // --- primal recovery: w = -sigma_b, nodal m integrates continuity
        for (size_t j = 0; j < sb.v.size(); ++j) cur.w.v[j] = -sb.v[j];
        {
            std::copy(spec.m0.slice(0), spec.m0.slice(0) + n, cur.m.slice(0));
            ScalarField divw = divergence_x(cur.w);
            for (int k = 0; k < nt; ++k) {
                const double* mk = cur.m.slice(k);
                const double* dk = divw.slice(k);
                double* mn = cur.m.slice(k + 1);
                for (int i = 0; i < n; ++i) mn[i] = mk[i] - ht * dk[i];
            }
        }

        DualState dual = make_dual(spec, u);
        double B = evaluate_B(spec, cur);
        double A = evaluate_A(spec, dual);
        double gap = A + B;
        double cont = continuity_residual(cur, spec.m0);

        rep.gap_history.push_back(gap);
        rep.residual_history.push_back(split);

        if (std::isfinite(gap) && gap < best_gap) {
            best_gap = gap;
            best_B = B;
            best_A = A;
            best_res = split;
            best_cont = cont;
            best_primal = cur;
            best_dual = dual;
            have_best = true;
        }

        double relgap = std::isfinite(gap) ? std::abs(gap) / std::max(1.0, std::abs(B)) : kInf;
        if (relgap < spec.tol && cont < spec.tol_continuity) {
            ++iter;
            rep.converged = true;
            break;
        }
    }

    if (!have_best) {
        // every iterate was infeasible; return the last one regardless
        best_primal = cur;
        best_dual = make_dual(spec, u);
        best_B = evaluate_B(spec, best_primal);
        best_A = evaluate_A(spec, best_dual);
        best_gap = best_A + best_B;
        best_cont = continuity_residual(best_primal, spec.m0);
        best_res = rep.residual_history.empty() ? 0.0 : rep.residual_history.back();
    }

    rep.iterations = iter;
    rep.primal_value = best_B;
    rep.dual_value = -best_A;
    rep.gap = best_gap;
    rep.relative_gap =
        std::isfinite(best_gap) ? std::abs(best_gap) / std::max(1.0, std::abs(best_B)) : kInf;
    rep.splitting_residual = best_res;
    rep.continuity = best_cont;
    auto res = mfg_residuals(spec, best_primal, best_dual, 1e-3);
    rep.comp_price = res.first;
    rep.comp_kinetic = res.second;
    return SolveResult{std::move(best_primal), std::move(best_dual), std::move(rep)};
}

}  // namespace mfg
