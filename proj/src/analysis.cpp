#include "mfg/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

std::vector<double> zeta_profile(const Grid& g, double t1) {
    if (!(t1 > 0.0 && t1 < g.T)) throw std::invalid_argument("zeta_profile: t1 in (0,T) required");
    std::vector<double> z(g.nt + 1, 0.0);
    const double lo = 0.5 * t1;
    for (int k = 0; k <= g.nt; ++k) {
        double t = k * g.ht();
        if (t <= lo) {
            z[k] = 0.0;
        } else if (t >= t1) {
            z[k] = 1.0;
        } else {
            double s = (t - lo) / (t1 - lo);
            z[k] = s * s * (3.0 - 2.0 * s);
        }
    }
    return z;
}

std::vector<double> zeta_prime(const Grid& g, const std::vector<double>& zeta) {
    if (static_cast<int>(zeta.size()) != g.nt + 1) {
        throw std::invalid_argument("zeta_prime: node profile expected");
    }
    std::vector<double> zp(g.nt, 0.0);
    for (int k = 0; k < g.nt; ++k) zp[k] = (zeta[k + 1] - zeta[k]) / g.ht();
    return zp;
}

SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_fit: need >= 2 points");
    }
    SlopeFit fit;
    fit.flat = true;
    for (double v : y) {
        if (std::abs(v) >= 1e-12) fit.flat = false;
    }
    if (fit.flat) return fit;

    const int n = static_cast<int>(x.size());
    double sx = 0.0, sy = 0.0;
    std::vector<double> lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        lx[i] = std::log(std::abs(x[i]));
        ly[i] = std::log(std::max(std::abs(y[i]), 1e-300));
        sx += lx[i];
        sy += ly[i];
    }
    double mx = sx / n, my = sy / n;
    double cov = 0.0, var = 0.0;
    for (int i = 0; i < n; ++i) {
        cov += (lx[i] - mx) * (ly[i] - my);
        var += (lx[i] - mx) * (lx[i] - mx);
    }
    fit.slope = cov / var;
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double e = ly[i] - (my + fit.slope * (lx[i] - mx));
        r2 += e * e;
    }
    fit.residual = std::sqrt(r2 / n);
    return fit;
}

namespace {

// Shift one component of an interval vector field like shift_space does for
// scalars, with a per-slice cell offset.
ScalarField component_field(const VectorField& w, int axis) {
    ScalarField out(w.grid, w.nt_slices);
    const int n = w.grid.n_space();
    for (int k = 0; k < w.nt_slices; ++k) {
        const double* src = w.comp(k, axis);
        double* dst = out.slice(k);
        for (int i = 0; i < n; ++i) dst[i] = src[i];
    }
    return out;
}

std::vector<double> interval_average(const std::vector<double>& nodes) {
    std::vector<double> out(nodes.size() - 1);
    for (size_t k = 0; k + 1 < nodes.size(); ++k) out[k] = 0.5 * (nodes[k] + nodes[k + 1]);
    return out;
}

// Per-interval kinetic energy e_k = (1/2) int |w|^2 / mbar dx and congestion
// energy Gbar_k = int G(mbar) dx of a primal pair.
void interval_energies(const ProblemSpec& spec, const PrimalState& primal, std::vector<double>& e,
                       std::vector<double>& gbar) {
    const Grid& g = spec.grid;
    const int n = g.n_space();
    const double vol = g.cell_volume();
    ScalarField mbar = time_average(primal.m);
    e.assign(g.nt, 0.0);
    gbar.assign(g.nt, 0.0);
    for (int k = 0; k < g.nt; ++k) {
        const double* mb = mbar.slice(k);
        double se = 0.0, sg = 0.0;
        for (int i = 0; i < n; ++i) {
            double m = std::max(mb[i], 0.0);
            sg += spec.model.G(m);
            if (m > 1e-12) {
                double w2 = 0.0;
                for (int a = 0; a < g.d; ++a) {
                    double wv = primal.w.at(k, a, i);
                    w2 += wv * wv;
                }
                se += 0.5 * w2 / m;
            }
        }
        e[k] = vol * se;
        gbar[k] = vol * sg;
    }
}

// Density and momentum of the time dilation t -> t + sgn * eps * zeta(t),
// extended past T (forward case) by the pushforward along grad Psi.
PrimalState dilate(const ProblemSpec& spec, const PrimalState& primal,
                   const std::vector<double>& zeta, const std::vector<double>& zp, double eps,
                   int sgn) {
    const Grid& g = spec.grid;
    const int n = g.n_space(), nt = g.nt;
    const double ht = g.ht(), T = g.T;

    VectorField gpsi = gradient_x(spec.psi);

    PrimalState out{ScalarField::nodes(g), VectorField::intervals(g)};

    auto interp_nodes = [&](double tau, double* dst) {
        double pos = std::clamp(tau, 0.0, T) / ht;
        int k0 = std::min(static_cast<int>(std::floor(pos)), nt - 1);
        double th = pos - k0;
        const double* a = primal.m.slice(k0);
        const double* b = primal.m.slice(k0 + 1);
        for (int i = 0; i < n; ++i) dst[i] = (1.0 - th) * a[i] + th * b[i];
    };

    for (int k = 0; k <= nt; ++k) {
        double tau = k * ht + sgn * eps * zeta[k];
        if (tau <= T + 1e-12) {
            interp_nodes(tau, out.m.slice(k));
        } else {
            ScalarField mT = ScalarField::spatial(g);
            std::copy(primal.m.slice(nt), primal.m.slice(nt) + n, mT.slice(0));
            ScalarField pushed = pushforward_terminal(mT, gpsi, tau - T);
            std::copy(pushed.slice(0), pushed.slice(0) + n, out.m.slice(k));
        }
    }

    ScalarField mbar_out = time_average(out.m);
    for (int k = 0; k < nt; ++k) {
        double f = 1.0 + sgn * eps * zp[k];
        double zbar = 0.5 * (zeta[k] + zeta[k + 1]);
        double tmid = (k + 0.5) * ht + sgn * eps * zbar;
        if (tmid <= T) {
            int j = std::clamp(static_cast<int>(std::floor(tmid / ht)), 0, nt - 1);
            for (int a = 0; a < g.d; ++a) {
                const double* src = primal.w.comp(j, a);
                double* dst = out.w.comp(k, a);
                for (int i = 0; i < n; ++i) dst[i] = f * src[i];
            }
        } else {
            // on the extension the Lagrangian velocity is frozen at grad Psi:
            // Eulerian field -grad Psi(R_s^{-1}(y)), momentum scaled by dt-rate
            double s = tmid - T;
            const double* mb = mbar_out.slice(k);
            for (int i = 0; i < n; ++i) {
                std::array<double, 2> y = {0.0, 0.0};
                if (g.d == 1) {
                    y[0] = i * g.hx();
                } else {
                    y[0] = (i % g.nx) * g.hx();
                    y[1] = (i / g.nx) * g.hx();
                }
                std::array<double, 2> x = y;
                for (int it = 0; it < 100; ++it) {
                    std::array<double, 2> nxp = y;
                    double move = 0.0;
                    for (int a = 0; a < g.d; ++a) {
                        nxp[a] = y[a] + s * interp_spatial(g, gpsi.comp(0, a), x);
                    }
                    for (int a = 0; a < g.d; ++a) {
                        move = std::max(move, std::abs(nxp[a] - x[a]));
                        x[a] = nxp[a];
                    }
                    if (move < 1e-15) break;
                }
                for (int a = 0; a < g.d; ++a) {
                    out.w.at(k, a, i) = -f * mb[i] * interp_spatial(g, gpsi.comp(0, a), x);
                }
            }
        }
    }
    return out;
}

}  // namespace

TranslationCurve translation_curve(const ProblemSpec& spec, const PrimalState& primal,
                                   const AnalysisConfig& cfg) {
    const Grid& g = spec.grid;
    const int n = g.n_space(), nt = g.nt;
    const double hx = g.hx();

    std::vector<double> zeta = zeta_profile(g, cfg.t1_or_default(g));
    std::vector<double> zp = zeta_prime(g, zeta);
    std::vector<double> zbar = interval_average(zeta);

    // velocity v = w / mbar (zero in vacuum)
    ScalarField mbar = time_average(primal.m);
    VectorField v = VectorField::intervals(g);
    for (int k = 0; k < nt; ++k) {
        const double* mb = mbar.slice(k);
        for (int a = 0; a < g.d; ++a) {
            const double* wk = primal.w.comp(k, a);
            double* vk = v.comp(k, a);
            for (int i = 0; i < n; ++i) vk[i] = mb[i] > 1e-12 ? wk[i] / mb[i] : 0.0;
        }
    }

    TranslationCurve curve;
    curve.M0 = evaluate_B(spec, primal);
    curve.min_density = 0.0;
    curve.max_mass_drift = 0.0;
    double min_density = 1e300;

    for (int dc : cfg.delta_cells) {
        std::array<double, 2> delta = {static_cast<double>(dc), 0.0};
        ScalarField mshift = shift_space(primal.m, delta, zeta);

        for (double mv : mshift.v) min_density = std::min(min_density, mv);
        for (int k = 0; k <= nt; ++k) {
            curve.max_mass_drift =
                std::max(curve.max_mass_drift, std::abs(integrate_slice(mshift, k) - 1.0));
        }
        if (min_density < -1e-8) {
            throw std::invalid_argument("translation_curve: shift destroys positivity");
        }

        ScalarField mbar_shift = time_average(mshift);
        VectorField wshift = VectorField::intervals(g);
        for (int a = 0; a < g.d; ++a) {
            ScalarField comp = component_field(v, a);
            ScalarField shifted = shift_space(comp, delta, zbar);
            double corr = a == 0 ? dc * hx : 0.0;
            for (int k = 0; k < nt; ++k) {
                const double* sv = shifted.slice(k);
                const double* mb = mbar_shift.slice(k);
                double* wk = wshift.comp(k, a);
                for (int i = 0; i < n; ++i) wk[i] = mb[i] * (sv[i] - zp[k] * corr);
            }
        }

        curve.delta_cells.push_back(dc);
        curve.M.push_back(evaluate_B(spec, PrimalState{mshift, wshift}));
    }
    curve.min_density = min_density;
    return curve;
}

SlopeFit space_quadratic_fit(const TranslationCurve& curve) {
    if (curve.delta_cells.size() < 3) {
        throw std::invalid_argument("space_quadratic_fit: need >= 3 shifts");
    }
    std::vector<double> diffs(curve.M.size());
    for (size_t i = 0; i < curve.M.size(); ++i) diffs[i] = curve.M[i] - curve.M0;
    return loglog_fit(curve.delta_cells, diffs);
}

H1Quotients h1_space_quotient(const ProblemSpec& spec, const PrimalState& primal,
                              const AnalysisConfig& cfg) {
    const Grid& g = spec.grid;
    const int n = g.n_space(), nt = g.nt;
    const double ht = g.ht(), hx = g.hx(), vol = g.cell_volume();
    const double t1 = cfg.t1_or_default(g);

    ScalarField jm = ScalarField::nodes(g);
    for (int k = 0; k <= nt; ++k) {
        const double* mk = primal.m.slice(k);
        double* jk = jm.slice(k);
        for (int i = 0; i < n; ++i) jk[i] = spec.model.J(std::max(mk[i], 0.0));
    }

    H1Quotients out;
    for (int dc : cfg.delta_cells) {
        double s2 = 0.0;
        for (int k = 0; k <= nt; ++k) {
            if (k * ht < t1 - 1e-12) continue;
            const double* jk = jm.slice(k);
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = jk[g.neighbor(i, 0, dc)] - jk[i];
                acc += d * d;
            }
            s2 += ht * vol * acc;
        }
        out.delta_cells.push_back(dc);
        out.space_quotient.push_back(std::sqrt(s2) / (dc * hx));
        out.max_space = std::max(out.max_space, out.space_quotient.back());
    }
    for (int sc : cfg.eps_steps) {
        double s2 = 0.0;
        for (int k = 0; k + sc <= nt; ++k) {
            if (k * ht < t1 - 1e-12) continue;
            const double* ja = jm.slice(k);
            const double* jb = jm.slice(k + sc);
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = jb[i] - ja[i];
                acc += d * d;
            }
            s2 += ht * vol * acc;
        }
        out.eps_steps.push_back(sc);
        out.time_quotient.push_back(std::sqrt(s2) / (sc * ht));
        out.max_time = std::max(out.max_time, out.time_quotient.back());
    }
    return out;
}

DSeries constancy_of_D(const ProblemSpec& spec, const PrimalState& primal,
                       const AnalysisConfig& cfg) {
    const Grid& g = spec.grid;
    const int n = g.n_space();
    const double ht = g.ht(), vol = g.cell_volume();
    const double t1 = cfg.t1_or_default(g);

    std::vector<double> speed =
        metric_speed(primal, g.d == 1 ? SpeedMethod::W2 : SpeedMethod::Kinetic);

    DSeries out;
    for (int k = 0; k <= g.nt; ++k) {
        double t = k * ht;
        if (t < t1 - 1e-12 || t > g.T - t1 + 1e-12) continue;
        const double* mk = primal.m.slice(k);
        double gsum = 0.0;
        for (int i = 0; i < n; ++i) gsum += spec.model.G(std::max(mk[i], 0.0));
        out.t.push_back(t);
        out.D.push_back(-0.5 * speed[k] * speed[k] + vol * gsum);
    }
    if (out.D.empty()) throw std::invalid_argument("constancy_of_D: window [t1, T-t1] is empty");

    double s = 0.0;
    for (double d : out.D) s += d;
    out.mean = s / out.D.size();
    for (double d : out.D) out.max_dev = std::max(out.max_dev, std::abs(d - out.mean));
    out.dispersion = out.max_dev / std::max(std::abs(out.mean), 1e-12);
    return out;
}

TerminalCheck terminal_inequality(const ProblemSpec& spec, const PrimalState& primal,
                                  const AnalysisConfig& cfg) {
    const Grid& g = spec.grid;
    const int n = g.n_space();
    const double vol = g.cell_volume();

    DSeries ds = constancy_of_D(spec, primal, cfg);
    const double* mT = primal.m.slice(g.nt);

    double gT = 0.0;
    for (int i = 0; i < n; ++i) gT += spec.model.G(std::max(mT[i], 0.0));
    gT *= vol;

    VectorField gpsi = gradient_x(spec.psi);
    double rhs = 0.0;
    for (int i = 0; i < n; ++i) {
        double g2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            double gv = gpsi.at(0, a, i);
            g2 += gv * gv;
        }
        rhs += 0.5 * g2 * std::max(mT[i], 0.0);
    }
    rhs *= vol;

    TerminalCheck tc;
    tc.lhs = gT - ds.mean;
    tc.rhs = rhs;
    tc.margin = tc.rhs - tc.lhs;
    return tc;
}

TimeTranslationCurve time_translation_test(const ProblemSpec& spec, const PrimalState& primal,
                                           const AnalysisConfig& cfg) {
    const Grid& g = spec.grid;
    std::vector<double> zeta = zeta_profile(g, cfg.t1_or_default(g));
    std::vector<double> zp = zeta_prime(g, zeta);

    TimeTranslationCurve out;
    out.B0 = evaluate_B(spec, primal);
    for (int sc : cfg.eps_steps) {
        double eps = sc * g.ht();
        PrimalState comp = dilate(spec, primal, zeta, zp, eps, +1);
        out.eps.push_back(eps);
        out.B.push_back(evaluate_B(spec, comp));
    }
    std::vector<double> diffs(out.B.size());
    for (size_t i = 0; i < out.B.size(); ++i) diffs[i] = out.B[i] - out.B0;
    out.fit = loglog_fit(out.eps, diffs);
    return out;
}

ZetaAudit computationzeta_audit(const ProblemSpec& spec, const PrimalState& primal,
                                const AnalysisConfig& cfg) {
    const Grid& g = spec.grid;
    const int n = g.n_space(), nt = g.nt;
    const double ht = g.ht(), vol = g.cell_volume();

    // dedicated gentle ramp: the backward map t - eps*zeta(t) must stay
    // monotone, i.e. eps * max zeta' < 1
    const double t1 = 0.45 * g.T;
    std::vector<double> zeta = zeta_profile(g, t1);
    std::vector<double> zp = zeta_prime(g, zeta);
    double zpmax = 0.0;
    for (double v : zp) zpmax = std::max(zpmax, v);

    std::vector<double> e, gbar;
    interval_energies(spec, primal, e, gbar);
    const double B0 = evaluate_B(spec, primal);
    const double* psi = spec.psi.slice(0);

    ZetaAudit out;
    for (int sc : cfg.eps_steps) {
        double eps = sc * ht;
        if (eps * zpmax >= 0.9) continue;  // out of the homeomorphism range

        PrimalState comp = dilate(spec, primal, zeta, zp, eps, -1);
        double direct = evaluate_B(spec, comp);

        double dropped = 0.0;
        for (int k = nt - sc; k < nt; ++k) dropped += ht * (e[k] + gbar[k]);
        double corr = 0.0;
        for (int k = 0; k < nt - sc; ++k) corr += ht * zp[k] * (gbar[k] - e[k]);
        corr *= eps;
        double term = 0.0;
        const double* mT = primal.m.slice(nt);
        const double* mE = comp.m.slice(nt);
        for (int i = 0; i < n; ++i) term += psi[i] * (mE[i] - mT[i]);
        term *= vol;

        out.eps.push_back(eps);
        out.direct.push_back(direct);
        out.pred_plus.push_back(B0 - dropped + corr + term);
        out.pred_minus.push_back(B0 - dropped - corr + term);
        out.res_plus.push_back(std::abs(direct - out.pred_plus.back()));
        out.res_minus.push_back(std::abs(direct - out.pred_minus.back()));
    }
    if (out.eps.empty()) throw std::invalid_argument("computationzeta_audit: no usable eps");

    double worst_p = 0.0, worst_m = 0.0;
    for (size_t i = 0; i < out.eps.size(); ++i) {
        worst_p = std::max(worst_p, out.res_plus[i]);
        worst_m = std::max(worst_m, out.res_minus[i]);
    }
    out.selected_sign = worst_p <= worst_m ? +1 : -1;
    const std::vector<double>& matched = out.selected_sign > 0 ? out.res_plus : out.res_minus;
    const std::vector<double>& other = out.selected_sign > 0 ? out.res_minus : out.res_plus;
    out.matched_fit = loglog_fit(out.eps, matched);
    out.mismatched_fit = loglog_fit(out.eps, other);
    double floor = 1e-10 * std::max(1.0, std::abs(B0));
    out.matched_floor = true;
    for (double r : matched) {
        if (r > floor) out.matched_floor = false;
    }
    return out;
}

AnalysisReport analyze(const ProblemSpec& spec, const PrimalState& primal,
                       const AnalysisConfig& cfg) {
    AnalysisReport rep;
    rep.translation = translation_curve(spec, primal, cfg);
    rep.space_fit = space_quadratic_fit(rep.translation);
    rep.h1 = h1_space_quotient(spec, primal, cfg);
    rep.dseries = constancy_of_D(spec, primal, cfg);
    rep.terminal = terminal_inequality(spec, primal, cfg);
    rep.time_translation = time_translation_test(spec, primal, cfg);
    rep.audit = computationzeta_audit(spec, primal, cfg);
    rep.qp_c = spec.model.qp_constant();

    std::vector<double> samples;
    samples.reserve(256);
    const size_t stride = std::max<size_t>(1, primal.m.v.size() / 256);
    for (size_t i = 0; i < primal.m.v.size(); i += stride) {
        if (primal.m.v[i] > 1e-6) samples.push_back(primal.m.v[i]);
    }
    rep.hpol_C = hpol_margin(spec.model, 0.5, samples);
    return rep;
}

}  // namespace mfg
