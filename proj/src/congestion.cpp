#include "mfg/congestion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double pos(double x) { return x > 0.0 ? x : 0.0; }

double safe_exp(double x) { return std::exp(std::min(x, 700.0)); }
}  // namespace

CongestionModel::CongestionModel(Kind k, double q) : kind_(k), q_(q) {
    qp_ = q_ / (q_ - 1.0);
}

CongestionModel CongestionModel::quadratic() { return CongestionModel(Kind::Quadratic, 2.0); }

CongestionModel CongestionModel::power(double q) {
    if (!(q > 1.0)) throw std::invalid_argument("power model requires q > 1");
    return CongestionModel(Kind::Power, q);
}

CongestionModel CongestionModel::entropy() {
    CongestionModel m(Kind::Entropy, 2.0);
    m.c0_ = certify_c0(m, C0Box{10.0, -5.0, 5.0}, 500);
    return m;
}

std::string CongestionModel::name() const {
    switch (kind_) {
        case Kind::Quadratic: return "quadratic";
        case Kind::Power: return "power";
        case Kind::Entropy: return "entropy";
    }
    return "?";
}

double CongestionModel::G(double m) const {
    if (m < 0.0) return kInf;
    switch (kind_) {
        case Kind::Quadratic: return 0.5 * m * m;
        case Kind::Power: return std::pow(m, q_) / q_;
        case Kind::Entropy: return m > 0.0 ? m * std::log(m) - m : 0.0;
    }
    return kInf;
}

double CongestionModel::g(double m) const {
    if (m < 0.0) throw std::domain_error("g: density must be >= 0");
    switch (kind_) {
        case Kind::Quadratic: return m;
        case Kind::Power: return std::pow(m, q_ - 1.0);
        case Kind::Entropy: return m > 0.0 ? std::log(m) : -kInf;
    }
    return 0.0;
}

double CongestionModel::conj(double p) const {
    switch (kind_) {
        case Kind::Quadratic: {
            double pp = pos(p);
            return 0.5 * pp * pp;
        }
        case Kind::Power: return std::pow(pos(p), qp_) / qp_;
        case Kind::Entropy: return safe_exp(p);
    }
    return 0.0;
}

double CongestionModel::conj_prime(double p) const {
    switch (kind_) {
        case Kind::Quadratic: return pos(p);
        case Kind::Power: return std::pow(pos(p), qp_ - 1.0);
        case Kind::Entropy: return safe_exp(p);
    }
    return 0.0;
}

double CongestionModel::J(double m) const {
    switch (kind_) {
        case Kind::Quadratic: return m;
        case Kind::Power: return std::pow(pos(m), 0.5 * q_);
        case Kind::Entropy: return std::sqrt(pos(m));
    }
    return 0.0;
}

double CongestionModel::Jstar(double p) const { return J(conj_prime(p)); }

double CongestionModel::qp_constant() const {
    switch (kind_) {
        case Kind::Quadratic: return 0.5;
        case Kind::Power: return 1.0 / (2.0 * std::max(q_, qp_));
        case Kind::Entropy: return c0_;
    }
    return 0.0;
}

double CongestionModel::qp_gap(double m, double p) const {
    if (m < 0.0) throw std::domain_error("qp_gap: density must be >= 0");
    double diff = J(m) - Jstar(p);
    return G(m) + conj(p) - m * p - qp_constant() * diff * diff;
}

double certify_c0(const CongestionModel& model, const C0Box& box, int n) {
    if (model.kind() != CongestionModel::Kind::Entropy) {
        throw std::invalid_argument("certify_c0: entropy model expected");
    }
    const double m_lo = 1e-6;
    if (!(box.m_max > m_lo) || !(box.p_max > box.p_min) || n < 2) {
        throw std::invalid_argument("certify_c0: degenerate box");
    }
    double inf = kInf;
    for (int i = 0; i < n; ++i) {
        double m = m_lo + (box.m_max - m_lo) * i / (n - 1);
        double jm = std::sqrt(m);
        double gm = m * std::log(m) - m;
        for (int j = 0; j < n; ++j) {
            double p = box.p_min + (box.p_max - box.p_min) * j / (n - 1);
            double diff = jm - std::exp(0.5 * p);
            double den = diff * diff;
            if (den < 1e-12) continue;
            double num = gm + std::exp(p) - m * p;
            inf = std::min(inf, num / den);
        }
    }
    if (!std::isfinite(inf)) throw std::runtime_error("certify_c0: all points excluded");
    return 0.9 * inf;
}

double hpol_margin(const CongestionModel& model, double a0, std::span<const double> samples) {
    if (!(a0 > 0.0 && a0 < 1.0)) throw std::invalid_argument("hpol_margin: a0 in (0,1) required");
    const int na = 64;
    double c = 0.0;
    for (double m : samples) {
        if (!(m > 0.0)) continue;
        double gm = model.G(m);
        for (int i = 1; i <= na; ++i) {
            double a = a0 * i / na;
            double den = a * gm + 1.0;
            if (den <= 0.0) continue;  // cannot happen for a0 < 1 with these models
            double need = (model.G((1.0 + a) * m) - gm) / den;
            c = std::max(c, need);
        }
    }
    return c;
}

ProxResult prox_hamiltonian(const CongestionModel& model, double tau, double atilde,
                            const std::array<double, 2>& btilde, int d) {
    if (!(tau > 0.0)) throw std::invalid_argument("prox_hamiltonian: tau > 0 required");
    double b2 = 0.0;
    for (int a = 0; a < d; ++a) b2 += btilde[a] * btilde[a];

    auto s_of = [&](double lam) {
        double den = 1.0 + tau * lam;
        return -atilde - tau * lam + 0.5 * b2 / (den * den);
    };
    // phi(lambda) = lambda - (G*)'(s(lambda)) is strictly increasing.
    auto phi = [&](double lam) { return lam - model.conj_prime(s_of(lam)); };

    ProxResult res;
    if (phi(0.0) >= 0.0) {
        res.lambda = 0.0;  // exact for quadratic/power when s(0) <= 0
    } else {
        double hi = std::max(1.0, model.conj_prime(s_of(0.0)));
        int expand = 0;
        while (phi(hi) < 0.0 && expand++ < 200) hi *= 2.0;
        double lo = 0.0, lam = std::min(hi, model.conj_prime(s_of(0.0)));
        int it = 0;
        for (; it < 200; ++it) {
            double f = phi(lam);
            if (f > 0.0) hi = lam;
            else lo = lam;
            if (std::abs(f) < 1e-13 || hi - lo < 1e-14 * (1.0 + hi)) break;
            // Newton step with bisection safeguard
            double den = 1.0 + tau * lam;
            double sp = -tau - tau * b2 / (den * den * den);
            double s = s_of(lam);
            double gpp;
            switch (model.kind()) {
                case CongestionModel::Kind::Quadratic: gpp = s > 0.0 ? 1.0 : 0.0; break;
                case CongestionModel::Kind::Power: {
                    double e = model.conjugate_exponent() - 2.0;
                    gpp = s > 0.0 ? (model.conjugate_exponent() - 1.0) * std::pow(s, e) : 0.0;
                    break;
                }
                case CongestionModel::Kind::Entropy: gpp = std::exp(std::min(s, 700.0)); break;
                default: gpp = 0.0;
            }
            double dphi = 1.0 - gpp * sp;
            double next = lam - f / dphi;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            lam = next;
        }
        if (it >= 200) throw std::runtime_error("prox_hamiltonian: no convergence in 200 iterations");
        res.lambda = lam;
        res.iterations = it;
    }
    res.a = atilde + tau * res.lambda;
    double scale = 1.0 / (1.0 + tau * res.lambda);
    for (int a = 0; a < d; ++a) res.b[a] = btilde[a] * scale;
    return res;
}

}  // namespace mfg
