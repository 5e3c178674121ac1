#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>

namespace mfg {

/// Congestion cost families and everything the variational machinery
/// derives from them: g = G', the conjugate G*, (G*)', the regularity
/// maps J/J*, and the certified constant of the quantitative Fenchel
/// inequality  G(m)+G*(p) >= mp + c |J(m)-J*(p)|^2.
///
/// Domain convention: G(m) = +inf for m < 0 (m is a density), so the
/// conjugates use positive parts and J*(p) := J((G*)'(p)).
class CongestionModel {
public:
    enum class Kind { Quadratic, Power, Entropy };

    static CongestionModel quadratic();
    static CongestionModel power(double q);
    /// Entropy model; the (QP) constant c0 is machine-certified on the
    /// default box [1e-6,10] x [-5,5] at construction.
    static CongestionModel entropy();

    Kind kind() const { return kind_; }
    double exponent() const { return q_; }
    double conjugate_exponent() const { return qp_; }
    std::string name() const;

    double G(double m) const;           // +inf for m < 0
    double g(double m) const;           // throws for m < 0
    double conj(double p) const;        // G*
    double conj_prime(double p) const;  // (G*)'
    double J(double m) const;
    double Jstar(double p) const;  // J((G*)'(p))

    /// Certified constant of (QP): 1/2 (quadratic), 1/(2 max{q,q'}) (power),
    /// machine-certified c0 (entropy).
    double qp_constant() const;

    /// G(m)+G*(p)-mp - c|J(m)-J*(p)|^2; >= -1e-10 on the certified domain.
    double qp_gap(double m, double p) const;

    /// Prices are clamped to +-price_clamp inside solver iterations only
    /// (entropy g(0) = -inf); reported quantities use unclamped formulas.
    static constexpr double price_clamp = 1e3;

private:
    CongestionModel(Kind k, double q);
    Kind kind_;
    double q_ = 2.0, qp_ = 2.0;
    double c0_ = 0.0;  // entropy only
};

struct C0Box {
    double m_max;
    double p_min;
    double p_max;
};

/// Brute-force certification of the entropy (QP) constant: infimum of
/// (G(m)+G*(p)-mp)/|sqrt(m)-e^{p/2}|^2 over an n x n sample grid of
/// [1e-6,m_max] x [p_min,p_max], excluding near-equality points
/// (denominator < 1e-12), times a 0.9 safety factor.
/// Throws if the box is degenerate or every point is excluded.
double certify_c0(const CongestionModel& model, const C0Box& box, int n);

/// Smallest C over the samples making G((1+a)m) <= (1+Ca)G(m)+C hold for
/// all a in (0,a0].
double hpol_margin(const CongestionModel& model, double a0, std::span<const double> samples);

struct ProxResult {
    double a = 0.0;
    std::array<double, 2> b = {0.0, 0.0};
    double lambda = 0.0;  // recovered pointwise density, >= 0
    int iterations = 0;
};

/// Pointwise proximal step of H(a,b) = G*(-a + |b|^2/2):
///   argmin  |a-atilde|^2/2 + |b-btilde|^2/2 + tau * H(a,b).
/// Characterized by lambda = (G*)'(-a+|b|^2/2), a = atilde + tau*lambda,
/// b = btilde/(1+tau*lambda); the scalar equation in lambda is solved by
/// safeguarded Newton/bisection to 1e-12. Throws on non-convergence
/// after 200 iterations.
ProxResult prox_hamiltonian(const CongestionModel& model, double tau, double atilde,
                            const std::array<double, 2>& btilde, int d);

}  // namespace mfg
