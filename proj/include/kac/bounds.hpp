#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kac/errors.hpp"
#include "kac/initial_data.hpp"
#include "kac/quadrature.hpp"
#include "kac/special_functions.hpp"

namespace kac {

// Angular moment a_m = (1/2pi) int_0^{2pi} |sin h|^m dh by adaptive
// quadrature; the closed form Gamma((m+1)/2) / (sqrt(pi) Gamma(m/2 + 1)) is
// exposed alongside as a cross-check.
inline double alpha_m_closed_form(double m) {
    if (!(m > 0.0)) throw ParameterError("alpha_m: m must be > 0");
    return std::exp(std::lgamma((m + 1.0) / 2.0) - std::lgamma(m / 2.0 + 1.0)) / std::sqrt(kPi);
}

inline double alpha_m(double m) {
    if (!(m > 0.0)) throw ParameterError("alpha_m: m must be > 0");
    const double quarter =
        adaptive_integrate([m](double h) { return std::pow(std::sin(h), m); }, 0.0, 0.5 * kPi,
                           1e-15, 1e-12);
    return quarter * 2.0 / kPi;
}

// Rate of the heavy-tailed counterexample: 1 - 2 a_beta, always below 1/4 on
// (3, 4).
inline double lower_bound_rate(double beta) {
    if (!(beta > 3.0 && beta < 4.0)) throw ParameterError("beta must lie in (3,4)");
    return 1.0 - 2.0 * alpha_m(beta);
}

// Lemma-grade exponential CF bound:
//   |psi(xi)| <= exp{ -(3 pi^2 / (64 (3+L)^2)) (xi / (2 sqrt2 zeta |xi| + pi))^2 }
inline double lemma_a1_bound(double zeta, double L, double xi) {
    if (!(zeta > 0.0) || !(L >= 0.0)) throw ParameterError("lemma_a1_bound: need zeta > 0, L >= 0");
    const double denom = 2.0 * std::sqrt(2.0) * zeta * std::abs(xi) + kPi;
    const double ratio = xi / denom;
    const double c = 3.0 * kPi * kPi / (64.0 * (3.0 + L) * (3.0 + L));
    return std::exp(-c * ratio * ratio);
}

struct BerryEsseenBounds {
    double l2_cf = 0.0;     // bound on the L2 distance of CFs over [-A, A]
    double l2_deriv = 0.0;  // bound on the L2 distance of CF derivatives
    double c1 = 0.33;       // pointwise: c1 G^4 xi^4 e^{-xi^2/2}
    double c2 = 0.76;       // pointwise derivative: c2 G^4 (1+xi^2) |xi|^3 e^{-xi^2/2}
};

inline BerryEsseenBounds berry_esseen_bounds(double gamma_n4) {
    if (!(gamma_n4 >= 0.0)) throw ParameterError("berry_esseen_bounds: gamma_n4 must be >= 0");
    const double root = std::sqrt(std::tgamma(3.5));
    return {0.62 * root * gamma_n4, 3.8 * root * gamma_n4, 0.33, 0.76};
}

// The Gamma-law majorant |phi0(xi)| <= (lambda^2 / (lambda^2 + xi^2))^alpha
// with the constructive constants: k = ceil(2/p), alpha = 1/(2k),
// psi0 = |phi0|^{2k}, L = sup xi^4 psi0, M = sup of psi0 on the proof's
// interval I, lambda^2 = max{3/(2k sigma^2), (2/3) sqrt L, 2 M sqrt L / (1-M)}.
struct GammaEnvelope {
    int k = 1;
    double alpha = 0.5;
    double lambda2 = 0.0;
    double L = 0.0;
    double M = 0.0;
    double xi0 = 0.0;  // left end of the mid interval I

    double lambda() const { return std::sqrt(lambda2); }
    double operator()(double xi) const {
        return std::pow(lambda2 / (lambda2 + xi * xi), alpha);
    }
};

namespace detail {

struct EnvelopeScan {
    double L = 0.0;
    double M = 0.0;
};

inline EnvelopeScan envelope_scan(const InitialDatum& datum, int k, double xi0, double p,
                                  double L_p, int grid_mult) {
    auto psi0 = [&](double xi) { return std::pow(std::abs(datum.cf(xi)), 2.0 * k); };
    const double scan_max = 1000.0;
    const int n_L = 40000 * grid_mult;
    double L = 0.0;
    for (int i = 0; i <= n_L; ++i) {
        const double xi = scan_max * i / n_L;
        L = std::max(L, xi * xi * xi * xi * psi0(xi));
    }
    // analytic tail majorant xi^4 psi0 <= L_p^{2k} xi^{4 - 2kp}, non-increasing
    // beyond the scan since k p >= 2
    L = std::max(L, std::pow(L_p, 2.0 * k) * std::pow(scan_max, 4.0 - 2.0 * k * p));

    const double right = std::sqrt(2.0) * std::pow(L, 0.25);
    double M = psi0(xi0);
    if (right > xi0) {
        const int n_M = 10000 * grid_mult;
        for (int i = 0; i <= n_M; ++i) {
            const double xi = xi0 + (right - xi0) * i / n_M;
            M = std::max(M, psi0(xi));
        }
    }
    // safety factor, kept strictly below 1
    M = std::min(M * 1.01, 0.5 * (1.0 + M));
    return {L, M};
}

}  // namespace detail

inline GammaEnvelope gamma_envelope(const InitialDatum& datum) {
    if (!datum.symmetric())
        throw ParameterError("gamma_envelope: datum must be symmetric (apply symmetrize first)");
    const MomentSet ms = datum.moments();
    if (!std::isfinite(ms.m3_abs))
        throw UnsupportedError("gamma_envelope: needs a finite absolute third moment");
    const TailProfile tail = datum.tail_profile();
    if (!tail.p || !tail.L_p)
        throw UnsupportedError("gamma_envelope: datum has no usable tail profile");
    const double p = *tail.p, L_p = *tail.L_p;

    GammaEnvelope env;
    env.k = static_cast<int>(std::ceil(2.0 / p - 1e-12));
    env.alpha = 1.0 / (2.0 * env.k);
    env.xi0 = std::sqrt(2.0) * ms.m2 / (40.0 * std::sqrt(static_cast<double>(env.k)) * ms.m3_abs);

    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto scan = detail::envelope_scan(datum, env.k, env.xi0, p, L_p, attempt == 0 ? 1 : 10);
        env.L = scan.L;
        env.M = scan.M;
        const double sqrtL = std::sqrt(env.L);
        env.lambda2 = std::max({3.0 / (2.0 * env.k * ms.m2), (2.0 / 3.0) * sqrtL,
                                2.0 * env.M * sqrtL / (1.0 - env.M)});

        // audit: domination on [0, 1e3], then the analytic tail argument
        double worst_xi = -1.0, worst_gap = 0.0;
        for (int i = 0; i <= 10000; ++i) {
            const double xi = 1000.0 * i / 10000.0;
            const double gap = std::abs(datum.cf(xi)) - env(xi);
            if (gap > 1e-12 && gap > worst_gap) {
                worst_gap = gap;
                worst_xi = xi;
            }
        }
        bool tail_ok = true;
        if (env.lambda() <= 1000.0) {
            // for xi >= 1e3: |phi0| <= L_p xi^{-p} and envelope >= (l^2/2)^a xi^{-2a};
            // p >= 4 alpha, so checking at the scan edge settles the whole tail
            const double lhs = L_p * std::pow(1000.0, 2.0 * env.alpha - p);
            const double rhs = std::pow(env.lambda2 / 2.0, env.alpha);
            tail_ok = lhs <= rhs;
        } else {
            tail_ok = false;
        }
        if (worst_xi < 0.0 && tail_ok) return env;
        if (attempt == 1)
            throw NumericalError("gamma envelope audit failed (sup scan underestimates)",
                                 "worst_xi", worst_xi, 1e-12);
    }
    return env;  // unreachable
}

// Everything Theorem 2.1's constant is assembled from.  Values are kept both
// directly and in log space; C_total falls back to log10 reporting instead of
// overflowing.
struct ConstantBreakdown {
    int n_bar = 0;
    double delta_bar = 0.0;
    double eps_bar = 0.0;
    double coeff_26 = 0.0;
    double coeff_27 = 0.0;
    double coeff_28 = 0.0;
    double coeff_29 = 0.0;
    double coeff_31 = 0.0;
    double c_tilde = 0.0;          // equality line of the printed bound, envelope lambda
    double c_tilde_printed = 0.0;  // final printed inequality line, printed M
    double M = 0.0;                // the printed exponential
    double C_total = 0.0;          // +inf when not representable; see overflow
    double log10_C_total = 0.0;
    bool overflow = false;
};

inline ConstantBreakdown theorem_constant(double m4, double sigma, double p, double L_p,
                                          const GammaEnvelope& env) {
    if (!(m4 > 0.0 && sigma > 0.0 && p > 0.0 && L_p > 0.0))
        throw ParameterError("theorem_constant: inputs must be positive and finite");
    if (!std::isfinite(m4)) throw ParameterError("theorem_constant: m4 must be finite");
    const int k = static_cast<int>(std::ceil(2.0 / p - 1e-12));
    if (k != env.k) throw ParameterError("theorem_constant: envelope was built for a different p");

    ConstantBreakdown out;
    out.n_bar = 9 * k;
    const double n_bar = out.n_bar;
    const double ln_fact = log_factorial(out.n_bar);
    const double ln2 = std::log(2.0);
    out.delta_bar = std::exp(-(n_bar * ln2 + ln_fact));
    out.eps_bar = std::exp(-(ln2 + ln_fact));

    const double kurt = m4 / (sigma * sigma * sigma * sigma);
    const double root_g72 = std::sqrt(std::tgamma(3.5));
    out.coeff_26 = 0.62 * root_g72 * kurt;
    out.coeff_27 = 3.8 * root_g72 * kurt;
    const double e = std::exp(1.0);
    out.coeff_28 = 16.0 / (e * e) * std::pow(2.0 * kurt, 4.5);
    out.coeff_29 = (std::pow(5.0 / e, 2.5) + 8.0 * std::sqrt(2.0) / (e * e)) *
                   std::pow(2.0 * kurt, 4.5);
    out.coeff_31 = std::sqrt(2.0) * std::pow(24.0 / e, 2.0) * std::pow(2.0 * kurt, 4.0);

    // printed exponential M = exp{-3pi^2/(64 (3 + L_p^{4/p})^2) *
    //   (sqrt2 sigma / (8 ceil(2/p) sigma^3 + 40 pi sqrt(ceil(2/p) m4)))^2}
    {
        const double a = 3.0 + std::pow(L_p, 4.0 / p);
        const double denom = 8.0 * k * sigma * sigma * sigma +
                             40.0 * kPi * std::sqrt(static_cast<double>(k) * m4);
        const double r = std::sqrt(2.0) * sigma / denom;
        out.M = std::exp(-3.0 * kPi * kPi / (64.0 * a * a) * r * r);
    }

    // ln of the common prefactor 4 sqrt2 (m4^4 / sigma^{23/2}) (2 n!)^{9/(4n)}
    const double ln_prefactor = std::log(4.0 * std::sqrt(2.0)) + 4.0 * std::log(m4) -
                                11.5 * std::log(sigma) +
                                9.0 / (4.0 * n_bar) * (ln2 + ln_fact);
    const double ln_c_tilde = ln_prefactor + 2.25 * std::log(env.lambda2);
    out.c_tilde = std::exp(ln_c_tilde);
    const double bracket = std::pow(3.0 / (2.0 * sigma * sigma), 2.25) +
                           std::pow(2.0 / (1.0 - out.M), 2.25) * std::pow(L_p, 4.5 / p);
    const double ln_c_printed = ln_prefactor + 1.25 * ln2 + std::log(bracket);
    out.c_tilde_printed = std::exp(ln_c_printed);

    // C = 2 + 2(n + 2^n n!) + (1/sqrt2) sum coeffs + 2 c~, accumulated in log
    // space so huge n_bar cannot overflow.
    const double ln_terms[4] = {
        std::log(2.0 + 2.0 * n_bar),
        ln2 + n_bar * ln2 + ln_fact,  // 2 * 2^n * n!
        std::log((out.coeff_26 + out.coeff_27 + out.coeff_28 + out.coeff_29 + out.coeff_31) /
                 std::sqrt(2.0)),
        ln2 + ln_c_tilde,
    };
    double ln_max = ln_terms[0];
    for (double v : ln_terms) ln_max = std::max(ln_max, v);
    double acc = 0.0;
    for (double v : ln_terms) acc += std::exp(v - ln_max);
    const double ln_total = ln_max + std::log(acc);
    out.log10_C_total = log10_from_ln(ln_total);
    if (ln_total < std::log(std::numeric_limits<double>::max())) {
        out.C_total = std::exp(ln_total);
    } else {
        out.C_total = std::numeric_limits<double>::infinity();
        out.overflow = true;
    }
    return out;
}

}  // namespace kac
