#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kac/errors.hpp"
#include "kac/quadrature.hpp"
#include "kac/rng.hpp"
#include "kac/special_functions.hpp"

namespace kac {

enum class Family { gaussian, uniform, gaussian_mixture, power_law, cf_series, custom_grid };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::uniform: return "uniform";
        case Family::gaussian_mixture: return "gaussian_mixture";
        case Family::power_law: return "power_law";
        case Family::cf_series: return "cf_series";
        case Family::custom_grid: return "custom_grid";
    }
    return "?";
}

struct MomentSet {
    double m2 = 0.0;
    double m3_abs = 0.0;  // may be +inf
    double m4 = 0.0;      // may be +inf
    double kurtosis_excess() const { return m4 - 3.0 * m2 * m2; }
};

struct TailProfile {
    std::optional<double> p;
    std::optional<double> L_p;
    bool scan_estimate = false;  // true: L_p is a grid-scan lower bound, not analytic
};

namespace detail {

// Oscillatory tail integral C_p(xi) = int_1^inf x^{-p} cos(xi x) dx for p > 1,
// xi > 0.  Panels are capped by both the decay scale (geometric ratio, so the
// power factor stays tame for GL12) and a half period of the cosine; the cut
// tail is bounded by the envelope integral x^{-(p-1)}/(p-1).
inline double cosine_tail_integral(double p, double xi, double abs_tol) {
    const double half_period = kPi / xi;
    const double stop_x =
        std::pow((p - 1.0) * std::max(abs_tol, 1e-300), -1.0 / (p - 1.0));
    auto f = [&](double u) { return std::pow(u, -p) * std::cos(xi * u); };
    double total = 0.0;
    double x = 1.0;
    for (int guard = 0; x < stop_x; ++guard) {
        if (guard > 4000000)
            throw NumericalError("cosine tail integral did not terminate", "chunk_count", 4e6, 0);
        const double b = std::min({x * 1.2, x + half_period, stop_x});
        total += integrate_gl(f, x, b, 12);
        x = b;
    }
    return total;
}

// int_1^inf x^{-(1+beta)} cos(xi x) dx, accelerated by four integrations by
// parts so the remaining integrand decays like x^{-(5+beta)}.
inline double power_law_cos_transform(double beta, double xi) {
    const double s = 1.0 + beta;
    const double sn = std::sin(xi), cs = std::cos(xi);
    // error in the final value is (prefactor) * error(C4); aim at ~1e-14 overall
    const double prefactor = s * (s + 1.0) * (s + 2.0) * (s + 3.0) / (xi * xi * xi * xi);
    const double c4_tol = 1e-14 / std::max(prefactor, 1.0);
    const double c4 = cosine_tail_integral(s + 4.0, xi, c4_tol);
    const double s3 = cs / xi - (s + 3.0) / xi * c4;
    const double c2 = -sn / xi + (s + 2.0) / xi * s3;
    const double s1 = cs / xi - (s + 1.0) / xi * c2;
    return -sn / xi + s / xi * s1;
}

}  // namespace detail

// Small-|xi| series for the power-law characteristic function:
//   1 - beta/(2(beta-2)) xi^2 - Gamma(1-beta) cos(beta pi/2) |xi|^beta
//     - beta sum_{m>=2} (-1)^m xi^{2m} / ((2m)! (2m - beta))
inline double power_law_cf_series(double beta, double xi) {
    xi = std::abs(xi);
    double v = 1.0 - beta / (2.0 * (beta - 2.0)) * xi * xi -
               gamma_one_minus(beta) * std::cos(beta * kPi / 2.0) * std::pow(xi, beta);
    double fact = 2.0;  // (2m)! running value, starts at 2! for m=1
    double sign = 1.0;  // (-1)^m for m=2 is +1
    double xi_pow = xi * xi;
    for (int m = 2; m <= 60; ++m) {
        fact *= (2.0 * m - 1.0) * (2.0 * m);
        xi_pow *= xi * xi;
        const double term = beta * sign * xi_pow / (fact * (2.0 * m - beta));
        v -= term;
        if (std::abs(term) < 1e-16) break;
        sign = -sign;
    }
    return v;
}

// Large-|xi| evaluation by direct oscillatory quadrature of
// beta int_1^inf cos(xi x) x^{-1-beta} dx.
inline double power_law_cf_quadrature(double beta, double xi) {
    xi = std::abs(xi);
    if (xi == 0.0) return 1.0;
    return beta * detail::power_law_cos_transform(beta, xi);
}

// An initial velocity law: closed-form families plus a sampled-grid escape
// hatch.  Immutable after construction; safe for concurrent reads.
class InitialDatum {
    struct GaussianP { double sigma; };
    struct UniformP { double halfwidth; };
    struct MixtureP {
        std::vector<double> w, s, mu;
    };
    struct PowerLawP { double beta; };
    struct CfSeriesP { std::vector<double> a; };
    struct GridP {
        std::vector<double> v, f, cdf;
    };
    using Params = std::variant<GaussianP, UniformP, MixtureP, PowerLawP, CfSeriesP, GridP>;

public:
    static InitialDatum gaussian(double sigma) {
        if (!(sigma > 0.0)) throw ParameterError("gaussian: sigma must be > 0");
        InitialDatum d(Family::gaussian, GaussianP{sigma});
        d.symmetric_ = true;
        d.m2_ = sigma * sigma;
        d.m3_abs_ = gaussian_abs_third_moment(sigma);
        d.m4_ = 3.0 * sigma * sigma * sigma * sigma;
        return d;
    }

    static InitialDatum uniform(double halfwidth) {
        if (!(halfwidth > 0.0)) throw ParameterError("uniform: halfwidth must be > 0");
        const double a = halfwidth;
        InitialDatum d(Family::uniform, UniformP{a});
        d.symmetric_ = true;
        d.m2_ = a * a / 3.0;
        d.m3_abs_ = a * a * a / 4.0;
        d.m4_ = a * a * a * a / 5.0;
        return d;
    }

    // Component means are optional; all-zero means give the centered family.
    static InitialDatum gaussian_mixture(std::vector<double> weights, std::vector<double> sigmas,
                                         std::vector<double> means = {}) {
        if (weights.empty()) throw ParameterError("gaussian_mixture: weights must be nonempty");
        if (weights.size() != sigmas.size())
            throw ParameterError("gaussian_mixture: weights and sigmas differ in length");
        if (!means.empty() && means.size() != weights.size())
            throw ParameterError("gaussian_mixture: means length mismatch");
        double sum = 0.0;
        for (double w : weights) {
            if (!(w > 0.0)) throw ParameterError("gaussian_mixture: weights must be positive");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ParameterError("gaussian_mixture: weights must sum to 1");
        for (double s : sigmas)
            if (!(s > 0.0)) throw ParameterError("gaussian_mixture: sigmas must be positive");
        if (means.empty()) means.assign(weights.size(), 0.0);
        for (double& w : weights) w /= sum;

        InitialDatum d(Family::gaussian_mixture, MixtureP{weights, sigmas, means});
        d.symmetric_ = mixture_is_symmetric(weights, sigmas, means);
        double m1 = 0.0, m2 = 0.0, m4 = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const double w = weights[i], m = means[i], s2 = sigmas[i] * sigmas[i];
            m1 += w * m;
            m2 += w * (m * m + s2);
            m4 += w * (m * m * m * m + 6.0 * m * m * s2 + 3.0 * s2 * s2);
        }
        d.mean_ = m1;
        d.m2_ = m2;  // second moment about 0, the solver's sigma^2 convention
        d.m4_ = m4;
        bool centered = true;
        for (double m : means) centered = centered && m == 0.0;
        if (centered) {
            double m3 = 0.0;
            for (std::size_t i = 0; i < weights.size(); ++i)
                m3 += weights[i] * gaussian_abs_third_moment(sigmas[i]);
            d.m3_abs_ = m3;
        } else {
            d.m3_abs_ = d.numeric_abs_moment(3);
        }
        return d;
    }

    static InitialDatum power_law(double beta) {
        if (!(beta > 3.0 && beta < 4.0)) throw ParameterError("beta must lie in (3,4)");
        InitialDatum d(Family::power_law, PowerLawP{beta});
        d.symmetric_ = true;
        d.m2_ = beta / (beta - 2.0);
        d.m3_abs_ = beta / (beta - 3.0);
        d.m4_ = std::numeric_limits<double>::infinity();
        return d;
    }

    // CF-only fixture: phi0(xi) = sum a_n (1/(1+xi^2))^{1/n}.  Carries no
    // density, no sampler, and no moment metadata.
    static InitialDatum cf_series(std::vector<double> coeffs) {
        if (coeffs.empty()) throw ParameterError("cf_series: coeffs must be nonempty");
        double sum = 0.0;
        for (double a : coeffs) {
            if (!(a > 0.0)) throw ParameterError("cf_series: coeffs must be positive");
            sum += a;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ParameterError("cf_series: coeffs must sum to 1");
        for (double& a : coeffs) a /= sum;
        InitialDatum d(Family::cf_series, CfSeriesP{coeffs});
        d.symmetric_ = true;  // the CF is real and even
        return d;
    }

    static InitialDatum custom_grid(std::vector<double> v, std::vector<double> f,
                                    std::optional<MomentSet> declared = std::nullopt) {
        if (v.size() != f.size() || v.size() < 4)
            throw ParameterError("custom_grid: need matching v,f arrays with >= 4 points");
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] > v[i - 1])) throw ParameterError("custom_grid: v must be ascending");
        for (double y : f)
            if (!(y >= 0.0)) throw ParameterError("custom_grid: density values must be >= 0");
        const double mass = trapezoid(v, f);
        if (std::abs(mass - 1.0) > 1e-6)
            throw ParameterError("custom_grid: density must integrate to 1 (got " +
                                 std::to_string(mass) + ")");
        GridP g{std::move(v), std::move(f), {}};
        g.cdf.resize(g.v.size());
        g.cdf[0] = 0.0;
        for (std::size_t i = 1; i < g.v.size(); ++i)
            g.cdf[i] = g.cdf[i - 1] + 0.5 * (g.f[i] + g.f[i - 1]) * (g.v[i] - g.v[i - 1]);

        InitialDatum d(Family::custom_grid, std::move(g));
        const auto& gp = std::get<GridP>(d.params_);
        double asym = 0.0, fmax = 0.0;
        for (std::size_t i = 0; i < gp.v.size(); ++i) {
            asym = std::max(asym, std::abs(gp.f[i] - d.grid_density(-gp.v[i])));
            fmax = std::max(fmax, gp.f[i]);
        }
        d.symmetric_ = asym <= 1e-12 * std::max(fmax, 1.0);
        std::vector<double> y(gp.v.size());
        auto moment = [&](int k, bool absolute) {
            for (std::size_t i = 0; i < gp.v.size(); ++i) {
                const double base = absolute ? std::abs(gp.v[i]) : gp.v[i];
                y[i] = std::pow(base, k) * gp.f[i];
            }
            return trapezoid(gp.v, y);
        };
        d.mean_ = moment(1, false);
        d.m2_ = moment(2, false);
        d.m3_abs_ = moment(3, true);
        d.m4_ = moment(4, false);
        if (declared) {
            auto check = [&](const char* name, double got, double want) {
                if (want > 0.0 && std::isfinite(want) &&
                    std::abs(got - want) > 1e-6 * std::abs(want))
                    throw ParameterError(std::string("custom_grid: declared ") + name +
                                         " disagrees with the integrated value");
            };
            check("m2", *d.m2_, declared->m2);
            check("m4", *d.m4_, declared->m4);
            check("m3_abs", *d.m3_abs_, declared->m3_abs);
        }
        return d;
    }

    Family family() const { return family_; }
    bool symmetric() const { return symmetric_; }
    double mean() const { return mean_; }
    std::optional<double> m2() const { return m2_; }
    std::optional<double> m3_abs() const { return m3_abs_; }
    std::optional<double> m4() const { return m4_; }
    double beta() const { return std::get<PowerLawP>(params_).beta; }

    double sigma() const {
        if (!m2_) throw UnsupportedError("datum has no second-moment metadata");
        return std::sqrt(*m2_);
    }

    // --- characteristic function -------------------------------------------

    std::complex<double> cf(double xi) const {
        if (xi == 0.0) return {1.0, 0.0};
        switch (family_) {
            case Family::gaussian: {
                const double s = std::get<GaussianP>(params_).sigma;
                return {std::exp(-0.5 * s * s * xi * xi), 0.0};
            }
            case Family::uniform:
                return {sinc(std::get<UniformP>(params_).halfwidth * xi), 0.0};
            case Family::gaussian_mixture: {
                const auto& p = std::get<MixtureP>(params_);
                std::complex<double> v{0.0, 0.0};
                for (std::size_t i = 0; i < p.w.size(); ++i) {
                    const double damp = std::exp(-0.5 * p.s[i] * p.s[i] * xi * xi);
                    v += p.w[i] * damp *
                         std::complex<double>(std::cos(p.mu[i] * xi), std::sin(p.mu[i] * xi));
                }
                return v;
            }
            case Family::power_law: {
                const double b = std::get<PowerLawP>(params_).beta;
                return {std::abs(xi) <= 1.0 ? power_law_cf_series(b, xi)
                                            : power_law_cf_quadrature(b, xi),
                        0.0};
            }
            case Family::cf_series: {
                const auto& a = std::get<CfSeriesP>(params_).a;
                const double base = 1.0 / (1.0 + xi * xi);
                double v = 0.0;
                for (std::size_t n = 0; n < a.size(); ++n)
                    v += a[n] * std::pow(base, 1.0 / static_cast<double>(n + 1));
                return {v, 0.0};
            }
            case Family::custom_grid: {
                const auto& g = std::get<GridP>(params_);
                // trapezoid of e^{i xi v} f(v) over the stored grid
                std::complex<double> acc{0.0, 0.0};
                for (std::size_t i = 1; i < g.v.size(); ++i) {
                    const double h = g.v[i] - g.v[i - 1];
                    const std::complex<double> e0{std::cos(xi * g.v[i - 1]),
                                                  std::sin(xi * g.v[i - 1])};
                    const std::complex<double> e1{std::cos(xi * g.v[i]), std::sin(xi * g.v[i])};
                    acc += 0.5 * h * (g.f[i - 1] * e0 + g.f[i] * e1);
                }
                return acc;
            }
        }
        return {0.0, 0.0};
    }

    // --- density -------------------------------------------------------------

    bool has_density() const { return family_ != Family::cf_series; }

    double density(double v) const {
        switch (family_) {
            case Family::gaussian:
                return normal_pdf(v, std::get<GaussianP>(params_).sigma);
            case Family::uniform: {
                const double a = std::get<UniformP>(params_).halfwidth;
                return std::abs(v) <= a ? 1.0 / (2.0 * a) : 0.0;
            }
            case Family::gaussian_mixture: {
                const auto& p = std::get<MixtureP>(params_);
                double f = 0.0;
                for (std::size_t i = 0; i < p.w.size(); ++i)
                    f += p.w[i] * normal_pdf(v - p.mu[i], p.s[i]);
                return f;
            }
            case Family::power_law: {
                const double b = std::get<PowerLawP>(params_).beta;
                return std::abs(v) >= 1.0 ? 0.5 * b * std::pow(std::abs(v), -1.0 - b) : 0.0;
            }
            case Family::cf_series:
                throw UnsupportedError("cf_series datum carries no density");
            case Family::custom_grid:
                return grid_density(v);
        }
        return 0.0;
    }

    // --- sampling -------------------------------------------------------------

    bool can_sample() const { return family_ != Family::cf_series; }

    double sample(RngStream& rng) const {
        switch (family_) {
            case Family::gaussian:
                return std::get<GaussianP>(params_).sigma * rng.normal();
            case Family::uniform: {
                const double a = std::get<UniformP>(params_).halfwidth;
                return a * (2.0 * rng.next_double() - 1.0);
            }
            case Family::gaussian_mixture: {
                const auto& p = std::get<MixtureP>(params_);
                double u = rng.next_double();
                std::size_t i = 0;
                for (; i + 1 < p.w.size(); ++i) {
                    if (u < p.w[i]) break;
                    u -= p.w[i];
                }
                return p.mu[i] + p.s[i] * rng.normal();
            }
            case Family::power_law: {
                const double b = std::get<PowerLawP>(params_).beta;
                const double mag = std::pow(rng.next_open(), -1.0 / b);
                return rng.next_double() < 0.5 ? -mag : mag;
            }
            case Family::cf_series:
                throw UnsupportedError("cf_series datum has no sampler");
            case Family::custom_grid:
                return grid_sample(rng);
        }
        return 0.0;
    }

    // Largest |v| carrying mass; +inf for unbounded support.
    double support_radius() const {
        switch (family_) {
            case Family::uniform: return std::get<UniformP>(params_).halfwidth;
            case Family::custom_grid: {
                const auto& g = std::get<GridP>(params_);
                return std::max(std::abs(g.v.front()), std::abs(g.v.back()));
            }
            default: return std::numeric_limits<double>::infinity();
        }
    }

    // --- derived data ----------------------------------------------------------

    MomentSet moments() const {
        if (family_ == Family::cf_series)
            throw UnsupportedError("cf_series datum has no moment metadata");
        return {*m2_, *m3_abs_, *m4_};
    }

    TailProfile tail_profile() const {
        switch (family_) {
            case Family::gaussian: {
                const double s2 = *m2_;
                // p = 4 with L_p = max xi^4 exp(-s^2 xi^2 / 2) = (4/(e s^2))^2
                return {4.0, max_power_gaussian(4.0, 0.5 * s2), false};
            }
            case Family::uniform:
                return {1.0, 1.0 / std::get<UniformP>(params_).halfwidth, false};
            case Family::gaussian_mixture: {
                const auto& p = std::get<MixtureP>(params_);
                double L = 0.0;
                for (std::size_t i = 0; i < p.w.size(); ++i)
                    L += p.w[i] * max_power_gaussian(4.0, 0.5 * p.s[i] * p.s[i]);
                return {4.0, L, false};
            }
            case Family::power_law:
                // |phi| <= 2 beta / |xi| for all xi (integration by parts bound)
                return {1.0, 2.0 * std::get<PowerLawP>(params_).beta, false};
            case Family::cf_series:
                return {std::nullopt, std::nullopt, false};
            case Family::custom_grid: {
                // grid scan of sup |xi| |phi| over |xi| <= 1e3: a lower bound only
                double sup = 0.0;
                for (int k = 0; k <= 20000; ++k) {
                    const double xi = 1000.0 * k / 20000.0;
                    sup = std::max(sup, xi * std::abs(cf(xi)));
                }
                return {1.0, sup, true};
            }
        }
        return {};
    }

    InitialDatum symmetrized() const {
        switch (family_) {
            case Family::gaussian:
            case Family::uniform:
            case Family::power_law:
            case Family::cf_series:
                return *this;
            case Family::gaussian_mixture: {
                const auto& p = std::get<MixtureP>(params_);
                if (symmetric_) return *this;
                std::vector<double> w, s, mu;
                for (std::size_t i = 0; i < p.w.size(); ++i) {
                    if (p.mu[i] == 0.0) {
                        w.push_back(p.w[i]);
                        s.push_back(p.s[i]);
                        mu.push_back(0.0);
                    } else {
                        w.push_back(0.5 * p.w[i]);
                        s.push_back(p.s[i]);
                        mu.push_back(p.mu[i]);
                        w.push_back(0.5 * p.w[i]);
                        s.push_back(p.s[i]);
                        mu.push_back(-p.mu[i]);
                    }
                }
                return gaussian_mixture(std::move(w), std::move(s), std::move(mu));
            }
            case Family::custom_grid: {
                const auto& g = std::get<GridP>(params_);
                const double V = std::max(std::abs(g.v.front()), std::abs(g.v.back()));
                const std::size_t n = 2 * g.v.size() + 1;
                std::vector<double> v(n), f(n);
                for (std::size_t i = 0; i < n; ++i) {
                    v[i] = -V + 2.0 * V * static_cast<double>(i) / (n - 1);
                    f[i] = 0.5 * (grid_density(v[i]) + grid_density(-v[i]));
                }
                const double mass = trapezoid(v, f);
                for (double& y : f) y /= mass;
                return custom_grid(std::move(v), std::move(f));
            }
        }
        return *this;
    }

private:
    InitialDatum(Family fam, Params p) : family_(fam), params_(std::move(p)) {}

    static bool mixture_is_symmetric(const std::vector<double>& w, const std::vector<double>& s,
                                     const std::vector<double>& mu) {
        // symmetric iff components pair up under mu -> -mu with equal (w, s)
        std::vector<bool> used(w.size(), false);
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (used[i]) continue;
            if (mu[i] == 0.0) {
                used[i] = true;
                continue;
            }
            bool matched = false;
            for (std::size_t j = 0; j < w.size(); ++j) {
                if (used[j] || j == i) continue;
                if (mu[j] == -mu[i] && s[j] == s[i] && w[j] == w[i]) {
                    used[i] = used[j] = true;
                    matched = true;
                    break;
                }
            }
            if (!matched) return false;
        }
        return true;
    }

    double grid_density(double x) const {
        const auto& g = std::get<GridP>(params_);
        if (x <= g.v.front() || x >= g.v.back()) {
            if (x == g.v.front()) return g.f.front();
            if (x == g.v.back()) return g.f.back();
            return 0.0;
        }
        const auto it = std::upper_bound(g.v.begin(), g.v.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - g.v.begin());
        const double t = (x - g.v[i - 1]) / (g.v[i] - g.v[i - 1]);
        return g.f[i - 1] + t * (g.f[i] - g.f[i - 1]);
    }

    double grid_sample(RngStream& rng) const {
        const auto& g = std::get<GridP>(params_);
        const double total = g.cdf.back();
        const double u = rng.next_open() * total;
        const auto it = std::upper_bound(g.cdf.begin(), g.cdf.end(), u);
        std::size_t i = static_cast<std::size_t>(it - g.cdf.begin());
        if (i == 0) i = 1;
        if (i >= g.cdf.size()) i = g.cdf.size() - 1;
        const double h = g.v[i] - g.v[i - 1];
        const double f0 = g.f[i - 1];
        const double slope = (g.f[i] - f0) / h;
        const double du = u - g.cdf[i - 1];
        // solve f0 d + slope d^2 / 2 = du for d in [0, h]
        double d;
        if (std::abs(slope) < 1e-14 * std::max(f0, 1.0)) {
            d = f0 > 0.0 ? du / f0 : 0.5 * h;
        } else {
            const double disc = f0 * f0 + 2.0 * slope * du;
            d = (-f0 + std::sqrt(std::max(disc, 0.0))) / slope;
        }
        return g.v[i - 1] + std::clamp(d, 0.0, h);
    }

    double numeric_abs_moment(int k) const {
        // adaptive quadrature of |v|^k density(v); mixtures only
        const auto& p = std::get<MixtureP>(params_);
        double lo = 0.0, hi = 0.0;
        for (std::size_t i = 0; i < p.w.size(); ++i) {
            lo = std::min(lo, p.mu[i] - 12.0 * p.s[i]);
            hi = std::max(hi, p.mu[i] + 12.0 * p.s[i]);
        }
        auto f = [&](double v) { return std::pow(std::abs(v), k) * density(v); };
        return adaptive_integrate(f, lo, hi, 1e-14, 1e-10);
    }

    Family family_;
    Params params_;
    bool symmetric_ = false;
    double mean_ = 0.0;
    std::optional<double> m2_, m3_abs_, m4_;
};

// --- spec-level operation names -----------------------------------------------

inline InitialDatum symmetrize(const InitialDatum& datum) { return datum.symmetrized(); }

inline std::complex<double> eval_cf(const InitialDatum& datum, double xi) { return datum.cf(xi); }

inline MomentSet moments(const InitialDatum& datum) { return datum.moments(); }

inline TailProfile tail_profile(const InitialDatum& datum) { return datum.tail_profile(); }

}  // namespace kac
