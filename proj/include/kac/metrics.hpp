#pragma once

#include <cmath>
#include <vector>

#include "kac/errors.hpp"
#include "kac/grid_fn.hpp"

namespace kac {

// L1 distance by trapezoid rule on a shared grid.  Tiny negative lobes from
// Fourier inversion are clamped to zero; anything below -neg_tol is treated
// as a broken inversion rather than quadrature noise.  Monte Carlo densities
// carry statistical lobes and pass a noise-scaled neg_tol.
inline double l1_distance(const DensityGrid& f1, const DensityGrid& f2, double neg_tol = 1e-7) {
    if (!f1.same_grid(f2)) throw GridMismatchError("l1_distance: grids differ");
    auto clamped = [neg_tol](double v) {
        if (v >= 0.0) return v;
        if (v < -neg_tol)
            throw NumericalError("density has a negative lobe beyond tolerance",
                                 "density_value", v, neg_tol);
        return 0.0;
    };
    double s = 0.0;
    for (int k = 0; k < f1.n_points; ++k) {
        const double d = std::abs(clamped(f1.values[k]) - clamped(f2.values[k]));
        s += (k == 0 || k + 1 == f1.n_points) ? 0.5 * d : d;
    }
    return s * f1.step();
}

// H1 norm of a conjugate-even grid function over the real line:
//   sqrt( int |D|^2 + int |D'|^2 ), both integrals = 2x the [0, xi_max] ones,
// the derivative by central differences at the grid step.  The computed value
// is a slight lower bound of the true norm when the tail past xi_max is
// dropped, which keeps the Beurling certificate conservative.
inline double h1_fourier_norm(const GridFn& cf_diff, double decay_tol = 1e-6) {
    if (!cf_diff.hermitian_even)
        throw ParameterError("h1_fourier_norm: cf_diff must be conjugate-even");
    const double edge = std::abs(cf_diff.values.back());
    if (edge > decay_tol)
        throw NumericalError("cf_diff not decayed at xi_max", "abs_cf_at_ximax", edge, decay_tol);
    const int n = cf_diff.n_points;
    const double h = cf_diff.step();
    std::vector<double> sq(n), dsq(n);
    for (int k = 0; k < n; ++k) sq[k] = std::norm(cf_diff.values[k]);
    for (int k = 1; k + 1 < n; ++k)
        dsq[k] = std::norm((cf_diff.values[k + 1] - cf_diff.values[k - 1]) / (2.0 * h));
    // at 0 use the conjugate-even extension; at the far edge a one-sided difference
    dsq[0] = std::norm((cf_diff.values[1] - std::conj(cf_diff.values[1])) / (2.0 * h));
    dsq[n - 1] = std::norm((cf_diff.values[n - 1] - cf_diff.values[n - 2]) / h);
    double i0 = 0.0, i1 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        i0 += w * sq[k];
        i1 += w * dsq[k];
    }
    return std::sqrt(2.0 * h * (i0 + i1));
}

struct BeurlingResult {
    double lhs = 0.0;  // sqrt(2) ||f1 - f2||_1
    double rhs = 0.0;  // || cf_diff ||_{H^1(R)}
    bool holds = false;
};

// The certificate sqrt2 ||f||_1 <= ||phi||_{H1}: both sides computed
// independently, inequality granted 1e-6 slack.
inline BeurlingResult beurling_check(const DensityGrid& f1, const DensityGrid& f2,
                                     const GridFn& cf_diff, double neg_tol = 1e-7,
                                     double decay_tol = 1e-6) {
    BeurlingResult r;
    r.lhs = std::sqrt(2.0) * l1_distance(f1, f2, neg_tol);
    r.rhs = h1_fourier_norm(cf_diff, decay_tol);
    r.holds = r.lhs <= r.rhs + 1e-6;
    return r;
}

struct RateFit {
    double rate = 0.0;
    double log_intercept = 0.0;
    double r_squared = 0.0;
    int points_used = 0;
};

// Least squares of ln(distance) against t over the points above the noise
// floor; rate is the negated slope.
inline RateFit fit_decay_rate(const std::vector<double>& times,
                              const std::vector<double>& distances, double floor) {
    if (times.size() != distances.size())
        throw ParameterError("fit_decay_rate: times/distances length mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (distances[i] > floor) {
            xs.push_back(times[i]);
            ys.push_back(std::log(distances[i]));
        }
    }
    const int n = static_cast<int>(xs.size());
    if (n < 3)
        throw NumericalError("fit_decay_rate: fewer than 3 points above the floor",
                             "usable_points", n, 3);
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    RateFit fit;
    const double slope = sxy / sxx;
    fit.rate = -slope;
    fit.log_intercept = my - slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.points_used = n;
    return fit;
}

}  // namespace kac
