#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "kac/errors.hpp"

namespace kac {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre nodes/weights by Newton iteration on P_n; machine precision
// for any practical n.  Rules are cached per order.
inline const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        rule.x[i] = -z;
        rule.x[n - 1 - i] = z;
        rule.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.w[n - 1 - i] = rule.w[i];
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
    const GaussRule& rule = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rule.w[i] * f(c + h * rule.x[i]);
    return s * h;
}

// Adaptive bisection with an embedded GL12/GL25 error estimate.  Handles
// endpoint algebraic singularities (|sin t|^m and friends) by subdividing
// toward them.
template <class F>
double adaptive_integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                          int max_depth = 60) {
    struct Interval {
        double a, b, coarse;
        int depth;
    };
    const double whole = integrate_gl(f, a, b, 12);
    std::vector<Interval> stack{{a, b, whole, 0}};
    double total = 0.0;
    double scale = std::abs(whole);
    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        const double fine = integrate_gl(f, iv.a, iv.b, 25);
        const double err = std::abs(fine - iv.coarse);
        const double local_tol =
            std::max(abs_tol, rel_tol * std::max(scale, std::abs(total))) *
            std::max(1e-3, (iv.b - iv.a) / (b - a));
        if (err <= local_tol || iv.depth >= max_depth) {
            if (iv.depth >= max_depth && err > 1e3 * local_tol)
                throw NumericalError("adaptive quadrature failed to converge",
                                     "quadrature_error", err, local_tol);
            total += fine;
            continue;
        }
        const double mid = 0.5 * (iv.a + iv.b);
        stack.push_back({iv.a, mid, integrate_gl(f, iv.a, mid, 12), iv.depth + 1});
        stack.push_back({mid, iv.b, integrate_gl(f, mid, iv.b, 12), iv.depth + 1});
        scale = std::max(scale, std::abs(total));
    }
    return total;
}

// Trapezoid rule over uniformly spaced samples.
inline double trapezoid_uniform(const std::vector<double>& y, double h) {
    if (y.size() < 2) return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
    return s * h;
}

// Trapezoid rule on an arbitrary ascending grid.
inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

}  // namespace kac
