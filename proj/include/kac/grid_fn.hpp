#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "kac/errors.hpp"

namespace kac {

namespace detail {

// 4-point Lagrange weights for local coordinate t in [-1, 2] relative to the
// second stencil point.
inline void cubic_weights(double t, double w[4]) {
    w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[1] = (t * t - 1.0) * (t - 2.0) / 2.0;
    w[2] = -t * (t + 1.0) * (t - 2.0) / 2.0;
    w[3] = t * (t * t - 1.0) / 6.0;
}

// Stencil base index and local coordinate for x = u * h on an n-point grid.
inline int cubic_base(double u, int n, double& t) {
    int j = static_cast<int>(u);
    if (j < 1) j = 1;
    if (j > n - 3) j = n - 3;
    t = u - j;
    return j - 1;
}

}  // namespace detail

// A complex-valued function sampled uniformly on [0, xi_max] (point 0
// included).  hermitian_even means the extension to negative frequencies is
// the conjugate, which holds for the characteristic function of any real
// density.
struct GridFn {
    double xi_max = 0.0;
    int n_points = 0;
    bool hermitian_even = true;
    std::vector<std::complex<double>> values;

    GridFn() = default;
    GridFn(double xi_max_, int n_points_, bool hermitian = true)
        : xi_max(xi_max_), n_points(n_points_), hermitian_even(hermitian),
          values(static_cast<std::size_t>(n_points_)) {
        if (n_points_ < 2 || xi_max_ <= 0.0)
            throw ParameterError("GridFn: need n_points >= 2 and xi_max > 0");
    }

    double step() const { return xi_max / (n_points - 1); }
    double xi(int k) const { return k * step(); }

    bool same_grid(const GridFn& other) const {
        return n_points == other.n_points && xi_max == other.xi_max;
    }

    // Cubic interpolation; negative arguments always go through the
    // conjugate-even extension (the only one a half-line grid can represent).
    std::complex<double> eval(double x) const {
        const bool neg = x < 0.0;
        if (neg) x = -x;
        if (x > xi_max * (1.0 + 1e-12))
            throw ParameterError("GridFn::eval: argument beyond xi_max");
        double t;
        double w[4];
        const int b = detail::cubic_base(x / step(), n_points, t);
        detail::cubic_weights(t, w);
        std::complex<double> v = w[0] * values[b] + w[1] * values[b + 1] +
                                 w[2] * values[b + 2] + w[3] * values[b + 3];
        return neg ? std::conj(v) : v;
    }

    std::vector<double> real_part() const {
        std::vector<double> re(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) re[i] = values[i].real();
        return re;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }

    double max_abs_imag() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
        return m;
    }
};

inline GridFn sample_grid(const std::function<std::complex<double>(double)>& f, double xi_max,
                          int n_points, bool hermitian = true) {
    GridFn g(xi_max, n_points, hermitian);
    for (int k = 0; k < n_points; ++k) g.values[k] = f(g.xi(k));
    return g;
}

// A real density sampled uniformly on [-v_max, v_max].
struct DensityGrid {
    double v_max = 0.0;
    int n_points = 0;
    std::vector<double> values;
    double truncation_estimate = 0.0;  // reported sup-norm error of a truncated inversion

    DensityGrid() = default;
    DensityGrid(double v_max_, int n_points_)
        : v_max(v_max_), n_points(n_points_), values(static_cast<std::size_t>(n_points_)) {
        if (n_points_ < 2 || v_max_ <= 0.0)
            throw ParameterError("DensityGrid: need n_points >= 2 and v_max > 0");
    }

    double step() const { return 2.0 * v_max / (n_points - 1); }
    double v(int k) const { return -v_max + k * step(); }

    bool same_grid(const DensityGrid& other) const {
        return n_points == other.n_points && v_max == other.v_max;
    }

    double integral() const {
        double s = 0.5 * (values.front() + values.back());
        for (int k = 1; k + 1 < n_points; ++k) s += values[k];
        return s * step();
    }
};

inline DensityGrid sample_density(const std::function<double(double)>& f, double v_max,
                                  int n_points) {
    DensityGrid d(v_max, n_points);
    for (int k = 0; k < n_points; ++k) d.values[k] = f(d.v(k));
    return d;
}

}  // namespace kac
