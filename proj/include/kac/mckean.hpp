#pragma once

#include <cmath>
#include <vector>

#include "kac/errors.hpp"
#include "kac/grid_fn.hpp"
#include "kac/initial_data.hpp"
#include "kac/parallel.hpp"
#include "kac/rng.hpp"

namespace kac {

// Leaf weights (pi_1, ..., pi_nu) of one sampled McKean tree.
// sum pi_j^2 = 1 holds by construction.
struct WeightVector {
    int nu = 1;
    std::vector<double> weights;

    double power_sum(double m) const {
        double s = 0.0;
        for (double w : weights) s += std::pow(std::abs(w), m);
        return s;
    }

    // Kahan-compensated sum of squares for the identity audit.
    double sum_squares() const {
        double s = 0.0, c = 0.0;
        for (double w : weights) {
            const double y = w * w - c;
            const double t = s + y;
            c = (t - s) - y;
            s = t;
        }
        return s;
    }
};

namespace detail {

// Uniform leaf split repeated (nu - 1) times starting from [1]: pick a leaf
// uniformly, replace its weight w by (w cos h, w sin h) with h uniform on the
// circle.  Draw order per sample: leaf index, then angle.
inline void split_to(WeightVector& out, int nu, RngStream& rng) {
    out.nu = nu;
    out.weights.clear();
    out.weights.reserve(static_cast<std::size_t>(nu));
    out.weights.push_back(1.0);
    for (int k = 1; k < nu; ++k) {
        const std::size_t j = rng.uniform_index(out.weights.size());
        const auto [c, s] = rng.unit_angle();
        const double w = out.weights[j];
        out.weights[j] = w * c;
        out.weights.push_back(w * s);
    }
}

}  // namespace detail

// nu ~ geometric: P{nu = n} = e^{-t} (1 - e^{-t})^{n-1}, by inversion.
inline int sample_leaf_count(double t, RngStream& rng) {
    if (t <= 0.0) return 1;
    const double log_ratio = std::log1p(-std::exp(-t));
    const int nu = 1 + static_cast<int>(std::log(rng.next_open()) / log_ratio);
    return nu >= 1 ? nu : 1;
}

inline WeightVector sample_weights(double t, RngStream& rng) {
    if (!(t >= 0.0)) throw ParameterError("sample_weights: t must be >= 0");
    WeightVector wv;
    detail::split_to(wv, sample_leaf_count(t, rng), rng);
    return wv;
}

// Same split process with the leaf count forced; used by the conditional
// identity checks.
inline WeightVector sample_weights_conditional(int nu, RngStream& rng) {
    if (nu < 1) throw ParameterError("sample_weights_conditional: nu must be >= 1");
    WeightVector wv;
    detail::split_to(wv, nu, rng);
    return wv;
}

// V_t = sum pi_j v_j with v_j i.i.d. from the datum; marginal law is the
// solution at time t.
inline double sample_velocity(const InitialDatum& datum, double t, RngStream& rng) {
    if (!datum.can_sample())
        throw UnsupportedError("sample_velocity: datum has no sampler");
    const WeightVector wv = sample_weights(t, rng);
    double v = 0.0;
    for (double w : wv.weights) v += w * datum.sample(rng);
    return v;
}

// E[sum |pi_j|^m | nu = n] = Gamma(2 a_m + n - 1) / (Gamma(2 a_m) Gamma(n)),
// a_m the angular moment defined in bounds.hpp (closed form used here).
inline double angular_moment_closed_form(double m) {
    return std::exp(std::lgamma((m + 1.0) / 2.0) - std::lgamma(m / 2.0 + 1.0)) /
           std::sqrt(kPi);
}

inline double conditional_power_sum_mean(double m, int n) {
    if (!(m > 0.0)) throw ParameterError("conditional_power_sum_mean: m must be > 0");
    if (n < 1) throw ParameterError("conditional_power_sum_mean: n must be >= 1");
    const double c = 2.0 * angular_moment_closed_form(m);
    return std::exp(std::lgamma(c + n - 1.0) - std::lgamma(c) - std::lgamma(static_cast<double>(n)));
}

// E[sum |pi_j|^m] = e^{-(1 - 2 a_m) t}.
inline double expected_power_sum(double m, double t) {
    if (!(m > 0.0) || !(t >= 0.0)) throw ParameterError("expected_power_sum: need m > 0, t >= 0");
    return std::exp(-(1.0 - 2.0 * angular_moment_closed_form(m)) * t);
}

struct TreeSampleStats {
    long trials = 0;
    double m = 0.0;
    double t = 0.0;
    double mean_power_sum = 0.0;
    double std_error = 0.0;
};

// Monte Carlo mean of sum |pi_j|^m over independent trees.  Runs on 64 logical
// shards with derived streams, merged in shard order, so the result is
// bit-identical for a given stream regardless of thread count.
inline TreeSampleStats estimate_power_sum(double m, double t, long trials,
                                          const RngStream& stream) {
    if (trials < 100) throw ParameterError("estimate_power_sum: trials must be >= 100");
    constexpr int kShards = 64;
    struct Acc {
        double sum = 0.0, sumsq = 0.0;
        long n = 0;
    };
    std::vector<Acc> acc(kShards);
    parallel_for(kShards, [&](std::size_t lo, std::size_t hi) {
        WeightVector wv;
        for (std::size_t shard = lo; shard < hi; ++shard) {
            RngStream rng = stream.substream(shard);
            const long begin = static_cast<long>(shard) * trials / kShards;
            const long end = static_cast<long>(shard + 1) * trials / kShards;
            Acc a;
            for (long i = begin; i < end; ++i) {
                detail::split_to(wv, sample_leaf_count(t, rng), rng);
                const double x = wv.power_sum(m);
                a.sum += x;
                a.sumsq += x * x;
                a.n += 1;
            }
            acc[shard] = a;
        }
    });
    double sum = 0.0, sumsq = 0.0;
    long n = 0;
    for (const Acc& a : acc) {
        sum += a.sum;
        sumsq += a.sumsq;
        n += a.n;
    }
    TreeSampleStats stats;
    stats.trials = n;
    stats.m = m;
    stats.t = t;
    stats.mean_power_sum = sum / n;
    const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
    stats.std_error = std::sqrt(var / n);
    return stats;
}

// Elementary symmetric function E_h(pi_1^2, ..., pi_nu^2) via the Newton
// identities on the power sums M_j = sum pi^(2j).
inline double elementary_symmetric(const WeightVector& wv, int h) {
    if (h < 0) throw ParameterError("elementary_symmetric: h must be >= 0");
    if (h == 0) return 1.0;
    if (h > wv.nu) return 0.0;
    std::vector<double> M(static_cast<std::size_t>(h) + 1, 0.0);
    for (int j = 1; j <= h; ++j) {
        double s = 0.0;
        for (double w : wv.weights) s += std::pow(w * w, j);
        M[j] = s;
    }
    std::vector<double> E(static_cast<std::size_t>(h) + 1, 0.0);
    E[0] = 1.0;
    for (int k = 1; k <= h; ++k) {
        double s = 0.0;
        double sign = 1.0;
        for (int j = 1; j <= k; ++j) {
            s += sign * E[k - j] * M[j];
            sign = -sign;
        }
        E[k] = s / k;
    }
    return E[h];
}

// Empirical characteristic function (1/n) sum e^{i xi x_j} on the template's
// grid, via a per-sample rotation recurrence (one sincos per sample).
inline GridFn empirical_cf(const std::vector<double>& samples, const GridFn& templ) {
    if (samples.empty()) throw ParameterError("empirical_cf: need at least one sample");
    const int n_pts = templ.n_points;
    const double h = templ.step();
    const unsigned shards = 64;
    std::vector<std::vector<std::complex<double>>> partial(
        shards, std::vector<std::complex<double>>(static_cast<std::size_t>(n_pts), {0.0, 0.0}));
    parallel_for(shards, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t shard = lo; shard < hi; ++shard) {
            auto& acc = partial[shard];
            const std::size_t begin = shard * samples.size() / shards;
            const std::size_t end = (shard + 1) * samples.size() / shards;
            for (std::size_t s = begin; s < end; ++s) {
                const double x = samples[s];
                const std::complex<double> rot{std::cos(h * x), std::sin(h * x)};
                std::complex<double> z{1.0, 0.0};
                for (int k = 0; k < n_pts; ++k) {
                    acc[k] += z;
                    z *= rot;
                }
            }
        }
    });
    GridFn out(templ.xi_max, n_pts, true);
    const double inv = 1.0 / static_cast<double>(samples.size());
    for (int k = 0; k < n_pts; ++k) {
        std::complex<double> total{0.0, 0.0};
        for (unsigned shard = 0; shard < shards; ++shard) total += partial[shard][k];
        out.values[k] = total * inv;
    }
    return out;
}

}  // namespace kac
