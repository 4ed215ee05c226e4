#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "kac/errors.hpp"
#include "kac/grid_fn.hpp"
#include "kac/initial_data.hpp"
#include "kac/parallel.hpp"
#include "kac/quadrature.hpp"

namespace kac {

struct SolverConfig {
    double xi_max = 0.0;  // 0 = auto: 40 / sigma
    int n_points = 4096;
    int quad_nodes = 64;
    double tol = 1e-10;     // truncation target for the Wild tail
    int max_terms = 5000;   // hard cap on the expansion depth

    void validate() const {
        if (n_points < 256) throw ParameterError("SolverConfig: n_points must be >= 256");
        if (quad_nodes < 8) throw ParameterError("SolverConfig: quad_nodes must be >= 8");
        if (!(tol > 0.0)) throw ParameterError("SolverConfig: tol must be positive");
        if (max_terms < 1) throw ParameterError("SolverConfig: max_terms must be >= 1");
    }
};

// Smallest N with (1 - e^{-t})^N <= tol; the discarded Wild mass
// sum_{n>N} e^{-t}(1-e^{-t})^{n-1} equals (1-e^{-t})^N exactly.
inline int truncation_depth(double t, double tol) {
    if (!(t >= 0.0)) throw ParameterError("truncation_depth: t must be >= 0");
    if (!(tol > 0.0)) throw ParameterError("truncation_depth: tol must be > 0");
    if (t == 0.0 || tol >= 1.0) return 1;
    const long double ln_base = std::log1p(-(long double)std::exp(-t));
    const long double ln_tol = std::log((long double)tol);
    long long n = (long long)std::ceil((double)(ln_tol / ln_base) - 1e-9);
    if (n < 1) n = 1;
    while (n > 1 && (n - 1) * ln_base <= ln_tol) --n;
    while (n * ln_base > ln_tol) ++n;
    return static_cast<int>(n);
}

// Quadrature + interpolation tables for the Kac collision in Fourier
// variables.  For conjugate-even grid functions the full-circle integral
// collapses exactly to
//   (g1 * g2)(xi) = (2/pi) int_0^{pi/2} Re g1(xi cos h) Re g2(xi sin h) dh,
// which is what the hot path evaluates.  Both arguments stay inside
// [0, xi_max], so the recursion never leaves the grid.
class StarKernel {
public:
    StarKernel(double xi_max, int n_points, int quad_nodes)
        : n_(n_points), q_(quad_nodes), xi_max_(xi_max) {
        const GaussRule& rule = gauss_legendre(quad_nodes);
        theta_w_.resize(q_);
        std::vector<double> ct(q_), st(q_);
        for (int q = 0; q < q_; ++q) {
            const double theta = 0.25 * kPi * (rule.x[q] + 1.0);
            theta_w_[q] = 0.5 * rule.w[q];  // (2/pi) * (pi/4) * w
            ct[q] = std::cos(theta);
            st[q] = std::sin(theta);
        }
        const double h = xi_max / (n_points - 1);
        base_c_.resize(static_cast<std::size_t>(n_) * q_);
        base_s_.resize(base_c_.size());
        w_c_.resize(base_c_.size() * 4);
        w_s_.resize(base_c_.size() * 4);
        for (int i = 0; i < n_; ++i) {
            const double xi = i * h;
            for (int q = 0; q < q_; ++q) {
                const std::size_t at = static_cast<std::size_t>(i) * q_ + q;
                double t;
                base_c_[at] = detail::cubic_base(xi * ct[q] / h, n_, t);
                detail::cubic_weights(t, &w_c_[4 * at]);
                base_s_[at] = detail::cubic_base(xi * st[q] / h, n_, t);
                detail::cubic_weights(t, &w_s_[4 * at]);
            }
        }
    }

    int n_points() const { return n_; }
    int quad_nodes() const { return q_; }
    double xi_max() const { return xi_max_; }

    // One grid point of g1 * g2 from the real parts.
    double star_point(int i, const double* g1, const double* g2) const {
        if (i == 0) return g1[0] * g2[0];
        const std::size_t row = static_cast<std::size_t>(i) * q_;
        double acc = 0.0;
        for (int q = 0; q < q_; ++q) {
            const std::size_t at = row + q;
            const int bc = base_c_[at];
            const int bs = base_s_[at];
            const double* wc = &w_c_[4 * at];
            const double* ws = &w_s_[4 * at];
            const double a = wc[0] * g1[bc] + wc[1] * g1[bc + 1] + wc[2] * g1[bc + 2] +
                             wc[3] * g1[bc + 3];
            const double b = ws[0] * g2[bs] + ws[1] * g2[bs + 1] + ws[2] * g2[bs + 2] +
                             ws[3] * g2[bs + 3];
            acc += theta_w_[q] * a * b;
        }
        return acc;
    }

    void apply(const std::vector<double>& g1, const std::vector<double>& g2,
               std::vector<double>& out) const {
        out.resize(n_);
        parallel_for(static_cast<std::size_t>(n_), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i)
                out[i] = star_point(static_cast<int>(i), g1.data(), g2.data());
        });
    }

private:
    int n_, q_;
    double xi_max_;
    std::vector<double> theta_w_;
    std::vector<int> base_c_, base_s_;
    std::vector<double> w_c_, w_s_;
};

// The Kac collision convolution of two grid functions.  Conjugate-even inputs
// use the reduced [0, pi/2] range (exact); the full circle with the conjugate
// extension at 4x quad_nodes serves as the general/cross-check path.
inline GridFn wild_convolution(const GridFn& g1, const GridFn& g2, int quad_nodes,
                               bool force_full_circle = false) {
    if (!g1.same_grid(g2)) throw GridMismatchError("wild_convolution: grids differ");
    if (quad_nodes < 8) throw ParameterError("wild_convolution: quad_nodes must be >= 8");
    GridFn out(g1.xi_max, g1.n_points, true);
    if (g1.hermitian_even && g2.hermitian_even && !force_full_circle) {
        StarKernel kernel(g1.xi_max, g1.n_points, quad_nodes);
        const std::vector<double> r1 = g1.real_part(), r2 = g2.real_part();
        std::vector<double> res;
        kernel.apply(r1, r2, res);
        for (int i = 0; i < out.n_points; ++i) out.values[i] = {res[i], 0.0};
        return out;
    }
    const GaussRule& rule = gauss_legendre(quad_nodes);
    parallel_for(static_cast<std::size_t>(out.n_points), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double xi = out.xi(static_cast<int>(i));
            if (i == 0) {
                out.values[0] = g1.values[0] * g2.values[0];
                continue;
            }
            std::complex<double> acc{0.0, 0.0};
            for (int panel = 0; panel < 4; ++panel) {
                const double a = 0.5 * kPi * panel, b = a + 0.5 * kPi;
                for (int q = 0; q < quad_nodes; ++q) {
                    const double theta = 0.5 * (a + b) + 0.25 * kPi * rule.x[q];
                    acc += rule.w[q] * g1.eval(xi * std::cos(theta)) * g2.eval(xi * std::sin(theta));
                }
            }
            out.values[i] = acc * (0.25 * kPi) / (2.0 * kPi);
        }
    });
    out.hermitian_even = true;
    return out;
}

// Memoized Wild recursion: q_1 = phi0, q_n = (1/(n-1)) sum q_k * q_{n-k}.
// Terms with n >= 2 are real and even regardless of phi0's symmetry (the
// collision kernel only sees real parts), so only q_1 keeps an imaginary part.
class WildExpansion {
public:
    WildExpansion(GridFn phi0, int quad_nodes)
        : phi0_(std::move(phi0)), kernel_(phi0_.xi_max, phi0_.n_points, quad_nodes) {
        if (!phi0_.hermitian_even)
            throw ParameterError("WildExpansion: phi0 must be conjugate-even");
        terms_.push_back(phi0_.real_part());
    }

    const GridFn& phi0() const { return phi0_; }
    int terms() const { return static_cast<int>(terms_.size()); }
    const std::vector<double>& term(int n) const { return terms_.at(n - 1); }

    void ensure_terms(int depth) {
        const std::size_t n_pts = static_cast<std::size_t>(phi0_.n_points);
        while (static_cast<int>(terms_.size()) < depth) {
            const int n = static_cast<int>(terms_.size()) + 1;
            std::vector<double> next(n_pts);
            parallel_for(n_pts, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) {
                    double acc = 0.0;
                    for (int k = 1; 2 * k < n; ++k)
                        acc += 2.0 * kernel_.star_point(static_cast<int>(i), terms_[k - 1].data(),
                                                        terms_[n - k - 1].data());
                    if (n % 2 == 0)
                        acc += kernel_.star_point(static_cast<int>(i), terms_[n / 2 - 1].data(),
                                                  terms_[n / 2 - 1].data());
                    next[i] = acc / (n - 1);
                }
            });
            terms_.push_back(std::move(next));
        }
    }

    // Weighted Wild sum over the first `depth` terms at time t.
    GridFn assemble(double t, int depth) const {
        if (depth > static_cast<int>(terms_.size()))
            throw ParameterError("WildExpansion::assemble: depth not computed");
        GridFn out(phi0_.xi_max, phi0_.n_points, true);
        const double decay = std::exp(-t);
        const double ratio = 1.0 - decay;
        const std::size_t n_pts = static_cast<std::size_t>(phi0_.n_points);
        std::vector<double> weight(static_cast<std::size_t>(depth));
        double w = decay;
        for (int n = 1; n <= depth; ++n) {
            weight[n - 1] = w;
            w *= ratio;
        }
        parallel_for(n_pts, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                double re = 0.0;
                for (int n = 2; n <= depth; ++n) re += weight[n - 1] * terms_[n - 1][i];
                const std::complex<double> head = weight[0] * phi0_.values[i];
                out.values[i] = {re + head.real(), head.imag()};
            }
        });
        return out;
    }

private:
    GridFn phi0_;
    StarKernel kernel_;
    std::vector<std::vector<double>> terms_;
};

struct CfSolution {
    double t = 0.0;
    GridFn cf;
    int truncation_N = 1;
    double tail_bound = 0.0;  // (1 - e^{-t})^truncation_N, a sup-norm bound on the cut mass
};

inline double solver_xi_max(const InitialDatum& datum, const SolverConfig& config) {
    if (config.xi_max > 0.0) return config.xi_max;
    return 40.0 / datum.sigma();
}

inline GridFn sample_cf_grid(const InitialDatum& datum, const SolverConfig& config) {
    const double xi_max = solver_xi_max(datum, config);
    return sample_grid([&](double xi) { return datum.cf(xi); }, xi_max, config.n_points, true);
}

inline CfSolution solve_cf_from_grid(const GridFn& phi0, double t, const SolverConfig& config) {
    config.validate();
    const int depth = truncation_depth(t, config.tol);
    if (depth > config.max_terms)
        throw ResourceLimitError(
            "Wild expansion needs " + std::to_string(depth) + " terms (cap " +
            std::to_string(config.max_terms) + "); increase tol or reduce t");
    WildExpansion expansion(phi0, config.quad_nodes);
    expansion.ensure_terms(depth);
    CfSolution sol;
    sol.t = t;
    sol.truncation_N = depth;
    sol.tail_bound = std::pow(1.0 - std::exp(-t), depth);
    sol.cf = expansion.assemble(t, depth);
    return sol;
}

inline CfSolution solve_cf(const InitialDatum& datum, double t, const SolverConfig& config) {
    if (!(t >= 0.0)) throw ParameterError("solve_cf: t must be >= 0");
    return solve_cf_from_grid(sample_cf_grid(datum, config), t, config);
}

// Exact fourth moment of the solution for symmetric data with finite m4:
//   E V_t^4 = 3 m2^2 + (m4 - 3 m2^2) e^{-t/4}.
inline double solution_moment4(const InitialDatum& datum, double t) {
    if (!datum.symmetric())
        throw ParameterError("solution_moment4: datum must be symmetric");
    const MomentSet ms = datum.moments();
    if (!std::isfinite(ms.m4))
        throw UnsupportedError("solution_moment4: fourth moment is infinite");
    return 3.0 * ms.m2 * ms.m2 + ms.kurtosis_excess() * std::exp(-0.25 * t);
}

// Inverse Fourier transform of a conjugate-even grid function to a density on
// [-v_max, v_max].  max_cf_at_ximax is the decay gate; raising it past the
// 1e-8 default is the caller's statement that the recorded truncation
// estimate is acceptable.
inline DensityGrid invert_to_density(const GridFn& cf, double v_max, int n_v,
                                     double max_cf_at_ximax = 1e-8) {
    if (!cf.hermitian_even)
        throw ParameterError("invert_to_density: cf must be conjugate-even");
    if (n_v < 2 || v_max <= 0.0) throw ParameterError("invert_to_density: bad output grid");
    const double edge = std::abs(cf.values.back());
    if (edge > max_cf_at_ximax)
        throw NumericalError("cf not decayed at xi_max", "abs_cf_at_ximax", edge,
                             max_cf_at_ximax);

    DensityGrid out(v_max, n_v);
    out.truncation_estimate = edge * cf.xi_max / (2.0 * kPi);
    const double h = cf.step();
    const int n_xi = cf.n_points;
    parallel_for(static_cast<std::size_t>(n_v), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
            const double v = out.v(static_cast<int>(j));
            double acc = 0.5 * cf.values[0].real();  // xi = 0 endpoint, sin term vanishes
            for (int k = 1; k + 1 < n_xi; ++k) {
                const double xi = k * h;
                acc += cf.values[k].real() * std::cos(xi * v) +
                       cf.values[k].imag() * std::sin(xi * v);
            }
            const double xe = cf.xi_max;
            acc += 0.5 * (cf.values[n_xi - 1].real() * std::cos(xe * v) +
                          cf.values[n_xi - 1].imag() * std::sin(xe * v));
            out.values[j] = acc * h / kPi;
        }
    });

    const double mass = out.integral();
    const double mass_tol = 1e-6 + 2.0 * edge;
    if (std::abs(mass - 1.0) > mass_tol)
        throw NumericalError("inverted density does not integrate to 1", "density_mass", mass,
                             mass_tol);
    return out;
}

// Inversion of a Wild solution with the n = 1 term split off: the smooth
// remainder phi - e^{-t} phi0 transforms on the grid, and e^{-t} f0 is added
// back in closed form.  Removes the Gibbs error of slowly decaying initial
// data (boxes, power laws) entirely from the first term.
inline DensityGrid invert_solution_density(const GridFn& solution, double t,
                                           const InitialDatum& datum, double v_max, int n_v,
                                           double max_cf_at_ximax = 1e-8) {
    if (!datum.has_density())
        throw UnsupportedError("invert_solution_density: datum has no density");
    const double w1 = std::exp(-t);
    GridFn smooth(solution.xi_max, solution.n_points, true);
    for (int k = 0; k < solution.n_points; ++k)
        smooth.values[k] = solution.values[k] - w1 * datum.cf(solution.xi(k));

    // the smooth part is a defective density with mass 1 - e^{-t}
    const double edge = std::abs(smooth.values.back());
    if (edge > max_cf_at_ximax)
        throw NumericalError("smooth part not decayed at xi_max", "abs_cf_at_ximax", edge,
                             max_cf_at_ximax);
    DensityGrid out(v_max, n_v);
    out.truncation_estimate = edge * smooth.xi_max / (2.0 * kPi);
    const double h = smooth.step();
    const int n_xi = smooth.n_points;
    parallel_for(static_cast<std::size_t>(n_v), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
            const double v = out.v(static_cast<int>(j));
            double acc = 0.5 * smooth.values[0].real();
            for (int k = 1; k + 1 < n_xi; ++k) {
                const double xi = k * h;
                acc += smooth.values[k].real() * std::cos(xi * v) +
                       smooth.values[k].imag() * std::sin(xi * v);
            }
            const double xe = smooth.xi_max;
            acc += 0.5 * (smooth.values[n_xi - 1].real() * std::cos(xe * v) +
                          smooth.values[n_xi - 1].imag() * std::sin(xe * v));
            out.values[j] = acc * h / kPi + w1 * datum.density(v);
        }
    });

    const double mass = out.integral();
    const double mass_tol = 1e-5 + 2.0 * edge + w1 * 1e-4;  // datum density tail may leave [-v_max, v_max]
    if (std::abs(mass - 1.0) > mass_tol)
        throw NumericalError("inverted density does not integrate to 1", "density_mass", mass,
                             mass_tol);
    return out;
}

// Semigroup composition of Wild expansions: phi(., s + u) solves the equation
// with initial datum phi(., s), so long times chain short legs whose direct
// expansion depth stays tiny.  Each leg honors the solve_cf contract; the
// composite reports the summed leg tail bounds as its error estimate.
class WildPropagator {
public:
    WildPropagator(const InitialDatum& datum, SolverConfig config, double leg = 2.0)
        : config_(config), leg_(leg) {
        config_.validate();
        if (!(leg > 0.0)) throw ParameterError("WildPropagator: leg must be > 0");
        config_.xi_max = solver_xi_max(datum, config_);
        leg_depth_ = truncation_depth(leg_, config_.tol);
        if (leg_depth_ > config_.max_terms)
            throw ResourceLimitError("WildPropagator: leg depth exceeds max_terms");
        expansions_.emplace_back(sample_cf_grid(datum, config_), config_.quad_nodes);
        base_tail_.push_back(0.0);
    }

    struct Result {
        double t = 0.0;
        GridFn cf;
        double tail_estimate = 0.0;
        int legs = 1;
    };

    Result at(double t) {
        if (!(t >= 0.0)) throw ParameterError("WildPropagator::at: t must be >= 0");
        int j = static_cast<int>(std::ceil(t / leg_ - 1e-12)) - 1;
        if (j < 0) j = 0;
        const double rest = t - j * leg_;
        ensure_base(j);
        const int depth = truncation_depth(rest, config_.tol);
        expansions_[j].ensure_terms(depth);
        Result result;
        result.t = t;
        result.cf = expansions_[j].assemble(rest, depth);
        result.tail_estimate =
            base_tail_[j] + std::pow(1.0 - std::exp(-rest), depth);
        result.legs = j + 1;
        return result;
    }

    const SolverConfig& config() const { return config_; }

private:
    void ensure_base(int j) {
        while (static_cast<int>(expansions_.size()) <= j) {
            WildExpansion& prev = expansions_.back();
            prev.ensure_terms(leg_depth_);
            GridFn base = prev.assemble(leg_, leg_depth_);
            base_tail_.push_back(base_tail_.back() +
                                 std::pow(1.0 - std::exp(-leg_), leg_depth_));
            expansions_.emplace_back(std::move(base), config_.quad_nodes);
        }
    }

    SolverConfig config_;
    double leg_;
    int leg_depth_ = 1;
    std::vector<WildExpansion> expansions_;
    std::vector<double> base_tail_;
};

// 4th-order central stencils on the conjugate-even extension (the real part
// of a hermitian grid function is even, so only nonnegative offsets appear).
inline double cf_second_derivative_at_zero(const GridFn& cf, double h = 0.05) {
    const double f0 = cf.values[0].real();
    const double f1 = cf.eval(h).real();
    const double f2 = cf.eval(2.0 * h).real();
    return (-2.0 * f2 + 32.0 * f1 - 30.0 * f0) / (12.0 * h * h);
}

inline double cf_fourth_derivative_at_zero(const GridFn& cf, double h = 0.1) {
    const double f0 = cf.values[0].real();
    const double f1 = cf.eval(h).real();
    const double f2 = cf.eval(2.0 * h).real();
    const double f3 = cf.eval(3.0 * h).real();
    return (-f3 / 3.0 + 4.0 * f2 - 13.0 * f1 + 28.0 / 3.0 * f0) / (h * h * h * h);
}

}  // namespace kac
