// Acceptance suite: runs every headline check at its stated tolerance and
// prints one pass/fail line per criterion.  Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kac/bounds.hpp"
#include "kac/csv.hpp"
#include "kac/mckean.hpp"
#include "kac/metrics.hpp"
#include "kac/parallel.hpp"
#include "kac/wild_solver.hpp"

using namespace kac;

namespace {

int failures = 0;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

void criterion(int index, const std::string& name, double budget_s,
               const std::function<void(Check&)>& body) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.ok = false;
        check.note(std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed > budget_s) {
        check.ok = false;
        check.note("runtime over budget");
    }
    if (!check.ok) ++failures;
    std::printf("[%s] criterion %2d: %-38s (%.1f s <= %.0f s)%s%s\n", check.ok ? "PASS" : "FAIL",
                index, name.c_str(), elapsed, budget_s, check.detail.empty() ? "" : " -- ",
                check.detail.c_str());
    std::fflush(stdout);
}

// Deterministic sharded velocity sampling.
std::vector<double> sample_velocities(const InitialDatum& datum, double t, long n,
                                      std::uint64_t seed, std::uint64_t stream) {
    std::vector<double> out(static_cast<std::size_t>(n));
    constexpr int kShards = 64;
    const RngStream base(seed, stream);
    parallel_for(kShards, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t shard = lo; shard < hi; ++shard) {
            RngStream rng = base.substream(shard);
            const long begin = static_cast<long>(shard) * n / kShards;
            const long end = static_cast<long>(shard + 1) * n / kShards;
            for (long i = begin; i < end; ++i)
                out[static_cast<std::size_t>(i)] = sample_velocity(datum, t, rng);
        }
    });
    return out;
}

struct RelaxRun {
    std::vector<double> times;
    std::vector<GridFn> cfs;
    std::vector<DensityGrid> densities;
    DensityGrid equilibrium;
    GridFn wild_cf_t2;
    double c_total = 0.0;
};

}  // namespace

int main() {
    std::printf("kac-relax acceptance suite\n");

    // 1. samplewise weight identity at t in {0.5, 2, 8}, 1e6 trees each
    criterion(1, "weight identity sum pi^2 = 1", 30.0, [](Check& check) {
        for (double t : {0.5, 2.0, 8.0}) {
            constexpr int kShards = 64;
            const long total = 1000000;
            std::vector<double> worst(kShards, 0.0);
            const RngStream base(20240801, static_cast<std::uint64_t>(t * 16));
            parallel_for(kShards, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t shard = lo; shard < hi; ++shard) {
                    RngStream rng = base.substream(shard);
                    const long begin = static_cast<long>(shard) * total / kShards;
                    const long end = static_cast<long>(shard + 1) * total / kShards;
                    WeightVector wv;
                    double w = 0.0;
                    for (long i = begin; i < end; ++i) {
                        detail::split_to(wv, sample_leaf_count(t, rng), rng);
                        w = std::max(w, std::abs(wv.sum_squares() - 1.0));
                    }
                    worst[shard] = w;
                }
            });
            double w = 0.0;
            for (double x : worst) w = std::max(w, x);
            check.require(w <= 1e-12, "worst |sum pi^2 - 1| = " + format_real(w) +
                                          " at t = " + format_real(t));
        }
    });

    // 2. unconditional power-sum decay e^{-(1-2a_4)t} = e^{-t/4}
    criterion(2, "E sum pi^4 = e^{-t/4} (Monte Carlo)", 10.0, [](Check& check) {
        for (double t : {1.0, 2.0, 4.0}) {
            const TreeSampleStats stats =
                estimate_power_sum(4.0, t, 100000, RngStream(7321, static_cast<std::uint64_t>(t)));
            const double want = expected_power_sum(4.0, t);
            const double z = (stats.mean_power_sum - want) / stats.std_error;
            check.require(std::abs(z) <= 3.0,
                          "t = " + format_real(t) + ": z = " + format_real(z));
            if (t == 2.0)
                check.require(std::abs(want - 0.60653065971263342) < 1e-12, "e^{-1/2} mismatch");
        }
    });

    // 3. conditional means against the gamma-ratio closed form
    criterion(3, "conditional E[sum pi^4 | nu = n]", 30.0, [](Check& check) {
        check.require(std::abs(conditional_power_sum_mean(4.0, 2) - 0.75) < 1e-12,
                      "n = 2 closed form");
        check.require(std::abs(2.0 * alpha_m(4.0) - 0.75) < 1e-10, "angle-integral oracle");
        RngStream rng(5150, 0);
        for (int n = 2; n <= 10; ++n) {
            const int trials = 100000;
            double sum = 0.0, sumsq = 0.0;
            for (int i = 0; i < trials; ++i) {
                const double x = sample_weights_conditional(n, rng).power_sum(4.0);
                sum += x;
                sumsq += x * x;
            }
            const double mean = sum / trials;
            const double se = std::sqrt((sumsq - sum * sum / trials) / (trials - 1.0) / trials);
            const double want = conditional_power_sum_mean(4.0, n);
            check.require(std::abs(mean - want) <= 3.0 * se,
                          "n = " + std::to_string(n) + ": z = " +
                              format_real((mean - want) / se));
        }
    });

    // 4. fourth-moment relaxation 3 - 1.2 e^{-t/4} for uniform(sqrt 3)
    criterion(4, "kurtosis relaxation at rate 1/4", 300.0, [](Check& check) {
        const auto u = InitialDatum::uniform(std::sqrt(3.0));
        SolverConfig cfg;
        cfg.xi_max = 2.0;  // the recursion is closed on [0, xi_max]; moments live at 0
        cfg.n_points = 512;
        cfg.tol = 1e-9;
        WildExpansion expansion(sample_cf_grid(u, cfg), cfg.quad_nodes);
        const int depth = truncation_depth(4.0, cfg.tol);
        expansion.ensure_terms(depth);
        for (double t : {0.5, 1.0, 2.0, 4.0}) {
            const GridFn cf = expansion.assemble(t, truncation_depth(t, cfg.tol));
            const double want = 3.0 - 1.2 * std::exp(-0.25 * t);
            const double got = cf_fourth_derivative_at_zero(cf);
            check.require(std::abs(got - want) <= 0.01 * want,
                          "wild m4 at t = " + format_real(t) + ": got " + format_real(got));

            const auto vs = sample_velocities(u, t, 1000000, 908172, static_cast<std::uint64_t>(4 * t));
            double s4 = 0.0, s8 = 0.0;
            for (double v : vs) {
                const double v4 = v * v * v * v;
                s4 += v4;
                s8 += v4 * v4;
            }
            const double mean = s4 / vs.size();
            const double se = std::sqrt((s8 / vs.size() - mean * mean) / vs.size());
            check.require(std::abs(mean - want) <= 3.0 * se,
                          "mc m4 at t = " + format_real(t) + ": z = " +
                              format_real((mean - want) / se));
        }
    });

    // 5 prepares shared state for 7 and 11.
    RelaxRun relax;

    criterion(5, "L1 relaxation rate in [0.20, 0.30]", 600.0, [&relax](Check& check) {
        const auto u = InitialDatum::uniform(std::sqrt(3.0));
        SolverConfig cfg;  // solver defaults: xi_max 40/sigma, 4096 points, 64 nodes, tol 1e-10
        WildPropagator prop(u, cfg);
        const double v_max = 5.0;
        const int n_v = 2001;
        relax.equilibrium = sample_density([](double v) { return normal_pdf(v); }, v_max, n_v);

        const GammaEnvelope env = gamma_envelope(u);
        const auto tail = u.tail_profile();
        const ConstantBreakdown cb = theorem_constant(1.8, 1.0, *tail.p, *tail.L_p, env);
        relax.c_total = cb.C_total;

        std::vector<double> distances;
        double floor = 1e-9;
        for (int ti = 2; ti <= 8; ++ti) {
            const double t = ti;
            const auto r = prop.at(t);
            const DensityGrid f = invert_solution_density(r.cf, t, u, v_max, n_v, 0.05);
            const double d = l1_distance(f, relax.equilibrium);
            distances.push_back(d);
            floor = std::max(floor, 10.0 * r.tail_estimate);
            relax.times.push_back(t);
            relax.cfs.push_back(r.cf);
            relax.densities.push_back(f);
            if (ti == 2) relax.wild_cf_t2 = r.cf;
            check.require(d <= cb.C_total * std::exp(-0.25 * t),
                          "theorem bound violated at t = " + format_real(t));
        }
        const RateFit fit = fit_decay_rate(relax.times, distances, floor);
        check.note("rate = " + format_real(fit.rate) + ", r2 = " + format_real(fit.r_squared));
        check.require(fit.rate >= 0.20 && fit.rate <= 0.30, "fitted rate outside [0.20, 0.30]");
    });

    // 6. heavy-tailed counterexample decays strictly slower than 1/4
    criterion(6, "counterexample rate 1 - 2 alpha_beta", 600.0, [](Check& check) {
        const double beta = 3.5;
        const auto pl = InitialDatum::power_law(beta);
        SolverConfig cfg;
        WildPropagator prop(pl, cfg);
        const double xi_star = 0.25;
        const double sigma2 = beta / (beta - 2.0);
        const double gauss = std::exp(-0.5 * sigma2 * xi_star * xi_star);
        std::vector<double> times, devs;
        double floor = 0.0;
        for (int ti = 2; ti <= 8; ++ti) {
            const auto r = prop.at(ti);
            times.push_back(ti);
            devs.push_back(std::abs(r.cf.eval(xi_star) - std::complex<double>(gauss, 0.0)));
            floor = std::max(floor, 10.0 * r.tail_estimate);
        }
        const RateFit fit = fit_decay_rate(times, devs, floor);
        const double target = lower_bound_rate(beta);
        check.note("rate = " + format_real(fit.rate) + ", target = " + format_real(target));
        check.require(std::abs(fit.rate - target) <= 0.02, "fitted rate off the quadrature oracle");
        check.require(fit.rate < 0.24, "rate not certified below 1/4");
    });

    // 7. Beurling certificate on random pairs and on the criterion-5 pairs
    criterion(7, "Beurling certificate sqrt2 ||f||_1 <= H1", 60.0, [&relax](Check& check) {
        RngStream rng(424242, 0);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 1 + static_cast<int>(rng.uniform_index(3));
            std::vector<double> w(n), s(n);
            double sum = 0.0;
            for (int i = 0; i < n; ++i) {
                w[i] = 0.1 + rng.next_double();
                s[i] = 0.4 + 1.6 * rng.next_double();
                sum += w[i];
            }
            for (double& x : w) x /= sum;
            const auto a = InitialDatum::gaussian_mixture(w, s);
            const auto b = InitialDatum::gaussian(0.5 + 1.5 * rng.next_double());
            const DensityGrid fa =
                sample_density([&](double v) { return a.density(v); }, 16.0, 3001);
            const DensityGrid fb =
                sample_density([&](double v) { return b.density(v); }, 16.0, 3001);
            const auto diff =
                sample_grid([&](double xi) { return a.cf(xi) - b.cf(xi); }, 24.0, 2048);
            const BeurlingResult r = beurling_check(fa, fb, diff);
            check.require(r.holds, "random pair " + std::to_string(trial));
        }
        check.require(!relax.cfs.empty(), "criterion 5 state missing");
        for (std::size_t i = 0; i < relax.cfs.size(); ++i) {
            const GridFn& cf = relax.cfs[i];
            GridFn diff(cf.xi_max, cf.n_points, true);
            for (int k = 0; k < cf.n_points; ++k) {
                const double xi = diff.xi(k);
                diff.values[k] = cf.values[k] - std::exp(-0.5 * xi * xi);
            }
            const double lhs = std::sqrt(2.0) * l1_distance(relax.densities[i], relax.equilibrium);
            const double rhs = h1_fourier_norm(diff, 0.05);
            check.require(lhs <= rhs + 1e-6,
                          "solution pair at t = " + format_real(relax.times[i]));
        }
    });

    // 8. normal-approximation bounds with the printed constants
    criterion(8, "CF distance bounds (0.33/0.76/0.62/3.8)", 60.0, [](Check& check) {
        const double m2 = 1.0, m4 = 1.8;
        for (int n : {4, 16, 64}) {
            const double gamma4 = (m4 / (m2 * m2)) / n;
            const double gamma = std::pow(gamma4, 0.25);
            const double A = 0.5 / gamma;
            const auto be = berry_esseen_bounds(gamma4);
            auto phi_n = [&](double xi) {
                return std::pow(sinc(std::sqrt(3.0) * xi / std::sqrt(double(n))), n);
            };
            auto diff = [&](double xi) { return phi_n(xi) - std::exp(-0.5 * xi * xi); };
            double worst_cf = -1.0, worst_d = -1.0, l2_cf = 0.0, l2_d = 0.0;
            const int grid = 4000;
            const double h = A / grid;
            for (int i = 0; i <= grid; ++i) {
                const double xi = i * h;
                const double gauss = std::exp(-0.5 * xi * xi);
                worst_cf =
                    std::max(worst_cf, std::abs(diff(xi)) - be.c1 * gamma4 * std::pow(xi, 4) * gauss);
                const double d = (diff(xi + 1e-4) - diff(xi - 1e-4)) / 2e-4;
                worst_d = std::max(worst_d, std::abs(d) - be.c2 * gamma4 * (1.0 + xi * xi) *
                                                              std::pow(xi, 3) * gauss);
                const double w = (i == 0 || i == grid) ? 0.5 : 1.0;
                l2_cf += w * diff(xi) * diff(xi);
                l2_d += w * d * d;
            }
            check.require(worst_cf <= 1e-14, "pointwise cf bound, n = " + std::to_string(n));
            check.require(worst_d <= 1e-8, "pointwise derivative bound, n = " + std::to_string(n));
            check.require(std::sqrt(2.0 * h * l2_cf) <= be.l2_cf + 1e-6,
                          "L2 cf bound, n = " + std::to_string(n));
            check.require(std::sqrt(2.0 * h * l2_d) <= be.l2_deriv + 1e-6,
                          "L2 derivative bound, n = " + std::to_string(n));
        }
    });

    // 9. gamma envelope dominates |phi0| out to 1e3 with the analytic tail beyond
    criterion(9, "gamma envelope domination", 60.0, [](Check& check) {
        const std::vector<InitialDatum> data = {
            InitialDatum::uniform(std::sqrt(3.0)),
            InitialDatum::gaussian_mixture({0.3, 0.7}, {0.5, 1.2}),
        };
        for (const auto& d : data) {
            const GammaEnvelope env = gamma_envelope(d);  // audits internally, throws on failure
            double worst = -1.0;
            for (int i = 0; i <= 10000; ++i) {
                const double xi = 1000.0 * i / 10000.0;
                worst = std::max(worst, std::abs(d.cf(xi)) - env(xi));
            }
            check.require(worst <= 1e-12,
                          std::string(family_name(d.family())) + ": worst gap " + format_real(worst));
        }
    });

    // 10. symmetrization distance bound 2 e^{-t}
    criterion(10, "symmetrization bound 2 e^{-t}", 300.0, [](Check& check) {
        const auto mix = InitialDatum::gaussian_mixture({0.3, 0.7}, {1.0, 0.5}, {-1.4, 0.6});
        const auto sym = symmetrize(mix);
        SolverConfig cfg;
        cfg.xi_max = 24.0;
        cfg.n_points = 2048;
        WildPropagator pa(mix, cfg), ps(sym, cfg);
        for (double t : {1.0, 2.0, 4.0}) {
            const auto ra = pa.at(t);
            const auto rs = ps.at(t);
            const DensityGrid fa = invert_to_density(ra.cf, 10.0, 2001);
            const DensityGrid fs = invert_to_density(rs.cf, 10.0, 2001);
            const double d = l1_distance(fa, fs, 1e-6);
            check.require(d <= 2.0 * std::exp(-t) + 1e-3,
                          "t = " + format_real(t) + ": distance " + format_real(d));
        }
    });

    // 11. Wild solution vs Monte Carlo empirical-CF inversion at t = 2
    criterion(11, "solver vs Monte Carlo cross-validation", 300.0, [&relax](Check& check) {
        check.require(relax.wild_cf_t2.n_points > 0, "criterion 5 state missing");
        const auto u = InitialDatum::uniform(std::sqrt(3.0));
        const double t = 2.0;
        // both sides share the frequency window, so the truncation bias cancels
        const double xi_cut = 12.0;
        const int n_cut = 1024;
        GridFn wild_cut(xi_cut, n_cut, true);
        for (int k = 0; k < n_cut; ++k) wild_cut.values[k] = relax.wild_cf_t2.eval(wild_cut.xi(k));

        const auto samples = sample_velocities(u, t, 1000000, 671123, 11);
        const GridFn emp = empirical_cf(samples, wild_cut);

        const DensityGrid f_wild = invert_to_density(wild_cut, 4.0, 1201, 0.05);
        const DensityGrid f_mc = invert_to_density(emp, 4.0, 1201, 0.05);
        const double d = l1_distance(f_wild, f_mc, 0.02);
        check.note("L1(wild, mc) = " + format_real(d));
        check.require(d <= 0.02, "cross-validation distance above 0.02");
    });

    std::printf("%d of 11 criteria passed\n", 11 - failures);
    return failures;
}
