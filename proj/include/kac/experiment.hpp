#pragma once

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "kac/bounds.hpp"
#include "kac/config.hpp"
#include "kac/csv.hpp"
#include "kac/mckean.hpp"
#include "kac/metrics.hpp"
#include "kac/svg.hpp"
#include "kac/wild_solver.hpp"

namespace kac {

namespace detail {

inline std::string t_label(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", t);
    return buf;
}

inline std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

inline double auto_v_max(const InitialDatum& datum, double requested) {
    if (requested > 0.0) return requested;
    const double sigma = datum.sigma();
    const double support = datum.support_radius();
    double v = 8.0 * sigma;
    if (std::isfinite(support)) v = std::max(v, 1.1 * support);
    return v;
}

// Density of the solution at one time, with the first Wild term inverted in
// closed form when the datum provides a density.
inline DensityGrid solution_density(const GridFn& cf, double t, const InitialDatum& datum,
                                    double v_max, int n_v) {
    const double edge_gate = 0.05;  // smooth part decays much further; gate recorded in result
    if (datum.has_density())
        return invert_solution_density(cf, t, datum, v_max, n_v, edge_gate);
    return invert_to_density(cf, v_max, n_v);
}

}  // namespace detail

// --- solve -----------------------------------------------------------------

inline void run_solve(const ExperimentConfig& cfg) {
    if (cfg.times.empty()) throw ConfigError("solve needs 'times'", "times");
    const InitialDatum datum = make_datum(cfg.datum);
    SolverConfig solver = cfg.solver;
    WildPropagator propagator(datum, solver);
    const double v_max = detail::auto_v_max(datum, cfg.v_max);

    std::vector<WildPropagator::Result> results;
    for (double t : cfg.times) results.push_back(propagator.at(t));

    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        CsvWriter cf_csv(detail::join_path(cfg.out_dir, "cf_t" + detail::t_label(r.t) + ".csv"));
        cf_csv.comment("t=" + format_real(r.t) +
                       " truncation_N=" + std::to_string(truncation_depth(r.t, propagator.config().tol)) +
                       " tail_bound=" + format_real(r.tail_estimate) +
                       " legs=" + std::to_string(r.legs));
        cf_csv.row({"xi", "re", "im"});
        for (int k = 0; k < r.cf.n_points; ++k)
            cf_csv.row({format_real(r.cf.xi(k)), format_real(r.cf.values[k].real()),
                        format_real(r.cf.values[k].imag())});
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        const DensityGrid f = detail::solution_density(r.cf, r.t, datum, v_max, cfg.n_v);
        CsvWriter den_csv(
            detail::join_path(cfg.out_dir, "density_t" + detail::t_label(r.t) + ".csv"));
        den_csv.comment("t=" + format_real(r.t) +
                        " truncation_estimate=" + format_real(f.truncation_estimate));
        den_csv.row({"v", "f"});
        for (int k = 0; k < f.n_points; ++k)
            den_csv.row({format_real(f.v(k)), format_real(f.values[k])});
        if (cfg.emit_svg) {
            PlotSeries s{"f(v, t=" + detail::t_label(r.t) + ")", {}, {}};
            for (int k = 0; k < f.n_points; ++k) {
                s.x.push_back(f.v(k));
                s.y.push_back(f.values[k]);
            }
            write_svg_plot(
                detail::join_path(cfg.out_dir, "density_t" + detail::t_label(r.t) + ".svg"),
                "solution density", "v", "f", {s}, false);
        }
    }
}

// --- relax-rate --------------------------------------------------------------

inline void run_relax_rate(const ExperimentConfig& cfg) {
    if (cfg.times.size() < 1) throw ConfigError("relax-rate needs 'times'", "times");
    const InitialDatum datum = make_datum(cfg.datum);
    if (!datum.m4() || !std::isfinite(*datum.m4()))
        throw UnsupportedError("relax-rate needs a finite fourth moment (see counterexample)");
    const double sigma = datum.sigma();
    const InitialDatum equilibrium = InitialDatum::gaussian(sigma);

    WildPropagator propagator(datum, cfg.solver);
    const double v_max = detail::auto_v_max(datum, cfg.v_max);
    const DensityGrid g_sigma = sample_density(
        [&](double v) { return equilibrium.density(v); }, v_max, cfg.n_v);

    const InitialDatum sym = symmetrize(datum);
    const GammaEnvelope envelope = gamma_envelope(sym);
    const TailProfile tail = sym.tail_profile();
    const ConstantBreakdown constant =
        theorem_constant(*sym.m4(), sym.sigma(), *tail.p, *tail.L_p, envelope);

    std::vector<double> distances, h1_bounds, tails;
    for (double t : cfg.times) {
        const auto r = propagator.at(t);
        const DensityGrid f = detail::solution_density(r.cf, t, datum, v_max, cfg.n_v);
        distances.push_back(l1_distance(f, g_sigma));
        GridFn diff(r.cf.xi_max, r.cf.n_points, true);
        for (int k = 0; k < r.cf.n_points; ++k)
            diff.values[k] = r.cf.values[k] - equilibrium.cf(diff.xi(k));
        h1_bounds.push_back(h1_fourier_norm(diff, 0.05));
        tails.push_back(r.tail_estimate);
    }

    CsvWriter csv(detail::join_path(cfg.out_dir, "relax_rate.csv"));
    csv.comment("datum=" + cfg.datum.family + " sigma=" + format_real(sigma) +
                " C_total_log10=" + format_real(constant.log10_C_total));
    csv.row({"t", "l1_distance", "h1_bound", "theorem_bound"});
    for (std::size_t i = 0; i < cfg.times.size(); ++i)
        csv.row({format_real(cfg.times[i]), format_real(distances[i]), format_real(h1_bounds[i]),
                 format_real(constant.C_total * std::exp(-0.25 * cfg.times[i]))});

    double floor = 1e-9;
    for (double tb : tails) floor = std::max(floor, 10.0 * tb);
    CsvWriter fit_csv(detail::join_path(cfg.out_dir, "rate_fit.csv"));
    fit_csv.row({"rate", "log_intercept", "r_squared", "points_used", "floor"});
    try {
        const RateFit fit = fit_decay_rate(cfg.times, distances, floor);
        fit_csv.row({format_real(fit.rate), format_real(fit.log_intercept),
                     format_real(fit.r_squared), std::to_string(fit.points_used),
                     format_real(floor)});
    } catch (const NumericalError&) {
        fit_csv.comment("all distances at or below the noise floor; no usable fit");
        fit_csv.row({"nan", "nan", "nan", "0", format_real(floor)});
    }

    if (cfg.emit_svg) {
        PlotSeries d{"||f - g||_1", cfg.times, distances};
        PlotSeries b{"C exp(-t/4)", cfg.times, {}};
        for (double t : cfg.times) b.y.push_back(constant.C_total * std::exp(-0.25 * t));
        write_svg_plot(detail::join_path(cfg.out_dir, "relax_rate.svg"),
                       "relaxation to equilibrium", "t", "distance", {d, b}, true);
    }
}

// --- moment-check --------------------------------------------------------------

inline void run_moment_check(const ExperimentConfig& cfg) {
    if (cfg.times.empty()) throw ConfigError("moment-check needs 'times'", "times");
    if (cfg.trials < 100)
        throw ConfigError("moment-check needs trials >= 100", "trials");
    CsvWriter csv(detail::join_path(cfg.out_dir, "moment_check.csv"));
    csv.row({"m", "t", "trials", "mc_mean", "std_error", "closed_form", "z_score", "pass"});
    std::vector<double> means, closed;
    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
        const double t = cfg.times[i];
        const TreeSampleStats stats =
            estimate_power_sum(cfg.moment_m, t, cfg.trials, RngStream(cfg.seed, i));
        const double want = expected_power_sum(cfg.moment_m, t);
        const double z = stats.std_error > 0.0
                             ? (stats.mean_power_sum - want) / stats.std_error
                             : 0.0;
        means.push_back(stats.mean_power_sum);
        closed.push_back(want);
        csv.row({format_real(cfg.moment_m), format_real(t), std::to_string(stats.trials),
                 format_real(stats.mean_power_sum), format_real(stats.std_error),
                 format_real(want), format_real(z), std::abs(z) <= 3.0 ? "true" : "false"});
    }
    if (cfg.emit_svg)
        write_svg_plot(detail::join_path(cfg.out_dir, "moment_check.svg"),
                       "weight power sums: Monte Carlo vs closed form", "t", "E sum |pi|^m",
                       {{"monte_carlo", cfg.times, means}, {"closed_form", cfg.times, closed}},
                       false);
}

// --- bounds-audit ---------------------------------------------------------------

inline void run_bounds_audit(const ExperimentConfig& cfg) {
    CsvWriter csv(detail::join_path(cfg.out_dir, "bounds_audit.csv"));
    csv.row({"quantity", "value", "bound", "margin", "pass"});
    auto audit = [&](const std::string& name, double value, double bound) {
        const double margin = bound - value;
        csv.row({name, format_real(value), format_real(bound), format_real(margin),
                 margin >= 0.0 ? "true" : "false"});
        return margin >= 0.0;
    };
    bool all_ok = true;

    // angular moments: quadrature vs closed form
    for (double m : {1.0, 2.0, 3.0, 3.5, 4.0, 6.0})
        all_ok &= audit("alpha_m_quadrature_vs_closed_m=" + detail::t_label(m),
                        std::abs(alpha_m(m) - alpha_m_closed_form(m)), 1e-10);
    all_ok &= audit("lower_bound_rate_beta=3.5", lower_bound_rate(3.5), 0.25);

    // weight identity over a large sample
    {
        RngStream rng(cfg.seed, 101);
        double worst = 0.0;
        for (int i = 0; i < 100000; ++i) {
            const WeightVector wv = sample_weights(2.0, rng);
            worst = std::max(worst, std::abs(wv.sum_squares() - 1.0));
        }
        all_ok &= audit("weight_identity_sup_|sum_pi2-1|", worst, 1e-12);
    }

    // Newton-identity bound E_h <= 1/h!
    {
        RngStream rng(cfg.seed, 102);
        double worst = -1.0;
        for (int i = 0; i < 2000; ++i) {
            const WeightVector wv = sample_weights(3.0, rng);
            for (int h = 1; h <= 8; ++h)
                worst = std::max(worst, elementary_symmetric(wv, h) -
                                            1.0 / std::exp(log_factorial(h)));
        }
        all_ok &= audit("elementary_symmetric_sup_(E_h-1/h!)", worst, 1e-12);
    }

    // 4-fold uniform sum against the exponential CF bound
    {
        double worst = -1.0;
        for (int i = 0; i <= 1000; ++i) {
            const double xi = 50.0 * i / 1000.0;
            const double psi = std::pow(sinc(0.5 * xi), 4);
            worst = std::max(worst,
                             std::abs(psi) - lemma_a1_bound(std::sqrt(1.0 / 3.0), 16.0, xi));
        }
        all_ok &= audit("lemma_a1_4fold_uniform_sup_excess", worst, 0.0);
    }

    // Berry-Esseen style bounds for equal-weight uniform sums
    {
        const double m2 = 1.0, m4 = 1.8;
        for (int n : {4, 16, 64}) {
            const double gamma4 = (m4 / (m2 * m2)) / n;
            const double gamma = std::pow(gamma4, 0.25);
            const double A = 0.5 / gamma;
            const BerryEsseenBounds be = berry_esseen_bounds(gamma4);
            auto phi_n = [&](double xi) {
                return std::pow(sinc(std::sqrt(3.0) * xi / std::sqrt(double(n))), n);
            };
            double worst_cf = -1.0, worst_deriv = -1.0;
            const int grid = 2000;
            for (int i = 0; i <= grid; ++i) {
                const double xi = A * i / grid;
                const double gauss = std::exp(-0.5 * xi * xi);
                const double lhs = std::abs(phi_n(xi) - gauss);
                worst_cf = std::max(worst_cf, lhs - be.c1 * gamma4 * std::pow(xi, 4) * gauss);
                const double h = 1e-4;
                const double dlhs = std::abs((phi_n(xi + h) - std::exp(-0.5 * (xi + h) * (xi + h)) -
                                              (phi_n(xi - h) - std::exp(-0.5 * (xi - h) * (xi - h)))) /
                                             (2.0 * h));
                worst_deriv = std::max(
                    worst_deriv, dlhs - be.c2 * gamma4 * (1.0 + xi * xi) *
                                            std::pow(std::abs(xi), 3) * gauss);
            }
            all_ok &= audit("lemma_a2_cf_sup_excess_n=" + std::to_string(n), worst_cf, 0.0);
            all_ok &= audit("lemma_a2_deriv_sup_excess_n=" + std::to_string(n), worst_deriv, 1e-9);
            // L2 integrals over [-A, A]
            const int nq = 4000;
            double i_cf = 0.0, i_deriv = 0.0;
            const double h = A / nq;
            for (int i = 0; i <= nq; ++i) {
                const double xi = i * h;
                const double w = (i == 0 || i == nq) ? 0.5 : 1.0;
                const double d = phi_n(xi) - std::exp(-0.5 * xi * xi);
                const double dd = (phi_n(xi + 1e-4) - std::exp(-0.5 * (xi + 1e-4) * (xi + 1e-4)) -
                                   (phi_n(xi - 1e-4) - std::exp(-0.5 * (xi - 1e-4) * (xi - 1e-4)))) /
                                  2e-4;
                i_cf += w * d * d;
                i_deriv += w * dd * dd;
            }
            all_ok &= audit("lemma_3_1_l2_cf_n=" + std::to_string(n),
                            std::sqrt(2.0 * h * i_cf), be.l2_cf + 1e-6);
            all_ok &= audit("lemma_3_1_l2_deriv_n=" + std::to_string(n),
                            std::sqrt(2.0 * h * i_deriv), be.l2_deriv + 1e-6);
        }
    }

    // envelope audit for the configured datum (default: uniform(sqrt 3)), plus
    // the theorem constant assembled from it
    {
        InitialDatum datum = cfg.datum.family.empty()
                                 ? InitialDatum::uniform(std::sqrt(3.0))
                                 : make_datum(cfg.datum);
        if (datum.family() == Family::cf_series)
            throw UnsupportedError("bounds-audit: cf_series datum has no envelope");
        const InitialDatum sym = symmetrize(datum);
        if (sym.m4() && std::isfinite(*sym.m4())) {
            const GammaEnvelope env = gamma_envelope(sym);
            double worst = -1.0;
            for (int i = 0; i <= 10000; ++i) {
                const double xi = 1000.0 * i / 10000.0;
                worst = std::max(worst, std::abs(sym.cf(xi)) - env(xi));
            }
            all_ok &= audit("envelope_domination_sup_excess", worst, 1e-12);
            const TailProfile tail = sym.tail_profile();
            const ConstantBreakdown cb =
                theorem_constant(*sym.m4(), sym.sigma(), *tail.p, *tail.L_p, env);
            all_ok &= audit("c_tilde_vs_printed_line", cb.c_tilde, cb.c_tilde_printed);
            csv.row({"C_total_log10", format_real(cb.log10_C_total), "", "", "true"});
        }
    }

    if (!all_ok)
        throw NumericalError("bounds audit found violations (see bounds_audit.csv)",
                             "failed_rows", 1, 0);
}

// --- counterexample ---------------------------------------------------------------

inline void run_counterexample(const ExperimentConfig& cfg) {
    if (cfg.times.size() < 3) throw ConfigError("counterexample needs >= 3 times", "times");
    const InitialDatum datum = make_datum(cfg.datum);
    if (datum.family() != Family::power_law)
        throw ConfigError("counterexample needs a power_law datum", "family");
    const double beta = datum.beta();
    const double sigma2 = *datum.m2();
    const double xi_star = cfg.xi_star;

    WildPropagator propagator(datum, cfg.solver);
    std::vector<double> deviations, tails;
    for (double t : cfg.times) {
        const auto r = propagator.at(t);
        const double gauss = std::exp(-0.5 * sigma2 * xi_star * xi_star);
        deviations.push_back(std::abs(r.cf.eval(xi_star) - std::complex<double>(gauss, 0.0)));
        tails.push_back(r.tail_estimate);
    }

    CsvWriter csv(detail::join_path(cfg.out_dir, "counterexample.csv"));
    csv.comment("beta=" + format_real(beta) + " xi_star=" + format_real(xi_star));
    csv.row({"t", "cf_deviation"});
    for (std::size_t i = 0; i < cfg.times.size(); ++i)
        csv.row({format_real(cfg.times[i]), format_real(deviations[i])});

    double floor = 0.0;
    for (double tb : tails) floor = std::max(floor, 10.0 * tb);
    const RateFit fit = fit_decay_rate(cfg.times, deviations, floor);
    const double target = lower_bound_rate(beta);

    CsvWriter fit_csv(detail::join_path(cfg.out_dir, "counterexample_fit.csv"));
    fit_csv.row({"fitted_rate", "lower_bound_rate", "abs_difference", "r_squared",
                 "slower_than_quarter"});
    fit_csv.row({format_real(fit.rate), format_real(target), format_real(std::abs(fit.rate - target)),
                 format_real(fit.r_squared), fit.rate < 0.24 ? "true" : "false"});

    if (cfg.emit_svg)
        write_svg_plot(detail::join_path(cfg.out_dir, "counterexample.svg"),
                       "heavy-tail CF deviation decay", "t", "|phi(xi*,t) - gaussian|",
                       {{"deviation", cfg.times, deviations}}, true);
}

// --- dispatcher ----------------------------------------------------------------

inline int run(const ExperimentConfig& cfg) {
    try {
        if (!cfg.subcommand) throw ConfigError("no subcommand given", "subcommand");
        std::filesystem::create_directories(cfg.out_dir);
        switch (*cfg.subcommand) {
            case Subcommand::solve: run_solve(cfg); break;
            case Subcommand::relax_rate: run_relax_rate(cfg); break;
            case Subcommand::moment_check: run_moment_check(cfg); break;
            case Subcommand::bounds_audit: run_bounds_audit(cfg); break;
            case Subcommand::counterexample: run_counterexample(cfg); break;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceLimitError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "numerical-quality error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace kac
