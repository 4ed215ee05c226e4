#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "kac/initial_data.hpp"
#include "kac/quadrature.hpp"
#include "test_util.hpp"

using namespace kac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("family construction fills exact moments") {
    const auto g = InitialDatum::gaussian(1.0);
    REQUIRE(g.symmetric());
    REQUIRE_THAT(*g.m2(), WithinAbs(1.0, 0.0));
    REQUIRE_THAT(*g.m4(), WithinAbs(3.0, 0.0));

    const auto g2 = InitialDatum::gaussian(2.0);
    REQUIRE_THAT(*g2.m2(), WithinAbs(4.0, 0.0));
    REQUIRE_THAT(*g2.m4(), WithinAbs(48.0, 1e-12));

    // power law: sigma^2 = beta/(beta-2), |third| = beta/(beta-3), m4 infinite
    const auto pl = InitialDatum::power_law(3.5);
    REQUIRE_THAT(*pl.m2(), WithinRel(7.0 / 3.0, 1e-15));
    REQUIRE_THAT(*pl.m3_abs(), WithinRel(7.0, 1e-15));
    REQUIRE(std::isinf(*pl.m4()));

    // uniform: analytic integral a^k/(k+1) for even k, a^3/4 for |v|^3
    const auto u = InitialDatum::uniform(std::sqrt(3.0));
    REQUIRE_THAT(*u.m2(), WithinRel(1.0, 1e-15));
    REQUIRE_THAT(*u.m4(), WithinRel(1.8, 1e-15));
    REQUIRE_THAT(u.moments().kurtosis_excess(), WithinAbs(-1.2, 1e-14));
    REQUIRE_THAT(*u.m3_abs(), WithinRel(1.299038105676658, 1e-14));
}

TEST_CASE("parameter validation names the offending field") {
    REQUIRE_THROWS_AS(InitialDatum::gaussian(0.0), ParameterError);
    REQUIRE_THROWS_AS(InitialDatum::uniform(-1.0), ParameterError);
    REQUIRE_THROWS_WITH(InitialDatum::power_law(5.0), Catch::Matchers::ContainsSubstring("beta"));
    REQUIRE_THROWS_AS(InitialDatum::power_law(3.0), ParameterError);
    REQUIRE_THROWS_AS(InitialDatum::power_law(4.0), ParameterError);
    REQUIRE_THROWS_AS(InitialDatum::gaussian_mixture({0.5, 0.6}, {1.0, 1.0}), ParameterError);
    REQUIRE_THROWS_AS(InitialDatum::gaussian_mixture({0.5, 0.5}, {1.0, -1.0}), ParameterError);
    REQUIRE_THROWS_AS(InitialDatum::cf_series({0.5, 0.2}), ParameterError);
}

TEST_CASE("characteristic function basics") {
    const auto g = InitialDatum::gaussian(1.0);
    REQUIRE(g.cf(0.0) == std::complex<double>(1.0, 0.0));
    REQUIRE_THAT(g.cf(1.0).real(), WithinRel(0.60653065971263342, 1e-14));

    const auto u = InitialDatum::uniform(std::sqrt(3.0));
    REQUIRE_THAT(u.cf(1.0).real(), WithinRel(std::sin(std::sqrt(3.0)) / std::sqrt(3.0), 1e-14));

    // power-law small-frequency value, pinned from oscillatory quadrature
    const auto pl = InitialDatum::power_law(3.5);
    REQUIRE_THAT(pl.cf(0.1).real(), WithinAbs(0.988515546067, 1e-6));
    REQUIRE_THAT(pl.cf(0.1).real(), WithinAbs(0.988515546067, 1e-9));
}

TEST_CASE("cf invariants on the +/-50 grid for every built-in family") {
    const std::vector<InitialDatum> data = {
        InitialDatum::gaussian(1.3),
        InitialDatum::uniform(std::sqrt(3.0)),
        InitialDatum::gaussian_mixture({0.25, 0.75}, {0.5, 1.5}),
        InitialDatum::power_law(3.5),
        InitialDatum::cf_series({0.5, 0.3, 0.2}),
    };
    for (const auto& d : data) {
        REQUIRE(d.cf(0.0) == std::complex<double>(1.0, 0.0));
        double max_abs = 0.0, max_im = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const double xi = -50.0 + 100.0 * k / 999.0;
            const auto v = d.cf(xi);
            max_abs = std::max(max_abs, std::abs(v));
            if (d.symmetric()) max_im = std::max(max_im, std::abs(v.imag()));
        }
        REQUIRE(max_abs <= 1.0 + 1e-12);
        if (d.symmetric()) REQUIRE(max_im <= 1e-12);
    }
}

TEST_CASE("second derivative of the cf at zero recovers -m2") {
    const std::vector<InitialDatum> data = {
        InitialDatum::gaussian(1.0),
        InitialDatum::uniform(std::sqrt(3.0)),
        InitialDatum::gaussian_mixture({0.4, 0.6}, {0.7, 1.4}),
    };
    const double h = 1e-3;
    for (const auto& d : data) {
        const double second =
            (d.cf(h).real() - 2.0 * d.cf(0.0).real() + d.cf(-h).real()) / (h * h);
        REQUIRE_THAT(-second, WithinRel(*d.m2(), 1e-4));
    }
}

TEST_CASE("power-law regimes agree on the overlap band") {
    for (double beta : {3.1, 3.5, 3.9}) {
        for (int i = 0; i <= 20; ++i) {
            const double xi = 0.5 + 0.5 * i / 20.0;
            REQUIRE_THAT(power_law_cf_series(beta, xi),
                         WithinAbs(power_law_cf_quadrature(beta, xi), 1e-8));
        }
    }
}

TEST_CASE("declared moments match numerically integrated ones") {
    const auto mix = InitialDatum::gaussian_mixture({0.3, 0.7}, {0.6, 1.2}, {-0.7, 0.4});
    auto num = [&](int k) {
        return adaptive_integrate(
            [&](double v) { return std::pow(v, k) * mix.density(v); }, -20.0, 20.0, 1e-13, 1e-9);
    };
    REQUIRE_THAT(num(2), WithinRel(*mix.m2(), 1e-6));
    REQUIRE_THAT(num(4), WithinRel(*mix.m4(), 1e-6));
    REQUIRE_THAT(num(1), WithinRel(mix.mean(), 1e-6));

    const auto pl = InitialDatum::power_law(3.2);
    const double m2_num = 2.0 * adaptive_integrate(
        [&](double v) { return v * v * pl.density(v); }, 1.0, 3.0e5, 1e-12, 5e-8);
    REQUIRE_THAT(m2_num, WithinRel(*pl.m2(), 1e-6));
}

TEST_CASE("moments() numeric paths and errors") {
    REQUIRE_THROWS_AS(InitialDatum::cf_series({1.0}).moments(), UnsupportedError);
    const auto mix = InitialDatum::gaussian_mixture({0.5, 0.5}, {1.0, 2.0});
    // centered mixture third absolute moment is the weighted gaussian one
    REQUIRE_THAT(mix.moments().m3_abs,
                 WithinRel(0.5 * gaussian_abs_third_moment(1.0) + 0.5 * gaussian_abs_third_moment(2.0),
                           1e-12));
}

TEST_CASE("symmetrize") {
    const auto u = InitialDatum::uniform(1.0);
    const auto us = symmetrize(u);
    for (double xi : {0.3, 1.0, 4.0})
        REQUIRE(us.cf(xi) == u.cf(xi));  // idempotent on even data

    const auto mix = InitialDatum::gaussian_mixture({0.3, 0.7}, {1.0, 0.5}, {-1.4, 0.6});
    REQUIRE_FALSE(mix.symmetric());
    const auto sym = symmetrize(mix);
    REQUIRE(sym.symmetric());
    for (double xi : {0.5, 1.0, 2.0}) {
        REQUIRE_THAT(sym.cf(xi).real(), WithinAbs(mix.cf(xi).real(), 1e-14));
        REQUIRE_THAT(sym.cf(xi).imag(), WithinAbs(0.0, 1e-14));
    }
    // even moments invariant
    REQUIRE_THAT(*sym.m2(), WithinAbs(*mix.m2(), 1e-12));
    REQUIRE_THAT(*sym.m4(), WithinAbs(*mix.m4(), 1e-12));
    REQUIRE_THAT(sym.mean(), WithinAbs(0.0, 1e-15));
}

TEST_CASE("tail profiles") {
    const auto u = InitialDatum::uniform(std::sqrt(3.0));
    const auto ut = tail_profile(u);
    REQUIRE(*ut.p == 1.0);
    REQUIRE_THAT(*ut.L_p, WithinRel(0.57735026918962576, 1e-14));
    // scan check: sup |xi| |cf| <= L_p + 1e-9
    double sup = 0.0;
    for (int k = 0; k <= 20000; ++k) {
        const double xi = 1000.0 * k / 20000.0;
        sup = std::max(sup, xi * std::abs(u.cf(xi)));
    }
    REQUIRE(sup <= *ut.L_p + 1e-9);

    const auto gt = tail_profile(InitialDatum::gaussian(1.0));
    REQUIRE(*gt.p == 4.0);
    REQUIRE_THAT(*gt.L_p, WithinRel(2.1653645317858031, 1e-12));

    const auto ct = tail_profile(InitialDatum::cf_series({0.6, 0.4}));
    REQUIRE_FALSE(ct.p.has_value());
    REQUIRE_FALSE(ct.L_p.has_value());

    // power law: |phi| <= 2 beta / |xi| everywhere
    const auto pl = InitialDatum::power_law(3.5);
    const auto pt = tail_profile(pl);
    REQUIRE(*pt.p == 1.0);
    for (double xi : {1.0, 5.0, 20.0})
        REQUIRE(xi * std::abs(pl.cf(xi)) <= *pt.L_p);
}

TEST_CASE("cf_series is a CF-only fixture") {
    const auto c = InitialDatum::cf_series({0.5, 0.5});
    REQUIRE_FALSE(c.has_density());
    REQUIRE_FALSE(c.can_sample());
    REQUIRE_THROWS_AS(c.density(0.0), UnsupportedError);
    RngStream rng(1, 1);
    REQUIRE_THROWS_AS(c.sample(rng), UnsupportedError);
    REQUIRE_THAT(c.cf(1.0).real(), WithinRel(0.5 * 0.5 + 0.5 * std::sqrt(0.5), 1e-14));
}

TEST_CASE("custom grids") {
    // sampled standard normal
    const int n = 4001;
    std::vector<double> v(n), f(n);
    for (int i = 0; i < n; ++i) {
        v[i] = -8.0 + 16.0 * i / (n - 1);
        f[i] = normal_pdf(v[i]);
    }
    const auto d = InitialDatum::custom_grid(v, f);
    REQUIRE(d.symmetric());
    REQUIRE_THAT(*d.m2(), WithinAbs(1.0, 1e-4));
    REQUIRE_THAT(d.cf(1.0).real(), WithinAbs(std::exp(-0.5), 1e-5));

    // declared moment mismatch is a construction error
    MomentSet wrong{1.5, 1.2, 3.0};
    REQUIRE_THROWS_AS(InitialDatum::custom_grid(v, f, wrong), ParameterError);

    // sampling: empirical variance close to 1
    RngStream rng(5, 5);
    double s2 = 0.0;
    const int draws = 50000;
    for (int i = 0; i < draws; ++i) {
        const double x = d.sample(rng);
        s2 += x * x;
    }
    REQUIRE_THAT(s2 / draws, WithinAbs(1.0, 0.03));

    // an asymmetric grid symmetrizes to an even density
    std::vector<double> va(n), fa(n);
    for (int i = 0; i < n; ++i) {
        va[i] = -8.0 + 16.0 * i / (n - 1);
        fa[i] = 0.7 * normal_pdf(va[i] - 0.5, 0.8) + 0.3 * normal_pdf(va[i] + 1.0, 1.1);
    }
    const auto da = InitialDatum::custom_grid(va, fa);
    REQUIRE_FALSE(da.symmetric());
    const auto ds = symmetrize(da);
    REQUIRE(ds.symmetric());
    REQUIRE_THAT(*ds.m2(), WithinRel(*da.m2(), 1e-5));
}
