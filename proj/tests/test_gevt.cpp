#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "certpri/gevt.hpp"
#include "gev_sampling.hpp"

using namespace certpri;

TEST_CASE("gev_cdf values") {
    CHECK(gev_cdf(5.0 / 3.0, -0.6, 0, 1) == 1.0);
    CHECK(gev_cdf(1.6667, -0.6, 0, 1) == 1.0);
    CHECK(gev_cdf(0.0, -0.5, 0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(gev_cdf(-1e6, -0.5, 0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(gev_cdf(-INFINITY, -0.5, 0, 1) == 0.0);
    // Gumbel branch
    CHECK(gev_cdf(0.0, 0.0, 0, 1) == doctest::Approx(std::exp(-1.0)));
    CHECK(gev_cdf(1.0, 0.0, 0, 1) == doctest::Approx(std::exp(-std::exp(-1.0))));
    // Frechet branch saturates at 0 below its support
    CHECK(gev_cdf(-5.0, 0.5, 0, 1) == 0.0);
}

TEST_CASE("gev_cdf is monotone and stays in [0, 1]") {
    for (double xi : {-0.9, -0.6, -0.1, 0.0, 0.3}) {
        double prev = 0.0;
        for (double g = -10; g <= 10; g += 0.01) {
            const double F = gev_cdf(g, xi, 0.2, 1.3);
            CHECK(F >= prev);
            CHECK(F <= 1.0);
            prev = F;
        }
    }
}

TEST_CASE("gev_log_pdf is the derivative of the cdf") {
    for (double g : {-1.0, 0.0, 0.5, 1.2}) {
        const double h = 1e-6;
        const double fd = (gev_cdf(g + h, -0.6, 0, 1) - gev_cdf(g - h, -0.6, 0, 1)) / (2 * h);
        CHECK(std::exp(gev_log_pdf(g, -0.6, 0, 1)) == doctest::Approx(fd).epsilon(1e-6));
    }
    CHECK(gev_log_pdf(2.0, -0.6, 0, 1) == -INFINITY);
}

TEST_CASE("reverse Weibull recovery at n = 500") {
    int pass = 0;
    for (int rep = 0; rep < 20; ++rep) {
        Rng rng(1000 + rep);
        const auto g = testutil::gev_draws(500, -0.6, 0, 1, rng);
        const FitOutcome out = fit_reverse_weibull(g);
        REQUIRE(out.ok());
        const WeibullFit& f = *out.fit;
        // MLE: at least as likely as the true parameters, and self-consistent
        CHECK(f.log_likelihood >= gev_log_likelihood(g, -0.6, 0, 1) - 1e-9);
        CHECK(f.log_likelihood == doctest::Approx(gev_log_likelihood(g, f.xi, f.u, f.sigma)).epsilon(1e-9));
        CHECK(f.endpoint == doctest::Approx(f.u - f.sigma / f.xi).epsilon(1e-12));
        if (f.xi >= -0.8 && f.xi <= -0.4 && std::abs(f.endpoint - 5.0 / 3.0) <= 0.15 * 5.0 / 3.0) ++pass;
    }
    CHECK(pass >= 18);
}

TEST_CASE("degenerate samples fall back to the maximum") {
    const std::vector<double> same(6, 3.2);
    const FitOutcome out = fit_reverse_weibull(same);
    CHECK(out.status == FitStatus::degenerate);
    const LipschitzEstimate est = lipschitz_estimate(out, same);
    CHECK(est.fallback);
    CHECK(est.value == 3.2);
    CHECK(fit_reverse_weibull(std::vector<double>{1, 2}).status == FitStatus::degenerate);
}

TEST_CASE("endpoint from known parameters") {
    WeibullFit f;
    f.xi = -0.6;
    f.u = 0;
    f.sigma = 1;
    CHECK(weibull_endpoint(f, EndpointVariant::location_scale) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    CHECK(weibull_endpoint(f, EndpointVariant::standardized) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    f.u = 2;
    f.sigma = 0.5;
    CHECK(weibull_endpoint(f, EndpointVariant::location_scale) == doctest::Approx(2 + 0.5 / 0.6));
    CHECK(weibull_endpoint(f, EndpointVariant::standardized) == doctest::Approx(1 / 0.6));
}

TEST_CASE("block maxima of uniforms give an endpoint near 1") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Rng rng(seed);
        std::vector<double> maxima(1000);
        for (double& m : maxima) {
            m = 0;
            for (int k = 0; k < 10; ++k) m = std::max(m, rng.uniform());
        }
        const LipschitzEstimate est = lipschitz_estimate(fit_reverse_weibull(maxima), maxima);
        CHECK(est.value >= 0.9);
        CHECK(est.value <= 1.1);
    }
}

TEST_CASE("estimate is never below the largest maximum") {
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 3 + rng.below(20);
        std::vector<double> v(n);
        for (double& x : v) x = std::abs(rng.normal()) * std::exp(rng.normal());
        const LipschitzEstimate est = lipschitz_estimate(fit_reverse_weibull(v), v);
        CHECK(est.value >= *std::max_element(v.begin(), v.end()));
    }
}

TEST_CASE("estimate is scale equivariant") {
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        const auto g = testutil::gev_draws(6 + rng.below(100), -0.5, 3, 0.7, rng);
        const double base = lipschitz_estimate(fit_reverse_weibull(g), g).value;
        for (double a : {1e-3, 0.5, 7.0, 1e4}) {
            std::vector<double> s(g);
            for (double& x : s) x *= a;
            CHECK(lipschitz_estimate(fit_reverse_weibull(s), s).value == doctest::Approx(a * base).epsilon(1e-6));
        }
    }
}

TEST_CASE("estimation error shrinks with the sample size") {
    auto median_error = [](std::size_t n) {
        std::vector<double> err;
        for (int rep = 0; rep < 20; ++rep) {
            Rng rng(500 + rep);
            const auto g = testutil::gev_draws(n, -0.6, 0, 1, rng);
            const FitOutcome out = fit_reverse_weibull(g);
            err.push_back(out.ok() ? std::abs(out.fit->xi + 0.6) : 1.0);
        }
        std::nth_element(err.begin(), err.begin() + 10, err.end());
        return err[10];
    };
    CHECK(median_error(1000) <= median_error(100));
}

TEST_CASE("fits of constant-gradient maxima reproduce the constant") {
    const std::vector<double> v(6, 2.75);
    CHECK(lipschitz_estimate(fit_reverse_weibull(v), v).value == doctest::Approx(2.75).epsilon(1e-12));
}

TEST_CASE("non-finite maxima are rejected") {
    CHECK_THROWS(fit_reverse_weibull(std::vector<double>{1, 2, NAN}));
}
