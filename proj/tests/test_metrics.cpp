#include <doctest.h>

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numeric>

#include "certpri/error.hpp"
#include "certpri/metrics.hpp"
#include "certpri/rng.hpp"

using namespace certpri;

namespace {

// Area under the cumulative bug curve over the first n positions.
double area(const std::vector<std::size_t>& order, const std::vector<bool>& bug, std::size_t n) {
    double a = 0, c = 0;
    for (std::size_t i = 0; i < n; ++i) {
        c += bug[order[i]] ? 1 : 0;
        a += c;
    }
    return a;
}

double brute_rauc(const std::vector<std::size_t>& order, const std::vector<bool>& bug, std::size_t n,
                  BugCount mode) {
    std::size_t nb = 0;
    if (mode == BugCount::global)
        nb = std::min<std::size_t>(n, std::count(bug.begin(), bug.end(), true));
    else
        for (std::size_t i = 0; i < n; ++i) nb += bug[order[i]];
    if (nb == 0) return 1.0;
    // ideal: nb bugs first, then the rest
    std::vector<bool> ideal(n, false);
    std::fill(ideal.begin(), ideal.begin() + static_cast<long>(nb), true);
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), std::size_t{0});
    return area(order, bug, n) / area(id, ideal, n);
}

}  // namespace

TEST_CASE("rauc_classification fixtures") {
    const std::vector<std::size_t> id{0, 1, 2, 3};
    CHECK(rauc_classification(id, {true, true, false, false}, 4) == 1.0);
    CHECK(rauc_classification(id, {true, false, true, false}, 4) == doctest::Approx(6.0 / 7.0).epsilon(1e-15));
    CHECK(rauc_classification(id, {false, false, false, false}, 4) == 1.0);
}

TEST_CASE("rauc_classification equals brute-force area for every placement, N <= 7") {
    for (std::size_t n = 1; n <= 7; ++n) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<bool> bug(n);
            for (std::size_t i = 0; i < n; ++i) bug[i] = (mask >> i) & 1u;
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            double lowest = INFINITY;
            do {
                for (std::size_t cut = 1; cut <= n; ++cut) {
                    for (BugCount mode : {BugCount::global, BugCount::prefix}) {
                        const double got = rauc_classification(order, bug, cut, mode);
                        REQUIRE(got == brute_rauc(order, bug, cut, mode));
                    }
                }
                lowest = std::min(lowest, rauc_classification(order, bug, n));
            } while (std::next_permutation(order.begin(), order.end()));
            // bugs placed last attain the minimum
            std::vector<std::size_t> last;
            for (std::size_t i = 0; i < n; ++i)
                if (!bug[i]) last.push_back(i);
            for (std::size_t i = 0; i < n; ++i)
                if (bug[i]) last.push_back(i);
            CHECK(rauc_classification(last, bug, n) == lowest);
        }
    }
}

TEST_CASE("N = 6 with two bugs: all 15 placements") {
    int count = 0;
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = a + 1; b < 6; ++b) {
            std::vector<bool> bug(6, false);
            bug[a] = bug[b] = true;
            const std::vector<std::size_t> id{0, 1, 2, 3, 4, 5};
            // cumulative count is 0 before a, 1 from a, 2 from b
            const double expect = ((b - a) * 1.0 + (6 - b) * 2.0) / (6 * 2 + (2 - 4) / 2.0);
            CHECK(rauc_classification(id, bug, 6) == doctest::Approx(expect).epsilon(1e-15));
            ++count;
        }
    CHECK(count == 15);
}

TEST_CASE("rauc_classification invariances and cutoff clamping") {
    const std::vector<bool> bug{true, false, true, false, true, false};
    const std::vector<std::size_t> a{0, 2, 4, 1, 3, 5}, b{4, 0, 2, 5, 1, 3};
    CHECK(rauc_classification(a, bug, 6) == 1.0);
    CHECK(rauc_classification(b, bug, 6) == 1.0);
    const std::vector<std::size_t> c{0, 1, 2, 3, 4, 5}, d{2, 3, 0, 1, 4, 5};
    CHECK(rauc_classification(c, bug, 6) == rauc_classification(d, bug, 6));
    CHECK(rauc_classification(c, bug, 100) == rauc_classification(c, bug, 6));
    CHECK_THROWS_AS(rauc_classification(c, bug, 0), InputError);
    CHECK_THROWS_AS(rauc_classification(std::vector<std::size_t>{0, 0, 1, 2, 3, 4}, bug, 6), InputError);
}

TEST_CASE("random orderings average the analytic expectation") {
    // E[area] = N' (N + 1) / 2, so E[rauc] ~ (N + 1) / 2 / (N - N'/2 + 1/2)
    const std::size_t n = 200;
    std::vector<bool> bug(n, false);
    for (std::size_t i = 0; i < n / 2; ++i) bug[i] = true;
    Rng rng(4);
    std::vector<std::size_t> order(n);
    double sum = 0, sq = 0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        const double v = rauc_classification(order, bug, n);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / reps;
    const double sd = std::sqrt(sq / reps - mean * mean);
    const double expect = (n + 1) / 2.0 / (n - n / 4.0 + 0.5);
    CHECK(std::abs(mean - expect) < 4 * sd / std::sqrt(double(reps)));
    CHECK(expect == doctest::Approx(2.0 / 3.0).epsilon(0.01));
}

TEST_CASE("rauc_regression fixtures") {
    const std::vector<double> mse{3, 1, 2};
    CHECK(rauc_regression(std::vector<std::size_t>{0, 1, 2}, mse, 3) == doctest::Approx(13.0 / 14.0).epsilon(1e-12));
    CHECK(rauc_regression(std::vector<std::size_t>{0, 2, 1}, mse, 3) == 1.0);
    const std::vector<double> desc{3, 2, 1};
    CHECK(rauc_regression(std::vector<std::size_t>{2, 1, 0}, desc, 3) == doctest::Approx(10.0 / 14.0).epsilon(1e-12));
    CHECK(rauc_regression(std::vector<std::size_t>{2, 1, 0}, desc, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(rauc_regression(std::vector<std::size_t>{1, 0}, std::vector<double>{0, 0}, 2) == 1.0);
}

TEST_CASE("rauc_regression is 1 exactly for nonincreasing orderings") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.below(6);
        std::vector<double> mse(n);
        for (double& m : mse) m = static_cast<double>(rng.below(4));
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        bool sorted = true;
        for (std::size_t i = 1; i < n; ++i) sorted &= mse[order[i - 1]] >= mse[order[i]];
        const double v = rauc_regression(order, mse, n);
        const bool all_zero = std::all_of(mse.begin(), mse.end(), [](double m) { return m == 0; });
        CHECK((std::abs(v - 1.0) < 1e-15) == (sorted || all_zero));
    }
}

TEST_CASE("robr") {
    CHECK(robr(0.9, 0.9) == 100.0);
    CHECK(robr(0.85, 0.90) == doctest::Approx(94.4444444).epsilon(1e-9));
}

TEST_CASE("genrew") {
    CHECK(genrew({{1, 1}, {1, 1}}, 6) == 1.0);
    CHECK(genrew({{6, 6}}, 6) == doctest::Approx(1.0 / 6.0));
    CHECK(genrew({{1, 2}, {2, 1}}, 6) == doctest::Approx(0.916667).epsilon(1e-6));
    CHECK_THROWS_AS(genrew({{0}}, 3), InputError);
    CHECK_THROWS_AS(genrew({{4}}, 3), InputError);
    // antitone in each entry
    std::vector<std::vector<int>> r{{1, 2, 3}, {2, 2, 1}};
    const double base = genrew(r, 3);
    r[1][0] = 3;
    CHECK(genrew(r, 3) < base);
    CHECK(descending_ranks(std::vector<double>{0.5, 0.9, 0.5, 0.1}) == std::vector<int>{2, 1, 2, 4});
}

TEST_CASE("incomplete beta and t cdf against Boost") {
    for (double a : {0.5, 1.0, 2.5, 10.0, 40.0})
        for (double b : {0.5, 1.0, 3.0, 12.0})
            for (double x : {0.0, 1e-6, 0.1, 0.37, 0.5, 0.9, 0.999, 1.0})
                CHECK(incomplete_beta(a, b, x) == doctest::Approx(boost::math::ibeta(a, b, x)).epsilon(1e-10));
    for (double dof : {1.0, 2.5, 7.0, 30.0, 400.0}) {
        boost::math::students_t dist(dof);
        for (double t : {-40.0, -3.0, -0.5, 0.0, 0.2, 1.7, 12.0})
            CHECK(student_t_cdf(t, dof) == doctest::Approx(boost::math::cdf(dist, t)).epsilon(1e-10));
    }
}

TEST_CASE("welch t-test") {
    SUBCASE("identical samples") {
        const std::vector<double> a{1, 2, 3, 4};
        const auto r = welch_t_test(a, a);
        CHECK(r.t == 0.0);
        CHECK(r.p == doctest::Approx(1.0));
    }
    SUBCASE("nearly separated samples") {
        const std::vector<double> a{0, 1e-3, -1e-3, 0}, b{1, 1.001, 0.999, 1};
        CHECK(welch_t_test(a, b).p < 1e-4);
    }
    SUBCASE("hand-computed fixture") {
        const std::vector<double> a{27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4};
        const std::vector<double> b{27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2, 21.9, 22.1, 22.9, 20.5, 24.4};
        auto stats = [](const std::vector<double>& v) {
            const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
            double s = 0;
            for (double x : v) s += (x - m) * (x - m);
            return std::pair{m, s / (v.size() - 1)};
        };
        const auto [ma, va] = stats(a);
        const auto [mb, vb] = stats(b);
        const double sa = va / a.size(), sb = vb / b.size();
        const double t = (ma - mb) / std::sqrt(sa + sb);
        const double dof = (sa + sb) * (sa + sb) / (sa * sa / (a.size() - 1) + sb * sb / (b.size() - 1));
        const double p = 2 * boost::math::cdf(boost::math::students_t(dof), -std::abs(t));
        const auto r = welch_t_test(a, b);
        CHECK(r.t == doctest::Approx(t).epsilon(1e-12));
        // published: t = -2.46, dof = 24.9, p = 0.021
        CHECK(std::abs(r.t + 2.46) < 5e-3);
        CHECK(std::abs(r.dof - 24.9) < 0.1);
        CHECK(std::abs(r.p - 0.021) < 5e-4);
        CHECK(r.dof == doctest::Approx(dof).epsilon(1e-12));
        CHECK(r.p == doctest::Approx(p).epsilon(1e-9));
    }
    SUBCASE("degenerate inputs") {
        CHECK_THROWS_AS(welch_t_test(std::vector<double>{1, 1}, std::vector<double>{2, 2}), InputError);
        CHECK_THROWS_AS(welch_t_test(std::vector<double>{1}, std::vector<double>{2, 3}), InputError);
    }
}

TEST_CASE("deepgini") {
    CHECK(deepgini_score(std::vector<double>{0, 1, 0}) == 0.0);
    CHECK(deepgini_score(std::vector<double>(10, 0.1)) == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(deepgini_score(std::vector<double>{0.7, 0.2, 0.1}) == doctest::Approx(0.46).epsilon(1e-14));
    CHECK_THROWS_AS(deepgini_score(std::vector<double>{0.5, 0.2}), InputError);
    CHECK(deepgini_order(std::vector<double>{0.1, 0.5, 0.3, 0.5}) == std::vector<std::size_t>{1, 3, 2, 0});

    Rng rng(6);
    std::vector<double> s1, s2;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> p(4);
        double z = 0;
        for (double& v : p) z += (v = rng.uniform_open());
        for (double& v : p) v /= z;
        std::vector<double> q{p[2], p[0], p[3], p[1]};
        s1.push_back(deepgini_score(p));
        s2.push_back(deepgini_score(q));
    }
    CHECK(deepgini_order(s1) == deepgini_order(s2));
}

TEST_CASE("spearman") {
    CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{4, 3, 2, 1}) == doctest::Approx(-1.0));
    // ties: ranks a = (1.5, 1.5, 3, 4), b = (1, 2, 3, 4)
    const double ra[] = {1.5, 1.5, 3, 4}, rb[] = {1, 2, 3, 4};
    double cov = 0, va = 0, vb = 0;
    for (int i = 0; i < 4; ++i) {
        cov += (ra[i] - 2.5) * (rb[i] - 2.5);
        va += (ra[i] - 2.5) * (ra[i] - 2.5);
        vb += (rb[i] - 2.5) * (rb[i] - 2.5);
    }
    CHECK(spearman(std::vector<double>{5, 5, 6, 9}, std::vector<double>{1, 2, 3, 4}) ==
          doctest::Approx(cov / std::sqrt(va * vb)).epsilon(1e-14));
    CHECK(spearman(std::vector<double>{1, INFINITY, 2}, std::vector<double>{1, 3, 2}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(spearman(std::vector<double>{1, 1}, std::vector<double>{1, 2}), InputError);
}
