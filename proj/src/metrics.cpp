#include "certpri/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "certpri/error.hpp"

namespace certpri {

namespace {

void check_ordering(std::span<const std::size_t> omega, std::size_t n_inputs) {
    if (omega.empty()) throw InputError("empty ordering");
    if (omega.size() != n_inputs) throw InputError("ordering length does not match the number of inputs");
    std::vector<bool> seen(n_inputs, false);
    for (std::size_t idx : omega) {
        if (idx >= n_inputs || seen[idx]) throw InputError("ordering is not a permutation");
        seen[idx] = true;
    }
}

std::pair<double, double> mean_var(std::span<const double> v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, ss / (n - 1.0)};
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw InvariantError("incomplete beta continued fraction did not converge");
}

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double rauc_classification(std::span<const std::size_t> omega, const std::vector<bool>& is_bug,
                           std::size_t cutoff, BugCount mode) {
    check_ordering(omega, is_bug.size());
    if (cutoff < 1) throw InputError("cutoff must be >= 1");
    const std::size_t n = std::min(cutoff, omega.size());

    double area = 0.0;
    std::size_t found = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_bug[omega[i]]) ++found;
        area += static_cast<double>(found);
    }
    std::size_t bugs = found;
    if (mode == BugCount::global) {
        const auto total = static_cast<std::size_t>(std::count(is_bug.begin(), is_bug.end(), true));
        bugs = std::min(total, n);
    }
    if (bugs == 0) return 1.0;
    const double N = static_cast<double>(n), B = static_cast<double>(bugs);
    return area / (N * B + (B - B * B) / 2.0);
}

double rauc_regression(std::span<const std::size_t> omega, std::span<const double> mse, std::size_t cutoff) {
    check_ordering(omega, mse.size());
    if (cutoff < 1) throw InputError("cutoff must be >= 1");
    for (double m : mse)
        if (!(m >= 0.0) || !std::isfinite(m)) throw InputError("MSE values must be finite and nonnegative");
    const std::size_t n = std::min(cutoff, omega.size());

    std::vector<double> ideal(mse.begin(), mse.end());
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double m = 0.0, M = 0.0, area = 0.0, ideal_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m += mse[omega[i]];
        M += ideal[i];
        area += m;
        ideal_area += M;
    }
    if (ideal_area == 0.0) return 1.0;
    return area / ideal_area;
}

double robr(double rauc_attacked, double rauc_original) {
    if (!(rauc_original > 0.0)) throw InputError("RobR needs a positive original RAUC");
    return 100.0 * rauc_attacked / rauc_original;
}

double genrew(const std::vector<std::vector<int>>& ranks, int n_pm) {
    if (n_pm < 1) throw InputError("n_pm must be >= 1");
    if (ranks.empty() || ranks.front().empty()) throw InputError("empty rank table");
    double total = 0.0;
    std::size_t cells = 0;
    for (const auto& row : ranks) {
        if (row.size() != ranks.front().size()) throw InputError("ragged rank table");
        for (int k : row) {
            if (k < 1 || k > n_pm) throw InputError("rank " + std::to_string(k) + " outside [1, n_pm]");
            total += static_cast<double>(n_pm - k + 1) / static_cast<double>(n_pm);
            ++cells;
        }
    }
    return total / static_cast<double>(cells);
}

std::vector<int> descending_ranks(std::span<const double> scores) {
    std::vector<int> ranks(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        int better = 0;
        for (double s : scores)
            if (s > scores[i]) ++better;
        ranks[i] = better + 1;
    }
    return ranks;
}

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw InputError("incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) throw InputError("t distribution needs dof > 0");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw InputError("Welch t-test needs at least two values per sample");
    const auto [ma, va] = mean_var(a);
    const auto [mb, vb] = mean_var(b);
    const double sa = va / static_cast<double>(a.size());
    const double sb = vb / static_cast<double>(b.size());
    if (!(sa + sb > 0.0)) throw InputError("Welch t-test: both samples have zero variance");
    TTestResult r;
    r.t = (ma - mb) / std::sqrt(sa + sb);
    r.dof = (sa + sb) * (sa + sb) /
            (sa * sa / static_cast<double>(a.size() - 1) + sb * sb / static_cast<double>(b.size() - 1));
    // Two-sided tail: P(|T| > |t|) = I_{dof / (dof + t^2)}(dof / 2, 1 / 2).
    r.p = incomplete_beta(0.5 * r.dof, 0.5, r.dof / (r.dof + r.t * r.t));
    return r;
}

double deepgini_score(std::span<const double> probabilities) {
    if (probabilities.empty()) throw InputError("empty probability vector");
    double sum = 0.0, sq = 0.0;
    for (double p : probabilities) {
        if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) throw InputError("probability outside [0, 1]");
        sum += p;
        sq += p * p;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw InputError("probability vector does not sum to 1");
    return 1.0 - sq;
}

std::vector<std::size_t> deepgini_order(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw InputError("spearman needs two equal-length samples");
    const std::vector<double> ra = average_ranks(a), rb = average_ranks(b);
    const auto [ma, va] = mean_var(ra);
    const auto [mb, vb] = mean_var(rb);
    if (va == 0.0 || vb == 0.0) throw InputError("spearman is undefined for constant samples");
    double cov = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) cov += (ra[i] - ma) * (rb[i] - mb);
    cov /= static_cast<double>(ra.size() - 1);
    return cov / std::sqrt(va * vb);
}

}  // namespace certpri
