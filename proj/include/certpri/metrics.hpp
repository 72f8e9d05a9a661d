#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace certpri {

// How N' (the bug count in the ideal-area denominator) is chosen for a
// cutoff N: `global` uses min(total bugs, N), `prefix` counts only bugs
// that the ordering places within its first N positions.
enum class BugCount { global, prefix };

// Ratio of the area under the cumulative bug-count curve of `omega` over its
// first `cutoff` positions to the area of the ideal ordering,
// N N' + (N' - N'^2) / 2. A cutoff beyond |omega| is clamped. Returns 1 when
// there are no bugs to find.
double rauc_classification(std::span<const std::size_t> omega, const std::vector<bool>& is_bug,
                           std::size_t cutoff, BugCount mode = BugCount::global);

// Cumulative MSE along `omega` over the first `cutoff` positions, divided
// by the same quantity for the descending-MSE ordering. All-zero MSE gives 1.
double rauc_regression(std::span<const std::size_t> omega, std::span<const double> mse, std::size_t cutoff);

// 100 * attacked / original.
double robr(double rauc_attacked, double rauc_original);

// Mean of (n_pm - k + 1) / n_pm over a repetitions x subjects table of
// ranks k in [1, n_pm].
double genrew(const std::vector<std::vector<int>>& ranks, int n_pm);

// Competition ranks (1 = best) of scores in descending order; ties share
// the better rank.
std::vector<int> descending_ranks(std::span<const double> scores);

struct TTestResult {
    double t = 0.0;
    double dof = 0.0;
    double p = 1.0;  // two-sided
};

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double dof);

// Gini impurity 1 - sum p_i^2 of a probability vector.
double deepgini_score(std::span<const double> probabilities);
// Inputs sorted by descending impurity; ties by index.
std::vector<std::size_t> deepgini_order(std::span<const double> scores);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace certpri
