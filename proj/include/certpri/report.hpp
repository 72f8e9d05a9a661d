#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "certpri/dataset.hpp"
#include "certpri/gevt.hpp"
#include "certpri/metrics.hpp"
#include "certpri/model.hpp"
#include "certpri/prioritizer.hpp"

namespace certpri {

inline constexpr std::string_view kResultSchema = "certpri.result/1";
inline constexpr std::string_view kReportSchema = "certpri.report/1";
inline constexpr std::string_view kFitSchema = "certpri.gevt-fit/1";

std::string result_to_json(const PrioritizationResult& result);

// The parts of a stored result that evaluation needs.
struct StoredResult {
    Task task = Task::classification;
    std::string mode;  // config echo, "white-box" / "black-box"
    std::vector<std::size_t> omega;
    std::vector<double> gamma;                    // +inf where the file holds null
    std::vector<std::vector<double>> prediction;  // per input
};

StoredResult parse_result_json(std::string_view text);

std::string fit_to_json(const FitOutcome& outcome, std::span<const double> values);

// Cutoff N for RAUC-N; nullopt means "all".
using Cutoff = std::optional<std::size_t>;
std::vector<Cutoff> parse_cutoffs(std::string_view text);
std::string cutoff_key(const Cutoff& c);

struct MethodReport {
    std::string method;
    std::string source;
    std::vector<std::pair<std::string, double>> rauc;  // key -> value, in cutoff order
    std::optional<double> robr;
    std::optional<double> genrew;
    std::optional<double> t;
    std::optional<double> p;
};

struct MetricReport {
    Task task = Task::classification;
    std::size_t n_inputs = 0;
    std::optional<std::size_t> n_bugs;  // classification
    std::vector<MethodReport> methods;
    struct Correlation {
        std::string a, b;
        double spearman = 0.0;
    };
    std::vector<Correlation> rank_correlations;  // between stored orderings
    std::vector<std::string> warnings;
};

// Ground truth resolved against stored predictions.
struct Outcomes {
    std::vector<bool> is_bug;  // classification
    std::vector<double> mse;   // regression
};

Outcomes outcomes_for(const StoredResult& result, const Dataset& labeled);

// RAUC at every cutoff for one ordering; clamped cutoffs add a warning.
std::vector<std::pair<std::string, double>> rauc_table(Task task, std::span<const std::size_t> omega,
                                                       const Outcomes& outcomes, const std::vector<Cutoff>& cutoffs,
                                                       BugCount mode, std::vector<std::string>& warnings);

// Fills genrew for every method from RAUC-all ranks (n_pm = number of methods).
void assign_genrew(MetricReport& report);

std::string report_to_json(const MetricReport& report);
std::string report_to_table(const MetricReport& report);

}  // namespace certpri
