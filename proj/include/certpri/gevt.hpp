#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace certpri {

// Generalized extreme value CDF G(z) = exp(-(1 + xi z)^(-1/xi)),
// z = (g - u) / sigma, with the Gumbel limit at xi = 0. Outside the support
// it saturates to 0 or 1.
double gev_cdf(double g, double xi, double u, double sigma);

// Log density of the same distribution; -inf outside the support.
double gev_log_pdf(double g, double xi, double u, double sigma);

double gev_log_likelihood(std::span<const double> values, double xi, double u, double sigma);

// Reverse Weibull member of the GEV family (xi < 0) fitted to block maxima.
struct WeibullFit {
    double xi = 0.0;     // shape, in (-1, 0)
    double u = 0.0;      // location
    double sigma = 0.0;  // scale
    double log_likelihood = 0.0;
    double endpoint = 0.0;  // u - sigma / xi
    int iterations = 0;
};

enum class FitStatus { ok, degenerate, not_converged };
std::string_view to_string(FitStatus status);

struct FitOutcome {
    FitStatus status = FitStatus::degenerate;
    std::optional<WeibullFit> fit;
    std::string message;

    bool ok() const noexcept { return status == FitStatus::ok; }
};

// Maximum-likelihood fit with xi constrained to (-1, 0); below -1 the
// likelihood is unbounded as the endpoint approaches the sample maximum.
// Requires at least three finite values. Convergence means the
// gradient of the per-sample log-likelihood (in the optimizer's coordinates,
// on range-normalised data) drops below 1e-6 within 500 iterations.
FitOutcome fit_reverse_weibull(std::span<const double> maxima);

// How the right endpoint is read off a fit.
//   location_scale: u - sigma / xi, the endpoint of the raw gradient norms.
//   standardized:   -1 / xi, the endpoint of the standardised variable z.
enum class EndpointVariant { location_scale, standardized };
std::string_view to_string(EndpointVariant v);
EndpointVariant parse_endpoint_variant(std::string_view text);

double weibull_endpoint(const WeibullFit& fit, EndpointVariant variant);

struct LipschitzEstimate {
    double value = 0.0;
    bool fallback = false;  // true when the sample maximum was used
};

// Right endpoint of a successful fit, otherwise the largest block maximum.
LipschitzEstimate lipschitz_estimate(const FitOutcome& outcome, std::span<const double> maxima,
                                     EndpointVariant variant = EndpointVariant::location_scale);

}  // namespace certpri
