#include "certpri/gevt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "certpri/error.hpp"

namespace certpri {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxIterations = 500;
constexpr double kGradientTolerance = 1e-6;

void check_scale(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("GEV scale sigma must be positive");
}

// Reverse Weibull with endpoint e written as an ordinary Weibull on the
// distances w = e - y:
//   xi = -1/k, sigma = lambda/k, u = e - lambda,
//   loglik/n = ln k - ln lambda + (k-1) mean ln(w/lambda) - mean (w/lambda)^k.
// For fixed (k, e) the optimal lambda solves lambda^k = mean w^k, which
// leaves a two-parameter profile in (k, e). The optimizer runs on
// theta = (ln(k - 1), ln e) so that k > 1 and e > 0 = max y hold everywhere.
class ProfileLikelihood {
public:
    explicit ProfileLikelihood(std::vector<double> y) : y_(std::move(y)), w_(y_.size()), lw_(y_.size()) {}

    struct Point {
        double k, e, lambda, mean_loglik;
        std::array<double, 2> grad;  // d(mean loglik)/d theta
    };

    Point evaluate(const std::array<double, 2>& theta) {
        Point pt{};
        pt.k = 1.0 + std::exp(theta[0]);
        pt.e = std::exp(theta[1]);
        const double n = static_cast<double>(y_.size());
        double mean_lw = 0.0, top = kNegInf;
        for (std::size_t i = 0; i < y_.size(); ++i) {
            w_[i] = pt.e - y_[i];
            lw_[i] = std::log(w_[i]);
            mean_lw += lw_[i];
            top = std::max(top, pt.k * lw_[i]);
        }
        mean_lw /= n;
        // log mean w^k via log-sum-exp
        double acc = 0.0;
        for (double l : lw_) acc += std::exp(pt.k * l - top);
        const double log_mean_wk = top + std::log(acc / n);
        const double log_lambda = log_mean_wk / pt.k;
        pt.lambda = std::exp(log_lambda);
        pt.mean_loglik = std::log(pt.k) - pt.k * log_lambda + (pt.k - 1.0) * mean_lw - 1.0;

        // Envelope theorem: the profile gradient equals the partial gradient
        // of the full likelihood at the optimal lambda.
        double d_k = 1.0 / pt.k + (mean_lw - log_lambda);
        double inv_w = 0.0, ratio_km1 = 0.0;
        for (std::size_t i = 0; i < y_.size(); ++i) {
            const double lr = lw_[i] - log_lambda;
            const double rk = std::exp(pt.k * lr);
            d_k -= rk * lr / n;
            inv_w += 1.0 / w_[i];
            ratio_km1 += std::exp((pt.k - 1.0) * lr);
        }
        const double d_e = (pt.k - 1.0) * inv_w / n - (pt.k / pt.lambda) * ratio_km1 / n;
        pt.grad = {d_k * (pt.k - 1.0), d_e * pt.e};
        return pt;
    }

    double objective(const std::array<double, 2>& theta) {
        const Point pt = evaluate(theta);
        return std::isfinite(pt.mean_loglik) ? -pt.mean_loglik : std::numeric_limits<double>::infinity();
    }

private:
    std::vector<double> y_;
    std::vector<double> w_;
    std::vector<double> lw_;
};

struct Minimum {
    std::array<double, 2> theta;
    double value;
    int iterations;
};

// Nelder-Mead on two parameters with the usual coefficients.
template <typename F>
Minimum nelder_mead(F&& f, std::array<double, 2> start, double step, int max_iter, double ftol) {
    std::array<std::array<double, 2>, 3> simplex{start, start, start};
    simplex[1][0] += step;
    simplex[2][1] += step;
    std::array<double, 3> fv{f(simplex[0]), f(simplex[1]), f(simplex[2])};
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::array<int, 3> order{0, 1, 2};
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        const int best = order[0], mid = order[1], worst = order[2];
        if (std::abs(fv[worst] - fv[best]) <= ftol * (std::abs(fv[best]) + ftol)) break;

        std::array<double, 2> centroid{};
        for (int j = 0; j < 2; ++j) centroid[j] = 0.5 * (simplex[best][j] + simplex[mid][j]);
        auto along = [&](double t) {
            std::array<double, 2> p{};
            for (int j = 0; j < 2; ++j) p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
            return p;
        };
        const auto reflected = along(-1.0);
        const double fr = f(reflected);
        if (fr < fv[best]) {
            const auto expanded = along(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                fv[worst] = fe;
            } else {
                simplex[worst] = reflected;
                fv[worst] = fr;
            }
        } else if (fr < fv[mid]) {
            simplex[worst] = reflected;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const auto contracted = along(outside ? -0.5 : 0.5);
            const double fc = f(contracted);
            if (fc < (outside ? fr : fv[worst])) {
                simplex[worst] = contracted;
                fv[worst] = fc;
            } else {
                for (int v : {mid, worst}) {
                    for (int j = 0; j < 2; ++j)
                        simplex[v][j] = simplex[best][j] + 0.5 * (simplex[v][j] - simplex[best][j]);
                    fv[v] = f(simplex[v]);
                }
            }
        }
    }
    const int best = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    return {simplex[best], fv[best], iter};
}

double grad_norm(const std::array<double, 2>& g) { return std::max(std::abs(g[0]), std::abs(g[1])); }

// Damped Newton polish with a finite-difference Hessian of the analytic
// gradient. Returns the number of iterations used; stops once the gradient
// is below tolerance.
int newton_polish(ProfileLikelihood& lik, std::array<double, 2>& theta, int budget) {
    int iter = 0;
    for (; iter < budget; ++iter) {
        const auto pt = lik.evaluate(theta);
        if (!std::isfinite(pt.mean_loglik)) break;
        if (grad_norm(pt.grad) < kGradientTolerance) break;
        // Minimise -loglik: gradient is -pt.grad.
        std::array<double, 2> g{-pt.grad[0], -pt.grad[1]};
        std::array<std::array<double, 2>, 2> H{};
        const double h = 1e-5;
        for (int j = 0; j < 2; ++j) {
            auto plus = theta, minus = theta;
            plus[j] += h;
            minus[j] -= h;
            const auto gp = lik.evaluate(plus).grad;
            const auto gm = lik.evaluate(minus).grad;
            for (int i = 0; i < 2; ++i) H[i][j] = -(gp[i] - gm[i]) / (2.0 * h);
        }
        const double sym = 0.5 * (H[0][1] + H[1][0]);
        H[0][1] = H[1][0] = sym;
        const double det = H[0][0] * H[1][1] - sym * sym;
        std::array<double, 2> dir{};
        if (H[0][0] > 0.0 && det > 0.0) {
            dir[0] = -(H[1][1] * g[0] - sym * g[1]) / det;
            dir[1] = -(-sym * g[0] + H[0][0] * g[1]) / det;
        } else {
            dir = {-g[0], -g[1]};
        }
        const double f0 = -pt.mean_loglik;
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
            std::array<double, 2> cand{theta[0] + t * dir[0], theta[1] + t * dir[1]};
            const double fc = lik.objective(cand);
            if (fc <= f0 + 1e-4 * t * (g[0] * dir[0] + g[1] * dir[1])) {
                theta = cand;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return iter;
}

}  // namespace

double gev_cdf(double g, double xi, double u, double sigma) {
    check_scale(sigma);
    const double z = (g - u) / sigma;
    if (xi == 0.0) return std::exp(-std::exp(-z));
    const double t = 1.0 + xi * z;
    if (t <= 0.0) return xi < 0.0 ? 1.0 : 0.0;
    return std::exp(-std::pow(t, -1.0 / xi));
}

double gev_log_pdf(double g, double xi, double u, double sigma) {
    check_scale(sigma);
    const double z = (g - u) / sigma;
    if (xi == 0.0) return -std::log(sigma) - z - std::exp(-z);
    const double t = 1.0 + xi * z;
    if (t <= 0.0) return kNegInf;
    const double lt = std::log(t);
    return -std::log(sigma) - (1.0 + 1.0 / xi) * lt - std::exp(-lt / xi);
}

double gev_log_likelihood(std::span<const double> values, double xi, double u, double sigma) {
    double total = 0.0;
    for (double g : values) {
        total += gev_log_pdf(g, xi, u, sigma);
        if (total == kNegInf) break;
    }
    return total;
}

std::string_view to_string(FitStatus status) {
    switch (status) {
        case FitStatus::ok: return "ok";
        case FitStatus::degenerate: return "degenerate";
        case FitStatus::not_converged: return "not_converged";
    }
    return "ok";
}

FitOutcome fit_reverse_weibull(std::span<const double> maxima) {
    FitOutcome out;
    if (maxima.size() < 3) {
        out.message = "need at least 3 block maxima";
        return out;
    }
    for (double v : maxima)
        if (!std::isfinite(v)) throw InputError("block maxima must be finite");

    const auto [lo_it, hi_it] = std::minmax_element(maxima.begin(), maxima.end());
    const double top = *hi_it;
    const double range = top - *lo_it;
    if (range <= 1e-12 * std::max(1.0, std::abs(top))) {
        out.message = "block maxima are constant";
        return out;
    }
    {
        std::vector<double> sorted(maxima.begin(), maxima.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 3) {
            out.message = "fewer than 3 distinct block maxima";
            return out;
        }
    }

    // Normalise to y in [-1, 0] so the fit is scale- and shift-equivariant.
    std::vector<double> y(maxima.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (maxima[i] - top) / range;
    const double n = static_cast<double>(y.size());
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double var = 0.0;
    for (double v : y) var += (v - mean_y) * (v - mean_y);
    const double sd = std::sqrt(var / (n - 1.0));

    ProfileLikelihood lik(y);
    auto objective = [&](const std::array<double, 2>& th) { return lik.objective(th); };

    // Start from u0 = max, sigma0 = sd and several shapes around xi0 = -0.5,
    // i.e. e0 = u0 - sigma0 / xi0 and k0 = -1 / xi0.
    Minimum best{{0.0, 0.0}, std::numeric_limits<double>::infinity(), 0};
    for (double xi0 : {-0.5, -0.25, -0.75}) {
        const double k0 = -1.0 / xi0;
        const double e0 = -sd / xi0;
        Minimum m = nelder_mead(objective, {std::log(k0 - 1.0), std::log(e0)}, 0.5, kMaxIterations, 1e-13);
        if (m.value < best.value) best = m;
    }
    const int polish_budget = std::max(0, kMaxIterations - best.iterations);
    best.iterations += newton_polish(lik, best.theta, polish_budget);

    const auto pt = lik.evaluate(best.theta);
    if (!std::isfinite(pt.mean_loglik) || grad_norm(pt.grad) >= kGradientTolerance) {
        out.status = FitStatus::not_converged;
        out.message = "likelihood maximisation did not converge";
        return out;
    }

    WeibullFit fit;
    fit.xi = -1.0 / pt.k;
    fit.endpoint = top + range * pt.e;
    fit.u = top + range * (pt.e - pt.lambda);
    fit.sigma = range * pt.lambda / pt.k;
    fit.log_likelihood = n * pt.mean_loglik - n * std::log(range);
    fit.iterations = best.iterations;
    if (!std::isfinite(fit.endpoint) || !(fit.sigma > 0.0) || !(fit.xi < 0.0)) {
        out.status = FitStatus::not_converged;
        out.message = "fit produced invalid parameters";
        return out;
    }
    out.status = FitStatus::ok;
    out.fit = fit;
    return out;
}

std::string_view to_string(EndpointVariant v) {
    return v == EndpointVariant::location_scale ? "location-scale" : "standardized";
}

EndpointVariant parse_endpoint_variant(std::string_view text) {
    if (text == "location-scale" || text == "location_scale") return EndpointVariant::location_scale;
    if (text == "standardized") return EndpointVariant::standardized;
    throw InputError("unknown endpoint variant '" + std::string(text) + "'");
}

double weibull_endpoint(const WeibullFit& fit, EndpointVariant variant) {
    if (variant == EndpointVariant::standardized) return -1.0 / fit.xi;
    return fit.u - fit.sigma / fit.xi;
}

LipschitzEstimate lipschitz_estimate(const FitOutcome& outcome, std::span<const double> maxima,
                                     EndpointVariant variant) {
    if (maxima.empty()) throw InputError("lipschitz_estimate needs at least one block maximum");
    const double top = *std::max_element(maxima.begin(), maxima.end());
    if (outcome.ok() && outcome.fit) return {weibull_endpoint(*outcome.fit, variant), false};
    return {top, true};
}

}  // namespace certpri
