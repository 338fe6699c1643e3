#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ggbayes/dataset.hpp"
#include "ggbayes/ggdist.hpp"
#include "ggbayes/posterior.hpp"
#include "json.hpp"

namespace ggbayes {

/// Geweke z-score comparing the mean of the first `first_frac` of the series
/// with the mean of the last `last_frac`. Each segment's long-run variance is
/// the non-overlapping batch-means estimate with floor(sqrt(m)) batches.
/// Returns 0 for a series that is constant over both segments. Throws
/// std::length_error for fewer than 100 values.
double geweke_z(std::span<const double> series, double first_frac = 0.1, double last_frac = 0.5);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Shortest window of ceil(mass * n) sorted samples; ties go to the leftmost.
Interval hpd_interval(std::span<const double> samples, double mass = 0.95);

/// Biased sample autocorrelations for lags 0..max_lag. A series with zero
/// variance yields 1 at lag 0 and 0 elsewhere.
std::vector<double> autocorrelation(std::span<const double> series, int max_lag);

struct NelderMeadOptions {
    int max_evaluations = 4000;
    double f_tol = 1e-12;
    double x_tol = 1e-10;
    double initial_step = 0.25;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Maximizes f by the Nelder-Mead simplex method. Non-finite values of f are
/// treated as -inf.
NelderMeadResult nelder_mead_max(const std::function<double(std::span<const double>)>& f,
                                 std::vector<double> x0, const NelderMeadOptions& options = {});

struct ModeResult {
    Params mode{1.0, 1.0, 1.0};
    double log_posterior = 0.0;
    /// False when the search did not beat the starting draw; mode is then that draw.
    bool improved = false;
    bool converged = false;
    int evaluations = 0;
};

/// Maximizes log_posterior from `start`. The search runs over (log alpha,
/// log phi) with mu at its conditional maximizer mu^alpha = (n alpha phi - 1)/(alpha S),
/// so it is a search in log-parameter space over the full posterior, restarted
/// until it stops improving. A restriction holds phi or alpha fixed.
ModeResult maximize_log_posterior(const Params& start, const Dataset& data,
                                  const Restriction& restriction = {});

/// Joint posterior mode seeded at the stored draw with the highest log posterior.
ModeResult posterior_mode(const Chain& chain, const Dataset& data,
                          const Restriction& restriction = {});

struct ParameterSummary {
    double mode = 0.0;
    double mean = 0.0;
    double sd = 0.0;
    double hpd_low = 0.0;
    double hpd_high = 0.0;
    double geweke_z = 0.0;
    bool geweke_pass = true;  ///< |z| < 1.96
};

struct PosteriorSummary {
    ParameterSummary phi;
    ParameterSummary mu;
    ParameterSummary alpha;
    ModeResult mode;
    std::size_t draws = 0;
    double acceptance_alpha = 0.0;
    double acceptance_phi = 0.0;
    /// Some parameter has zero posterior SD in the chain.
    bool degenerate = false;
    bool geweke_warning = false;
};

PosteriorSummary summarize(const Chain& chain, const Dataset& data);

nlohmann::json to_json(const PosteriorSummary& summary);

}  // namespace ggbayes
