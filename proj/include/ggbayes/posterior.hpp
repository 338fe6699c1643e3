#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ggbayes/dataset.hpp"
#include "ggbayes/ggdist.hpp"
#include "ggbayes/random.hpp"

namespace ggbayes {

/// n log alpha - n lnGamma(phi) + n alpha phi log mu + (alpha phi - 1) sum log t - mu^alpha sum t^alpha.
double log_likelihood(const Params& p, const Dataset& data);

/// Unnormalized log posterior under the modified reference prior.
double log_posterior(const Params& p, const Dataset& data);

/// Exact draw from mu | alpha, phi: mu^alpha ~ gamma(n phi, rate sum t^alpha).
double draw_mu(double alpha, double phi, const Dataset& data, RandomSource& rng);

/// log p(alpha | phi, t) up to a constant, with mu integrated out.
double log_cond_alpha(double alpha, double phi, const Dataset& data);

/// log p(phi | alpha, t) up to a constant, with mu integrated out.
double log_cond_phi(double phi, double alpha, const Dataset& data);

struct McmcConfig {
    int iterations = 31000;
    int burn_in = 1000;
    int thin = 30;
    double proposal_sd_log_alpha = 0.5;
    double proposal_sd_log_phi = 0.5;
    std::uint64_t seed = 1;
    bool adapt_during_burnin = true;

    /// Number of stored draws, floor((iterations - burn_in) / thin).
    int stored_draws() const { return (iterations - burn_in) / thin; }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct Chain {
    std::vector<Params> draws;
    /// Sampler iteration (1-based) at which each draw was stored.
    std::vector<int> iteration;
    /// Post burn-in acceptance rates; NaN for a parameter held fixed.
    double acceptance_alpha = 0.0;
    double acceptance_phi = 0.0;
    /// Proposal scales in effect after burn-in.
    double final_sd_log_alpha = 0.0;
    double final_sd_log_phi = 0.0;
    McmcConfig config;

    std::vector<double> phi() const;
    std::vector<double> mu() const;
    std::vector<double> alpha() const;
};

/// Optional fixed values turn the sampler into the Weibull (phi = 1) or gamma
/// (alpha = 1) sampler; the remaining conditionals are unchanged.
struct Restriction {
    std::optional<double> fixed_phi;
    std::optional<double> fixed_alpha;
};

/// Start at alpha = 1, phi = 1, mu = 1 / mean(data).
Params auto_init(const Dataset& data);

/// Partially collapsed Gibbs sampler. Each iteration makes a random-walk
/// Metropolis step on log alpha against p(alpha | phi, t), one on log phi
/// against p(phi | alpha, t), then draws mu exactly. During burn-in the two
/// log proposal scales follow a Robbins-Monro recursion towards 35% acceptance;
/// afterwards they are frozen.
Chain run_chain(const Dataset& data, const McmcConfig& config,
                const std::optional<Params>& init = std::nullopt, const Restriction& restriction = {});

/// k independent chains with seeds derived from config.seed, run on up to
/// `threads` worker threads. Output order and content do not depend on the
/// number of threads.
std::vector<Chain> run_chains(const Dataset& data, const McmcConfig& config, int k, int threads = 1);

/// CSV with '#' comment lines carrying the configuration and acceptance rates,
/// then the columns iteration,phi,mu,alpha. Numbers use 17 significant digits.
void write_chain_csv(std::ostream& out, const Chain& chain);
Chain read_chain_csv(std::istream& in);

}  // namespace ggbayes
