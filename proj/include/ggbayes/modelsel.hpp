#pragma once

#include <iosfwd>
#include <string_view>
#include <variant>
#include <vector>

#include "ggbayes/dataset.hpp"
#include "ggbayes/ggdist.hpp"
#include "ggbayes/posterior.hpp"
#include "json.hpp"

namespace ggbayes {

enum class Model { GG, Weibull, Gamma, Lognormal };
std::string_view to_string(Model m);

/// log T ~ N(location, scale^2).
struct LognormalParams {
    double location = 0.0;
    double scale = 1.0;
    bool operator==(const LognormalParams&) const = default;
};

/// GG, Weibull and Gamma use Params (with phi = 1 or alpha = 1 for the
/// sub-models); Lognormal uses LognormalParams.
using ModelParams = std::variant<Params, LognormalParams>;

/// sum log f for the Weibull density alpha mu (mu t)^(alpha-1) exp(-(mu t)^alpha).
double weibull_log_likelihood(double alpha, double mu, const Dataset& data);
/// sum log f for the gamma density mu^phi t^(phi-1) exp(-mu t) / Gamma(phi).
double gamma_log_likelihood(double phi, double mu, const Dataset& data);
double lognormal_log_likelihood(const LognormalParams& p, const Dataset& data);

/// -2 log L. GG uses the full likelihood; Weibull requires phi == 1 and Gamma
/// alpha == 1 in the Params.
double deviance(Model model, const ModelParams& params, const Dataset& data);

/// -2 log L + k log n.
double bic(double log_lik, std::size_t n, int k);
double bic(Model model, const ModelParams& params, const Dataset& data);

struct DicParts {
    double mean_deviance = 0.0;
    double deviance_at_mean = 0.0;
    double p_d = 0.0;
    double dic = 0.0;
};

/// DIC with the plug-in at the posterior mean of each parameter.
DicParts dic(Model model, const std::vector<ModelParams>& draws, const Dataset& data);
DicParts dic(const Chain& chain, const Dataset& data);

int parameter_count(Model model);

struct ModelFit {
    Model model = Model::GG;
    std::vector<ModelParams> draws;
    ModelParams mode = Params(1.0, 1.0, 1.0);
    ModelParams posterior_mean = Params(1.0, 1.0, 1.0);
    double log_lik_at_mode = 0.0;
    double mean_deviance = 0.0;
    double deviance_at_mean = 0.0;
    double p_d = 0.0;
    double dic = 0.0;
    double bic = 0.0;
    int k = 3;
    /// p_D < 0; reported, not treated as an error.
    bool p_d_negative = false;
    double acceptance_alpha = 0.0;
    double acceptance_phi = 0.0;
};

/// Exact posterior draws under the prior 1/sigma^2: sigma^2 ~ InvGamma((n-1)/2, SS/2)
/// and location | sigma^2 ~ N(mean log t, sigma^2 / n), SS the sum of squared
/// deviations of log t. Equal observations give scale 0 draws.
std::vector<LognormalParams> lognormal_posterior_draws(const Dataset& data, int count, RandomSource& rng);

/// GG under the modified reference prior.
ModelFit fit_gg(const Dataset& data, const McmcConfig& config);

/// Weibull: the GG sampler with phi fixed at 1. Gamma: alpha fixed at 1.
/// Lognormal: lognormal_posterior_draws.
/// The BIC plug-in is the posterior mode in every case.
ModelFit fit_submodel(Model model, const Dataset& data, const McmcConfig& config);

struct Comparison {
    std::vector<ModelFit> fits;  ///< GG, Weibull, Gamma, Lognormal
    Model dic_winner = Model::GG;
    Model bic_winner = Model::GG;
};

/// Fits all four models with seeds derived from config.seed.
Comparison compare(const Dataset& data, const McmcConfig& config, int threads = 1);

nlohmann::json to_json(const ModelFit& fit);
nlohmann::json to_json(const Comparison& cmp);

/// Rows DIC and BIC, one column per model.
void write_comparison_csv(std::ostream& out, const Comparison& cmp);

}  // namespace ggbayes
