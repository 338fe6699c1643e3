#include "ggbayes/modelsel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "ggbayes/diagnostics.hpp"
#include "ggbayes/specfun.hpp"

namespace ggbayes {

namespace {

const Params& gg_params(const ModelParams& p, Model model) {
    const auto* g = std::get_if<Params>(&p);
    if (!g) throw std::invalid_argument(std::string(to_string(model)) + ": expected (phi, mu, alpha) parameters");
    return *g;
}

Restriction restriction_for(Model model) {
    Restriction r;
    if (model == Model::Weibull) r.fixed_phi = 1.0;
    if (model == Model::Gamma) r.fixed_alpha = 1.0;
    return r;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::json params_json(const ModelParams& p) {
    if (const auto* g = std::get_if<Params>(&p)) {
        return {{"phi", g->phi()}, {"mu", g->mu()}, {"alpha", g->alpha()}};
    }
    const auto& l = std::get<LognormalParams>(p);
    return {{"location", l.location}, {"scale", l.scale}};
}

ModelFit finish_fit(Model model, std::vector<ModelParams> draws, const ModelParams& mode, const Dataset& data) {
    ModelFit fit;
    fit.model = model;
    fit.k = parameter_count(model);
    const DicParts parts = dic(model, draws, data);
    fit.draws = std::move(draws);
    fit.mode = mode;
    fit.mean_deviance = parts.mean_deviance;
    fit.deviance_at_mean = parts.deviance_at_mean;
    fit.p_d = parts.p_d;
    fit.dic = parts.dic;
    fit.p_d_negative = parts.p_d < 0.0;
    fit.log_lik_at_mode = -0.5 * deviance(model, mode, data);
    fit.bic = bic(fit.log_lik_at_mode, data.size(), fit.k);
    return fit;
}

ModelParams posterior_mean(Model model, const std::vector<ModelParams>& draws) {
    const double m = static_cast<double>(draws.size());
    if (model == Model::Lognormal) {
        double loc = 0.0, scale = 0.0;
        for (const auto& d : draws) {
            loc += std::get<LognormalParams>(d).location;
            scale += std::get<LognormalParams>(d).scale;
        }
        return LognormalParams{loc / m, scale / m};
    }
    double phi = 0.0, mu = 0.0, alpha = 0.0;
    for (const auto& d : draws) {
        const auto& p = gg_params(d, model);
        phi += p.phi();
        mu += p.mu();
        alpha += p.alpha();
    }
    return Params(phi / m, mu / m, alpha / m);
}

}  // namespace

std::string_view to_string(Model m) {
    switch (m) {
        case Model::GG: return "GG";
        case Model::Weibull: return "Weibull";
        case Model::Gamma: return "Gamma";
        case Model::Lognormal: return "Lognormal";
    }
    return "?";
}

double weibull_log_likelihood(double alpha, double mu, const Dataset& data) {
    double s = 0.0;
    for (const double t : data.values()) {
        const double z = mu * t;
        s += std::log(alpha) + std::log(mu) + (alpha - 1.0) * std::log(z) - std::pow(z, alpha);
    }
    return s;
}

double gamma_log_likelihood(double phi, double mu, const Dataset& data) {
    double s = 0.0;
    for (const double t : data.values()) {
        s += phi * std::log(mu) + (phi - 1.0) * std::log(t) - mu * t - ln_gamma(phi);
    }
    return s;
}

double lognormal_log_likelihood(const LognormalParams& p, const Dataset& data) {
    if (!(p.scale > 0.0)) throw std::domain_error("lognormal: scale must be positive");
    double s = 0.0;
    for (const double t : data.values()) {
        const double z = (std::log(t) - p.location) / p.scale;
        s += -0.5 * z * z - std::log(p.scale) - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(t);
    }
    return s;
}

double deviance(Model model, const ModelParams& params, const Dataset& data) {
    switch (model) {
        case Model::GG: return -2.0 * log_likelihood(gg_params(params, model), data);
        case Model::Weibull: {
            const auto& p = gg_params(params, model);
            if (p.phi() != 1.0) throw std::invalid_argument("Weibull parameters need phi == 1");
            return -2.0 * weibull_log_likelihood(p.alpha(), p.mu(), data);
        }
        case Model::Gamma: {
            const auto& p = gg_params(params, model);
            if (p.alpha() != 1.0) throw std::invalid_argument("Gamma parameters need alpha == 1");
            return -2.0 * gamma_log_likelihood(p.phi(), p.mu(), data);
        }
        case Model::Lognormal: {
            const auto* l = std::get_if<LognormalParams>(&params);
            if (!l) throw std::invalid_argument("Lognormal: expected (location, scale) parameters");
            return -2.0 * lognormal_log_likelihood(*l, data);
        }
    }
    throw std::logic_error("deviance: unknown model");
}

int parameter_count(Model model) { return model == Model::GG ? 3 : 2; }

double bic(double log_lik, std::size_t n, int k) {
    if (n == 0 || k < 1) throw std::invalid_argument("bic: need n >= 1 and k >= 1");
    return -2.0 * log_lik + k * std::log(static_cast<double>(n));
}

double bic(Model model, const ModelParams& params, const Dataset& data) {
    return bic(-0.5 * deviance(model, params, data), data.size(), parameter_count(model));
}

DicParts dic(Model model, const std::vector<ModelParams>& draws, const Dataset& data) {
    if (draws.empty()) throw std::invalid_argument("dic: no draws");
    double total = 0.0;
    for (const auto& d : draws) total += deviance(model, d, data);
    DicParts out;
    out.mean_deviance = total / static_cast<double>(draws.size());
    out.deviance_at_mean = deviance(model, posterior_mean(model, draws), data);
    out.p_d = out.mean_deviance - out.deviance_at_mean;
    out.dic = out.mean_deviance + out.p_d;
    return out;
}

DicParts dic(const Chain& chain, const Dataset& data) {
    return dic(Model::GG, std::vector<ModelParams>(chain.draws.begin(), chain.draws.end()), data);
}

std::vector<LognormalParams> lognormal_posterior_draws(const Dataset& data, int count, RandomSource& rng) {
    if (data.size() < 2) throw std::invalid_argument("Lognormal posterior needs at least two observations");
    if (count < 1) throw std::invalid_argument("Lognormal posterior: count must be positive");
    const double n = static_cast<double>(data.size());
    const double ybar = data.sum_log() / n;
    double ss = 0.0;
    for (const double y : data.log_values()) ss += (y - ybar) * (y - ybar);
    std::vector<LognormalParams> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double g = log_gamma_draw(0.5 * (n - 1.0), 1.0, rng);
        const double sigma2 = ss > 0.0 ? std::exp(std::log(0.5 * ss) - g) : 0.0;
        out.push_back({ybar + std::sqrt(sigma2 / n) * rng.normal(), std::sqrt(sigma2)});
    }
    return out;
}

ModelFit fit_gg(const Dataset& data, const McmcConfig& config) {
    const Chain chain = run_chain(data, config);
    const ModeResult mode = posterior_mode(chain, data);
    ModelFit fit = finish_fit(Model::GG, std::vector<ModelParams>(chain.draws.begin(), chain.draws.end()),
                              mode.mode, data);
    fit.posterior_mean = posterior_mean(Model::GG, fit.draws);
    fit.acceptance_alpha = chain.acceptance_alpha;
    fit.acceptance_phi = chain.acceptance_phi;
    return fit;
}

ModelFit fit_submodel(Model model, const Dataset& data, const McmcConfig& config) {
    if (model == Model::GG) return fit_gg(data, config);
    if (model == Model::Lognormal) {
        config.validate();
        const double n = static_cast<double>(data.size());
        const double ybar = data.sum_log() / n;
        double ss = 0.0;
        for (const double y : data.log_values()) ss += (y - ybar) * (y - ybar);
        if (!(ss > 0.0)) throw std::invalid_argument("Lognormal fit needs at least two distinct values");
        RandomSource rng(config.seed);
        std::vector<ModelParams> draws;
        for (const auto& d : lognormal_posterior_draws(data, config.stored_draws(), rng)) draws.emplace_back(d);
        // Joint mode of (location, sigma^2) under the 1/sigma^2 prior.
        const LognormalParams mode{ybar, std::sqrt(ss / (n + 2.0))};
        ModelFit fit = finish_fit(model, std::move(draws), mode, data);
        fit.posterior_mean = posterior_mean(model, fit.draws);
        fit.acceptance_alpha = fit.acceptance_phi = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    const Restriction r = restriction_for(model);
    const Chain chain = run_chain(data, config, std::nullopt, r);
    const ModeResult mode = posterior_mode(chain, data, r);
    ModelFit fit = finish_fit(model, std::vector<ModelParams>(chain.draws.begin(), chain.draws.end()),
                              mode.mode, data);
    fit.posterior_mean = posterior_mean(model, fit.draws);
    fit.acceptance_alpha = chain.acceptance_alpha;
    fit.acceptance_phi = chain.acceptance_phi;
    return fit;
}

Comparison compare(const Dataset& data, const McmcConfig& config, int threads) {
    constexpr std::array<Model, 4> models{Model::GG, Model::Weibull, Model::Gamma, Model::Lognormal};
    Comparison cmp;
    cmp.fits.resize(models.size());
    std::vector<std::exception_ptr> errors(models.size());
    const auto work = [&](std::size_t i) {
        try {
            McmcConfig c = config;
            c.seed = derive_seed(config.seed, i);
            cmp.fits[i] = fit_submodel(models[i], data, c);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const auto nthreads = static_cast<std::size_t>(std::clamp(threads, 1, static_cast<int>(models.size())));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < models.size(); ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < models.size(); i += nthreads) work(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::size_t best_dic = 0, best_bic = 0;
    for (std::size_t i = 1; i < cmp.fits.size(); ++i) {
        if (cmp.fits[i].dic < cmp.fits[best_dic].dic) best_dic = i;
        if (cmp.fits[i].bic < cmp.fits[best_bic].bic) best_bic = i;
    }
    cmp.dic_winner = models[best_dic];
    cmp.bic_winner = models[best_bic];
    return cmp;
}

nlohmann::json to_json(const ModelFit& fit) {
    return {{"model", to_string(fit.model)},
            {"k", fit.k},
            {"mode", params_json(fit.mode)},
            {"posterior_mean", params_json(fit.posterior_mean)},
            {"log_lik_at_mode", fit.log_lik_at_mode},
            {"mean_deviance", fit.mean_deviance},
            {"deviance_at_mean", fit.deviance_at_mean},
            {"p_d", fit.p_d},
            {"p_d_negative", fit.p_d_negative},
            {"dic", fit.dic},
            {"bic", fit.bic},
            {"draws", fit.draws.size()},
            {"acceptance_alpha", fit.acceptance_alpha},
            {"acceptance_phi", fit.acceptance_phi}};
}

nlohmann::json to_json(const Comparison& cmp) {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& f : cmp.fits) models.push_back(to_json(f));
    return {{"models", models},
            {"winner", {{"dic", to_string(cmp.dic_winner)}, {"bic", to_string(cmp.bic_winner)}}}};
}

void write_comparison_csv(std::ostream& out, const Comparison& cmp) {
    out << "criterion";
    for (const auto& f : cmp.fits) out << ',' << to_string(f.model);
    out << "\nDIC";
    for (const auto& f : cmp.fits) out << ',' << fmt17(f.dic);
    out << "\nBIC";
    for (const auto& f : cmp.fits) out << ',' << fmt17(f.bic);
    out << '\n';
}

}  // namespace ggbayes
