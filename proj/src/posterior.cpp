#include "ggbayes/posterior.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

#include "ggbayes/specfun.hpp"

namespace ggbayes {

namespace {

double modified_exponent(double alpha) { return 2.0 * alpha / (1.0 + alpha); }

// Per-coordinate random-walk state on the log scale.
struct Walker {
    double log_sd;
    long accepted = 0;
    long proposed = 0;
};

template <typename Target>
double mh_step(double current, double& current_target, Walker& w, bool adapt, int t,
               const Target& target, RandomSource& rng, bool count) {
    const double u = std::log(current);
    const double u_new = u + std::exp(w.log_sd) * rng.normal();
    const double x_new = std::exp(u_new);
    double log_ratio = -std::numeric_limits<double>::infinity();
    double t_new = 0.0;
    if (x_new > 0.0 && std::isfinite(x_new)) {
        t_new = target(x_new) + u_new;
        if (std::isfinite(t_new)) log_ratio = t_new - current_target;
    }
    const bool accept = std::log(rng.uniform()) < log_ratio;
    if (adapt) {
        const double prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
        w.log_sd += std::pow(t + 1.0, -0.6) * (prob - 0.35);
    }
    if (count) {
        ++w.proposed;
        if (accept) ++w.accepted;
    }
    if (accept) {
        current_target = t_new;
        return x_new;
    }
    return current;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(std::string_view s, int line) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        // from_chars does not accept "nan" with a sign or "inf" spelled otherwise.
        if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
        throw std::runtime_error("chain CSV line " + std::to_string(line) + ": bad number '" +
                                 std::string(s) + "'");
    }
    return v;
}

}  // namespace

double log_likelihood(const Params& p, const Dataset& data) {
    const double n = static_cast<double>(data.size());
    const double a = p.alpha();
    const double lm = std::log(p.mu());
    return n * std::log(a) - n * ln_gamma(p.phi()) + n * a * p.phi() * lm +
           (a * p.phi() - 1.0) * data.sum_log() - std::exp(a * lm + data.log_sum_pow(a));
}

double log_posterior(const Params& p, const Dataset& data) {
    const double n = static_cast<double>(data.size());
    const double a = p.alpha();
    const double phi = p.phi();
    const double lm = std::log(p.mu());
    return (n + 0.5 - modified_exponent(a)) * std::log(a) + 0.5 * std::log(trigamma(phi)) -
           n * ln_gamma(phi) + (n * a * phi - 1.0) * lm + (a * phi - 1.0) * data.sum_log() -
           std::exp(a * lm + data.log_sum_pow(a));
}

double draw_mu(double alpha, double phi, const Dataset& data, RandomSource& rng) {
    if (!(alpha > 0.0) || !(phi > 0.0)) throw std::domain_error("draw_mu: alpha and phi must be positive");
    const double n = static_cast<double>(data.size());
    // Rate exp(L) can overflow, so scale a unit-rate draw in log space.
    const double log_w = log_gamma_draw(n * phi, 1.0, rng) - data.log_sum_pow(alpha);
    return std::exp(log_w / alpha);
}

double log_cond_alpha(double alpha, double phi, const Dataset& data) {
    if (!(alpha > 0.0) || !(phi > 0.0)) throw std::domain_error("log_cond_alpha: arguments must be positive");
    const double n = static_cast<double>(data.size());
    return (n - 0.5 - modified_exponent(alpha)) * std::log(alpha) + (alpha * phi - 1.0) * data.sum_log() -
           n * phi * data.log_sum_pow(alpha);
}

double log_cond_phi(double phi, double alpha, const Dataset& data) {
    if (!(alpha > 0.0) || !(phi > 0.0)) throw std::domain_error("log_cond_phi: arguments must be positive");
    const double n = static_cast<double>(data.size());
    return 0.5 * std::log(trigamma(phi)) + ln_gamma(n * phi) - n * ln_gamma(phi) +
           (alpha * phi - 1.0) * data.sum_log() - n * phi * data.log_sum_pow(alpha);
}

void McmcConfig::validate() const {
    if (iterations <= 0) throw std::invalid_argument("iterations must be positive");
    if (burn_in < 0) throw std::invalid_argument("burn_in must be non-negative");
    if (thin <= 0) throw std::invalid_argument("thin must be positive");
    if (burn_in >= iterations) throw std::invalid_argument("burn_in must be less than iterations");
    if (stored_draws() < 100) {
        throw std::invalid_argument("(iterations - burn_in) / thin must be at least 100, got " +
                                    std::to_string(stored_draws()));
    }
    if (!(proposal_sd_log_alpha > 0.0) || !std::isfinite(proposal_sd_log_alpha)) {
        throw std::invalid_argument("proposal_sd_log_alpha must be positive");
    }
    if (!(proposal_sd_log_phi > 0.0) || !std::isfinite(proposal_sd_log_phi)) {
        throw std::invalid_argument("proposal_sd_log_phi must be positive");
    }
}

std::vector<double> Chain::phi() const {
    std::vector<double> v;
    v.reserve(draws.size());
    for (const auto& d : draws) v.push_back(d.phi());
    return v;
}

std::vector<double> Chain::mu() const {
    std::vector<double> v;
    v.reserve(draws.size());
    for (const auto& d : draws) v.push_back(d.mu());
    return v;
}

std::vector<double> Chain::alpha() const {
    std::vector<double> v;
    v.reserve(draws.size());
    for (const auto& d : draws) v.push_back(d.alpha());
    return v;
}

Params auto_init(const Dataset& data) { return Params(1.0, 1.0 / data.mean(), 1.0); }

Chain run_chain(const Dataset& data, const McmcConfig& config, const std::optional<Params>& init,
                const Restriction& restriction) {
    config.validate();
    Params start = init.value_or(auto_init(data));
    if (restriction.fixed_phi) start = Params(*restriction.fixed_phi, start.mu(), start.alpha());
    if (restriction.fixed_alpha) start = Params(start.phi(), start.mu(), *restriction.fixed_alpha);
    if (!std::isfinite(log_posterior(start, data))) {
        throw std::invalid_argument("run_chain: log posterior is not finite at the initial value");
    }

    RandomSource rng(config.seed);
    double alpha = start.alpha();
    double phi = start.phi();
    double mu = start.mu();

    Walker wa{std::log(config.proposal_sd_log_alpha)};
    Walker wp{std::log(config.proposal_sd_log_phi)};
    const auto target_alpha = [&](double a) { return log_cond_alpha(a, phi, data); };
    const auto target_phi = [&](double f) { return log_cond_phi(f, alpha, data); };

    Chain chain;
    chain.config = config;
    chain.draws.reserve(static_cast<std::size_t>(config.stored_draws()));
    chain.iteration.reserve(static_cast<std::size_t>(config.stored_draws()));

    for (int j = 1; j <= config.iterations; ++j) {
        const bool burning = j <= config.burn_in;
        const bool adapt = burning && config.adapt_during_burnin;
        if (!restriction.fixed_alpha) {
            double cur = target_alpha(alpha) + std::log(alpha);
            alpha = mh_step(alpha, cur, wa, adapt, j - 1, target_alpha, rng, !burning);
        }
        if (!restriction.fixed_phi) {
            double cur = target_phi(phi) + std::log(phi);
            phi = mh_step(phi, cur, wp, adapt, j - 1, target_phi, rng, !burning);
        }
        mu = draw_mu(alpha, phi, data, rng);
        if (!(mu > 0.0) || !std::isfinite(mu)) {
            throw std::runtime_error("run_chain: mu draw left the representable range at iteration " +
                                     std::to_string(j));
        }
        if (!burning && (j - config.burn_in) % config.thin == 0) {
            chain.draws.emplace_back(phi, mu, alpha);
            chain.iteration.push_back(j);
        }
    }

    const auto rate = [](const Walker& w, bool fixed) {
        if (fixed) return std::numeric_limits<double>::quiet_NaN();
        return w.proposed > 0 ? static_cast<double>(w.accepted) / static_cast<double>(w.proposed) : 0.0;
    };
    chain.acceptance_alpha = rate(wa, restriction.fixed_alpha.has_value());
    chain.acceptance_phi = rate(wp, restriction.fixed_phi.has_value());
    chain.final_sd_log_alpha = std::exp(wa.log_sd);
    chain.final_sd_log_phi = std::exp(wp.log_sd);
    return chain;
}

std::vector<Chain> run_chains(const Dataset& data, const McmcConfig& config, int k, int threads) {
    if (k < 1) throw std::invalid_argument("run_chains: k must be at least 1");
    config.validate();
    std::vector<Chain> out(static_cast<std::size_t>(k));
    std::vector<std::exception_ptr> errors(out.size());
    const auto work = [&](std::size_t i) {
        try {
            McmcConfig c = config;
            c.seed = derive_seed(config.seed, i);
            out[i] = run_chain(data, c);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const int nthreads = std::max(1, std::min(threads, k));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < out.size(); ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = static_cast<std::size_t>(t); i < out.size();
                     i += static_cast<std::size_t>(nthreads)) {
                    work(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

void write_chain_csv(std::ostream& out, const Chain& chain) {
    const auto& c = chain.config;
    out << "# ggbayes chain\n";
    out << "# iterations=" << c.iterations << "\n";
    out << "# burn_in=" << c.burn_in << "\n";
    out << "# thin=" << c.thin << "\n";
    out << "# proposal_sd_log_alpha=" << fmt17(c.proposal_sd_log_alpha) << "\n";
    out << "# proposal_sd_log_phi=" << fmt17(c.proposal_sd_log_phi) << "\n";
    out << "# seed=" << c.seed << "\n";
    out << "# adapt_during_burnin=" << (c.adapt_during_burnin ? 1 : 0) << "\n";
    out << "# acceptance_alpha=" << fmt17(chain.acceptance_alpha) << "\n";
    out << "# acceptance_phi=" << fmt17(chain.acceptance_phi) << "\n";
    out << "# final_sd_log_alpha=" << fmt17(chain.final_sd_log_alpha) << "\n";
    out << "# final_sd_log_phi=" << fmt17(chain.final_sd_log_phi) << "\n";
    out << "iteration,phi,mu,alpha\n";
    for (std::size_t i = 0; i < chain.draws.size(); ++i) {
        const auto& d = chain.draws[i];
        out << chain.iteration[i] << ',' << fmt17(d.phi()) << ',' << fmt17(d.mu()) << ','
            << fmt17(d.alpha()) << '\n';
    }
}

Chain read_chain_csv(std::istream& in) {
    Chain chain;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 1);
            auto& c = chain.config;
            if (key == "iterations") c.iterations = std::stoi(val);
            else if (key == "burn_in") c.burn_in = std::stoi(val);
            else if (key == "thin") c.thin = std::stoi(val);
            else if (key == "proposal_sd_log_alpha") c.proposal_sd_log_alpha = parse_double(val, lineno);
            else if (key == "proposal_sd_log_phi") c.proposal_sd_log_phi = parse_double(val, lineno);
            else if (key == "seed") c.seed = std::stoull(val);
            else if (key == "adapt_during_burnin") c.adapt_during_burnin = val == "1";
            else if (key == "acceptance_alpha") chain.acceptance_alpha = parse_double(val, lineno);
            else if (key == "acceptance_phi") chain.acceptance_phi = parse_double(val, lineno);
            else if (key == "final_sd_log_alpha") chain.final_sd_log_alpha = parse_double(val, lineno);
            else if (key == "final_sd_log_phi") chain.final_sd_log_phi = parse_double(val, lineno);
            continue;
        }
        if (!header_seen) {
            if (line != "iteration,phi,mu,alpha") {
                throw std::runtime_error("chain CSV line " + std::to_string(lineno) +
                                         ": expected header iteration,phi,mu,alpha");
            }
            header_seen = true;
            continue;
        }
        std::array<std::string_view, 4> f;
        std::string_view rest(line);
        for (std::size_t i = 0; i < 4; ++i) {
            const auto comma = rest.find(',');
            if ((comma == std::string_view::npos) != (i == 3)) {
                throw std::runtime_error("chain CSV line " + std::to_string(lineno) + ": expected 4 fields");
            }
            f[i] = rest.substr(0, comma);
            if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
        }
        int it = 0;
        const auto r = std::from_chars(f[0].data(), f[0].data() + f[0].size(), it);
        if (r.ec != std::errc() || r.ptr != f[0].data() + f[0].size()) {
            throw std::runtime_error("chain CSV line " + std::to_string(lineno) + ": bad iteration");
        }
        chain.iteration.push_back(it);
        chain.draws.emplace_back(parse_double(f[1], lineno), parse_double(f[2], lineno),
                                 parse_double(f[3], lineno));
    }
    if (!header_seen) throw std::runtime_error("chain CSV: missing header");
    return chain;
}

}  // namespace ggbayes
