#include "ggbayes/priors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ggbayes/specfun.hpp"

namespace ggbayes {

namespace {

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error(std::string(what) + " must be positive and finite");
    }
}

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Power of alpha left after mu is integrated out: likelihood alpha^n, the
// prior's alpha factor, and the 1/alpha from the mu integral.
double alpha_exponent(PriorSpec spec, double n, double alpha) {
    switch (spec) {
        case PriorSpec::AlphaInterest: return n;
        case PriorSpec::PhiInterest:
        case PriorSpec::MuInterest:
        case PriorSpec::OrderedTheta: return n - 2.0;
        case PriorSpec::ModifiedReference: return n - 0.5 - 2.0 * alpha / (1.0 + alpha);
    }
    throw std::logic_error("alpha_exponent: unknown prior");
}

double phi_factor(PriorSpec spec, double phi) {
    if (spec == PriorSpec::PhiInterest) return phi_interest_log_factor(phi);
    return 0.5 * std::log(trigamma(phi));
}

}  // namespace

PriorSpec parse_prior_spec(std::string_view name) {
    if (name == "alpha") return PriorSpec::AlphaInterest;
    if (name == "phi") return PriorSpec::PhiInterest;
    if (name == "mu") return PriorSpec::MuInterest;
    if (name == "ordered") return PriorSpec::OrderedTheta;
    if (name == "modified") return PriorSpec::ModifiedReference;
    throw std::invalid_argument("unknown prior '" + std::string(name) +
                                "' (expected alpha, phi, mu, ordered or modified)");
}

std::string_view to_string(PriorSpec spec) {
    switch (spec) {
        case PriorSpec::AlphaInterest: return "alpha";
        case PriorSpec::PhiInterest: return "phi";
        case PriorSpec::MuInterest: return "mu";
        case PriorSpec::OrderedTheta: return "ordered";
        case PriorSpec::ModifiedReference: return "modified";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Converging: return "converging";
        case Verdict::Diverging: return "diverging";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

double phi_interest_log_factor(double phi) {
    require_positive(phi, "phi");
    const double t1 = trigamma(phi);
    const double num = phi + phi * phi * t1 - 1.0;
    const double den = phi * phi * t1 * t1 - t1 - 1.0;
    const double radicand = num / den;
    if (!(radicand > 0.0) || !std::isfinite(radicand)) {
        throw std::domain_error("phi prior: radicand (phi + phi^2 psi' - 1)/(phi^2 psi'^2 - psi' - 1) is " +
                                std::to_string(radicand) + " at phi=" + std::to_string(phi));
    }
    return 0.5 * std::log(radicand);
}

double log_prior(PriorSpec spec, const Params& p) {
    const double la = std::log(p.alpha());
    const double lm = std::log(p.mu());
    const double half_log_t1 = 0.5 * std::log(trigamma(p.phi()));
    switch (spec) {
        case PriorSpec::AlphaInterest: return la + half_log_t1 - lm;
        case PriorSpec::PhiInterest: return phi_interest_log_factor(p.phi()) - la - lm;
        case PriorSpec::MuInterest: return lm + half_log_t1 - la;
        case PriorSpec::OrderedTheta: return half_log_t1 - la - lm;
        case PriorSpec::ModifiedReference:
            return half_log_t1 + modified_alpha_log_density(p.alpha()) - lm;
    }
    throw std::logic_error("log_prior: unknown prior");
}

double modified_alpha_log_density(double alpha) {
    require_positive(alpha, "alpha");
    return (0.5 - 2.0 * alpha / (1.0 + alpha)) * std::log(alpha);
}

double modified_alpha_normalizer() {
    quad::Options opts;
    opts.rel_tol = 1e-12;
    opts.max_panels = 20000;
    opts.throw_on_budget = true;
    return quad::integrate_half_line(
               [](double a) { return a > 0.0 ? std::exp(modified_alpha_log_density(a)) : 0.0; },
               opts)
        .value;
}

double q_stat(double alpha, const Dataset& data) {
    require_positive(alpha, "alpha");
    return data.log_sum_pow(alpha) - alpha * data.sum_log() / static_cast<double>(data.size());
}

double p_stat(double alpha, const Dataset& data) {
    return q_stat(alpha, data) - std::log(static_cast<double>(data.size()));
}

double marginal_mu_log_integrand(PriorSpec spec, const Dataset& data, double alpha, double phi) {
    require_positive(alpha, "alpha");
    require_positive(phi, "phi");
    const double n = static_cast<double>(data.size());
    const double kappa = spec == PriorSpec::MuInterest ? n * phi + 2.0 / alpha : n * phi;
    return alpha_exponent(spec, n, alpha) * std::log(alpha) + phi_factor(spec, phi) +
           ln_gamma(kappa) - n * ln_gamma(phi) + (alpha * phi - 1.0) * data.sum_log() -
           kappa * data.log_sum_pow(alpha);
}

ProprietyEvidence propriety_evidence(PriorSpec spec, const Dataset& data, int levels,
                                     const ProprietyOptions& options) {
    if (levels < 3) throw std::invalid_argument("propriety_evidence: levels must be at least 3");
    if (!data.has_distinct_values()) {
        throw std::invalid_argument("propriety_evidence: data needs at least two distinct values");
    }

    const double n = static_cast<double>(data.size());
    // Column in (u, v) = (log alpha, log phi); the Jacobian adds u + v.
    const quad::LogColumn column = [&](double u, std::span<const double> vs, std::span<double> out) {
        const double alpha = std::exp(u);
        const double L = data.log_sum_pow(alpha);
        const double a_term = alpha_exponent(spec, n, alpha) * u + u;
        for (std::size_t j = 0; j < vs.size(); ++j) {
            const double phi = std::exp(vs[j]);
            const double kappa = spec == PriorSpec::MuInterest ? n * phi + 2.0 / alpha : n * phi;
            out[j] = a_term + vs[j] + phi_factor(spec, phi) + ln_gamma(kappa) - n * ln_gamma(phi) +
                     (alpha * phi - 1.0) * data.sum_log() - kappa * L;
        }
    };

    quad::Options qopts;
    qopts.rel_tol = options.rel_tol;
    qopts.max_panels = options.max_panels;

    ProprietyEvidence ev;
    ev.spec = spec;
    double peak = -std::numeric_limits<double>::infinity();
    int peak_level = 0;
    double cumulative = -std::numeric_limits<double>::infinity();
    const double ln2 = std::log(2.0);

    for (int k = 1; k <= levels; ++k) {
        const double h = k * ln2;
        const double g = (k - 1) * ln2;
        std::vector<quad::Box> pieces;
        if (k == 1) {
            pieces.push_back({-h, h, -h, h});
        } else {
            pieces.push_back({-h, h, -h, -g});
            pieces.push_back({-h, h, g, h});
            pieces.push_back({-h, -g, -g, g});
            pieces.push_back({g, h, -g, g});
        }
        double ring = -std::numeric_limits<double>::infinity();
        double ring_err = 0.0;
        int panels = 0;
        for (const auto& box : pieces) {
            quad::LogResult r;
            try {
                r = quad::integrate_log_2d(column, box, qopts, options.initial_panel);
            } catch (const std::domain_error& e) {
                throw std::domain_error(std::string(e.what()) + " inside box " + quad::to_string(box) +
                                        " (log alpha, log phi)");
            }
            if (r.peak_log > peak) {
                peak = r.peak_log;
                peak_level = k;
                ev.peak_alpha = std::exp(r.peak_x);
                ev.peak_phi = std::exp(r.peak_y);
            }
            if (std::isfinite(r.log_value)) {
                const double merged = log_add(ring, r.log_value);
                ring_err = ring_err * std::exp(ring - merged) + r.rel_error * std::exp(r.log_value - merged);
                ring = merged;
            }
            panels += r.panels;
        }
        const double previous = cumulative;
        cumulative = log_add(cumulative, ring);

        ProprietyLevel lv;
        lv.k = k;
        lv.lower = std::exp(-h);
        lv.upper = std::exp(h);
        lv.log_integral = cumulative;
        lv.integral = std::exp(cumulative);
        lv.log_ring = ring;
        lv.growth_ratio = k == 1 ? 0.0 : std::exp(cumulative - previous);
        lv.rel_increment = k == 1 ? 1.0 : std::exp(ring - cumulative);
        lv.rel_error = ring_err;
        lv.panels = panels;
        ev.levels.push_back(lv);
    }

    const auto& lv = ev.levels;
    ev.first_to_last = std::exp(lv.back().log_integral - lv.front().log_integral);
    ev.peak_in_outer_ring = peak_level == levels;

    bool all_growing = true;
    for (std::size_t i = 1; i < lv.size(); ++i) {
        all_growing = all_growing && lv[i].growth_ratio > options.growth_threshold;
    }
    bool plateau = lv.size() >= 4;
    for (std::size_t i = lv.size() - 3; plateau && i < lv.size(); ++i) {
        plateau = std::exp(lv[i].log_ring - lv[i - 1].log_ring) >= options.plateau_ratio;
    }

    if (lv.back().rel_increment < options.convergence_increment && !ev.peak_in_outer_ring) {
        ev.verdict = Verdict::Converging;
    } else if (all_growing || plateau) {
        ev.verdict = Verdict::Diverging;
    } else {
        ev.verdict = Verdict::Inconclusive;
    }
    return ev;
}

}  // namespace ggbayes
