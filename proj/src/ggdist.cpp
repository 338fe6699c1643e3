#include "ggbayes/ggdist.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ggbayes/specfun.hpp"

namespace ggbayes {

namespace {

const double kLogMax = std::log(std::numeric_limits<double>::max());

bool valid_positive(double x) { return x > 0.0 && std::isfinite(x); }

// (mu t)^alpha, evaluated in log space.
double scaled_power(const Params& p, double t) {
    return std::exp(p.alpha() * (std::log(p.mu()) + std::log(t)));
}

}  // namespace

Params::Params(double phi, double mu, double alpha) : phi_(phi), mu_(mu), alpha_(alpha) {
    if (!valid_positive(phi) || !valid_positive(mu) || !valid_positive(alpha)) {
        throw std::domain_error("Params: phi, mu and alpha must be positive and finite (got phi=" +
                                std::to_string(phi) + ", mu=" + std::to_string(mu) +
                                ", alpha=" + std::to_string(alpha) + ")");
    }
}

double log_pdf(const Params& p, double t) {
    if (!valid_positive(t)) throw std::domain_error("log_pdf: t must be positive");
    const double a = p.alpha();
    const double log_mut = std::log(p.mu()) + std::log(t);
    return std::log(a) - ln_gamma(p.phi()) + a * p.phi() * log_mut - std::log(t) -
           std::exp(a * log_mut);
}

double pdf(const Params& p, double t) { return std::exp(log_pdf(p, t)); }

double cdf(const Params& p, double t) {
    if (!(t >= 0.0)) throw std::domain_error("cdf: t must be non-negative");
    if (t == 0.0) return 0.0;
    return reg_inc_gamma_lower(p.phi(), scaled_power(p, t));
}

double survival(const Params& p, double t) {
    if (!(t >= 0.0)) throw std::domain_error("survival: t must be non-negative");
    if (t == 0.0) return 1.0;
    return reg_inc_gamma_upper(p.phi(), scaled_power(p, t));
}

double hazard(const Params& p, double t) {
    if (!valid_positive(t)) throw std::domain_error("hazard: t must be positive");
    const double s = survival(p, t);
    if (!(s > 0.0)) {
        throw std::overflow_error("hazard: survival underflows at t=" + std::to_string(t));
    }
    return std::exp(log_pdf(p, t) - std::log(s));
}

double mean(const Params& p) {
    const double d1 = ln_gamma(p.phi() + 1.0 / p.alpha()) - ln_gamma(p.phi());
    const double log_mean = d1 - std::log(p.mu());
    if (log_mean > kLogMax) throw std::overflow_error("mean: Gamma ratio overflows");
    return std::exp(log_mean);
}

double variance(const Params& p) {
    const double lg = ln_gamma(p.phi());
    const double d1 = ln_gamma(p.phi() + 1.0 / p.alpha()) - lg;
    const double d2 = ln_gamma(p.phi() + 2.0 / p.alpha()) - lg;
    // V = exp(2 d1) (exp(d2 - 2 d1) - 1) / mu^2; d2 - 2 d1 > 0 by log-convexity.
    const double log_scale = 2.0 * (d1 - std::log(p.mu()));
    const double excess = std::expm1(d2 - 2.0 * d1);
    if (log_scale + std::log(excess) > kLogMax) {
        throw std::overflow_error("variance: Gamma ratio overflows");
    }
    return std::exp(log_scale) * excess;
}

std::vector<double> sample(const Params& p, std::size_t n, RandomSource& rng) {
    if (n == 0) throw std::invalid_argument("sample: n must be at least 1");
    std::vector<double> out(n);
    const double inv_alpha = 1.0 / p.alpha();
    const double log_mu = std::log(p.mu());
    for (auto& t : out) {
        t = std::exp(log_gamma_draw(p.phi(), 1.0, rng) * inv_alpha - log_mu);
    }
    return out;
}

FisherMatrix fisher_info(const Params& p) {
    const double phi = p.phi();
    const double mu = p.mu();
    const double a = p.alpha();
    const double psi = digamma(phi);
    const double psi1 = trigamma(phi);

    constexpr auto A = FisherMatrix::kAlpha;
    constexpr auto M = FisherMatrix::kMu;
    constexpr auto F = FisherMatrix::kPhi;

    FisherMatrix I;
    I.m[A][A] = (1.0 + 2.0 * psi + phi * psi1 + phi * psi * psi) / (a * a);
    // The mu cross terms carry the sign obtained by differentiating the
    // log-density in its rate parameterization: E[-d2/dalpha dmu] = (1 + phi psi)/mu
    // and E[-d2/dmu dphi] = -alpha/mu.
    I.m[A][M] = I.m[M][A] = (1.0 + phi * psi) / mu;
    I.m[A][F] = I.m[F][A] = -psi / a;
    I.m[M][M] = phi * a * a / (mu * mu);
    I.m[M][F] = I.m[F][M] = -a / mu;
    I.m[F][F] = psi1;
    return I;
}

}  // namespace ggbayes
