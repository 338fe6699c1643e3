#include "ggbayes/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ggbayes {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIncGammaIter = 100000;

void require_positive(double x, const char* fn) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error(std::string(fn) + ": argument must be positive and finite, got " +
                                std::to_string(x));
    }
}

void require_inc_gamma_args(double s, double x, const char* fn) {
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw std::domain_error(std::string(fn) + ": shape must be positive, got " +
                                std::to_string(s));
    }
    if (!(x >= 0.0)) {
        throw std::domain_error(std::string(fn) + ": x must be non-negative, got " +
                                std::to_string(x));
    }
}

// Stirling series for log Gamma, accurate to ~1e-15 relative for x >= 15.
double ln_gamma_stirling(double x) {
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 / 12.0 -
               inv2 * (1.0 / 360.0 -
                       inv2 * (1.0 / 1260.0 -
                               inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0 - inv2 * 691.0 / 360360.0)))));
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

// exp(s log x - x - lnGamma(s)), the common prefactor of both series.
double log_inc_gamma_prefactor(double s, double x) {
    return s * std::log(x) - x - ln_gamma(s);
}

double lower_series(double s, double x) {
    double ap = s;
    double term = 1.0 / s;
    double sum = term;
    for (int i = 0; i < kMaxIncGammaIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) {
            return sum * std::exp(log_inc_gamma_prefactor(s, x));
        }
    }
    throw std::runtime_error("reg_inc_gamma: series failed to converge");
}

double upper_continued_fraction(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIncGammaIter; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) {
            return h * std::exp(log_inc_gamma_prefactor(s, x));
        }
    }
    throw std::runtime_error("reg_inc_gamma: continued fraction failed to converge");
}

}  // namespace

double ln_gamma(double x) {
    require_positive(x, "ln_gamma");
    if (x >= 15.0) return ln_gamma_stirling(x);
    // Shift up with the recurrence Gamma(x + 1) = x Gamma(x).
    double shifted = x;
    double product = 1.0;
    while (shifted < 15.0) {
        product *= shifted;
        shifted += 1.0;
    }
    return ln_gamma_stirling(shifted) - std::log(product);
}

double digamma(double x) {
    require_positive(x, "digamma");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    const double tail =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    return result + std::log(x) - 0.5 / x - tail;
}

double trigamma(double x) {
    require_positive(x, "trigamma");
    double result = 0.0;
    while (x < 10.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // 1/x + 1/(2x^2) + sum B_2k / x^(2k+1)
    const double tail =
        inv * inv2 *
        (1.0 / 6.0 -
         inv2 * (1.0 / 30.0 -
                 inv2 * (1.0 / 42.0 -
                         inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0 - inv2 * (691.0 / 2730.0 - inv2 * 7.0 / 6.0))))));
    return result + inv + 0.5 * inv2 + tail;
}

double reg_inc_gamma_lower(double s, double x) {
    require_inc_gamma_args(s, x, "reg_inc_gamma_lower");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < s + 1.0) return lower_series(s, x);
    return 1.0 - upper_continued_fraction(s, x);
}

double reg_inc_gamma_upper(double s, double x) {
    require_inc_gamma_args(s, x, "reg_inc_gamma_upper");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < s + 1.0) return 1.0 - lower_series(s, x);
    return upper_continued_fraction(s, x);
}

}  // namespace ggbayes
