#include "ggbayes/random.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ggbayes {

double RandomSource::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
}

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = mix_seed(parent);
    h = mix_seed(h ^ a);
    h = mix_seed(h ^ b);
    return mix_seed(h ^ c);
}

namespace {

void check_gamma_args(double shape, double rate) {
    if (!(shape > 0.0) || !std::isfinite(shape) || !(rate > 0.0) || !std::isfinite(rate)) {
        throw std::domain_error("gamma_draw: shape and rate must be positive, got shape=" +
                                std::to_string(shape) + " rate=" + std::to_string(rate));
    }
}

// Marsaglia & Tsang (2000), shape >= 1, unit rate.
double marsaglia_tsang(double shape, RandomSource& rng) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace

double log_gamma_draw(double shape, double rate, RandomSource& rng) {
    check_gamma_args(shape, rate);
    if (shape >= 1.0) return std::log(marsaglia_tsang(shape, rng)) - std::log(rate);
    const double boosted = marsaglia_tsang(shape + 1.0, rng);
    return std::log(boosted) + std::log(rng.uniform()) / shape - std::log(rate);
}

double gamma_draw(double shape, double rate, RandomSource& rng) {
    return std::exp(log_gamma_draw(shape, rate, rng));
}

}  // namespace ggbayes
