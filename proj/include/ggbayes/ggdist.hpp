#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ggbayes/random.hpp"

namespace ggbayes {

/// Parameter triple of the generalized gamma distribution,
///
///   f(t) = alpha / Gamma(phi) * mu^(alpha phi) * t^(alpha phi - 1) * exp(-(mu t)^alpha),
///
/// with shapes phi, alpha and rate mu (units 1/time). Construction validates
/// positivity, so a Params value is always usable.
class Params {
public:
    Params(double phi, double mu, double alpha);

    double phi() const { return phi_; }
    double mu() const { return mu_; }
    double alpha() const { return alpha_; }

    bool operator==(const Params&) const = default;

private:
    double phi_;
    double mu_;
    double alpha_;
};

/// Fisher information of one observation. Rows and columns are ordered
/// (alpha, mu, phi), which differs from the (phi, mu, alpha) field order of
/// Params; use the index constants rather than literals.
struct FisherMatrix {
    static constexpr std::size_t kAlpha = 0;
    static constexpr std::size_t kMu = 1;
    static constexpr std::size_t kPhi = 2;

    std::array<std::array<double, 3>, 3> m{};

    double operator()(std::size_t i, std::size_t j) const { return m[i][j]; }
};

double log_pdf(const Params& p, double t);
double pdf(const Params& p, double t);
double cdf(const Params& p, double t);
double survival(const Params& p, double t);

/// pdf / survival. Throws std::overflow_error when the survival underflows.
double hazard(const Params& p, double t);

double mean(const Params& p);
double variance(const Params& p);

/// n draws via T = G^(1/alpha) / mu with G ~ gamma(phi, 1).
std::vector<double> sample(const Params& p, std::size_t n, RandomSource& rng);

FisherMatrix fisher_info(const Params& p);

}  // namespace ggbayes
