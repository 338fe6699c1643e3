#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "doctest.h"
#include "ggbayes/ggdist.hpp"
#include "oracles.hpp"

using namespace ggbayes;

namespace {

constexpr double kEuler = 0.57721566490153286061;
const double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;

double weibull_log_density(double t, double alpha, double mu) {
    return std::log(alpha * mu) + (alpha - 1.0) * std::log(mu * t) - std::pow(mu * t, alpha);
}

double gamma_log_density(double t, double phi, double rate) {
    return phi * std::log(rate) + (phi - 1.0) * std::log(t) - rate * t - std::lgamma(phi);
}

// Score vector (d/dalpha, d/dmu, d/dphi) of log f, derived by hand.
std::array<double, 3> score(double phi, double mu, double alpha, double t) {
    const double lz = std::log(mu * t);
    const double za = std::exp(alpha * lz);
    return {1.0 / alpha + phi * lz - za * lz, alpha / mu * (phi - za), -boost::math::digamma(phi) + alpha * lz};
}

const std::vector<Params> kGrid = {Params(0.4, 1.5, 5.0), Params(1.0, 1.0, 1.0), Params(2.5, 0.3, 0.7),
                                   Params(0.08, 0.003, 10.5), Params(6.0, 2.0, 2.0)};

}  // namespace

TEST_CASE("Params validation") {
    CHECK_THROWS_AS(Params(0.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(Params(1.0, -1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(Params(1.0, 1.0, std::numeric_limits<double>::infinity()), std::domain_error);
    const Params p(0.4, 1.5, 5.0);
    CHECK(p.phi() == 0.4);
    CHECK(p.mu() == 1.5);
    CHECK(p.alpha() == 5.0);
}

TEST_CASE("log_pdf examples") {
    CHECK(std::fabs(log_pdf(Params(1, 1, 1), 1.0) + 1.0) < 1e-12);
    for (const double t : {0.01, 0.5, 2.0, 40.0}) {
        for (const auto& [a, m] : {std::pair{0.6, 2.0}, {2.0, 0.5}, {10.5, 0.003}}) {
            CHECK(std::fabs(log_pdf(Params(1.0, m, a), t) - weibull_log_density(t, a, m)) < 1e-10);
        }
    }
    const Params p(0.4, 1.5, 5.0);
    const double total = oracle::integrate_to_inf([&](double t) { return t > 0 ? pdf(p, t) : 0.0; });
    CHECK(std::fabs(total - 1.0) < 1e-8);
    CHECK_THROWS_AS(log_pdf(p, 0.0), std::domain_error);
    CHECK_THROWS_AS(log_pdf(p, -1.0), std::domain_error);
    // Finite where exp((mu t)^alpha) would overflow.
    CHECK(std::isfinite(log_pdf(Params(0.08, 0.003, 10.5), 2e4)));
}

TEST_CASE("sub-model reductions") {
    for (const double t : {0.05, 1.0, 3.0, 12.0}) {
        for (const auto& [phi, mu] : {std::pair{0.4, 1.5}, {3.0, 2.0}, {20.0, 0.1}}) {
            CHECK(std::fabs(log_pdf(Params(phi, mu, 1.0), t) - gamma_log_density(t, phi, mu)) < 1e-10);
        }
    }
}

TEST_CASE("cdf examples") {
    CHECK(std::fabs(cdf(Params(1, 1, 1), 2.0) - (1.0 - std::exp(-2.0))) < 1e-15);
    for (const auto& p : kGrid) CHECK(cdf(p, 0.0) == 0.0);
    const Params p(0.4, 1.5, 5.0);
    const double ref = oracle::integrate([&](double t) { return t > 0 ? pdf(p, t) : 0.0; }, 0.0, 0.7);
    CHECK(std::fabs(cdf(p, 0.7) - ref) < 1e-8);
    CHECK_THROWS_AS(cdf(p, -0.1), std::domain_error);
}

TEST_CASE("cdf derivative is the density") {
    for (const auto& p : kGrid) {
        const double scale = mean(p);
        for (const double u : {0.3, 0.8, 1.0, 1.7}) {
            const double t = u * scale;
            const double h = 1e-5 * t;
            const double fd = (cdf(p, t + h) - cdf(p, t - h)) / (2 * h);
            CHECK_MESSAGE(std::fabs(fd - pdf(p, t)) <= 1e-6 * std::max(1.0, pdf(p, t)),
                          "phi=" << p.phi() << " t=" << t);
        }
    }
}

TEST_CASE("hazard examples") {
    for (const double t : {0.1, 1.0, 5.0}) {
        CHECK(std::fabs(hazard(Params(1.0, 0.7, 1.0), t) - 0.7) < 1e-12);
        CHECK(std::fabs(hazard(Params(1.0, 1.0, 2.0), t) - 2.0 * t) < 1e-10 * std::max(1.0, t));
    }
    const Params p(0.4, 1.5, 5.0);
    for (const double t : {0.2, 0.5, 0.7, 0.9}) {
        const double s = 1.0 - oracle::integrate([&](double x) { return x > 0 ? pdf(p, x) : 0.0; }, 0.0, t, 1e-14);
        CHECK(std::fabs(hazard(p, t) - pdf(p, t) / s) < 1e-7 * hazard(p, t));
    }
    CHECK_THROWS_AS(hazard(p, 50.0), std::overflow_error);
    CHECK_THROWS_AS(hazard(p, 0.0), std::domain_error);
}

TEST_CASE("hazard times survival is the density") {
    for (const auto& p : kGrid) {
        for (const double u : {0.1, 0.5, 1.0, 2.0, 4.0}) {
            const double t = u * mean(p);
            const double s = survival(p, t);
            if (s <= 1e-12) continue;
            CHECK(std::fabs(hazard(p, t) * s - pdf(p, t)) <= 1e-10 * std::max(1.0, pdf(p, t)));
        }
    }
}

TEST_CASE("mean and variance closed forms") {
    CHECK(std::fabs(mean(Params(1, 1, 1)) - 1.0) < 1e-14);
    CHECK(std::fabs(variance(Params(1, 1, 1)) - 1.0) < 1e-12);
    for (const auto& [phi, mu] : {std::pair{0.4, 1.5}, {3.0, 2.0}, {50.0, 0.2}}) {
        CHECK(std::fabs(mean(Params(phi, mu, 1.0)) - phi / mu) < 1e-12 * phi / mu);
        CHECK(std::fabs(variance(Params(phi, mu, 1.0)) - phi / (mu * mu)) < 1e-10 * phi / (mu * mu));
    }
    for (const auto& p : kGrid) CHECK(variance(p) > 0.0);
    CHECK_THROWS_AS(mean(Params(1e-3, 1.0, 1e-3)), std::overflow_error);
    CHECK_THROWS_AS(variance(Params(1e-3, 1.0, 1e-3)), std::overflow_error);
}

TEST_CASE("sample moments, Params(0.4, 1.5, 5)") {
    const Params p(0.4, 1.5, 5.0);
    RandomSource rng(314159);
    const auto x = sample(p, 1000000, rng);
    for (const double v : x) REQUIRE(v > 0.0);
    const double se = std::sqrt(oracle::variance(x) / static_cast<double>(x.size()));
    CHECK(std::fabs(oracle::mean(x) - mean(p)) < 4.0 * se);
    CHECK(std::fabs(oracle::variance(x) - variance(p)) < 4.0 * oracle::variance_se(x));
}

TEST_CASE("sample KS against the exponential") {
    RandomSource rng(2718);
    const auto x = sample(Params(1, 1, 1), 100000, rng);
    const double d = oracle::ks_statistic(x, [](double t) { return -std::expm1(-t); });
    CHECK(oracle::ks_pvalue(d, x.size()) > 0.01);
}

TEST_CASE("empirical cdf at the median") {
    const Params p(0.4, 1.5, 5.0);
    const double median = std::pow(boost::math::gamma_p_inv(0.4, 0.5), 1.0 / 5.0) / 1.5;
    CHECK(std::fabs(cdf(p, median) - 0.5) < 1e-12);
    RandomSource rng(99);
    const std::size_t n = 200000;
    const auto x = sample(p, n, rng);
    const double frac = static_cast<double>(std::count_if(x.begin(), x.end(), [&](double v) { return v <= median; })) /
                        static_cast<double>(n);
    CHECK(std::fabs(frac - 0.5) < 3.0 * std::sqrt(0.25 / static_cast<double>(n)));
    CHECK_THROWS_AS(sample(p, 0, rng), std::invalid_argument);
}

TEST_CASE("fisher_info at Params(1,1,1)") {
    const auto I = fisher_info(Params(1, 1, 1));
    using F = FisherMatrix;
    CHECK(std::fabs(I(F::kAlpha, F::kAlpha) - (1.0 - 2.0 * kEuler + kZeta2 + kEuler * kEuler)) < 1e-10);
    CHECK(std::fabs(I(F::kAlpha, F::kAlpha) - 1.8237) < 1e-4);
    CHECK(std::fabs(I(F::kAlpha, F::kMu) - (1.0 - kEuler)) < 1e-10);
    CHECK(std::fabs(I(F::kAlpha, F::kPhi) - kEuler) < 1e-10);
    CHECK(std::fabs(I(F::kMu, F::kMu) - 1.0) < 1e-14);
    CHECK(std::fabs(I(F::kMu, F::kPhi) + 1.0) < 1e-14);
    CHECK(std::fabs(I(F::kPhi, F::kPhi) - kZeta2) < 1e-10);
}

TEST_CASE("fisher_info scaling and symmetry") {
    for (const auto& p : kGrid) {
        const auto I = fisher_info(p);
        CHECK(std::fabs(I(FisherMatrix::kMu, FisherMatrix::kMu) * p.mu() * p.mu() - p.phi() * p.alpha() * p.alpha()) <=
              1e-12 * p.phi() * p.alpha() * p.alpha());
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(I(i, i) > 0.0);
            for (std::size_t j = 0; j < 3; ++j) CHECK(I(i, j) == I(j, i));
        }
    }
}

TEST_CASE("fisher_info is positive definite") {
    for (double phi = 0.05; phi < 100.0; phi *= 2.3) {
        for (double alpha = 0.2; alpha < 50.0; alpha *= 3.1) {
            const auto I = fisher_info(Params(phi, 1.7, alpha));
            const auto& m = I.m;
            const double m1 = m[0][0];
            const double m2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            const double m3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                              m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                              m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            CHECK(m1 > 0.0);
            CHECK(m2 > 0.0);
            CHECK_MESSAGE(m3 > 0.0, "phi=" << phi << " alpha=" << alpha);
        }
    }
}

TEST_CASE("fisher_info equals the expected score outer product") {
    // E[s s^T] by quadrature over t, with the hand-derived score.
    for (const auto& p : {Params(0.4, 1.5, 5.0), Params(1, 1, 1), Params(3.0, 0.5, 0.8)}) {
        const auto I = fisher_info(p);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = i; j < 3; ++j) {
                const double ref = oracle::integrate_to_inf(
                    [&](double t) {
                        if (!(t > 0)) return 0.0;
                        const double f = pdf(p, t);
                        if (f == 0.0) return 0.0;
                        const auto s = score(p.phi(), p.mu(), p.alpha(), t);
                        return s[i] * s[j] * f;
                    },
                    0.0, 1e-13);
                CHECK_MESSAGE(std::fabs(I(i, j) - ref) <= 1e-7 * std::max(1.0, std::fabs(ref)),
                              "i=" << i << " j=" << j << " phi=" << p.phi() << " got " << I(i, j) << " ref " << ref);
            }
        }
    }
}
