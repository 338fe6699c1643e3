#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ggbayes/data.hpp"
#include "ggbayes/diagnostics.hpp"
#include "oracles.hpp"

using namespace ggbayes;

namespace {

// Brute-force shortest interval holding at least `mass` of the samples.
Interval brute_hpd(std::vector<double> x, double mass) {
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    Interval best{x.front(), x.back()};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (static_cast<double>(j - i + 1) + 1e-9 < mass * static_cast<double>(n)) continue;
            if (x[j] - x[i] < best.high - best.low) best = {x[i], x[j]};
            break;
        }
    }
    return best;
}

McmcConfig config(std::uint64_t seed) {
    McmcConfig c;
    c.iterations = 11000;
    c.burn_in = 1000;
    c.thin = 10;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("geweke_z special cases") {
    std::vector<double> flat(200, 3.0);
    CHECK(geweke_z(flat) == 0.0);
    std::vector<double> shifted(1000);
    RandomSource rng(1);
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = rng.normal() + (i < 100 ? 5.0 : 0.0);
    CHECK(std::fabs(geweke_z(shifted)) > 10.0);
    CHECK_THROWS_AS(geweke_z(std::vector<double>(99, 1.0)), std::length_error);
    CHECK_THROWS_AS(geweke_z(flat, 0.6, 0.5), std::invalid_argument);
}

TEST_CASE("geweke_z matches a hand computation") {
    // 100 values; first 10 and last 50, batch sizes floor(sqrt(m)) batches.
    std::vector<double> x(100);
    for (int i = 0; i < 100; ++i) x[i] = std::sin(0.7 * i) + 0.01 * i;
    const auto seg_stats = [&](int from, int m) {
        const int b = std::max(2, static_cast<int>(std::floor(std::sqrt(static_cast<double>(m)))));
        const int size = m / b;
        double mean = 0.0;
        for (int i = 0; i < m; ++i) mean += x[from + i];
        mean /= m;
        std::vector<double> bm(b, 0.0);
        for (int k = 0; k < b; ++k) {
            for (int i = 0; i < size; ++i) bm[k] += x[from + k * size + i];
            bm[k] /= size;
        }
        double mb = 0.0;
        for (const double v : bm) mb += v;
        mb /= b;
        double var = 0.0;
        for (const double v : bm) var += (v - mb) * (v - mb);
        var /= (b - 1);
        return std::pair{mean, size * var / m};
    };
    const auto [ma, va] = seg_stats(0, 10);
    const auto [mb, vb] = seg_stats(50, 50);
    CHECK(std::fabs(geweke_z(x) - (ma - mb) / std::sqrt(va + vb)) < 1e-12);
}

TEST_CASE("geweke_z calibration on white noise") {
    // Under stationarity |z| < 1.96 about 95% of the time. The bound allows
    // three binomial standard errors for 1000 replications.
    RandomSource rng(2024);
    const int reps = 1000;
    int pass = 0;
    std::vector<double> x(10000);
    for (int r = 0; r < reps; ++r) {
        for (auto& v : x) v = rng.normal();
        pass += std::fabs(geweke_z(x)) < 1.96;
    }
    const double rate = static_cast<double>(pass) / reps;
    const double se = std::sqrt(0.95 * 0.05 / reps);
    MESSAGE("pass rate " << rate);
    CHECK(rate >= 0.95 - 3.0 * se);
    CHECK(rate <= 0.95 + 3.0 * se);
}

TEST_CASE("geweke_z is affine invariant") {
    RandomSource rng(12);
    std::vector<double> x(500), y(500);
    double prev = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        prev = 0.8 * prev + rng.normal();
        x[i] = prev;
        y[i] = 3.5 * prev - 7.0;
    }
    CHECK(std::fabs(geweke_z(x) - geweke_z(y)) < 1e-10);
}

TEST_CASE("hpd_interval on normal and exponential draws") {
    RandomSource rng(13);
    std::vector<double> z(100000), e(100000);
    for (auto& v : z) v = rng.normal();
    for (auto& v : e) v = -std::log(rng.uniform());
    const auto iz = hpd_interval(z);
    CHECK(std::fabs(iz.low + 1.959964) < 0.05);
    CHECK(std::fabs(iz.high - 1.959964) < 0.05);
    const auto ie = hpd_interval(e);
    CHECK(ie.low < 0.01);
    std::vector<double> s = e;
    std::sort(s.begin(), s.end());
    const double equal_tail = s[97499] - s[2500];
    CHECK(ie.high - ie.low < equal_tail);
}

TEST_CASE("hpd_interval on a uniform grid") {
    std::vector<double> g(1001);
    for (int i = 0; i <= 1000; ++i) g[i] = i / 1000.0;
    const auto iv = hpd_interval(g, 0.95);
    CHECK(std::fabs(iv.high - iv.low - 0.95) < 2e-3);
    CHECK(iv.low == 0.0);
}

TEST_CASE("hpd_interval examples") {
    std::vector<double> x(100);
    for (int i = 0; i < 100; ++i) x[i] = i + 1.0;
    const auto iv = hpd_interval(x, 0.95);
    CHECK(iv.low == 1.0);
    CHECK(iv.high == 95.0);
    std::vector<double> skew;
    for (int i = 0; i < 80; ++i) skew.push_back(0.01 * i);
    for (int i = 0; i < 20; ++i) skew.push_back(10.0 + i);
    const auto s = hpd_interval(skew, 0.8);
    CHECK(s.low == 0.0);
    CHECK(s.high == skew[79]);
    CHECK(hpd_interval(std::vector<double>(100, 2.0)).low == 2.0);
    CHECK_THROWS_AS(hpd_interval(std::vector<double>(99, 2.0)), std::length_error);
}

TEST_CASE("hpd_interval is the shortest covering window") {
    RandomSource rng(8);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 100 + static_cast<std::size_t>(rng.uniform() * 60);
        std::vector<double> x(n);
        for (auto& v : x) v = std::exp(rng.normal());
        for (const double mass : {0.5, 0.9, 0.95}) {
            const auto got = hpd_interval(x, mass);
            const auto ref = brute_hpd(x, mass);
            CHECK(got.high - got.low == doctest::Approx(ref.high - ref.low).epsilon(1e-12));
            const auto inside = std::count_if(x.begin(), x.end(), [&](double v) { return v >= got.low && v <= got.high; });
            CHECK(static_cast<double>(inside) >= mass * static_cast<double>(n) - 1e-9);
            // Never wider than the equal-tail window of the same size.
            std::vector<double> s = x;
            std::sort(s.begin(), s.end());
            const auto m = static_cast<std::size_t>(std::ceil(mass * static_cast<double>(n) - 1e-9));
            const std::size_t left = (n - m) / 2;
            CHECK(got.high - got.low <= s[left + m - 1] - s[left]);
        }
    }
}

TEST_CASE("autocorrelation examples") {
    std::vector<double> alt(100);
    for (int i = 0; i < 100; ++i) alt[i] = i % 2 == 0 ? 1.0 : -1.0;
    const auto r = autocorrelation(alt, 3);
    REQUIRE(r.size() == 4);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(std::fabs(r[1] + 0.99) < 1e-12);
    CHECK(std::fabs(r[2] - 0.98) < 1e-12);
    const auto flat = autocorrelation(std::vector<double>(40, 5.0), 4);
    CHECK(flat[0] == 1.0);
    for (int k = 1; k <= 4; ++k) CHECK(flat[k] == 0.0);
    CHECK_THROWS_AS(autocorrelation(alt, 25), std::invalid_argument);
}

TEST_CASE("autocorrelation of white noise stays inside the bands") {
    RandomSource rng(30);
    std::vector<double> x(10000);
    for (auto& v : x) v = rng.normal();
    const auto r = autocorrelation(x, 200);
    int outside = 0;
    for (int k = 1; k <= 200; ++k) outside += std::fabs(r[k]) >= 4.0 / std::sqrt(10000.0);
    CHECK(outside <= 2);
}

TEST_CASE("autocorrelation guards a spike series") {
    std::vector<double> x(100, 1.0);
    x[50] = 9.0;
    const auto r = autocorrelation(x, 10);
    for (const double v : r) CHECK(std::isfinite(v));
    CHECK(r[0] == 1.0);
}

TEST_CASE("autocorrelation of AR(1), coefficient 0.9") {
    RandomSource rng(32);
    std::vector<double> x(10000);
    double prev = 0.0;
    for (auto& v : x) prev = v = 0.9 * prev + rng.normal();
    CHECK(std::fabs(autocorrelation(x, 5)[1] - 0.9) < 0.05);
}

TEST_CASE("autocorrelation of an AR(1) series") {
    RandomSource rng(31);
    std::vector<double> x(200000);
    double prev = 0.0;
    for (auto& v : x) prev = v = 0.6 * prev + rng.normal();
    const auto r = autocorrelation(x, 3);
    for (int k = 1; k <= 3; ++k) CHECK(std::fabs(r[k] - std::pow(0.6, k)) < 0.01);
}

TEST_CASE("nelder_mead_max on the Rosenbrock function") {
    const auto f = [](std::span<const double> x) {
        return -(100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2));
    };
    const auto r = nelder_mead_max(f, {-1.2, 1.0});
    CHECK(r.converged);
    CHECK(std::fabs(r.x[0] - 1.0) < 1e-4);
    CHECK(std::fabs(r.x[1] - 1.0) < 1e-4);
    CHECK(r.value > -1e-8);
    CHECK_THROWS_AS(nelder_mead_max(f, {}), std::invalid_argument);
}

TEST_CASE("posterior mode dominates the chain") {
    const Dataset d = load_dataset("meeker");
    const auto chain = run_chain(d, config(1));
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : chain.draws) best = std::max(best, log_posterior(p, d));
    const auto m = posterior_mode(chain, d);
    CHECK(m.log_posterior >= best);
    CHECK(std::fabs(m.log_posterior - log_posterior(m.mode, d)) < 1e-9);
    MESSAGE("meeker mode phi=" << m.mode.phi() << " mu=" << m.mode.mu() << " alpha=" << m.mode.alpha()
                               << " lp=" << m.log_posterior);
}

TEST_CASE("posterior mode is a stationary point and start-independent") {
    RandomSource rng(606);
    const Params truth(0.4, 1.5, 5.0);
    const auto t = sample(truth, 300, rng);
    const Dataset d(t);
    const auto a = maximize_log_posterior(Params(1.0, 1.0, 1.0), d);
    const auto b = maximize_log_posterior(Params(0.2, 1.2, 8.0), d);
    const auto c = maximize_log_posterior(Params(2.0, 0.5, 2.0), d);
    CHECK(std::fabs(a.log_posterior - b.log_posterior) < 1e-6);
    CHECK(std::fabs(a.log_posterior - c.log_posterior) < 1e-6);
    CHECK(std::fabs(a.mode.alpha() / b.mode.alpha() - 1.0) < 1e-3);
    // Central differences of the log posterior in log coordinates vanish.
    const double x[3] = {a.mode.phi(), a.mode.mu(), a.mode.alpha()};
    for (int i = 0; i < 3; ++i) {
        const double h = 1e-5;
        double up[3] = {x[0], x[1], x[2]}, dn[3] = {x[0], x[1], x[2]};
        up[i] *= std::exp(h);
        dn[i] *= std::exp(-h);
        const double g = (log_posterior(Params(up[0], up[1], up[2]), d) - log_posterior(Params(dn[0], dn[1], dn[2]), d)) /
                         (2 * h);
        CHECK_MESSAGE(std::fabs(g) < 1e-3, "component " << i << " gradient " << g);
    }
}

TEST_CASE("multistart on the Meeker data") {
    const Dataset d = load_dataset("meeker");
    const Params starts[5] = {Params(1.0, 0.005, 1.0), Params(0.08, 0.003, 10.0), Params(0.3, 0.002, 3.0),
                              Params(2.0, 0.01, 0.8), Params(0.01, 0.003, 80.0)};
    double lo = 1e300, hi = -1e300;
    for (const auto& s : starts) {
        const auto m = maximize_log_posterior(s, d);
        MESSAGE("start alpha=" << s.alpha() << " -> lp " << m.log_posterior << " alpha " << m.mode.alpha());
        lo = std::min(lo, m.log_posterior);
        hi = std::max(hi, m.log_posterior);
    }
    CHECK(hi - lo < 0.5);
}

TEST_CASE("restricted mode holds the fixed parameter") {
    const Dataset d = load_dataset("meeker");
    Restriction r;
    r.fixed_phi = 1.0;
    const auto m = maximize_log_posterior(Params(1.0, 0.01, 2.0), d, r);
    CHECK(m.mode.phi() == 1.0);
    CHECK(m.improved);
}

TEST_CASE("summary of a degenerate chain") {
    const Dataset d({1.0, 2.0, 3.0});
    Chain chain;
    chain.draws.assign(200, Params(1.0, 0.5, 1.0));
    for (int i = 0; i < 200; ++i) chain.iteration.push_back(i + 1);
    const auto s = summarize(chain, d);
    CHECK(s.degenerate);
    CHECK(s.phi.sd == 0.0);
    CHECK(s.phi.hpd_low == 1.0);
    CHECK(s.phi.hpd_high == 1.0);
    CHECK(s.phi.geweke_z == 0.0);
    CHECK_FALSE(s.geweke_warning);
}

TEST_CASE("summary JSON carries every field") {
    const Dataset d = load_dataset("meeker");
    const auto chain = run_chain(d, config(4));
    const auto s = summarize(chain, d);
    const auto j = to_json(s);
    for (const char* p : {"phi", "mu", "alpha"}) {
        REQUIRE(j.contains(p));
        for (const char* f : {"mode", "mean", "sd", "hpd_low", "hpd_high", "geweke_z", "geweke_pass"}) {
            CHECK_MESSAGE(j[p].contains(f), p << "." << f);
        }
        CHECK(j[p]["hpd_low"].get<double>() <= j[p]["hpd_high"].get<double>());
    }
    CHECK(j["draws"].get<std::size_t>() == chain.draws.size());
    CHECK(std::fabs(s.alpha.mean - oracle::mean(chain.alpha())) < 1e-9 * s.alpha.mean);
    CHECK(std::fabs(s.alpha.sd - std::sqrt(oracle::variance(chain.alpha()))) < 1e-6 * s.alpha.sd);
}
