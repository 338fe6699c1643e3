#include "ggbayes/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ggbayes {

namespace {

struct SegmentStats {
    double mean;
    double var_of_mean;
};

SegmentStats batch_means(std::span<const double> x) {
    const std::size_t m = x.size();
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(m);
    const std::size_t batches = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(static_cast<double>(m))));
    const std::size_t size = m / batches;
    std::vector<double> bm(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        for (std::size_t i = 0; i < size; ++i) bm[b] += x[b * size + i];
        bm[b] /= static_cast<double>(size);
    }
    const double grand = std::accumulate(bm.begin(), bm.end(), 0.0) / static_cast<double>(batches);
    double ss = 0.0;
    for (const double v : bm) ss += (v - grand) * (v - grand);
    // Long-run variance size * var(batch means); the segment mean's variance divides by m.
    const double lrv = static_cast<double>(size) * ss / static_cast<double>(batches - 1);
    return {mean, lrv / static_cast<double>(m)};
}

double sample_sd(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 2) return 0.0;
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (const double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / (n - 1.0));
}

ParameterSummary summarize_series(const std::vector<double>& x, double mode) {
    ParameterSummary s;
    s.mode = mode;
    s.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    s.sd = sample_sd(x);
    const Interval hpd = hpd_interval(x);
    s.hpd_low = hpd.low;
    s.hpd_high = hpd.high;
    s.geweke_z = geweke_z(x);
    s.geweke_pass = std::fabs(s.geweke_z) < 1.96;
    return s;
}

nlohmann::json param_json(const ParameterSummary& s) {
    return {{"mode", s.mode},         {"mean", s.mean},         {"sd", s.sd},
            {"hpd_low", s.hpd_low},   {"hpd_high", s.hpd_high}, {"geweke_z", s.geweke_z},
            {"geweke_pass", s.geweke_pass}};
}

}  // namespace

double geweke_z(std::span<const double> series, double first_frac, double last_frac) {
    if (series.size() < 100) throw std::length_error("geweke_z: need at least 100 values");
    if (!(first_frac > 0.0) || !(last_frac > 0.0) || first_frac + last_frac > 1.0) {
        throw std::invalid_argument("geweke_z: segment fractions must be positive and sum to at most 1");
    }
    const std::size_t n = series.size();
    const auto na = static_cast<std::size_t>(std::floor(first_frac * static_cast<double>(n)));
    const auto nb = static_cast<std::size_t>(std::floor(last_frac * static_cast<double>(n)));
    const SegmentStats a = batch_means(series.first(na));
    const SegmentStats b = batch_means(series.last(nb));
    const double num = a.mean - b.mean;
    const double den = std::sqrt(a.var_of_mean + b.var_of_mean);
    if (den == 0.0) {
        if (num == 0.0) return 0.0;
        return num > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    }
    return num / den;
}

Interval hpd_interval(std::span<const double> samples, double mass) {
    if (samples.size() < 100) throw std::length_error("hpd_interval: need at least 100 samples");
    if (!(mass > 0.0 && mass < 1.0)) throw std::invalid_argument("hpd_interval: mass must be in (0, 1)");
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    // Guard against mass * n landing a rounding error above an integer.
    const auto m = static_cast<std::size_t>(std::ceil(mass * static_cast<double>(n) - 1e-9));
    std::size_t best = 0;
    double width = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + m <= n; ++i) {
        const double w = x[i + m - 1] - x[i];
        if (w < width) {
            width = w;
            best = i;
        }
    }
    return {x[best], x[best + m - 1]};
}

std::vector<double> autocorrelation(std::span<const double> series, int max_lag) {
    if (max_lag < 1) throw std::invalid_argument("autocorrelation: max_lag must be positive");
    if (static_cast<std::size_t>(max_lag) * 4 >= series.size()) {
        throw std::invalid_argument("autocorrelation: max_lag must be below length / 4");
    }
    const std::size_t n = series.size();
    const double m = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    double c0 = 0.0;
    for (const double v : series) c0 += (v - m) * (v - m);
    std::vector<double> acf(static_cast<std::size_t>(max_lag) + 1, 0.0);
    acf[0] = 1.0;
    if (!(c0 > 0.0)) return acf;
    for (int k = 1; k <= max_lag; ++k) {
        double c = 0.0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i) {
            c += (series[i] - m) * (series[i + static_cast<std::size_t>(k)] - m);
        }
        acf[static_cast<std::size_t>(k)] = c / c0;
    }
    return acf;
}

NelderMeadResult nelder_mead_max(const std::function<double(std::span<const double>)>& f,
                                 std::vector<double> x0, const NelderMeadOptions& options) {
    const std::size_t d = x0.size();
    if (d == 0) throw std::invalid_argument("nelder_mead_max: empty start");
    NelderMeadResult res;
    const auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> s(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) s[i + 1][i] += options.initial_step;
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fv[i] = eval(s[i]);

    std::vector<std::size_t> order(d + 1);
    while (res.evaluations < options.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] > fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];

        double spread = 0.0;
        for (std::size_t i = 0; i <= d; ++i) {
            for (std::size_t j = 0; j < d; ++j) spread = std::max(spread, std::fabs(s[i][j] - s[best][j]));
        }
        if (std::isfinite(fv[worst]) && fv[best] - fv[worst] <= options.f_tol * (1.0 + std::fabs(fv[best])) &&
            spread <= options.x_tol) {
            res.converged = true;
            break;
        }

        std::vector<double> c(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < d; ++j) c[j] += s[i][j] / static_cast<double>(d);
        }
        const auto along = [&](double t) {
            std::vector<double> x(d);
            for (std::size_t j = 0; j < d; ++j) x[j] = c[j] + t * (s[worst][j] - c[j]);
            return x;
        };

        auto xr = along(-1.0);
        const double fr = eval(xr);
        if (fr > fv[best]) {
            auto xe = along(-2.0);
            const double fe = eval(xe);
            if (fe > fr) {
                s[worst] = std::move(xe);
                fv[worst] = fe;
            } else {
                s[worst] = std::move(xr);
                fv[worst] = fr;
            }
            continue;
        }
        if (fr > fv[second]) {
            s[worst] = std::move(xr);
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr > fv[worst];
        auto xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc > std::max(fr, fv[worst]) || (outside && fc >= fr)) {
            s[worst] = std::move(xc);
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < d; ++j) s[i][j] = s[best][j] + 0.5 * (s[i][j] - s[best][j]);
            fv[i] = eval(s[i]);
        }
    }
    const auto it = std::max_element(fv.begin(), fv.end());
    res.x = s[static_cast<std::size_t>(it - fv.begin())];
    res.value = *it;
    return res;
}

ModeResult maximize_log_posterior(const Params& start, const Dataset& data, const Restriction& restriction) {
    const double n = static_cast<double>(data.size());
    const bool free_alpha = !restriction.fixed_alpha;
    const bool free_phi = !restriction.fixed_phi;
    const double alpha0 = restriction.fixed_alpha.value_or(start.alpha());
    const double phi0 = restriction.fixed_phi.value_or(start.phi());

    const auto unpack = [&](std::span<const double> x, double& alpha, double& phi) {
        std::size_t i = 0;
        alpha = free_alpha ? std::exp(x[i++]) : alpha0;
        phi = free_phi ? std::exp(x[i]) : phi0;
    };
    // log mu maximizing the posterior at fixed (alpha, phi), or NaN if none exists.
    const auto profile_log_mu = [&](double alpha, double phi) {
        const double c = n * alpha * phi - 1.0;
        if (!(c > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return (std::log(c / alpha) - data.log_sum_pow(alpha)) / alpha;
    };
    const auto objective = [&](std::span<const double> x) {
        double alpha = 0.0, phi = 0.0;
        unpack(x, alpha, phi);
        const double lm = profile_log_mu(alpha, phi);
        if (!(alpha > 0.0 && phi > 0.0 && std::isfinite(alpha) && std::isfinite(phi)) || !std::isfinite(lm)) {
            return -std::numeric_limits<double>::infinity();
        }
        const double mu = std::exp(lm);
        if (!(mu > 0.0) || !std::isfinite(mu)) return -std::numeric_limits<double>::infinity();
        return log_posterior(Params(phi, mu, alpha), data);
    };

    ModeResult out;
    out.mode = Params(phi0, start.mu(), alpha0);
    out.log_posterior = log_posterior(out.mode, data);
    if (!free_alpha && !free_phi) {
        const double lm = profile_log_mu(alpha0, phi0);
        if (std::isfinite(lm)) {
            const Params p(phi0, std::exp(lm), alpha0);
            const double v = log_posterior(p, data);
            if (v > out.log_posterior) {
                out.mode = p;
                out.log_posterior = v;
                out.improved = true;
            }
        }
        out.converged = true;
        return out;
    }

    std::vector<double> x;
    if (free_alpha) x.push_back(std::log(alpha0));
    if (free_phi) x.push_back(std::log(phi0));
    NelderMeadOptions opts;
    double best = -std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 20; ++restart) {
        const NelderMeadResult r = nelder_mead_max(objective, x, opts);
        out.evaluations += r.evaluations;
        const bool stalled = r.value <= best + 1e-10 * (1.0 + std::fabs(best));
        if (r.value > best) {
            best = r.value;
            x = r.x;
        }
        out.converged = r.converged;
        if (stalled && r.converged) break;
        opts.initial_step = std::max(0.01, 0.5 * opts.initial_step);
    }

    double alpha = 0.0, phi = 0.0;
    unpack(x, alpha, phi);
    if (best > out.log_posterior) {
        out.mode = Params(phi, std::exp(profile_log_mu(alpha, phi)), alpha);
        out.log_posterior = best;
        out.improved = true;
    }
    return out;
}

ModeResult posterior_mode(const Chain& chain, const Dataset& data, const Restriction& restriction) {
    if (chain.draws.empty()) throw std::invalid_argument("posterior_mode: empty chain");
    std::size_t seed = 0;
    double seed_lp = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < chain.draws.size(); ++i) {
        const double lp = log_posterior(chain.draws[i], data);
        if (lp > seed_lp) {
            seed_lp = lp;
            seed = i;
        }
    }
    return maximize_log_posterior(chain.draws[seed], data, restriction);
}

PosteriorSummary summarize(const Chain& chain, const Dataset& data) {
    PosteriorSummary s;
    s.mode = posterior_mode(chain, data);
    s.phi = summarize_series(chain.phi(), s.mode.mode.phi());
    s.mu = summarize_series(chain.mu(), s.mode.mode.mu());
    s.alpha = summarize_series(chain.alpha(), s.mode.mode.alpha());
    s.draws = chain.draws.size();
    s.acceptance_alpha = chain.acceptance_alpha;
    s.acceptance_phi = chain.acceptance_phi;
    s.degenerate = s.phi.sd == 0.0 || s.mu.sd == 0.0 || s.alpha.sd == 0.0;
    s.geweke_warning = !(s.phi.geweke_pass && s.mu.geweke_pass && s.alpha.geweke_pass);
    return s;
}

nlohmann::json to_json(const PosteriorSummary& s) {
    return {{"phi", param_json(s.phi)},
            {"mu", param_json(s.mu)},
            {"alpha", param_json(s.alpha)},
            {"log_posterior_at_mode", s.mode.log_posterior},
            {"mode_improved", s.mode.improved},
            {"mode_converged", s.mode.converged},
            {"draws", s.draws},
            {"acceptance_alpha", s.acceptance_alpha},
            {"acceptance_phi", s.acceptance_phi},
            {"degenerate", s.degenerate},
            {"geweke_warning", s.geweke_warning}};
}

}  // namespace ggbayes
