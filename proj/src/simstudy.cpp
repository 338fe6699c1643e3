#include "ggbayes/simstudy.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ggbayes/diagnostics.hpp"

namespace ggbayes {

namespace {

// Pairwise summation over a fixed index order.
double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

double get(const Params& p, int which) {
    return which == 0 ? p.phi() : which == 1 ? p.mu() : p.alpha();
}

ParameterCell aggregate(const std::vector<Replication>& reps, const Params& truth, int which) {
    ParameterCell c;
    std::vector<double> rel, sq;
    for (const auto& r : reps) {
        if (!r.ok) continue;
        const double th = get(truth, which);
        const double est = get(r.estimate, which);
        rel.push_back(est / th);
        sq.push_back((est - th) * (est - th));
        const auto w = static_cast<std::size_t>(which);
        if (th < r.hpd_low[w]) {
            ++c.count_low;
        } else if (th > r.hpd_high[w]) {
            ++c.count_up;
        } else {
            ++c.count_cov;
        }
    }
    const auto used = static_cast<double>(rel.size());
    if (rel.empty()) return c;
    c.mre = pairwise_sum(rel.data(), rel.size()) / used;
    c.mse = pairwise_sum(sq.data(), sq.size()) / used;
    c.low = c.count_low / used;
    c.up = c.count_up / used;
    c.cov = c.count_cov / used;
    return c;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::json cell_json(const ParameterCell& c) {
    return {{"mre", c.mre},           {"mse", c.mse},           {"L", c.low},
            {"U", c.up},              {"C", c.cov},             {"count_low", c.count_low},
            {"count_up", c.count_up}, {"count_cov", c.count_cov}};
}

}  // namespace

Estimator parse_estimator(std::string_view name) {
    if (name == "mode") return Estimator::Mode;
    if (name == "mean") return Estimator::Mean;
    throw std::invalid_argument("unknown estimator '" + std::string(name) + "' (expected mode or mean)");
}

std::string_view to_string(Estimator e) { return e == Estimator::Mode ? "mode" : "mean"; }

Replication run_replication(const Params& truth, int n, int r, const McmcConfig& config,
                            std::uint64_t master_seed, Estimator estimator) {
    Replication rep;
    try {
        RandomSource data_rng(derive_seed(master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r), 0));
        const Dataset data(sample(truth, static_cast<std::size_t>(n), data_rng));
        McmcConfig c = config;
        c.seed = derive_seed(master_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r), 1);
        const Chain chain = run_chain(data, c);
        if (estimator == Estimator::Mode) {
            rep.estimate = posterior_mode(chain, data).mode;
        } else {
            double phi = 0.0, mu = 0.0, alpha = 0.0;
            for (const auto& d : chain.draws) {
                phi += d.phi();
                mu += d.mu();
                alpha += d.alpha();
            }
            const auto m = static_cast<double>(chain.draws.size());
            rep.estimate = Params(phi / m, mu / m, alpha / m);
        }
        const std::array<std::vector<double>, 3> series{chain.phi(), chain.mu(), chain.alpha()};
        rep.geweke_pass = true;
        for (std::size_t i = 0; i < 3; ++i) {
            const Interval hpd = hpd_interval(series[i]);
            rep.hpd_low[i] = hpd.low;
            rep.hpd_high[i] = hpd.high;
            rep.geweke_pass = rep.geweke_pass && std::fabs(geweke_z(series[i])) < 1.96;
        }
        rep.ok = true;
    } catch (const std::exception& e) {
        rep.ok = false;
        rep.error = e.what();
    }
    return rep;
}

SimReport run_study(const Params& truth, const std::vector<int>& n_list, int replications,
                    const McmcConfig& config, std::uint64_t master_seed, Estimator estimator, int threads) {
    if (replications < 1) throw std::invalid_argument("run_study: replications must be positive");
    if (n_list.empty()) throw std::invalid_argument("run_study: no sample sizes");
    for (const int n : n_list) {
        if (n < 2) throw std::invalid_argument("run_study: sample sizes must be at least 2");
    }
    config.validate();

    SimReport report;
    report.truth = truth;
    report.replications = replications;
    report.master_seed = master_seed;
    report.estimator = estimator;
    report.config = config;

    const std::size_t per_n = static_cast<std::size_t>(replications);
    const std::size_t total = per_n * n_list.size();
    std::vector<Replication> reps(total);
    const auto work = [&](std::size_t idx) {
        const int n = n_list[idx / per_n];
        const int r = static_cast<int>(idx % per_n);
        reps[idx] = run_replication(truth, n, r, config, master_seed, estimator);
    };
    const auto nthreads = static_cast<std::size_t>(std::max(1, threads));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < total; ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < total; i += nthreads) work(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    for (std::size_t k = 0; k < n_list.size(); ++k) {
        const std::vector<Replication> block(reps.begin() + static_cast<std::ptrdiff_t>(k * per_n),
                                             reps.begin() + static_cast<std::ptrdiff_t>((k + 1) * per_n));
        SimRow row;
        row.n = n_list[k];
        row.replications = replications;
        int passes = 0;
        for (std::size_t r = 0; r < block.size(); ++r) {
            if (block[r].ok) {
                ++row.replications_used;
                if (block[r].geweke_pass) ++passes;
            } else {
                row.failures.push_back("r=" + std::to_string(r) + ": " + block[r].error);
            }
        }
        row.geweke_pass_rate = row.replications_used > 0 ? static_cast<double>(passes) / row.replications_used : 0.0;
        row.phi = aggregate(block, truth, 0);
        row.mu = aggregate(block, truth, 1);
        row.alpha = aggregate(block, truth, 2);
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_sim_csv(std::ostream& out, const SimReport& report) {
    out << "parameter,n,MRE,MSE,L,U,C,replications_used,geweke_pass_rate\n";
    const std::array<std::pair<const char*, int>, 3> params{{{"phi", 0}, {"mu", 1}, {"alpha", 2}}};
    for (const auto& [name, which] : params) {
        for (const auto& row : report.rows) {
            const ParameterCell& c = which == 0 ? row.phi : which == 1 ? row.mu : row.alpha;
            out << name << ',' << row.n << ',' << fmt17(c.mre) << ',' << fmt17(c.mse) << ',' << fmt17(c.low)
                << ',' << fmt17(c.up) << ',' << fmt17(c.cov) << ',' << row.replications_used << ','
                << fmt17(row.geweke_pass_rate) << '\n';
        }
    }
}

nlohmann::json to_json(const SimReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"n", row.n},
                        {"replications", row.replications},
                        {"replications_used", row.replications_used},
                        {"geweke_pass_rate", row.geweke_pass_rate},
                        {"phi", cell_json(row.phi)},
                        {"mu", cell_json(row.mu)},
                        {"alpha", cell_json(row.alpha)},
                        {"failures", row.failures}});
    }
    return {{"truth", {{"phi", report.truth.phi()}, {"mu", report.truth.mu()}, {"alpha", report.truth.alpha()}}},
            {"replications", report.replications},
            {"master_seed", report.master_seed},
            {"estimator", to_string(report.estimator)},
            {"rows", rows}};
}

}  // namespace ggbayes
