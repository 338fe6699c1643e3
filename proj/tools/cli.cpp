#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "ggbayes/data.hpp"
#include "ggbayes/diagnostics.hpp"
#include "ggbayes/ggdist.hpp"
#include "ggbayes/modelsel.hpp"
#include "ggbayes/posterior.hpp"
#include "ggbayes/priors.hpp"
#include "ggbayes/simstudy.hpp"
#include "ggbayes/version.hpp"
#include "json.hpp"

namespace ggbayes::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void require_positive(double v, const char* flag) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw UsageError(std::string(flag) + " must be a positive number, got " + fmt17(v));
    }
}

struct McmcFlags {
    int iterations = 31000;
    int burn_in = 1000;
    int thin = 30;
    double sd_alpha = 0.5;
    double sd_phi = 0.5;
    std::uint64_t seed = 1;
    bool no_adapt = false;

    void add(CLI::App& app) {
        app.add_option("--iters", iterations, "Total sampler iterations")->capture_default_str();
        app.add_option("--burnin", burn_in, "Burn-in iterations")->capture_default_str();
        app.add_option("--thin", thin, "Thinning interval")->capture_default_str();
        app.add_option("--sd-alpha", sd_alpha, "Initial proposal SD on log alpha")->capture_default_str();
        app.add_option("--sd-phi", sd_phi, "Initial proposal SD on log phi")->capture_default_str();
        app.add_option("--seed", seed, "Random seed")->capture_default_str();
        app.add_flag("--no-adapt", no_adapt, "Keep proposal scales fixed during burn-in");
    }

    McmcConfig config() const {
        McmcConfig c;
        c.iterations = iterations;
        c.burn_in = burn_in;
        c.thin = thin;
        c.proposal_sd_log_alpha = sd_alpha;
        c.proposal_sd_log_phi = sd_phi;
        c.seed = seed;
        c.adapt_during_burnin = !no_adapt;
        c.validate();
        return c;
    }

    std::vector<std::string> argv() const {
        std::vector<std::string> a{"--iters",    std::to_string(iterations), "--burnin", std::to_string(burn_in),
                                   "--thin",     std::to_string(thin),       "--sd-alpha", fmt17(sd_alpha),
                                   "--sd-phi",   fmt17(sd_phi),              "--seed",   std::to_string(seed)};
        if (no_adapt) a.emplace_back("--no-adapt");
        return a;
    }
};

json config_json(const McmcConfig& c) {
    return {{"iterations", c.iterations},
            {"burn_in", c.burn_in},
            {"thin", c.thin},
            {"proposal_sd_log_alpha", c.proposal_sd_log_alpha},
            {"proposal_sd_log_phi", c.proposal_sd_log_phi},
            {"seed", c.seed},
            {"adapt_during_burnin", c.adapt_during_burnin}};
}

// Sidecar written next to every command's outputs. "argv" replays the run.
void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& argv,
                    const json& details) {
    json m = {{"tool", "ggbayes"},
              {"version", kVersion},
              {"command", command},
              {"argv", argv},
              {"details", details},
              {"created_utc", utc_now()}};
    write_file(dir / "manifest.json", dump(m));
}

fs::path prepare_out(const std::string& out) {
    fs::path p(out);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out + ": " + ec.message());
    return p;
}

// Gaussian kernel density on a regular grid, Silverman bandwidth.
std::vector<std::pair<double, double>> kde(const std::vector<double>& x, int points) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (const double v : x) mean += v;
    mean /= n;
    double ss = 0.0;
    for (const double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    std::vector<double> s = x;
    std::sort(s.begin(), s.end());
    const double iqr = s[static_cast<std::size_t>(0.75 * (n - 1))] - s[static_cast<std::size_t>(0.25 * (n - 1))];
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd > 0.0 ? sd : 1.0;
    const double h = 0.9 * spread * std::pow(n, -0.2);
    const double lo = s.front() - 3.0 * h;
    const double hi = s.back() + 3.0 * h;
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(points));
    const double norm = 1.0 / (n * h * std::sqrt(2.0 * std::numbers::pi));
    for (int i = 0; i < points; ++i) {
        const double g = lo + (hi - lo) * i / (points - 1);
        double d = 0.0;
        for (const double v : s) {
            const double z = (g - v) / h;
            d += std::exp(-0.5 * z * z);
        }
        out.emplace_back(g, d * norm);
    }
    return out;
}

void print_summary(std::ostream& out, const PosteriorSummary& s) {
    out << std::left << std::setw(8) << "param" << std::setw(15) << "mode" << std::setw(15) << "sd"
        << std::setw(15) << "hpd_low" << std::setw(15) << "hpd_high" << "geweke_z\n";
    const auto row = [&](const char* name, const ParameterSummary& p) {
        out << std::setw(8) << name << std::setprecision(6) << std::setw(15) << p.mode << std::setw(15) << p.sd
            << std::setw(15) << p.hpd_low << std::setw(15) << p.hpd_high << p.geweke_z << "\n";
    };
    row("phi", s.phi);
    row("mu", s.mu);
    row("alpha", s.alpha);
}

void write_fit_outputs(const fs::path& dir, const std::string& suffix, const Chain& chain,
                       const PosteriorSummary& summary, int max_lag) {
    write_file(dir / ("summary" + suffix + ".json"), dump(to_json(summary)));
    {
        std::ostringstream os;
        write_chain_csv(os, chain);
        write_file(dir / ("chain" + suffix + ".csv"), os.str());
    }
    const std::array<std::pair<const char*, std::vector<double>>, 3> series{
        {{"phi", chain.phi()}, {"mu", chain.mu()}, {"alpha", chain.alpha()}}};
    {
        std::ostringstream os;
        os << "parameter,x,density\n";
        for (const auto& [name, x] : series) {
            for (const auto& [g, d] : kde(x, 128)) os << name << ',' << fmt17(g) << ',' << fmt17(d) << '\n';
        }
        write_file(dir / ("density" + suffix + ".csv"), os.str());
    }
    {
        std::array<std::vector<double>, 3> acf;
        for (std::size_t i = 0; i < 3; ++i) acf[i] = autocorrelation(series[i].second, max_lag);
        std::ostringstream os;
        os << "lag,phi,mu,alpha\n";
        for (int k = 0; k <= max_lag; ++k) {
            const auto u = static_cast<std::size_t>(k);
            os << k << ',' << fmt17(acf[0][u]) << ',' << fmt17(acf[1][u]) << ',' << fmt17(acf[2][u]) << '\n';
        }
        write_file(dir / ("acf" + suffix + ".csv"), os.str());
    }
}

int cmd_fit(const std::string& data_src, const McmcFlags& flags, int chains, int threads, int max_lag,
            const std::string& out_dir, std::ostream& out, std::ostream& err) {
    if (chains < 1) throw UsageError("--chains must be at least 1");
    if (max_lag < 1) throw UsageError("--max-lag must be positive");
    const McmcConfig config = flags.config();
    if (static_cast<long>(max_lag) * 4 >= config.stored_draws()) {
        throw UsageError("--max-lag must be below a quarter of the stored draws");
    }
    const Dataset data = load_dataset(data_src);
    const fs::path dir = prepare_out(out_dir);

    std::vector<Chain> all;
    if (chains == 1) {
        all.push_back(run_chain(data, config));
    } else {
        all = run_chains(data, config, chains, threads);
    }
    bool warned = false;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const PosteriorSummary s = summarize(all[i], data);
        const std::string suffix = i == 0 ? "" : "_" + std::to_string(i + 1);
        write_fit_outputs(dir, suffix, all[i], s, max_lag);
        if (i == 0) print_summary(out, s);
        if (s.geweke_warning) {
            err << "warning: chain " << i + 1 << " fails the Geweke check for at least one parameter\n";
            warned = true;
        }
        if (!s.mode.improved) err << "warning: chain " << i + 1 << ": mode search did not improve on the best draw\n";
    }
    std::vector<std::string> argv{"fit", "--data", data_src};
    for (auto& a : flags.argv()) argv.push_back(a);
    for (auto& a : std::vector<std::string>{"--chains", std::to_string(chains), "--max-lag", std::to_string(max_lag)}) {
        argv.push_back(a);
    }
    write_manifest(dir, "fit", argv,
                   {{"data", data_src}, {"n", data.size()}, {"config", config_json(config)}, {"chains", chains},
                    {"geweke_warning", warned}});
    return kOk;
}

std::vector<int> parse_n_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            if (v < 2) throw UsageError("--n entries must be at least 2, got " + item);
            out.push_back(v);
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError("--n: cannot parse '" + item + "' as an integer");
        }
    }
    if (out.empty()) throw UsageError("--n must list at least one sample size");
    return out;
}

int cmd_simulate(double phi, double mu, double alpha, const std::string& n_list, int reps,
                 const std::string& estimator, const McmcFlags& flags, int threads, const std::string& out_dir,
                 std::ostream& out) {
    require_positive(phi, "--phi");
    require_positive(mu, "--mu");
    require_positive(alpha, "--alpha");
    if (reps < 1) throw UsageError("--reps must be at least 1");
    const std::vector<int> ns = parse_n_list(n_list);
    const Estimator est = parse_estimator(estimator);
    const McmcConfig config = flags.config();
    const fs::path dir = prepare_out(out_dir);

    const SimReport report = run_study(Params(phi, mu, alpha), ns, reps, config, flags.seed, est, threads);
    std::ostringstream csv;
    write_sim_csv(csv, report);
    write_file(dir / "sim.csv", csv.str());
    write_file(dir / "sim.json", dump(to_json(report)));
    out << csv.str();

    std::vector<std::string> argv{"simulate", "--phi", fmt17(phi), "--mu", fmt17(mu), "--alpha", fmt17(alpha),
                                  "--n", n_list, "--reps", std::to_string(reps), "--estimator", estimator};
    for (auto& a : flags.argv()) argv.push_back(a);
    write_manifest(dir, "simulate", argv, {{"config", config_json(config)}, {"reps", reps}});
    return kOk;
}

int cmd_compare(const std::string& data_src, const McmcFlags& flags, int threads, const std::string& out_dir,
                std::ostream& out, std::ostream& err) {
    const McmcConfig config = flags.config();
    const Dataset data = load_dataset(data_src);
    const fs::path dir = prepare_out(out_dir);
    const Comparison cmp = compare(data, config, threads);
    std::ostringstream csv;
    write_comparison_csv(csv, cmp);
    write_file(dir / "compare.csv", csv.str());
    write_file(dir / "compare.json", dump(to_json(cmp)));
    out << csv.str();
    out << "winner DIC: " << to_string(cmp.dic_winner) << "\nwinner BIC: " << to_string(cmp.bic_winner) << "\n";
    for (const auto& f : cmp.fits) {
        if (f.p_d_negative) err << "warning: " << to_string(f.model) << " has negative p_D (" << f.p_d << ")\n";
    }
    std::vector<std::string> argv{"compare", "--data", data_src};
    for (auto& a : flags.argv()) argv.push_back(a);
    write_manifest(dir, "compare", argv, {{"data", data_src}, {"n", data.size()}, {"config", config_json(config)}});
    return kOk;
}

int cmd_prior_check(const std::string& data_src, const std::string& prior, int levels, double rel_tol,
                    const std::string& out_dir, std::ostream& out) {
    const PriorSpec spec = parse_prior_spec(prior);
    if (levels < 3) throw UsageError("--levels must be at least 3");
    require_positive(rel_tol, "--rel-tol");
    const Dataset data = load_dataset(data_src);
    const fs::path dir = prepare_out(out_dir);
    ProprietyOptions opts;
    opts.rel_tol = rel_tol;
    const ProprietyEvidence ev = propriety_evidence(spec, data, levels, opts);

    std::ostringstream csv;
    csv << "k,lower,upper,log_integral,integral,growth_ratio,rel_increment,rel_error,panels\n";
    json rows = json::array();
    for (const auto& l : ev.levels) {
        csv << l.k << ',' << fmt17(l.lower) << ',' << fmt17(l.upper) << ',' << fmt17(l.log_integral) << ','
            << fmt17(l.integral) << ',' << fmt17(l.growth_ratio) << ',' << fmt17(l.rel_increment) << ','
            << fmt17(l.rel_error) << ',' << l.panels << '\n';
        rows.push_back({{"k", l.k},
                        {"lower", l.lower},
                        {"upper", l.upper},
                        {"log_integral", l.log_integral},
                        {"growth_ratio", l.growth_ratio},
                        {"rel_increment", l.rel_increment},
                        {"rel_error", l.rel_error},
                        {"panels", l.panels}});
    }
    write_file(dir / "prior_check.csv", csv.str());
    write_file(dir / "prior_check.json", dump({{"prior", to_string(spec)},
                                               {"levels", rows},
                                               {"verdict", to_string(ev.verdict)},
                                               {"first_to_last", ev.first_to_last},
                                               {"peak_alpha", ev.peak_alpha},
                                               {"peak_phi", ev.peak_phi},
                                               {"peak_in_outer_ring", ev.peak_in_outer_ring}}));
    out << csv.str();
    out << "verdict: " << to_string(ev.verdict) << "\n";
    write_manifest(dir, "prior-check",
                   {"prior-check", "--data", data_src, "--prior", prior, "--levels", std::to_string(levels),
                    "--rel-tol", fmt17(rel_tol)},
                   {{"data", data_src}, {"n", data.size()}});
    return kOk;
}

int cmd_curves(double phi, double mu, double alpha, double tmax, int points, const std::string& out_dir,
               std::ostream& out) {
    require_positive(phi, "--phi");
    require_positive(mu, "--mu");
    require_positive(alpha, "--alpha");
    require_positive(tmax, "--tmax");
    if (points < 2) throw UsageError("--points must be at least 2");
    const Params p(phi, mu, alpha);
    const fs::path dir = prepare_out(out_dir);
    std::ostringstream csv;
    csv << "t,pdf,cdf,hazard\n";
    for (int i = 1; i <= points; ++i) {
        const double t = tmax * i / points;
        double h = std::numeric_limits<double>::quiet_NaN();
        try {
            h = hazard(p, t);
        } catch (const std::overflow_error&) {
        }
        csv << fmt17(t) << ',' << fmt17(pdf(p, t)) << ',' << fmt17(cdf(p, t)) << ',' << fmt17(h) << '\n';
    }
    write_file(dir / "curves.csv", csv.str());
    out << "wrote " << (dir / "curves.csv").string() << "\n";
    write_manifest(dir, "curves",
                   {"curves", "--phi", fmt17(phi), "--mu", fmt17(mu), "--alpha", fmt17(alpha), "--tmax", fmt17(tmax),
                    "--points", std::to_string(points)},
                   json::object());
    return kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    std::ifstream f(manifest_path);
    if (!f) throw UsageError("cannot open manifest '" + manifest_path + "'");
    json m;
    try {
        f >> m;
    } catch (const json::exception& e) {
        throw UsageError("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
    }
    if (!m.contains("argv") || !m["argv"].is_array()) throw UsageError("manifest has no argv array");
    std::vector<std::string> argv = m["argv"].get<std::vector<std::string>>();
    if (argv.empty() || argv.front() == "replay") throw UsageError("manifest argv is not replayable");
    argv.emplace_back("--out");
    argv.push_back(out_dir);
    return dispatch(argv, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Objective Bayesian inference for the generalized gamma distribution", "ggbayes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string data_src, out_dir = "out", prior, n_list = "50,100,150,200,250,300", estimator = "mode";
    std::string manifest_path;
    McmcFlags flags;
    int chains = 1, threads = 1, max_lag = 50, levels = 6, reps = 1000, points = 200;
    double phi = 0.4, mu = 1.5, alpha = 5.0, rel_tol = 1e-7, tmax = 2.0;

    auto* fit = app.add_subcommand("fit", "Sample the GG posterior under the modified reference prior");
    fit->add_option("--data", data_src, "Data file or 'meeker'")->required();
    flags.add(*fit);
    fit->add_option("--chains", chains, "Independent chains")->capture_default_str();
    fit->add_option("--threads", threads, "Worker threads for multiple chains")->capture_default_str();
    fit->add_option("--max-lag", max_lag, "Largest ACF lag written")->capture_default_str();
    fit->add_option("--out", out_dir, "Output directory")->capture_default_str();

    McmcFlags sim_flags;
    sim_flags.seed = 2024;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo study of the estimators");
    sim->add_option("--phi", phi)->capture_default_str();
    sim->add_option("--mu", mu)->capture_default_str();
    sim->add_option("--alpha", alpha)->capture_default_str();
    sim->add_option("--n", n_list, "Comma-separated sample sizes")->capture_default_str();
    sim->add_option("--reps", reps, "Replications per sample size")->capture_default_str();
    sim->add_option("--estimator", estimator, "mode or mean")->capture_default_str();
    sim_flags.add(*sim);
    sim->add_option("--threads", threads)->capture_default_str();
    sim->add_option("--out", out_dir)->capture_default_str();

    McmcFlags cmp_flags;
    auto* cmp = app.add_subcommand("compare", "DIC and BIC for GG, Weibull, Gamma and Lognormal");
    cmp->add_option("--data", data_src)->required();
    cmp_flags.add(*cmp);
    cmp->add_option("--threads", threads)->capture_default_str();
    cmp->add_option("--out", out_dir)->capture_default_str();

    auto* pc = app.add_subcommand("prior-check", "Nested-box integrals of the mu-marginal posterior");
    pc->add_option("--data", data_src)->required();
    pc->add_option("--prior", prior, "alpha, phi, mu, ordered or modified")->required();
    pc->add_option("--levels", levels)->capture_default_str();
    pc->add_option("--rel-tol", rel_tol)->capture_default_str();
    pc->add_option("--out", out_dir)->capture_default_str();

    auto* cv = app.add_subcommand("curves", "pdf, cdf and hazard on a grid");
    cv->add_option("--phi", phi)->capture_default_str();
    cv->add_option("--mu", mu)->capture_default_str();
    cv->add_option("--alpha", alpha)->capture_default_str();
    cv->add_option("--tmax", tmax)->capture_default_str();
    cv->add_option("--points", points)->capture_default_str();
    cv->add_option("--out", out_dir)->capture_default_str();

    auto* rp = app.add_subcommand("replay", "Re-run a command from its manifest.json");
    rp->add_option("--manifest", manifest_path)->required();
    rp->add_option("--out", out_dir)->capture_default_str();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    if (*fit) return cmd_fit(data_src, flags, chains, threads, max_lag, out_dir, out, err);
    if (*sim) return cmd_simulate(phi, mu, alpha, n_list, reps, estimator, sim_flags, threads, out_dir, out);
    if (*cmp) return cmd_compare(data_src, cmp_flags, threads, out_dir, out, err);
    if (*pc) return cmd_prior_check(data_src, prior, levels, rel_tol, out_dir, out);
    if (*cv) return cmd_curves(phi, mu, alpha, tmax, points, out_dir, out);
    if (*rp) return cmd_replay(manifest_path, out_dir, out, err);
    return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntime;
    }
}

}  // namespace ggbayes::cli
