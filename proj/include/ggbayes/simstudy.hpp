#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ggbayes/ggdist.hpp"
#include "ggbayes/posterior.hpp"
#include "json.hpp"

namespace ggbayes {

enum class Estimator { Mode, Mean };
Estimator parse_estimator(std::string_view name);
std::string_view to_string(Estimator e);

struct ParameterCell {
    double mre = 0.0;  ///< mean of estimate / truth
    double mse = 0.0;  ///< mean of (estimate - truth)^2
    double low = 0.0;  ///< L: fraction of intervals lying above the truth
    double up = 0.0;   ///< U: fraction of intervals lying below the truth
    double cov = 0.0;  ///< C: fraction of intervals containing the truth
    int count_low = 0;
    int count_up = 0;
    int count_cov = 0;
};

struct SimRow {
    int n = 0;
    int replications = 0;
    int replications_used = 0;
    double geweke_pass_rate = 0.0;  ///< fraction of used replications with |z| < 1.96 for all three
    ParameterCell phi;
    ParameterCell mu;
    ParameterCell alpha;
    std::vector<std::string> failures;  ///< "r=<index>: <message>" per excluded replication
};

struct SimReport {
    Params truth{1.0, 1.0, 1.0};
    int replications = 0;
    std::uint64_t master_seed = 0;
    Estimator estimator = Estimator::Mode;
    McmcConfig config;
    std::vector<SimRow> rows;
};

/// One replication's record, exposed for testing and custom aggregation.
struct Replication {
    bool ok = false;
    std::string error;
    Params estimate{1.0, 1.0, 1.0};
    std::array<double, 3> hpd_low{};   ///< phi, mu, alpha
    std::array<double, 3> hpd_high{};
    bool geweke_pass = false;
};

/// Simulates n draws from `truth` and fits them. Seeds are derived from
/// (master_seed, n, r).
Replication run_replication(const Params& truth, int n, int r, const McmcConfig& config,
                            std::uint64_t master_seed, Estimator estimator);

/// Replications run on up to `threads` workers; the report does not depend on
/// the thread count. Failed replications are excluded and listed.
SimReport run_study(const Params& truth, const std::vector<int>& n_list, int replications,
                    const McmcConfig& config, std::uint64_t master_seed,
                    Estimator estimator = Estimator::Mode, int threads = 1);

/// Columns parameter,n,MRE,MSE,L,U,C,replications_used,geweke_pass_rate.
void write_sim_csv(std::ostream& out, const SimReport& report);
nlohmann::json to_json(const SimReport& report);

}  // namespace ggbayes
