#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ggbayes/dataset.hpp"
#include "ggbayes/ggdist.hpp"
#include "ggbayes/quadrature.hpp"

namespace ggbayes {

/// The objective priors for (phi, mu, alpha). The first four are reference
/// priors for different parameter orderings and give improper posteriors;
/// ModifiedReference replaces the alpha factor so that the posterior is proper.
enum class PriorSpec { AlphaInterest, PhiInterest, MuInterest, OrderedTheta, ModifiedReference };

/// Accepts "alpha", "phi", "mu", "ordered", "modified".
PriorSpec parse_prior_spec(std::string_view name);
std::string_view to_string(PriorSpec spec);

/// Unnormalized log prior density:
///   AlphaInterest      alpha sqrt(psi'(phi)) / mu
///   PhiInterest        pi(phi) / (alpha mu)
///   MuInterest         mu sqrt(psi'(phi)) / alpha
///   OrderedTheta       sqrt(psi'(phi)) / (alpha mu)
///   ModifiedReference  sqrt(psi'(phi)) / (alpha^(-1/2 + 2 alpha/(1+alpha)) mu)
double log_prior(PriorSpec spec, const Params& p);

/// log pi(phi) with pi(phi) = sqrt((phi + phi^2 psi' - 1) / (phi^2 psi'^2 - psi' - 1)),
/// evaluated as written. The radicand is positive in exact arithmetic but the
/// denominator cancels to rounding noise near phi = 2e7; a non-positive
/// radicand throws std::domain_error.
double phi_interest_log_factor(double phi);

/// (1/2 - 2 alpha/(1+alpha)) log alpha.
double modified_alpha_log_density(double alpha);

/// k = integral over (0, inf) of alpha^(1/2 - 2 alpha/(1+alpha)).
double modified_alpha_normalizer();

/// q(alpha) = log(sum t_i^alpha) - (alpha/n) sum log t_i. At least log n.
double q_stat(double alpha, const Dataset& data);

/// p(alpha) = q(alpha) - log n. Non-negative.
double p_stat(double alpha, const Dataset& data);

/// log of prior x likelihood with mu integrated out analytically. With
/// S = sum t_i^alpha and kappa = n phi (kappa = n phi + 2/alpha for
/// MuInterest), the mu integral contributes Gamma(kappa) / (alpha S^kappa).
double marginal_mu_log_integrand(PriorSpec spec, const Dataset& data, double alpha, double phi);

enum class Verdict { Converging, Diverging, Inconclusive };
std::string_view to_string(Verdict v);

struct ProprietyOptions {
    double growth_threshold = 1.5;
    double convergence_increment = 1e-3;
    /// Diverging when the last three ring ratios (ring k over ring k-1) are all
    /// at least this, i.e. the increments stopped shrinking.
    double plateau_ratio = 0.97;
    double rel_tol = 1e-7;
    int max_panels = 20000;
    /// Initial panel width in log coordinates.
    double initial_panel = 0.35;
};

struct ProprietyLevel {
    int k = 0;
    double lower = 0.0;          ///< box is (lower, upper)^2 in (alpha, phi)
    double upper = 0.0;
    double log_integral = 0.0;   ///< log of the integral over the whole box
    double integral = 0.0;       ///< exp(log_integral); may overflow to inf
    double log_ring = 0.0;       ///< log of the integral over box k minus box k-1
    double growth_ratio = 0.0;   ///< integral k / integral k-1 (0 for k = 1)
    double rel_increment = 0.0;  ///< ring k / integral k (1 for k = 1)
    double rel_error = 0.0;
    int panels = 0;
};

struct ProprietyEvidence {
    PriorSpec spec = PriorSpec::ModifiedReference;
    std::vector<ProprietyLevel> levels;
    Verdict verdict = Verdict::Inconclusive;
    double first_to_last = 0.0;   ///< integral(levels) / integral(1)
    double peak_alpha = 0.0;
    double peak_phi = 0.0;
    bool peak_in_outer_ring = false;
};

/// Integrates exp(marginal_mu_log_integrand) over the nested boxes
/// (2^-k, 2^k)^2, k = 1..levels. Each box is the previous one plus a ring, and
/// the rings are integrated separately in (log alpha, log phi), so the
/// sequence is nondecreasing by construction.
///
/// Verdict: Converging when the last relative increment is below
/// convergence_increment and the integrand peak is not in the outermost ring;
/// Diverging when every growth ratio exceeds growth_threshold or the ring
/// integrals have plateaued; Inconclusive otherwise.
///
/// Throws quad::QuadratureError naming the box when the integrand is not
/// finite, and std::domain_error from the PhiInterest factor.
ProprietyEvidence propriety_evidence(PriorSpec spec, const Dataset& data, int levels,
                                     const ProprietyOptions& options = {});

}  // namespace ggbayes
