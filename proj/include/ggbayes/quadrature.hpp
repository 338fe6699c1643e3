#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace ggbayes::quad {

/// Raised when an integrand is non-finite inside the integration region or the
/// panel budget is exhausted before the tolerance is met.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    double abs_tol = 0.0;
    double rel_tol = 1e-10;
    int max_panels = 5000;
    bool throw_on_budget = false;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts = {});

/// Integral over (0, inf) of a function with at most algebraic endpoint
/// behaviour. The halves (0, 1) and (1, inf) are mapped to (0, 1) by x = w^2
/// and x = w^-2 respectively, which removes square-root endpoint singularities
/// and x^(-3/2) tails.
Result integrate_half_line(const std::function<double(double)>& f, const Options& opts = {});

struct Box {
    double x0, x1, y0, y1;
};

std::string to_string(const Box& box);

/// Evaluates log f(x, y_j) for one x and a column of y values.
using LogColumn = std::function<void(double x, std::span<const double> ys, std::span<double> out)>;

struct LogResult {
    double log_value = 0.0;  ///< log of the integral; -inf when the integral is 0
    double rel_error = 0.0;
    int panels = 0;
    double peak_log = 0.0;   ///< largest log f seen on any node
    double peak_x = 0.0;
    double peak_y = 0.0;
};

/// Adaptive tensor-product Gauss-Kronrod integration of exp(log f) over a box.
///
/// Values are handled relative to a running maximum so that integrands whose
/// magnitude is far outside double range still produce a finite log integral.
/// Panels are bisected along the direction with the larger one-dimensional
/// error indicator. The final sum runs over panels in creation order, so the
/// result is reproducible. A positive initial_panel pre-splits the box into a
/// grid of panels no wider than that, so narrow peaks are not skipped.
LogResult integrate_log_2d(const LogColumn& log_f, const Box& box, const Options& opts = {},
                           double initial_panel = 0.0);

}  // namespace ggbayes::quad
