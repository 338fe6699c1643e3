#include "ggbayes/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace ggbayes::quad {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Rule15 {
    std::array<double, 15> node{};
    std::array<double, 15> kronrod{};
    std::array<double, 15> gauss{};
};

constexpr Rule15 make_rule() {
    Rule15 r{};
    for (int k = 0; k < 15; ++k) {
        const int j = k < 7 ? k : 14 - k;
        r.node[k] = k < 7 ? -kXgk[j] : (k == 7 ? 0.0 : kXgk[j]);
        r.kronrod[k] = kWgk[j];
        r.gauss[k] = (j % 2 == 1) ? kWg[j / 2] : 0.0;
    }
    return r;
}

constexpr Rule15 kRule = make_rule();

struct Interval {
    double a, b, value, error;
};

Interval gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double v = f(c + h * kRule.node[i]);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "integrate: non-finite integrand at x=" << c + h * kRule.node[i];
            throw QuadratureError(os.str());
        }
        k += kRule.kronrod[i] * v;
        g += kRule.gauss[i] * v;
    }
    return {a, b, k * h, std::fabs((k - g) * h)};
}

// Compensated sum in a fixed order.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace

std::string to_string(const Box& box) {
    std::ostringstream os;
    os.precision(10);
    os << "[" << box.x0 << ", " << box.x1 << "] x [" << box.y0 << ", " << box.y1 << "]";
    return os.str();
}

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts) {
    std::vector<Interval> parts{gk15(f, a, b)};
    auto by_error = [&parts](std::size_t l, std::size_t r) {
        if (parts[l].error != parts[r].error) return parts[l].error < parts[r].error;
        return l > r;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_error)> heap(by_error);
    heap.push(0);
    std::vector<char> active{1};

    double total = parts[0].value;
    double total_err = parts[0].error;
    while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::fabs(total))) {
        if (static_cast<int>(parts.size()) >= opts.max_panels) {
            if (opts.throw_on_budget) throw QuadratureError("integrate: interval budget exhausted");
            break;
        }
        const std::size_t worst = heap.top();
        heap.pop();
        const Interval parent = parts[worst];
        active[worst] = 0;
        const double mid = 0.5 * (parent.a + parent.b);
        for (const auto& child : {gk15(f, parent.a, mid), gk15(f, mid, parent.b)}) {
            parts.push_back(child);
            active.push_back(1);
            heap.push(parts.size() - 1);
            total += child.value;
            total_err += child.error;
        }
        total -= parent.value;
        total_err -= parent.error;
    }

    NeumaierSum value, error;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!active[i]) continue;
        value.add(parts[i].value);
        error.add(parts[i].error);
    }
    return {value.value(), error.value(), static_cast<int>(parts.size())};
}

Result integrate_half_line(const std::function<double(double)>& f, const Options& opts) {
    // x = w^2 on (0,1): dx = 2w dw.  x = w^-2 on (1,inf): dx = 2 w^-3 dw.
    auto lower = [&f](double w) { return w == 0.0 ? 0.0 : 2.0 * w * f(w * w); };
    auto upper = [&f](double w) {
        if (w == 0.0) return 0.0;
        return 2.0 / (w * w * w) * f(1.0 / (w * w));
    };
    Options half = opts;
    half.abs_tol = 0.5 * opts.abs_tol;
    const Result lo = integrate(lower, 0.0, 1.0, half);
    const Result hi = integrate(upper, 0.0, 1.0, half);
    return {lo.value + hi.value, lo.error + hi.error, lo.panels + hi.panels};
}

namespace {

struct Panel {
    Box box;
    double value;  // integral of exp(log f - offset)
    double error;
    double err_x;
    double err_y;
};

class LogIntegrator {
public:
    LogIntegrator(const LogColumn& log_f, const Options& opts) : log_f_(log_f), opts_(opts) {}

    LogResult run(const Box& box, int nx, int ny) {
        const double dx = (box.x1 - box.x0) / nx;
        const double dy = (box.y1 - box.y0) / ny;
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                const Box b{box.x0 + i * dx, i + 1 == nx ? box.x1 : box.x0 + (i + 1) * dx,
                            box.y0 + j * dy, j + 1 == ny ? box.y1 : box.y0 + (j + 1) * dy};
                add_panel(b);
            }
        }
        refine();
        return finish();
    }

private:
    void add_panel(const Box& b) {
        const double cx = 0.5 * (b.x0 + b.x1), hx = 0.5 * (b.x1 - b.x0);
        const double cy = 0.5 * (b.y0 + b.y1), hy = 0.5 * (b.y1 - b.y0);
        std::array<double, 15> ys{};
        for (int j = 0; j < 15; ++j) ys[j] = cy + hy * kRule.node[j];

        std::array<std::array<double, 15>, 15> lv{};
        double panel_max = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 15; ++i) {
            const double x = cx + hx * kRule.node[i];
            log_f_(x, ys, lv[i]);
            for (int j = 0; j < 15; ++j) {
                const double v = lv[i][j];
                if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
                    std::ostringstream os;
                    os << "integrate_log_2d: non-finite integrand at (" << x << ", " << ys[j]
                       << ") inside box " << to_string(b);
                    throw QuadratureError(os.str());
                }
                if (v > panel_max) {
                    panel_max = v;
                    if (v > peak_log_) {
                        peak_log_ = v;
                        peak_x_ = x;
                        peak_y_ = ys[j];
                    }
                }
            }
        }
        if (panel_max > offset_ + 50.0) rescale(panel_max);

        double k = 0.0, g = 0.0, gx = 0.0, gy = 0.0;
        if (std::isfinite(offset_)) {
            for (int i = 0; i < 15; ++i) {
                for (int j = 0; j < 15; ++j) {
                    const double v = std::exp(lv[i][j] - offset_);
                    k += kRule.kronrod[i] * kRule.kronrod[j] * v;
                    g += kRule.gauss[i] * kRule.gauss[j] * v;
                    gx += kRule.gauss[i] * kRule.kronrod[j] * v;
                    gy += kRule.kronrod[i] * kRule.gauss[j] * v;
                }
            }
        }
        const double area = hx * hy;
        panels_.push_back({b, k * area, std::fabs(k - g) * area, std::fabs(k - gx) * area,
                           std::fabs(k - gy) * area});
        active_.push_back(1);
        total_ += panels_.back().value;
        total_err_ += panels_.back().error;
    }

    void rescale(double new_offset) {
        if (std::isfinite(offset_)) {
            const double f = std::exp(offset_ - new_offset);
            for (auto& p : panels_) {
                p.value *= f;
                p.error *= f;
                p.err_x *= f;
                p.err_y *= f;
            }
            total_ *= f;
            total_err_ *= f;
        }
        offset_ = new_offset;
    }

    void refine() {
        auto by_error = [this](std::size_t l, std::size_t r) {
            if (panels_[l].error != panels_[r].error) return panels_[l].error < panels_[r].error;
            return l > r;
        };
        // Errors are rescaled in place, which preserves heap order.
        std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_error)> heap(by_error);
        for (std::size_t i = 0; i < panels_.size(); ++i) heap.push(i);

        while (total_err_ > opts_.rel_tol * std::fabs(total_) && !heap.empty()) {
            if (static_cast<int>(panels_.size()) >= opts_.max_panels) {
                if (opts_.throw_on_budget) {
                    throw QuadratureError("integrate_log_2d: panel budget exhausted");
                }
                break;
            }
            const std::size_t worst = heap.top();
            heap.pop();
            active_[worst] = 0;
            const Panel parent = panels_[worst];
            total_ -= parent.value;
            total_err_ -= parent.error;
            const Box& b = parent.box;
            const std::size_t first_child = panels_.size();
            if (parent.err_x >= parent.err_y) {
                const double mid = 0.5 * (b.x0 + b.x1);
                add_panel({b.x0, mid, b.y0, b.y1});
                add_panel({mid, b.x1, b.y0, b.y1});
            } else {
                const double mid = 0.5 * (b.y0 + b.y1);
                add_panel({b.x0, b.x1, b.y0, mid});
                add_panel({b.x0, b.x1, mid, b.y1});
            }
            heap.push(first_child);
            heap.push(first_child + 1);
        }
    }

    LogResult finish() const {
        NeumaierSum value, error;
        for (std::size_t i = 0; i < panels_.size(); ++i) {
            if (!active_[i]) continue;
            value.add(panels_[i].value);
            error.add(panels_[i].error);
        }
        LogResult r;
        const double v = value.value();
        r.log_value = v > 0.0 ? offset_ + std::log(v) : -std::numeric_limits<double>::infinity();
        r.rel_error = v > 0.0 ? error.value() / v : 0.0;
        r.panels = static_cast<int>(panels_.size());
        r.peak_log = peak_log_;
        r.peak_x = peak_x_;
        r.peak_y = peak_y_;
        return r;
    }

    const LogColumn& log_f_;
    Options opts_;
    std::vector<Panel> panels_;
    std::vector<char> active_;
    double offset_ = -std::numeric_limits<double>::infinity();
    double total_ = 0.0;
    double total_err_ = 0.0;
    double peak_log_ = -std::numeric_limits<double>::infinity();
    double peak_x_ = 0.0;
    double peak_y_ = 0.0;
};

}  // namespace

LogResult integrate_log_2d(const LogColumn& log_f, const Box& box, const Options& opts,
                           double initial_panel) {
    if (!(box.x1 > box.x0) || !(box.y1 > box.y0)) {
        throw std::invalid_argument("integrate_log_2d: empty box " + to_string(box));
    }
    int nx = 1, ny = 1;
    if (initial_panel > 0.0) {
        nx = std::max(1, static_cast<int>(std::ceil((box.x1 - box.x0) / initial_panel)));
        ny = std::max(1, static_cast<int>(std::ceil((box.y1 - box.y0) / initial_panel)));
    }
    LogIntegrator integrator(log_f, opts);
    return integrator.run(box, nx, ny);
}

}  // namespace ggbayes::quad
