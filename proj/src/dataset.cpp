#include "ggbayes/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ggbayes {

Dataset::Dataset(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("Dataset: no observations");
    log_values_.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double t = values_[i];
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw std::invalid_argument("Dataset: observation " + std::to_string(i + 1) +
                                        " is not a positive finite value");
        }
        log_values_.push_back(std::log(t));
        sum_log_ += log_values_.back();
        sum_ += t;
    }
    const auto [lo, hi] = std::minmax_element(log_values_.begin(), log_values_.end());
    min_log_ = *lo;
    max_log_ = *hi;
}

bool Dataset::has_distinct_values() const { return max_log_ > min_log_; }

double Dataset::log_sum_pow(double power) const {
    // The largest term is exp(0) after shifting by whichever extreme dominates.
    const double shift = power >= 0.0 ? power * max_log_ : power * min_log_;
    double acc = 0.0;
    for (const double lt : log_values_) acc += std::exp(power * lt - shift);
    return shift + std::log(acc);
}

}  // namespace ggbayes
