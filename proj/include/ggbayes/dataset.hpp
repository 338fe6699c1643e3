#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ggbayes {

/// Positive lifetimes with the sufficient statistics the posterior needs.
class Dataset {
public:
    explicit Dataset(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    std::span<const double> log_values() const { return log_values_; }
    std::size_t size() const { return values_.size(); }
    double sum_log() const { return sum_log_; }
    double sum() const { return sum_; }
    double mean() const { return sum_ / static_cast<double>(values_.size()); }
    bool has_distinct_values() const;

    /// log(sum_i t_i^power), via a max-shifted log-sum-exp.
    double log_sum_pow(double power) const;

private:
    std::vector<double> values_;
    std::vector<double> log_values_;
    double sum_log_ = 0.0;
    double sum_ = 0.0;
    double max_log_ = 0.0;
    double min_log_ = 0.0;
};

}  // namespace ggbayes
