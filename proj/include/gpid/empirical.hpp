#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "gpid/core.hpp"

namespace gpid {

// Empirical distribution of a batch of real values.  The CDF is the usual
// right-continuous step function with jumps at the data points; the quantile
// is the left-continuous generalized inverse inf{x : cdf(x) >= t}, so
// quantile(t) is the ceil(t*n)-th order statistic.
class EmpiricalDist {
 public:
  explicit EmpiricalDist(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DataError("EmpiricalDist: empty sample");
    std::sort(values_.begin(), values_.end());
  }

  std::size_t n() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  std::size_t count_leq(double x) const {
    return static_cast<std::size_t>(std::upper_bound(values_.begin(), values_.end(), x) - values_.begin());
  }

  double cdf(double x) const { return static_cast<double>(count_leq(x)) / static_cast<double>(n()); }

  // Smallest order-statistic index j (1-based) with j/n >= t.  Comparisons are
  // done on j/n as doubles so the Galois pair with cdf() holds exactly on the
  // grid {j/n}.
  std::size_t quantile_index(double t) const {
    if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("EmpiricalDist::quantile: t must be in (0,1]");
    const double nn = static_cast<double>(n());
    auto j = static_cast<std::size_t>(std::ceil(t * nn));
    if (j < 1) j = 1;
    if (j > n()) j = n();
    while (j > 1 && static_cast<double>(j - 1) / nn >= t) --j;
    while (j < n() && static_cast<double>(j) / nn < t) ++j;
    return j;
  }

  double quantile(double t) const { return values_[quantile_index(t) - 1]; }

 private:
  std::vector<double> values_;
};

}  // namespace gpid
