#pragma once

#include <cmath>

namespace eklab {

/// Neumaier's variant of Kahan summation. The running error term keeps
/// long sums of mixed-magnitude terms accurate to a few ulps of the result.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double initial) : sum_(initial) {}

  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }

  CompensatedSum& operator+=(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
    return *this;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace eklab
