#pragma once

#include <cmath>
#include <span>

namespace riesz {

// Neumaier's variant of Kahan summation: the rounding error of every addition
// is captured exactly and folded back in at the end.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
    return *this;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc += v;
  return acc.value();
}

}  // namespace riesz
