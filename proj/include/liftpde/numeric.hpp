#pragma once

#include <cmath>
#include <cstddef>

namespace liftpde {

// Neumaier compensated accumulator. Quadrature weight normalization must hold
// to 1e-12 over stencils with O(10^4) entries, which plain left-to-right
// summation does not guarantee at double precision.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
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

template <class Range>
double compensated_sum(const Range& xs) {
  CompensatedSum acc;
  for (const double x : xs) acc.add(x);
  return acc.value();
}

}  // namespace liftpde
