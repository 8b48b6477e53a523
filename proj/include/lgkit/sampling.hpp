#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lgkit {

/// Halton points with a seeded Cranley-Patterson rotation. Point i is a
/// pure function of (dim, seed, i), so sampled checks can be evaluated in
/// any order and still aggregate identically.
class LowDiscrepancy {
 public:
  LowDiscrepancy(int dim, std::uint64_t seed);

  int dim() const { return static_cast<int>(shift_.size()); }
  std::vector<double> point(std::size_t index) const;

 private:
  std::vector<double> shift_;
};

double radical_inverse(std::size_t index, int base);

}  // namespace lgkit
