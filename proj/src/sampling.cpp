#include "lgkit/sampling.hpp"

#include "lgkit/types.hpp"

#include <array>
#include <cmath>
#include <random>

namespace lgkit {

namespace {

constexpr std::array<int, 40> kPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,
    47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107,
    109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173};

}  // namespace

double radical_inverse(std::size_t index, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

LowDiscrepancy::LowDiscrepancy(int dim, std::uint64_t seed) {
  if (dim > static_cast<int>(kPrimes.size()))
    throw Error(ErrorCode::SamplingFailure, "low-discrepancy dimension too large");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  shift_.resize(dim);
  for (auto& s : shift_) s = uni(rng);
}

std::vector<double> LowDiscrepancy::point(std::size_t index) const {
  std::vector<double> u(shift_.size());
  for (std::size_t k = 0; k < shift_.size(); ++k) {
    double v = radical_inverse(index + 1, kPrimes[k]) + shift_[k];
    u[k] = v - std::floor(v);
  }
  return u;
}

}  // namespace lgkit
