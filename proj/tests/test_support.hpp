#pragma once

// Random generators shared by the property-style tests.

#include <random>
#include <vector>

#include "kinex/kernel.hpp"

namespace kinex::testing_support {

/// Uniform on the simplex (normalized exponentials).
inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> x(n);
  double sum = 0.0;
  for (auto& v : x) sum += (v = e(rng));
  for (auto& v : x) v /= sum;
  return x;
}

/// Random simplex point with total income exactly `mu`, obtained by mixing a
/// random point with the vertex on the opposite side of `mu`.
inline std::vector<double> random_simplex_with_income(std::mt19937_64& rng,
                                                      const ClassLadder& ladder, double mu) {
  auto x = random_simplex(rng, ladder.size());
  double cur = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) cur += ladder[i] * x[i];
  const bool too_rich = cur > mu;
  const double anchor = too_rich ? ladder.lowest() : ladder.highest();
  const double keep = (mu - anchor) / (cur - anchor);
  for (auto& v : x) v *= keep;
  x[too_rich ? 0 : x.size() - 1] += 1.0 - keep;
  return x;
}

}  // namespace kinex::testing_support
