#pragma once

#include <random>

#include "heis/group.hpp"

namespace heis::testing {

inline Point random_point(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Point p(n);
  for (double& c : p.coords()) c = u(rng);
  return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace heis::testing
