#pragma once

#include "vprisk/profiles.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace vprisk::testing {

struct NamedProfile {
  std::string name;
  VarianceProfile profile;
};

inline Index round_up(Index v, Index k) { return (v + k - 1) / k * k; }

// The six-profile zoo, normalised to unit mean. Block and piecewise need
// divisible dimensions; p (and n) are rounded up to the next valid size.
inline std::vector<NamedProfile> zoo(Index n, Index p) {
  std::vector<NamedProfile> out;
  out.push_back({"constant", make_constant(n, p, 1.0)});
  out.push_back({"quasi_ds", make_quasi_doubly_stochastic(n, p, 1)});
  out.push_back({"piecewise",
                 normalize(make_piecewise(round_up(n, 4), round_up(p, 4), 0.0005, 1.0))});
  out.push_back({"block", normalize(make_block(round_up(n, 12), round_up(p, 12), 0.5, 2.0, 4.0))});
  out.push_back({"alternated", normalize(make_alternated_columns(n, p, 0.5, 1.5))});
  out.push_back({"polynomial", normalize(make_polynomial(n, p, 0.1))});
  return out;
}

// Marchenko-Pastur oracle written from the quadratic formula in long double:
// -lambda c m^2 + (c - 1 - lambda) m + 1 = 0, larger root.
inline double mp_root(double c, double lambda) {
  const long double a = -static_cast<long double>(lambda) * c;
  const long double b = static_cast<long double>(c) - 1.0L - lambda;
  const long double disc = std::sqrt(b * b - 4.0L * a);
  return static_cast<double>((-b - disc) / (2.0L * a));
}

// Companion: 1/mt = lambda + c/(1 + mt)  <=>  -lambda mt^2 + (1 - c - lambda) mt + 1 = 0.
inline double mp_companion_root(double c, double lambda) {
  const long double a = -static_cast<long double>(lambda);
  const long double b = 1.0L - c - lambda;
  const long double disc = std::sqrt(b * b - 4.0L * a);
  return static_cast<double>((-b - disc) / (2.0L * a));
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace vprisk::testing
