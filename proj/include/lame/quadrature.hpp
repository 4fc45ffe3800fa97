#pragma once

#include <vector>

namespace lame {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);
// Gauss-Legendre rule mapped to [a, b].
Rule gauss_legendre(int n, double a, double b);
// Composite rule: panels split at the given sorted breakpoints, n nodes each.
Rule composite_gauss(const std::vector<double>& breaks, int n_per_panel);

}  // namespace lame
