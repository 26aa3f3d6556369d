#pragma once

#include <vector>

namespace ctcsim {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with n nodes mapped onto [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

// Trapezoid rule for a periodic integrand on [a, a + period).
QuadratureRule periodic_trapezoid(int n, double a, double period);

}  // namespace ctcsim
