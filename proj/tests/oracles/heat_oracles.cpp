#include "heat_oracles.hpp"

#include <cmath>
#include <numbers>

namespace fracstokes::testing {

ScalarField gaussian_heat_solution(const GridSpec& grid, double amplitude, double width, double t) {
  const double var = width * width + 2.0 * t;
  const double amp = amplitude * std::pow(width * width / var, 0.5 * grid.ndim);
  ScalarField f(grid);
  const int m = grid.points;
  const int n0 = grid.ndim >= 3 ? m : 1;
  const int n1 = grid.ndim >= 2 ? m : 1;
  std::size_t idx = 0;
  for (int a = 0; a < n0; ++a) {
    for (int b = 0; b < n1; ++b) {
      for (int c = 0; c < m; ++c, ++idx) {
        double r2 = grid.coordinate(c) * grid.coordinate(c);
        if (grid.ndim >= 2) r2 += grid.coordinate(b) * grid.coordinate(b);
        if (grid.ndim >= 3) r2 += grid.coordinate(a) * grid.coordinate(a);
        f.values[idx] = amp * std::exp(-r2 / (2.0 * var));
      }
    }
  }
  return f;
}

ScalarField periodized_heat_kernel(const GridSpec& grid, double t) {
  ScalarField f(grid);
  const double period = 2.0 * grid.half_width;
  const double norm = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);
  for (int i = 0; i < grid.points; ++i) {
    const double x = grid.coordinate(i);
    double sum = norm * std::exp(-x * x / (4.0 * t));
    for (int n = 1;; ++n) {
      const double a = x + n * period;
      const double b = x - n * period;
      const double term = norm * (std::exp(-a * a / (4.0 * t)) + std::exp(-b * b / (4.0 * t)));
      sum += term;
      if (term < 1e-14 * norm) break;
    }
    f.values[i] = sum;
  }
  return f;
}

}  // namespace fracstokes::testing
