#pragma once

#include <span>
#include <vector>

namespace fracstokes {

/// Uniform grid t_j = j * dt on [0, t_end].
class TimeGrid {
 public:
  TimeGrid(double t_end, int steps);

  double t_end() const { return t_end_; }
  int steps() const { return steps_; }
  double dt() const { return t_end_ / steps_; }
  double node(int j) const { return j == steps_ ? t_end_ : j * dt(); }
  std::vector<double> nodes() const;

 private:
  double t_end_;
  int steps_;
};

/// Product-trapezoid weights for the fractional integral
///   (I^alpha f)(t_n) = 1/Gamma(alpha) int_0^{t_n} (t_n - s)^(alpha-1) f(s) ds
/// with f replaced by its piecewise-linear interpolant, so the kernel is
/// integrated exactly on every panel including [t_0, t_1].
///
///   (I^alpha f)_n = dt^alpha / Gamma(alpha+2) * sum_k a_{k,n} f_k
///   a_{0,n} = (n-1)^(alpha+1) - (n-1-alpha) n^alpha
///   a_{k,n} = (n-k+1)^(alpha+1) - 2 (n-k)^(alpha+1) + (n-k-1)^(alpha+1)
///   a_{n,n} = 1
struct RLWeights {
  double alpha;
  double scale;                  ///< dt^alpha / Gamma(alpha + 2)
  std::vector<double> weights;   ///< weights[d] = a_{n-d,n} for 1 <= d < n; weights[0] = 1

  RLWeights(double alpha, const TimeGrid& grid);
  /// a_{k,n} (unscaled).
  double at(int k, int n) const;
};

/// Discrete (I^alpha f)(t_j) from samples at nodes 0..j.
double fractional_integral_discrete(std::span<const double> samples, const RLWeights& w, int j);

/// D^{1-alpha} f(t_j) = d/dt I^alpha f, realized as a backward difference of
/// the product-trapezoid fractional integral. alpha = 1 is the identity.
/// Throws std::out_of_range for j = 0 or j beyond the samples.
double rl_derivative_discrete(std::span<const double> samples, const TimeGrid& grid, double alpha,
                              int j);

/// Time-steps y' = -lambda D^{1-alpha} y, y(0) = 1, whose exact solution is
/// E_{alpha,1}(-lambda t^alpha). Integrating once gives y = 1 - lambda I^alpha y;
/// the newest sample enters the product-trapezoid sum linearly and is solved
/// for in closed form. Throws InstabilityError if |y_j| exceeds 1e3.
std::vector<double> solve_scalar_mode(double lambda, double alpha, const TimeGrid& grid);

}  // namespace fracstokes
