#include "fracstokes/fractional_oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fracstokes/errors.hpp"

namespace fracstokes {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
}

}  // namespace

TimeGrid::TimeGrid(double t_end, int steps) : t_end_(t_end), steps_(steps) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("TimeGrid: t_end must be > 0");
  if (steps < 1) throw DomainError("TimeGrid: steps must be >= 1");
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> t(steps_ + 1);
  for (int j = 0; j <= steps_; ++j) t[j] = node(j);
  return t;
}

RLWeights::RLWeights(double a, const TimeGrid& grid)
    : alpha(a), scale(std::pow(grid.dt(), a) / std::tgamma(a + 2.0)) {
  check_alpha(a);
  const int n = grid.steps();
  weights.resize(n + 1);
  weights[0] = 1.0;
  const double p = alpha + 1.0;
  for (int d = 1; d <= n; ++d) {
    weights[d] = std::pow(d + 1.0, p) - 2.0 * std::pow(d, p) + std::pow(d - 1.0, p);
  }
}

double RLWeights::at(int k, int n) const {
  if (k == n) return 1.0;
  if (k == 0) return std::pow(n - 1.0, alpha + 1.0) - (n - 1.0 - alpha) * std::pow(n, alpha);
  return weights[n - k];
}

double fractional_integral_discrete(std::span<const double> samples, const RLWeights& w, int j) {
  if (j < 0 || static_cast<std::size_t>(j) >= samples.size()) {
    throw std::out_of_range("fractional_integral_discrete: node index out of range");
  }
  if (j == 0) return 0.0;
  double acc = w.at(0, j) * samples[0];
  for (int k = 1; k <= j; ++k) acc += w.at(k, j) * samples[k];
  return w.scale * acc;
}

double rl_derivative_discrete(std::span<const double> samples, const TimeGrid& grid, double alpha,
                              int j) {
  check_alpha(alpha);
  if (j < 1) {
    throw std::out_of_range(
        "rl_derivative_discrete: j must be >= 1 (D^{1-alpha} f ~ t^(alpha-1) at t = 0)");
  }
  if (static_cast<std::size_t>(j) >= samples.size() || j > grid.steps()) {
    throw std::out_of_range("rl_derivative_discrete: node index beyond samples");
  }
  if (alpha == 1.0) return samples[j];
  const RLWeights w(alpha, TimeGrid(grid.node(j), j));
  const double now = fractional_integral_discrete(samples, w, j);
  const double before = fractional_integral_discrete(samples, w, j - 1);
  return (now - before) / grid.dt();
}

std::vector<double> solve_scalar_mode(double lambda, double alpha, const TimeGrid& grid) {
  check_alpha(alpha);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("solve_scalar_mode: lambda must be finite and >= 0");
  }
  const RLWeights w(alpha, grid);
  const int n = grid.steps();
  std::vector<double> y(n + 1);
  y[0] = 1.0;
  const double c = lambda * w.scale;
  for (int j = 1; j <= n; ++j) {
    double history = w.at(0, j) * y[0];
    for (int k = 1; k < j; ++k) history += w.weights[j - k] * y[k];
    y[j] = (1.0 - c * history) / (1.0 + c);
    if (!(std::fabs(y[j]) <= 1e3)) {
      throw InstabilityError("solve_scalar_mode: |y| exceeded 1e3 at step " + std::to_string(j));
    }
  }
  return y;
}

}  // namespace fracstokes
