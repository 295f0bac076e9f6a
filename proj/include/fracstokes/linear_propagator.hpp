#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fracstokes/fractional_oracle.hpp"
#include "fracstokes/spectral_grid.hpp"

namespace fracstokes {

/// Fourier symbol of the homogeneous evolution at time t:
/// m_k = E_{alpha,1}(-|xi_k|^2 t^alpha), aligned with SpectralField storage.
struct Multiplier {
  GridSpec grid;
  double alpha = 1.0;
  double t = 0.0;
  std::vector<double> m;
};

/// E_{alpha,1}(-(pi/L)^2 s t^alpha) indexed by the integer shell s = |k|^2.
/// Entries for shells that do not occur on the grid are NaN.
struct ShellTable {
  double alpha;
  double t;
  std::vector<double> values;
};

/// Cached per-shell multiplier values. The in-memory cache is keyed by
/// (alpha, t, grid); if FRACSTOKES_CACHE names a directory, tables are also
/// persisted there.
std::shared_ptr<const ShellTable> shell_multiplier(const GridSpec& grid, double alpha, double t);

/// Shared wave-number tables for a grid.
std::shared_ptr<const WaveNumbers> wave_numbers(const GridSpec& grid);

/// Throws DomainError for t < 0 or alpha outside (0, 1]; ConvergenceError from
/// mittag_leffler propagates.
Multiplier multiplier(const GridSpec& grid, double alpha, double t);

/// coeffs[i] *= table[shell[i]] in place.
void apply_shell_table(const WaveNumbers& wn, const ShellTable& table,
                       std::complex<double>* coeffs);

ScalarField evolve_homogeneous(const ScalarField& u0, double alpha, double t);

/// Discrete Green function: the homogeneous evolution of a unit-mass discrete
/// delta at the origin. t must be > 0.
ScalarField green_function(const GridSpec& grid, double alpha, double t);

/// f(x, t) sampled on the grid of u0.
using SourceSampler = std::function<ScalarField(double t)>;

/// u(t_end) = G(t_end) * u0 + int_0^{t_end} G(t_end - tau) * f(tau) dtau with the
/// trapezoidal rule on the nodes of `time`. Prints a warning to stderr for
/// fewer than 8 steps.
ScalarField evolve_duhamel(const ScalarField& u0, const SourceSampler& source, double alpha,
                           const TimeGrid& time);

struct StabilityReport {
  double norm_t;
  double norm_0;
  double ratio;
};

/// ||u(t)||_p against ||u0||_p for the homogeneous evolution; p in {1, 2, inf}.
StabilityReport stability_report(const ScalarField& u0, double alpha, double t, double p);

}  // namespace fracstokes
