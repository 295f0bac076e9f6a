#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracstokes/semilinear_solver.hpp"
#include "fracstokes/spectral_grid.hpp"

namespace fracstokes {

struct ExponentInputs {
  int N = 1;
  double alpha = 1.0;
  double sigma = 0.0;
  double rho = 0.0;

  /// N >= 1, alpha in (0, 1], sigma > -1, rho >= 0 (DomainError otherwise).
  void validate() const;
};

struct SystemExponentInputs {
  int N = 1;
  double alpha = 1.0;
  double beta = 1.0;
  double p = 2.0;
  double q = 2.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;

  void validate() const;
  double p_conj() const { return p / (p - 1.0); }
  double q_conj() const { return q / (q - 1.0); }
};

/// p_c = 1 + (2(sigma+1) + rho alpha) / (N alpha).
double critical_exponent_scalar(const ExponentInputs& inp);

/// lambda = (2/alpha)(alpha-1)p' - 2p' - (2 sigma/alpha + rho) p'/p + 2/alpha + N,
/// p' = p/(p-1). Negative exactly when p < p_c.
double lambda_exponent(double p, const ExponentInputs& inp);

struct LExponents {
  double l1;
  double l2;
};

/// l1 = 2/beta + (1/p)(2 sigma1/beta + rho1) - (1/p')(2/beta + N),
/// l2 = 2/alpha + (1/q)(2 sigma2/alpha + rho2) - (1/q')(2/alpha + N).
LExponents l_exponents(const SystemExponentInputs& inp);

struct DimensionBounds {
  double bound1;
  double bound2;
  bool blowup_predicted;  ///< N <= max(bound1, bound2)
  double l1_over_q_plus_l2;
  double l1_plus_l2_over_p;
};

/// bound1 = (2(alpha(1+sigma1) + p beta(1+sigma2)) + alpha beta(rho1 + p rho2)) / (alpha beta (pq-1))
/// bound2 = (2(beta(1+sigma2) + q alpha(1+sigma1)) + alpha beta(p rho1 + rho2)) / (alpha beta (pq-1))
/// DomainError if pq = 1.
DimensionBounds system_dimension_bounds(const SystemExponentInputs& inp);

/// p_min, p_min + step, ... up to p_max (inclusive within step/1000).
std::vector<double> p_grid(double p_min, double p_max, double step);

struct SweepConfig {
  std::vector<double> p_values;
  std::vector<double> amplitudes;
  GridSpec grid{1, 64, 160.0};
  double alpha = 1.0;
  double sigma = 0.0;
  double rho = 0.0;
  double horizon = 800.0;
  int steps = 2000;
  /// Gaussian width of the initial data; 0 selects L/8.
  double width = 0.0;
  /// Per-cell blow-up threshold is growth_factor * sup(u0); the Picard
  /// divergence floor is a tenth of it.
  double growth_factor = 20.0;
  double picard_tol = 1e-10;
  int picard_max_iters = 60;
  bool nonneg_clamp = true;
  std::uint64_t seed = 0;
  /// Each cell's Gaussian center is shifted uniformly in [-jitter, jitter] per
  /// axis, drawn from the seed and the cell's (p, amplitude).
  double center_jitter = 0.0;
  /// Bisection stops once the boundary bracket is this narrow.
  double boundary_width = 0.1;
  bool refine = true;
  /// Projected-runtime cap in seconds; 0 disables the check.
  double budget_s = 0.0;
  /// Worker threads; 0 uses the hardware concurrency.
  int jobs = 0;
  bool record_timings = false;

  void validate() const;
  double effective_width() const { return width > 0.0 ? width : grid.half_width / 8.0; }
};

struct SweepRecord {
  double p;
  double amplitude;
  RunStatus status;
  std::optional<double> t_star;
  double max_sup_norm;
  int picard_iters;
  std::optional<double> runtime_s;
  bool refinement;
  std::string note;
};

struct SweepResult {
  std::vector<SweepRecord> records;  ///< sorted by (p, amplitude)
  std::optional<double> empirical_boundary;
  double half_width = 0.0;
  double p_c_theory = 0.0;
  int inconclusive = 0;
  /// Cells where a larger amplitude failed to blow up although a smaller one did.
  std::vector<std::string> monotonicity_violations;
};

/// Classifies one cell: BlowUp as reported by the solver; Global only if the
/// horizon was reached and sup u(T_h) < sup u0; Inconclusive otherwise.
RunStatus classify_sweep_outcome(const RunOutcome& outcome, std::string* note = nullptr);

/// Rough wall-clock estimate of run_sweep from a cost model (grid cells plus
/// expected bisection steps, divided across workers).
double projected_runtime_s(const SweepConfig& config);

/// Runs every (p, amplitude) cell on a bounded worker pool, then bisects the
/// smallest-amplitude boundary. Throws BudgetError before doing any work if
/// the projection exceeds budget_s.
SweepResult run_sweep(const SweepConfig& config);

}  // namespace fracstokes
