#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracstokes/fractional_oracle.hpp"
#include "fracstokes/spectral_grid.hpp"

namespace fracstokes {

/// coefficient * t^sigma * |x|^rho * u^p.
struct SourceSpec {
  double coefficient = 1.0;
  double sigma = 0.0;
  double rho = 0.0;
  double p = 2.0;

  /// coefficient >= 0, sigma > -1, rho >= 0, p >= 1 (DomainError otherwise).
  void validate() const;
};

struct SolveConfig {
  TimeGrid time{1.0, 100};
  double picard_tol = 1e-10;
  int picard_max_iters = 60;
  double blowup_threshold = 1e6;
  bool nonneg_clamp = false;
  /// Nodes solved jointly per Picard window; 0 iterates the whole horizon at once.
  int window_nodes = 1;
  /// Above this sup-norm, five consecutive rising Picard distances or reaching
  /// the iteration cap count as divergence (BlowUp); below it the cap is Inconclusive.
  double divergence_floor = 1e3;
  /// Fault injection: keep only the last `history_limit` nodes of the Duhamel
  /// history (negative keeps all of it).
  int history_limit = -1;
  bool keep_trajectory = true;

  void validate() const;
};

enum class RunStatus { Global, BlowUp, Inconclusive };
const char* to_string(RunStatus status);

using Trajectory = std::vector<ScalarField>;

struct RunOutcome {
  RunStatus status = RunStatus::Inconclusive;
  std::optional<double> t_star;
  /// (t_j, ||u(t_j)||_inf) for every accepted node, starting at t = 0.
  std::vector<std::pair<double, double>> sup_norm_history;
  /// Picard iterations used by each window.
  std::vector<int> picard_iters_history;
  /// Successive sup-norm distances of the last window iterated.
  std::vector<double> last_distances;
  /// Largest contraction_estimate over all windows (NaN if never measurable).
  double contraction_ratio = 0.0;
  double max_sup_norm = 0.0;
  double min_value = 0.0;
  long clamped_samples = 0;
  std::string note;
  /// Accepted nodes (empty unless keep_trajectory).
  Trajectory trajectory;
};

/// coefficient * t^sigma * r(x)^rho * u^p with r the minimum-image distance
/// to the box center. With nonneg_clamp the base is max(u, 0) and `clamped`
/// (if given) is incremented per clamped sample; otherwise negative samples
/// with non-integer p raise NegativeBaseError. t = 0 with sigma < 0 is a
/// DomainError (the singular endpoint is handled by the time quadrature).
ScalarField nonlinearity_field(const ScalarField& u, const SourceSpec& spec, double t,
                               bool nonneg_clamp = false, long* clamped = nullptr);

/// One application of the mild-solution map on every node of `time`:
///   Psi(u)(t_j) = G(t_j) * u0 + sum_{i<=j} w_ij G(t_j - t_i) * f(u(t_i), t_i).
/// Trapezoidal weights; for sigma < 0 the node-0 weight is dropped and the
/// first panel integrates t^sigma exactly against the value at t_1.
/// Overflow shows up as non-finite samples, not as an exception.
Trajectory picard_step(const Trajectory& candidate, const ScalarField& u0, const SourceSpec& spec,
                       double alpha, const TimeGrid& time, bool nonneg_clamp = false);

/// Picard iteration of the mild-solution equation, marching window by window
/// with the full Duhamel history. Never throws on numerical failure: the
/// outcome carries Global, BlowUp (with t_star) or Inconclusive. Throws
/// DomainError on invalid inputs (negative u0, sup u0 >= threshold).
RunOutcome evolve_semilinear(const ScalarField& u0, const SourceSpec& spec, double alpha,
                             const SolveConfig& config);

/// u driven by spec_uv * v^p with order alpha, v driven by spec_vu * u^q with
/// order beta. The two outcomes share status and t_star.
std::pair<RunOutcome, RunOutcome> evolve_system(const ScalarField& u0, const ScalarField& v0,
                                                const SourceSpec& spec_uv,
                                                const SourceSpec& spec_vu, double alpha,
                                                double beta, const SolveConfig& config);

/// Geometric mean of the last (up to three) ratios of successive distances.
/// 0 once a distance vanishes; NaN with fewer than three entries.
double contraction_estimate(std::span<const double> distances);

}  // namespace fracstokes
