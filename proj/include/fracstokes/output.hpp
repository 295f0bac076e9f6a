#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracstokes/fujita.hpp"
#include "fracstokes/semilinear_solver.hpp"
#include "fracstokes/spectral_grid.hpp"

namespace fracstokes {

/// Shortest form with at most 10 significant digits ("inf", "-inf", "nan" for
/// non-finite values). Locale-independent.
std::string format_number(double v);
/// "NA" when absent.
std::string format_number(const std::optional<double>& v);
/// Fixed with 10 decimals, or scientific with 10 decimals below 1e-3 in magnitude.
std::string format_ml_value(double v);

/// v rounded to 10 significant digits (for JSON emission).
double round_significant(double v);

inline constexpr const char* kSweepCsvHeader =
    "p,amplitude,alpha,sigma,rho,N,status,t_star,max_sup_norm,picard_iters,runtime_s";

std::string sweep_csv(const SweepResult& result, const SweepConfig& config);
/// Boundary summary plus the inconclusive cells and monotonicity warnings.
std::string boundary_json(const SweepResult& result, const SweepConfig& config);

struct NormRow {
  double t;
  double p;
  double norm;
};
/// Header t,p,norm; p = infinity prints as "inf".
std::string norm_csv(const std::vector<NormRow>& rows);

/// One JSON object per accepted node: {"t", "sup", "iterations"}, followed by a
/// final {"event": "outcome", ...} line.
std::string run_log_jsonl(const RunOutcome& outcome, int window_nodes);
std::string outcome_json(const RunOutcome& outcome);
/// Single-line key=value summary for stdout.
std::string outcome_line(const RunOutcome& outcome);

}  // namespace fracstokes
