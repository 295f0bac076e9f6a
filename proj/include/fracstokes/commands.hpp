#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "fracstokes/fujita.hpp"
#include "fracstokes/run_config.hpp"

namespace fracstokes::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitDomain = 2,  ///< invalid arguments or configuration
  kExitIo = 3,
  kExitConvergence = 4,
  kExitBudget = 5,
  kExitBlowUp = 10,
  kExitInconclusive = 11,
  kExitNoBoundary = 12,
};

int exit_code_for(RunStatus status);

/// Builds the initial field from its spec; file inputs must match `grid` if given.
ScalarField build_initial(const InitialSpec& spec, const std::optional<GridSpec>& grid);

/// Prints E_{alpha,beta}(z).
int cmd_ml(double alpha, double beta, double z, std::ostream& out);

/// Prints t, y, E_{alpha,1}(-lambda t^alpha) for the time-stepped scalar mode.
int cmd_mode_oracle(double lambda, double alpha, double t_end, int steps, std::ostream& out);

/// Homogeneous evolution to t_end: u_final.frdf, checkpoints and norms.csv.
int cmd_evolve_linear(const RunConfig& config, const std::optional<std::filesystem::path>& u0_file,
                      const std::filesystem::path& out_dir, std::ostream& out);

/// run.jsonl, outcome.json and FRDF checkpoints; returns 0, 10 or 11 by status.
int cmd_evolve_semilinear(const RunConfig& config, const std::filesystem::path& out_dir,
                          std::ostream& out);

/// As cmd_evolve_semilinear with u_ and v_ prefixed outputs.
int cmd_evolve_system(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& out);

struct ExponentRequest {
  bool system = false;
  ExponentInputs scalar;
  std::optional<double> p;
  SystemExponentInputs pair;
};

/// Prints a JSON object with the critical exponent data.
int cmd_exponent(const ExponentRequest& request, std::ostream& out);

/// sweep.csv and boundary.json; 0 with a boundary, 12 without.
int cmd_sweep(const RunConfig& config, const std::filesystem::path& out_dir, int jobs, std::ostream& out);

/// Parses the command line and dispatches; library exceptions become exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracstokes::cli
