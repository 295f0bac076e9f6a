#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracstokes/fujita.hpp"
#include "fracstokes/semilinear_solver.hpp"
#include "fracstokes/spectral_grid.hpp"

namespace fracstokes {

/// `key = value` lines grouped under `[section]` headers; `#` and `;` start
/// comments. Every value remembers its line for error reporting.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  /// Throws ConfigError on malformed lines, keys outside a section and duplicates.
  static IniDocument parse(const std::string& text);

  bool has_section(const std::string& section) const;
  const Entry* find(const std::string& section, const std::string& key) const;
  const std::map<std::string, std::map<std::string, Entry>>& sections() const { return sections_; }
  int section_line(const std::string& section) const;

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

struct InitialSpec {
  enum class Kind { Gaussian, File, Zero };
  Kind kind = Kind::Gaussian;
  double amplitude = 1.0;
  double width = 0.0;  ///< 0 selects L/8
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::filesystem::path file;
};

/// Parsed and validated configuration for the CLI subcommands.
struct RunConfig {
  std::optional<GridSpec> grid;
  double t_end = 1.0;
  int steps = 100;

  double alpha = 1.0;
  std::optional<double> beta;
  SourceSpec source_u{1.0, 0.0, 0.0, 2.0};
  SourceSpec source_v{1.0, 0.0, 0.0, 2.0};

  InitialSpec initial_u;
  InitialSpec initial_v;
  bool has_initial_v = false;

  double picard_tol = 1e-10;
  int max_iters = 60;
  double blowup_threshold = 1e6;
  bool nonneg_clamp = false;
  int window_nodes = 1;
  double divergence_floor = 1e3;

  bool has_sweep = false;
  double p_min = 1.5;
  double p_max = 4.5;
  double p_step = 0.25;
  std::vector<double> amplitudes{0.05, 0.5, 5.0};
  double horizon = 0.0;  ///< 0 falls back to [time] t_end
  int sweep_steps = 0;   ///< 0 falls back to [time] steps
  double budget_s = 0.0;
  std::uint64_t seed = 0;
  double sweep_width = 0.0;
  double growth_factor = 20.0;
  double center_jitter = 0.0;
  double boundary_width = 0.1;
  bool refine = true;
  bool record_timings = false;
  int picard_max_iters_sweep = 60;

  std::filesystem::path output_dir = "out";
  std::vector<std::string> formats{"frdf", "csv", "jsonl"};
  int checkpoint_every = 0;  ///< 0 writes only the final field

  bool wants(const std::string& format) const;
  /// The grid, or ConfigError if [grid] was absent.
  const GridSpec& require_grid() const;
  SolveConfig solve_config() const;
  SweepConfig sweep_config() const;
};

/// Parses and validates; errors carry the offending line.
RunConfig parse_run_config(const std::string& text);
/// Throws IoError if the file cannot be read.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace fracstokes
