#include "fracstokes/commands.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracstokes/errors.hpp"
#include "fracstokes/field_io.hpp"
#include "fracstokes/fractional_oracle.hpp"
#include "fracstokes/linear_propagator.hpp"
#include "fracstokes/output.hpp"
#include "fracstokes/special_functions.hpp"

namespace fracstokes::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::string indexed_name(const std::string& prefix, std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06zu.frdf", j);
  return prefix + buf;
}

std::vector<NormRow> norm_rows(const ScalarField& u, double t) {
  return {{t, 1.0, field_norm(u, 1.0)}, {t, 2.0, field_norm(u, 2.0)}, {t, kInf, field_norm(u, kInf)}};
}

void write_stream(const fs::path& dir, const std::string& prefix, const Trajectory& traj, int every) {
  if (traj.empty()) return;
  if (every > 0) {
    for (std::size_t j = 0; j < traj.size(); j += every) write_frdf(dir / indexed_name(prefix, j), traj[j]);
  }
  write_frdf(dir / (prefix + "_final.frdf"), traj.back());
}

nlohmann::ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_significant(v);
}

}  // namespace

int exit_code_for(RunStatus status) {
  switch (status) {
    case RunStatus::Global:
      return kExitOk;
    case RunStatus::BlowUp:
      return kExitBlowUp;
    case RunStatus::Inconclusive:
      break;
  }
  return kExitInconclusive;
}

ScalarField build_initial(const InitialSpec& spec, const std::optional<GridSpec>& grid) {
  if (spec.kind == InitialSpec::Kind::File) {
    ScalarField f = read_frdf(spec.file);
    if (grid && !(f.grid == *grid)) {
      throw ConfigError("initial field " + spec.file.string() + " does not match the [grid] section");
    }
    return f;
  }
  if (!grid) throw ConfigError("missing [grid] section");
  if (spec.kind == InitialSpec::Kind::Zero) return ScalarField(*grid);
  const double w = spec.width > 0.0 ? spec.width : grid->half_width / 8.0;
  return gaussian_initial(*grid, spec.amplitude, w, spec.center);
}

int cmd_ml(double alpha, double beta, double z, std::ostream& out) {
  out << format_ml_value(mittag_leffler(alpha, beta, z)) << '\n';
  return kExitOk;
}

int cmd_mode_oracle(double lambda, double alpha, double t_end, int steps, std::ostream& out) {
  const TimeGrid grid(t_end, steps);
  const auto y = solve_scalar_mode(lambda, alpha, grid);
  out << "t,y,reference\n";
  for (int j = 0; j <= steps; ++j) {
    const double t = grid.node(j);
    const double ref = mittag_leffler(alpha, 1.0, -lambda * std::pow(t, alpha));
    out << format_number(t) << ',' << format_number(y[j]) << ',' << format_number(ref) << '\n';
  }
  return kExitOk;
}

int cmd_evolve_linear(const RunConfig& config, const std::optional<fs::path>& u0_file, const fs::path& out_dir,
                      std::ostream& out) {
  InitialSpec spec = config.initial_u;
  if (u0_file) {
    spec.kind = InitialSpec::Kind::File;
    spec.file = *u0_file;
  }
  const ScalarField u0 = build_initial(spec, config.grid);
  ensure_dir(out_dir);

  std::vector<NormRow> rows;
  ScalarField final_field;
  if (config.t_end == 0.0) {
    final_field = u0;
    rows = norm_rows(u0, 0.0);
  } else {
    const TimeGrid time(config.t_end, config.steps);
    const int every = config.checkpoint_every > 0 ? config.checkpoint_every : config.steps;
    for (int j = 0; j < config.steps; j += every) {
      const ScalarField u = j == 0 ? u0 : evolve_homogeneous(u0, config.alpha, time.node(j));
      for (const auto& r : norm_rows(u, time.node(j))) rows.push_back(r);
      if (config.checkpoint_every > 0 && config.wants("frdf")) write_frdf(out_dir / indexed_name("u", j), u);
    }
    final_field = evolve_homogeneous(u0, config.alpha, config.t_end);
    for (const auto& r : norm_rows(final_field, config.t_end)) rows.push_back(r);
    if (config.checkpoint_every > 0 && config.steps % config.checkpoint_every == 0 && config.wants("frdf")) {
      write_frdf(out_dir / indexed_name("u", config.steps), final_field);
    }
  }
  if (config.wants("frdf")) write_frdf(out_dir / "u_final.frdf", final_field);
  if (config.wants("csv")) write_file_atomic(out_dir / "norms.csv", norm_csv(rows));
  out << "t=" << format_number(config.t_end) << " sup=" << format_number(final_field.max_abs())
      << " mean=" << format_number(final_field.mean()) << '\n';
  return kExitOk;
}

int cmd_evolve_semilinear(const RunConfig& config, const fs::path& out_dir, std::ostream& out) {
  const ScalarField u0 = build_initial(config.initial_u, config.grid);
  SolveConfig sc = config.solve_config();
  sc.keep_trajectory = config.wants("frdf");
  const RunOutcome outcome = evolve_semilinear(u0, config.source_u, config.alpha, sc);

  ensure_dir(out_dir);
  if (config.wants("jsonl")) write_file_atomic(out_dir / "run.jsonl", run_log_jsonl(outcome, sc.window_nodes));
  write_file_atomic(out_dir / "outcome.json", outcome_json(outcome));
  if (config.wants("frdf")) write_stream(out_dir, "u", outcome.trajectory, config.checkpoint_every);
  out << outcome_line(outcome) << '\n';
  return exit_code_for(outcome.status);
}

int cmd_evolve_system(const RunConfig& config, const fs::path& out_dir, std::ostream& out) {
  const ScalarField u0 = build_initial(config.initial_u, config.grid);
  const ScalarField v0 = build_initial(config.has_initial_v ? config.initial_v : config.initial_u, config.grid);
  SolveConfig sc = config.solve_config();
  sc.keep_trajectory = config.wants("frdf");
  const double beta = config.beta.value_or(config.alpha);
  const auto [ou, ov] = evolve_system(u0, v0, config.source_u, config.source_v, config.alpha, beta, sc);

  ensure_dir(out_dir);
  for (const auto& [prefix, o] : {std::pair{std::string("u"), &ou}, std::pair{std::string("v"), &ov}}) {
    if (config.wants("jsonl")) {
      write_file_atomic(out_dir / (prefix + "_run.jsonl"), run_log_jsonl(*o, sc.window_nodes));
    }
    write_file_atomic(out_dir / (prefix + "_outcome.json"), outcome_json(*o));
    if (config.wants("frdf")) write_stream(out_dir, prefix, o->trajectory, config.checkpoint_every);
  }
  out << "u: " << outcome_line(ou) << '\n' << "v: " << outcome_line(ov) << '\n';
  return exit_code_for(ou.status);
}

int cmd_exponent(const ExponentRequest& request, std::ostream& out) {
  nlohmann::ordered_json j;
  if (!request.system) {
    const auto& in = request.scalar;
    j["mode"] = "scalar";
    j["N"] = in.N;
    j["alpha"] = num(in.alpha);
    j["sigma"] = num(in.sigma);
    j["rho"] = num(in.rho);
    j["p_c"] = num(critical_exponent_scalar(in));
    if (request.p) {
      if (!(*request.p > 1.0)) throw DomainError("exponent: p must be > 1");
      j["p"] = num(*request.p);
      j["lambda"] = num(lambda_exponent(*request.p, in));
    }
  } else {
    const auto& in = request.pair;
    const auto l = l_exponents(in);
    const auto b = system_dimension_bounds(in);
    j["mode"] = "system";
    j["N"] = in.N;
    j["alpha"] = num(in.alpha);
    j["beta"] = num(in.beta);
    j["p"] = num(in.p);
    j["q"] = num(in.q);
    j["sigma1"] = num(in.sigma1);
    j["sigma2"] = num(in.sigma2);
    j["rho1"] = num(in.rho1);
    j["rho2"] = num(in.rho2);
    j["l1"] = num(l.l1);
    j["l2"] = num(l.l2);
    j["bounds"] = {num(b.bound1), num(b.bound2)};
    j["blowup_predicted"] = b.blowup_predicted;
    j["l1_over_q_plus_l2"] = num(b.l1_over_q_plus_l2);
    j["l1_plus_l2_over_p"] = num(b.l1_plus_l2_over_p);
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_sweep(const RunConfig& config, const fs::path& out_dir, int jobs, std::ostream& out) {
  if (!config.has_sweep) throw ConfigError("missing [sweep] section");
  SweepConfig sc = config.sweep_config();
  sc.jobs = jobs;
  const SweepResult result = run_sweep(sc);

  ensure_dir(out_dir);
  write_file_atomic(out_dir / "sweep.csv", sweep_csv(result, sc));
  write_file_atomic(out_dir / "boundary.json", boundary_json(result, sc));
  out << "p_c_theory=" << format_number(result.p_c_theory)
      << " p_c_empirical=" << format_number(result.empirical_boundary)
      << " half_width=" << format_number(result.half_width) << " inconclusive=" << result.inconclusive
      << " heuristic=true\n";
  for (const auto& w : result.monotonicity_violations) out << "warning: " << w << '\n';
  return result.empirical_boundary ? kExitOk : kExitNoBoundary;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional diffusion toolkit: Mittag-Leffler propagators, mild solutions, Fujita sweeps",
               "fracstokes"};
  app.require_subcommand(1);
  std::function<int()> action;

  double ml_alpha = 1.0, ml_beta = 1.0, ml_z = 0.0;
  auto* ml = app.add_subcommand("ml", "Evaluate the Mittag-Leffler function E_{alpha,beta}(z)");
  ml->add_option("alpha", ml_alpha)->required();
  ml->add_option("beta", ml_beta)->required();
  ml->add_option("z", ml_z)->required();
  ml->callback([&] { action = [&] { return cmd_ml(ml_alpha, ml_beta, ml_z, out); }; });

  double mo_lambda = 1.0, mo_alpha = 0.5, mo_t = 1.0;
  int mo_steps = 1024;
  auto* mo = app.add_subcommand("mode-oracle", "Time-step one Fourier mode and compare with E_{alpha,1}");
  mo->add_option("lambda", mo_lambda)->required();
  mo->add_option("alpha", mo_alpha)->required();
  mo->add_option("--t-end", mo_t, "final time")->capture_default_str();
  mo->add_option("--steps", mo_steps, "time steps")->capture_default_str();
  mo->callback([&] { action = [&] { return cmd_mode_oracle(mo_lambda, mo_alpha, mo_t, mo_steps, out); }; });

  std::string config_path;
  std::optional<std::string> out_dir;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
  };
  auto resolve_out = [&](const RunConfig& c) { return out_dir ? fs::path(*out_dir) : c.output_dir; };

  std::optional<std::string> u0_file;
  auto* lin = app.add_subcommand("evolve-linear", "Homogeneous evolution of the initial field");
  add_config(lin);
  lin->add_option("--u0", u0_file, "FRDF initial field (overrides [initial])");
  lin->callback([&] {
    action = [&] {
      const auto c = load_run_config(config_path);
      std::optional<fs::path> f;
      if (u0_file) f = *u0_file;
      return cmd_evolve_linear(c, f, resolve_out(c), out);
    };
  });

  auto* semi = app.add_subcommand("evolve-semilinear", "Picard iteration of the mild-solution equation");
  add_config(semi);
  semi->callback([&] {
    action = [&] {
      const auto c = load_run_config(config_path);
      return cmd_evolve_semilinear(c, resolve_out(c), out);
    };
  });

  auto* sys = app.add_subcommand("evolve-system", "Coupled two-component system");
  add_config(sys);
  sys->callback([&] {
    action = [&] {
      const auto c = load_run_config(config_path);
      return cmd_evolve_system(c, resolve_out(c), out);
    };
  });

  ExponentRequest req;
  double exp_p = 0.0;
  auto* ex = app.add_subcommand("exponent", "Critical exponents and system dimension bounds");
  ex->add_flag("--system", req.system, "two-component system");
  ex->add_option("--N", req.scalar.N, "space dimension")->capture_default_str();
  ex->add_option("--alpha", req.scalar.alpha, "order of u")->capture_default_str();
  ex->add_option("--beta", req.pair.beta, "order of v (system)")->capture_default_str();
  ex->add_option("--sigma", req.scalar.sigma, "time weight exponent (scalar)")->capture_default_str();
  ex->add_option("--rho", req.scalar.rho, "space weight exponent (scalar)")->capture_default_str();
  auto* p_opt = ex->add_option("--p", exp_p, "nonlinearity exponent");
  ex->add_option("--q", req.pair.q, "second exponent (system)")->capture_default_str();
  ex->add_option("--sigma1", req.pair.sigma1)->capture_default_str();
  ex->add_option("--sigma2", req.pair.sigma2)->capture_default_str();
  ex->add_option("--rho1", req.pair.rho1)->capture_default_str();
  ex->add_option("--rho2", req.pair.rho2)->capture_default_str();
  ex->callback([&] {
    action = [&] {
      if (p_opt->count() > 0) req.p = exp_p;
      req.pair.N = req.scalar.N;
      req.pair.alpha = req.scalar.alpha;
      if (req.system && req.p) req.pair.p = *req.p;
      return cmd_exponent(req, out);
    };
  });

  int jobs = 0;
  auto* sw = app.add_subcommand("sweep", "Empirical Fujita boundary over (p, amplitude)");
  add_config(sw);
  sw->add_option("--jobs", jobs, "worker threads (0 = all processors)")->check(CLI::NonNegativeNumber);
  sw->callback([&] {
    action = [&] {
      const auto c = load_run_config(config_path);
      return cmd_sweep(c, resolve_out(c), jobs, out);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }

  try {
    return action();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const InstabilityError& e) {
    err << "instability: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace fracstokes::cli
