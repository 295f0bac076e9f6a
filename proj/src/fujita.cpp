#include "fracstokes/fujita.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "fracstokes/errors.hpp"
#include "fracstokes/linear_propagator.hpp"

namespace fracstokes {

void ExponentInputs::validate() const {
  if (N < 1) throw DomainError("N must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (!(sigma > -1.0) || !std::isfinite(sigma)) throw DomainError("sigma must be > -1");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("rho must be >= 0");
}

void SystemExponentInputs::validate() const {
  if (N < 1) throw DomainError("N must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0, 1]");
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p must be > 1");
  if (!(q > 1.0) || !std::isfinite(q)) throw DomainError("q must be > 1");
  if (!(sigma1 > -1.0) || !(sigma2 > -1.0)) throw DomainError("sigma1, sigma2 must be > -1");
  if (!(rho1 >= 0.0) || !(rho2 >= 0.0)) throw DomainError("rho1, rho2 must be >= 0");
}

double critical_exponent_scalar(const ExponentInputs& inp) {
  inp.validate();
  return 1.0 + (2.0 * (inp.sigma + 1.0) + inp.rho * inp.alpha) / (inp.N * inp.alpha);
}

double lambda_exponent(double p, const ExponentInputs& inp) {
  inp.validate();
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("lambda_exponent: p must be > 1");
  const double a = inp.alpha;
  const double pc = p / (p - 1.0);
  return (2.0 / a) * (a - 1.0) * pc - 2.0 * pc - (2.0 * inp.sigma / a + inp.rho) * pc / p +
         2.0 / a + inp.N;
}

LExponents l_exponents(const SystemExponentInputs& inp) {
  inp.validate();
  const double l1 = 2.0 / inp.beta + (2.0 * inp.sigma1 / inp.beta + inp.rho1) / inp.p -
                    (2.0 / inp.beta + inp.N) / inp.p_conj();
  const double l2 = 2.0 / inp.alpha + (2.0 * inp.sigma2 / inp.alpha + inp.rho2) / inp.q -
                    (2.0 / inp.alpha + inp.N) / inp.q_conj();
  return {l1, l2};
}

DimensionBounds system_dimension_bounds(const SystemExponentInputs& inp) {
  inp.validate();
  const double a = inp.alpha, b = inp.beta, p = inp.p, q = inp.q;
  const double denom = a * b * (p * q - 1.0);
  if (denom == 0.0) throw DomainError("system_dimension_bounds: degenerate pq = 1");
  const double bound1 =
      (2.0 * (a * (1.0 + inp.sigma1) + p * b * (1.0 + inp.sigma2)) + a * b * (inp.rho1 + p * inp.rho2)) /
      denom;
  const double bound2 =
      (2.0 * (b * (1.0 + inp.sigma2) + q * a * (1.0 + inp.sigma1)) + a * b * (p * inp.rho1 + inp.rho2)) /
      denom;
  const auto l = l_exponents(inp);
  return {bound1, bound2, inp.N <= std::max(bound1, bound2), l.l1 / q + l.l2, l.l1 + l.l2 / p};
}

std::vector<double> p_grid(double p_min, double p_max, double step) {
  if (!(step > 0.0)) throw DomainError("p_grid: step must be > 0");
  std::vector<double> out;
  if (p_max < p_min) return out;
  const int n = static_cast<int>(std::floor((p_max - p_min) / step + 1e-3));
  for (int i = 0; i <= n; ++i) out.push_back(p_min + i * step);
  return out;
}

void SweepConfig::validate() const {
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    if (!(p_values[i] >= 1.0)) throw DomainError("sweep: p values must be >= 1");
    if (i > 0 && !(p_values[i] > p_values[i - 1])) {
      throw DomainError("sweep: p grid must be strictly increasing");
    }
  }
  for (double a : amplitudes) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("sweep: amplitudes must be > 0");
  }
  grid.validate();
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("sweep: alpha must lie in (0, 1]");
  if (!(sigma > -1.0)) throw DomainError("sweep: sigma must be > -1");
  if (!(rho >= 0.0)) throw DomainError("sweep: rho must be >= 0");
  if (!(horizon > 0.0)) throw DomainError("sweep: horizon must be > 0");
  if (steps < 1) throw DomainError("sweep: steps must be >= 1");
  if (!(growth_factor > 1.0)) throw DomainError("sweep: growth_factor must be > 1");
  if (!(boundary_width > 0.0)) throw DomainError("sweep: boundary_width must be > 0");
  if (!(center_jitter >= 0.0)) throw DomainError("sweep: center_jitter must be >= 0");
  if (effective_width() > grid.half_width / 8.0) throw DomainError("sweep: width must be <= L/8");
  if (jobs < 0) throw DomainError("sweep: jobs must be >= 0");
}

RunStatus classify_sweep_outcome(const RunOutcome& outcome, std::string* note) {
  if (outcome.status == RunStatus::BlowUp) return RunStatus::BlowUp;
  if (outcome.status == RunStatus::Inconclusive) {
    if (note) *note = outcome.note;
    return RunStatus::Inconclusive;
  }
  const double sup0 = outcome.sup_norm_history.front().second;
  const double supT = outcome.sup_norm_history.back().second;
  if (supT < sup0) return RunStatus::Global;
  if (note) *note = "no decay of the sup-norm by the horizon";
  return RunStatus::Inconclusive;
}

namespace {

// cost model constants, calibrated on a single core
constexpr double kHistorySeconds = 5e-9;   // per (node pair x spectral entry)
constexpr double kPointSeconds = 2e-8;     // per (node x sample x Picard iteration)
constexpr double kMlSeconds = 1e-5;        // per Mittag-Leffler evaluation
constexpr double kExpectedIterations = 8.0;

int worker_count(const SweepConfig& c) {
  if (c.jobs > 0) return c.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

int expected_bisections(const SweepConfig& c) {
  if (!c.refine || c.p_values.size() < 2) return 0;
  double step = 0.0;
  for (std::size_t i = 1; i < c.p_values.size(); ++i) step = std::max(step, c.p_values[i] - c.p_values[i - 1]);
  return std::max(0, static_cast<int>(std::ceil(std::log2(step / c.boundary_width))));
}

SolveConfig cell_solve_config(const SweepConfig& c, double sup0) {
  SolveConfig s;
  s.time = TimeGrid(c.horizon, c.steps);
  s.picard_tol = c.picard_tol;
  s.picard_max_iters = c.picard_max_iters;
  s.blowup_threshold = c.growth_factor * sup0;
  s.divergence_floor = s.blowup_threshold / 10.0;
  s.nonneg_clamp = c.nonneg_clamp;
  s.keep_trajectory = false;
  return s;
}

SweepRecord run_cell(const SweepConfig& c, double p, double amplitude, bool refinement) {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  if (c.center_jitter > 0.0) {
    std::seed_seq seq{static_cast<std::uint32_t>(c.seed), static_cast<std::uint32_t>(c.seed >> 32),
                      static_cast<std::uint32_t>(std::bit_cast<std::uint64_t>(p)),
                      static_cast<std::uint32_t>(std::bit_cast<std::uint64_t>(p) >> 32),
                      static_cast<std::uint32_t>(std::bit_cast<std::uint64_t>(amplitude)),
                      static_cast<std::uint32_t>(std::bit_cast<std::uint64_t>(amplitude) >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> shift(-c.center_jitter, c.center_jitter);
    for (int d = 0; d < c.grid.ndim; ++d) center[d] = shift(rng);
  }
  const auto start = std::chrono::steady_clock::now();
  SweepRecord rec{p, amplitude, RunStatus::Inconclusive, std::nullopt, 0.0, 0, std::nullopt, refinement, {}};
  try {
    const auto u0 = gaussian_initial(c.grid, amplitude, c.effective_width(), center);
    const auto outcome = evolve_semilinear(u0, SourceSpec{1.0, c.sigma, c.rho, p}, c.alpha,
                                           cell_solve_config(c, u0.max_abs()));
    rec.status = classify_sweep_outcome(outcome, &rec.note);
    rec.t_star = outcome.t_star;
    rec.max_sup_norm = outcome.max_sup_norm;
    for (int it : outcome.picard_iters_history) rec.picard_iters += it;
  } catch (const std::exception& e) {
    rec.status = RunStatus::Inconclusive;
    rec.note = e.what();
  }
  if (c.record_timings) {
    rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

const SweepRecord* find_record(const std::vector<SweepRecord>& recs, double p, double a) {
  for (const auto& r : recs) {
    if (r.p == p && r.amplitude == a) return &r;
  }
  return nullptr;
}

}  // namespace

double projected_runtime_s(const SweepConfig& c) {
  const double S = c.steps;
  const double K = static_cast<double>(c.grid.spectral_size());
  const double P = static_cast<double>(c.grid.total_points());
  const double per_cell = kHistorySeconds * 0.5 * S * S * K + kPointSeconds * S * P * kExpectedIterations;
  const double cells = static_cast<double>(c.p_values.size() * c.amplitudes.size());
  const double ml = c.alpha == 1.0 ? 0.0 : kMlSeconds * S * (c.grid.ndim * (c.grid.points / 2.0) * (c.grid.points / 2.0) + 1.0);
  return ml + per_cell * (cells / worker_count(c) + expected_bisections(c));
}

SweepResult run_sweep(const SweepConfig& c) {
  c.validate();
  SweepResult result;
  result.p_c_theory = critical_exponent_scalar({c.grid.ndim, c.alpha, c.sigma, c.rho});
  if (c.p_values.empty() || c.amplitudes.empty()) return result;
  if (c.budget_s > 0.0) {
    const double projected = projected_runtime_s(c);
    if (projected > c.budget_s) {
      std::ostringstream msg;
      msg << "projected sweep runtime " << projected << " s exceeds the budget of " << c.budget_s << " s";
      throw BudgetError(msg.str());
    }
  }

  // Warm the multiplier tables once so workers only read the cache.
  const TimeGrid time(c.horizon, c.steps);
  for (int k = 0; k <= c.steps; ++k) shell_multiplier(c.grid, c.alpha, k * time.dt());

  std::vector<std::pair<double, double>> cells;
  for (double p : c.p_values) {
    for (double a : c.amplitudes) cells.emplace_back(p, a);
  }
  std::vector<SweepRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      records[i] = run_cell(c, cells[i].first, cells[i].second, false);
    }
  };
  const int jobs = std::min<int>(worker_count(c), static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const double a_min = *std::min_element(c.amplitudes.begin(), c.amplitudes.end());
  std::optional<double> p_global;
  for (double p : c.p_values) {
    const auto* r = find_record(records, p, a_min);
    if (r && r->status == RunStatus::Global) {
      p_global = p;
      break;
    }
  }
  std::optional<double> p_blow;
  if (p_global) {
    for (double p : c.p_values) {
      if (p >= *p_global) break;
      const auto* r = find_record(records, p, a_min);
      if (r && r->status == RunStatus::BlowUp) p_blow = p;
    }
  }
  if (p_global && p_blow) {
    double lo = *p_blow, hi = *p_global;
    while (c.refine && hi - lo > c.boundary_width) {
      const double mid = 0.5 * (lo + hi);
      auto rec = run_cell(c, mid, a_min, true);
      const RunStatus s = rec.status;
      records.push_back(std::move(rec));
      if (s == RunStatus::BlowUp) {
        lo = mid;
      } else if (s == RunStatus::Global) {
        hi = mid;
      } else {
        break;
      }
    }
    result.empirical_boundary = 0.5 * (lo + hi);
    result.half_width = 0.5 * (hi - lo);
  }

  std::sort(records.begin(), records.end(), [](const SweepRecord& x, const SweepRecord& y) {
    return x.p != y.p ? x.p < y.p : x.amplitude < y.amplitude;
  });
  for (const auto& r : records) {
    if (r.status == RunStatus::Inconclusive) ++result.inconclusive;
  }
  std::map<double, std::vector<const SweepRecord*>> by_p;
  for (const auto& r : records) by_p[r.p].push_back(&r);
  for (const auto& [p, rs] : by_p) {
    bool seen_blowup = false;
    for (const auto* r : rs) {
      if (r->status == RunStatus::BlowUp) {
        seen_blowup = true;
      } else if (seen_blowup && r->status == RunStatus::Global) {
        std::ostringstream msg;
        msg << "p=" << p << ": amplitude " << r->amplitude << " stayed Global although a smaller amplitude blew up";
        result.monotonicity_violations.push_back(msg.str());
      }
    }
  }
  result.records = std::move(records);
  return result;
}

}  // namespace fracstokes
