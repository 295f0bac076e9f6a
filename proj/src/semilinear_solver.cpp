#include "fracstokes/semilinear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "fracstokes/errors.hpp"
#include "fracstokes/linear_propagator.hpp"

namespace fracstokes {

void SourceSpec::validate() const {
  if (!(coefficient >= 0.0) || !std::isfinite(coefficient)) {
    throw DomainError("SourceSpec: coefficient must be finite and >= 0");
  }
  if (!(sigma > -1.0) || !std::isfinite(sigma)) throw DomainError("SourceSpec: sigma must be > -1");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("SourceSpec: rho must be >= 0");
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("SourceSpec: p must be >= 1");
}

void SolveConfig::validate() const {
  if (!(picard_tol > 0.0)) throw DomainError("SolveConfig: picard_tol must be > 0");
  if (picard_max_iters < 1) throw DomainError("SolveConfig: picard_max_iters must be >= 1");
  if (!(blowup_threshold > 0.0)) throw DomainError("SolveConfig: blowup_threshold must be > 0");
  if (window_nodes < 0) throw DomainError("SolveConfig: window_nodes must be >= 0");
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Global: return "Global";
    case RunStatus::BlowUp: return "BlowUp";
    case RunStatus::Inconclusive: return "Inconclusive";
  }
  return "?";
}

double contraction_estimate(std::span<const double> distances) {
  for (double d : distances) {
    if (d == 0.0) return 0.0;
  }
  if (distances.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = distances.size();
  const std::size_t ratios = std::min<std::size_t>(3, n - 1);
  double log_sum = 0.0;
  for (std::size_t k = n - ratios; k < n; ++k) log_sum += std::log(distances[k] / distances[k - 1]);
  return std::exp(log_sum / static_cast<double>(ratios));
}

namespace {

bool is_integer(double p) { return p == std::floor(p); }

/// Pointwise coefficient * t^sigma * r^rho * base^p into `out`.
void source_values(const std::vector<double>& base, const SourceSpec& spec, double t,
                   const std::vector<double>* radial, bool clamp, long* clamped, double* out) {
  const double tf = spec.coefficient * (spec.sigma == 0.0 ? 1.0 : std::pow(t, spec.sigma));
  const bool int_p = is_integer(spec.p);
  const bool square = spec.p == 2.0;
  const bool linear = spec.p == 1.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    double b = base[i];
    if (b < 0.0) {
      if (clamp) {
        b = 0.0;
        if (clamped) ++*clamped;
      } else if (!int_p) {
        throw NegativeBaseError("nonlinearity: negative sample " + std::to_string(b) +
                                " with non-integer p = " + std::to_string(spec.p));
      }
    }
    double v = linear ? b : square ? b * b : std::pow(b, spec.p);
    if (radial) v *= (*radial)[i];
    out[i] = tf * v;
  }
}

std::vector<double> radial_weight(const GridSpec& grid, double rho) {
  auto r = radial_distance(grid);
  for (auto& v : r) v = std::pow(v, rho);
  return r;
}

/// Duhamel quadrature weight of node i in the integral up to node j >= 1.
struct DuhamelWeights {
  double dt;
  double sigma;
  int history_limit = -1;

  double operator()(int i, int j) const {
    if (history_limit >= 0 && i < j - history_limit) return 0.0;
    if (sigma < 0.0) {
      if (i == 0) return 0.0;
      if (i == 1) return dt / (sigma + 1.0) + (j >= 2 ? 0.5 * dt : 0.0);
      return i == j ? 0.5 * dt : dt;
    }
    return (i == 0 || i == j) ? 0.5 * dt : dt;
  }
};

using Spectrum = std::vector<std::complex<double>>;

/// acc += w * m(lag) .* fhat
void accumulate(const WaveNumbers& wn, const ShellTable& table, double w, const Spectrum& fhat,
                Spectrum& acc) {
  const std::size_t n = acc.size();
  const double* vals = table.values.data();
  const int* shell = wn.shell.data();
  for (std::size_t k = 0; k < n; ++k) acc[k] += (w * vals[shell[k]]) * fhat[k];
}

struct ComponentSetup {
  double alpha;
  SourceSpec spec;
  int driver;
  const ScalarField* u0;
};

struct Failure {
  RunStatus status;
  double t_star;
  std::string note;
};

class Engine {
 public:
  Engine(std::vector<ComponentSetup> comps, const SolveConfig& cfg)
      : comps_(std::move(comps)), cfg_(cfg), grid_(comps_.front().u0->grid) {
    cfg_.validate();
    const int c_count = static_cast<int>(comps_.size());
    steps_ = cfg_.time.steps();
    dt_ = cfg_.time.dt();
    wn_ = wave_numbers(grid_);
    K_ = grid_.spectral_size();
    P_ = grid_.total_points();
    state_.resize(c_count);
    for (int c = 0; c < c_count; ++c) {
      auto& s = state_[c];
      const auto& setup = comps_[c];
      setup.spec.validate();
      if (!(setup.u0->grid == grid_)) throw DomainError("initial fields must share a grid");
      if (!setup.u0->all_finite()) throw DomainError("initial field is not finite");
      if (setup.u0->min() < 0.0) throw DomainError("initial field must be nonnegative");
      if (setup.u0->max_abs() >= cfg_.blowup_threshold) {
        throw DomainError("blowup_threshold must exceed the initial sup-norm");
      }
      s.weights = DuhamelWeights{dt_, setup.spec.sigma, cfg_.history_limit};
      if (setup.spec.rho != 0.0) s.radial = radial_weight(grid_, setup.spec.rho);
      s.values.assign(steps_ + 1, {});
      s.fhat.assign(steps_ + 1, {});
      s.values[0] = setup.u0->values;
      s.outcome.sup_norm_history.emplace_back(0.0, setup.u0->max_abs());
      s.outcome.max_sup_norm = setup.u0->max_abs();
      s.outcome.min_value = setup.u0->min();
      s.outcome.contraction_ratio = std::numeric_limits<double>::quiet_NaN();
      s.u0hat.resize(K_);
      forward_transform_into(grid_, setup.u0->values.data(), s.u0hat.data());
    }
  }

  std::vector<RunOutcome> run() {
    std::optional<Failure> failure;
    try {
      for (int c = 0; c < ncomp(); ++c) {
        if (state_[c].weights(0, 1) != 0.0) compute_fhat(c, 0, nullptr);
      }
      const int width = cfg_.window_nodes == 0 ? steps_ : cfg_.window_nodes;
      for (int a = 1; a <= steps_ && !failure; a += width) {
        const int b = std::min(steps_, a + width - 1);
        failure = solve_window(a, b);
      }
    } catch (const NegativeBaseError& e) {
      failure = Failure{RunStatus::Inconclusive, 0.0, e.what()};
    }
    std::vector<RunOutcome> out;
    for (int c = 0; c < ncomp(); ++c) {
      auto& s = state_[c];
      RunOutcome o = std::move(s.outcome);
      if (failure) {
        o.status = failure->status;
        if (failure->status == RunStatus::BlowUp) o.t_star = failure->t_star;
        o.note = failure->note;
      } else {
        o.status = RunStatus::Global;
      }
      if (cfg_.keep_trajectory) {
        for (int j = 0; j <= accepted_; ++j) o.trajectory.emplace_back(grid_, std::move(s.values[j]));
      }
      out.push_back(std::move(o));
    }
    return out;
  }

 private:
  struct State {
    DuhamelWeights weights{};
    std::vector<double> radial;
    std::vector<std::vector<double>> values;
    std::vector<Spectrum> fhat;
    Spectrum u0hat;
    RunOutcome outcome;
  };

  int ncomp() const { return static_cast<int>(comps_.size()); }

  std::shared_ptr<const ShellTable> lag_table(int c, int lag) {
    auto& tables = tables_[comps_[c].alpha];
    if (tables.empty()) tables.resize(steps_ + 1);
    if (!tables[lag]) tables[lag] = shell_multiplier(grid_, comps_[c].alpha, lag * dt_);
    return tables[lag];
  }

  void source_into(int c, int j, const std::vector<std::vector<double>>& driver_vals, long* clamped,
                   std::vector<double>& out) {
    const auto& s = state_[c];
    out.resize(P_);
    source_values(driver_vals[comps_[c].driver], comps_[c].spec, cfg_.time.node(j),
                  s.radial.empty() ? nullptr : &s.radial, cfg_.nonneg_clamp, clamped, out.data());
  }

  /// F-hat of component c at accepted node j.
  void compute_fhat(int c, int j, long* clamped) {
    std::vector<std::vector<double>> drivers(ncomp());
    for (int d = 0; d < ncomp(); ++d) drivers[d] = state_[d].values[j];
    std::vector<double> f;
    source_into(c, j, drivers, clamped, f);
    state_[c].fhat[j].resize(K_);
    forward_transform_into(grid_, f.data(), state_[c].fhat[j].data());
  }

  std::optional<Failure> solve_window(int a, int b) {
    const int n = b - a + 1;
    const int C = ncomp();
    // h[c][j]: homogeneous part plus history from nodes before the window.
    std::vector<std::vector<std::vector<double>>> h(C, std::vector<std::vector<double>>(n));
    Spectrum acc(K_);
    for (int c = 0; c < C; ++c) {
      auto& s = state_[c];
      for (int jj = 0; jj < n; ++jj) {
        const int j = a + jj;
        acc = s.u0hat;
        apply_shell_table(*wn_, *lag_table(c, j), acc.data());
        for (int i = 0; i < a; ++i) {
          const double w = s.weights(i, j);
          if (w == 0.0) continue;
          accumulate(*wn_, *lag_table(c, j - i), w, s.fhat[i], acc);
        }
        h[c][jj].resize(P_);
        inverse_transform_into(grid_, acc.data(), h[c][jj].data());
      }
    }

    // cur[jj][c]: current iterate on the window
    std::vector<std::vector<std::vector<double>>> cur(n, std::vector<std::vector<double>>(C));
    for (int jj = 0; jj < n; ++jj) {
      for (int c = 0; c < C; ++c) cur[jj][c] = h[c][jj];
    }
    auto next = cur;
    std::vector<std::vector<Spectrum>> window_fhat(C, std::vector<Spectrum>(n, Spectrum(K_)));
    std::vector<std::vector<std::vector<double>>> fvals(C, std::vector<std::vector<double>>(n));
    std::vector<double> scratch(P_);

    std::vector<double> distances;
    int rising = 0;
    bool converged = false;
    int iter = 0;
    double sup = 0.0;
    for (iter = 1; iter <= cfg_.picard_max_iters; ++iter) {
      for (int c = 0; c < C; ++c) {
        for (int jj = 0; jj < n; ++jj) {
          source_into(c, a + jj, cur[jj], nullptr, fvals[c][jj]);
          if (n > 1) forward_transform_into(grid_, fvals[c][jj].data(), window_fhat[c][jj].data());
        }
      }
      double dist = 0.0;
      sup = 0.0;
      bool finite = true;
      for (int c = 0; c < C; ++c) {
        const auto& s = state_[c];
        for (int jj = 0; jj < n; ++jj) {
          const int j = a + jj;
          auto& out = next[jj][c];
          out = h[c][jj];
          if (jj > 0) {
            std::fill(acc.begin(), acc.end(), std::complex<double>(0.0, 0.0));
            bool any = false;
            for (int ii = 0; ii < jj; ++ii) {
              const double w = s.weights(a + ii, j);
              if (w == 0.0) continue;
              accumulate(*wn_, *lag_table(c, jj - ii), w, window_fhat[c][ii], acc);
              any = true;
            }
            if (any) {
              inverse_transform_into(grid_, acc.data(), scratch.data());
              for (std::size_t x = 0; x < P_; ++x) out[x] += scratch[x];
            }
          }
          const double wjj = s.weights(j, j);
          const auto& f = fvals[c][jj];
          const auto& old = cur[jj][c];
          for (std::size_t x = 0; x < P_; ++x) {
            const double v = out[x] + wjj * f[x];
            out[x] = v;
            if (!std::isfinite(v)) finite = false;
            dist = std::max(dist, std::fabs(v - old[x]));
            sup = std::max(sup, std::fabs(v));
          }
        }
      }
      std::swap(cur, next);
      if (!finite || !std::isfinite(dist)) {
        return blowup_failure(a, iter, distances, "non-finite Picard iterate");
      }
      distances.push_back(dist);
      if (dist / std::max(1.0, sup) < cfg_.picard_tol) {
        converged = true;
        break;
      }
      if (sup > cfg_.blowup_threshold) {
        return blowup_failure(a, iter, distances, "Picard iterate exceeded the blow-up threshold");
      }
      const std::size_t m = distances.size();
      rising = (m >= 2 && distances[m - 1] > distances[m - 2]) ? rising + 1 : 0;
      if (rising >= 5 && sup > cfg_.divergence_floor) {
        return blowup_failure(a, iter, distances, "Picard distances increased 5 times in a row");
      }
    }
    if (!converged && sup > cfg_.divergence_floor) {
      return blowup_failure(a, cfg_.picard_max_iters, distances,
                            "Picard iteration cap reached above the divergence floor");
    }
    record_window(iter > cfg_.picard_max_iters ? cfg_.picard_max_iters : iter, distances);
    if (!converged) {
      std::ostringstream note;
      note << "Picard iteration cap (" << cfg_.picard_max_iters << ") reached on window starting at t="
           << cfg_.time.node(a);
      return Failure{RunStatus::Inconclusive, 0.0, note.str()};
    }

    // Accept the window node by node.
    for (int jj = 0; jj < n; ++jj) {
      const int j = a + jj;
      double node_sup = 0.0;
      for (int c = 0; c < C; ++c) {
        auto& s = state_[c];
        s.values[j] = std::move(cur[jj][c]);
        double cs = 0.0;
        double mn = std::numeric_limits<double>::infinity();
        for (double v : s.values[j]) {
          cs = std::max(cs, std::fabs(v));
          mn = std::min(mn, v);
        }
        s.outcome.sup_norm_history.emplace_back(cfg_.time.node(j), cs);
        s.outcome.max_sup_norm = std::max(s.outcome.max_sup_norm, cs);
        s.outcome.min_value = std::min(s.outcome.min_value, mn);
        node_sup = std::max(node_sup, cs);
      }
      accepted_ = j;
      if (node_sup > cfg_.blowup_threshold) {
        // crossing between t_{j-1} and t_j, interpolated on the larger component
        double before = 0.0;
        for (const auto& s : state_) {
          const auto& hist = s.outcome.sup_norm_history;
          before = std::max(before, hist[hist.size() - 2].second);
        }
        const double B = cfg_.blowup_threshold;
        const double t0 = cfg_.time.node(j - 1);
        const double frac = (B - before) / (node_sup - before);
        return Failure{RunStatus::BlowUp, t0 + frac * (cfg_.time.node(j) - t0),
                       "sup-norm crossed the blow-up threshold"};
      }
      for (int c = 0; c < C; ++c) compute_fhat(c, j, &state_[c].outcome.clamped_samples);
    }
    return std::nullopt;
  }

  void record_window(int iters, const std::vector<double>& distances) {
    const double ratio = contraction_estimate(distances);
    for (auto& s : state_) {
      s.outcome.picard_iters_history.push_back(iters);
      s.outcome.last_distances = distances;
      auto& cr = s.outcome.contraction_ratio;
      if (!std::isnan(ratio) && (std::isnan(cr) || ratio > cr)) cr = ratio;
    }
  }

  Failure blowup_failure(int a, int iters, const std::vector<double>& distances, const char* why) {
    record_window(iters, distances);
    std::ostringstream note;
    note << why << " on window starting at t=" << cfg_.time.node(a);
    return Failure{RunStatus::BlowUp, cfg_.time.node(a), note.str()};
  }

  std::vector<ComponentSetup> comps_;
  SolveConfig cfg_;
  GridSpec grid_;
  int steps_ = 0;
  double dt_ = 0.0;
  std::shared_ptr<const WaveNumbers> wn_;
  std::size_t K_ = 0;
  std::size_t P_ = 0;
  std::vector<State> state_;
  std::map<double, std::vector<std::shared_ptr<const ShellTable>>> tables_;
  int accepted_ = 0;
};

}  // namespace

ScalarField nonlinearity_field(const ScalarField& u, const SourceSpec& spec, double t,
                               bool nonneg_clamp, long* clamped) {
  spec.validate();
  if (!(t >= 0.0)) throw DomainError("nonlinearity_field: t must be >= 0");
  if (t == 0.0 && spec.sigma < 0.0) {
    throw DomainError("nonlinearity_field: t^sigma is singular at t = 0 for sigma < 0");
  }
  if (!u.all_finite()) throw DomainError("nonlinearity_field: u must be finite");
  ScalarField out(u.grid);
  std::vector<double> radial;
  if (spec.rho != 0.0) radial = radial_weight(u.grid, spec.rho);
  source_values(u.values, spec, t, radial.empty() ? nullptr : &radial, nonneg_clamp, clamped,
                out.values.data());
  return out;
}

Trajectory picard_step(const Trajectory& candidate, const ScalarField& u0, const SourceSpec& spec,
                       double alpha, const TimeGrid& time, bool nonneg_clamp) {
  spec.validate();
  const int steps = time.steps();
  if (static_cast<int>(candidate.size()) != steps + 1) {
    throw DomainError("picard_step: candidate must have one field per time node");
  }
  const GridSpec& g = u0.grid;
  const auto wn = wave_numbers(g);
  const std::size_t K = g.spectral_size();
  const DuhamelWeights weights{time.dt(), spec.sigma, -1};
  std::vector<double> radial;
  if (spec.rho != 0.0) radial = radial_weight(g, spec.rho);

  std::vector<Spectrum> fhat(steps + 1);
  std::vector<double> f(g.total_points());
  for (int i = 0; i <= steps; ++i) {
    if (i == 0 && weights(0, 1) == 0.0) continue;
    source_values(candidate[i].values, spec, time.node(i), radial.empty() ? nullptr : &radial,
                  nonneg_clamp, nullptr, f.data());
    fhat[i].resize(K);
    forward_transform_into(g, f.data(), fhat[i].data());
  }
  Spectrum u0hat(K);
  forward_transform_into(g, u0.values.data(), u0hat.data());

  Trajectory out;
  out.reserve(steps + 1);
  out.push_back(u0);
  Spectrum acc(K);
  for (int j = 1; j <= steps; ++j) {
    acc = u0hat;
    apply_shell_table(*wn, *shell_multiplier(g, alpha, j * time.dt()), acc.data());
    for (int i = 0; i <= j; ++i) {
      const double w = weights(i, j);
      if (w == 0.0) continue;
      accumulate(*wn, *shell_multiplier(g, alpha, (j - i) * time.dt()), w, fhat[i], acc);
    }
    ScalarField u(g);
    inverse_transform_into(g, acc.data(), u.values.data());
    out.push_back(std::move(u));
  }
  return out;
}

RunOutcome evolve_semilinear(const ScalarField& u0, const SourceSpec& spec, double alpha,
                             const SolveConfig& config) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("evolve_semilinear: alpha must lie in (0, 1]");
  Engine engine({ComponentSetup{alpha, spec, 0, &u0}}, config);
  return std::move(engine.run().front());
}

std::pair<RunOutcome, RunOutcome> evolve_system(const ScalarField& u0, const ScalarField& v0,
                                                const SourceSpec& spec_uv,
                                                const SourceSpec& spec_vu, double alpha,
                                                double beta, const SolveConfig& config) {
  if (!(alpha > 0.0 && alpha <= 1.0) || !(beta > 0.0 && beta <= 1.0)) {
    throw DomainError("evolve_system: alpha and beta must lie in (0, 1]");
  }
  Engine engine({ComponentSetup{alpha, spec_uv, 1, &u0}, ComponentSetup{beta, spec_vu, 0, &v0}},
                config);
  auto outs = engine.run();
  return {std::move(outs[0]), std::move(outs[1])};
}

}  // namespace fracstokes
