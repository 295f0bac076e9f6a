#include <cmath>
#include <limits>

#include "doctest.h"
#include "fd_blowup_oracle.hpp"
#include "fracstokes/errors.hpp"
#include "fracstokes/linear_propagator.hpp"
#include "fracstokes/semilinear_solver.hpp"
#include "heat_oracles.hpp"

using namespace fracstokes;

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

SolveConfig config(double t_end, int steps) {
  SolveConfig c;
  c.time = TimeGrid(t_end, steps);
  return c;
}

}  // namespace

TEST_CASE("SourceSpec validation") {
  CHECK_NOTHROW((SourceSpec{1.0, 0.0, 0.0, 2.0}.validate()));
  CHECK_NOTHROW((SourceSpec{1.0, -0.5, 1.0, 1.0}.validate()));
  CHECK_THROWS_AS((SourceSpec{-1.0, 0.0, 0.0, 2.0}.validate()), DomainError);
  CHECK_THROWS_AS((SourceSpec{1.0, -1.0, 0.0, 2.0}.validate()), DomainError);
  CHECK_THROWS_AS((SourceSpec{1.0, 0.0, -0.1, 2.0}.validate()), DomainError);
  CHECK_THROWS_AS((SourceSpec{1.0, 0.0, 0.0, 0.5}.validate()), DomainError);
}

TEST_CASE("nonlinearity_field") {
  const GridSpec g{1, 16, 2.0};
  const auto f = nonlinearity_field(ScalarField(g, 2.0), SourceSpec{0.7, 0.0, 0.0, 2.0}, 0.3);
  for (double v : f.values) CHECK(v == doctest::Approx(2.8));
  CHECK(nonlinearity_field(ScalarField(g), SourceSpec{1.0, 0.0, 0.0, 3.0}, 1.0).max_abs() == 0.0);

  // sample 10 sits at x = -2 + 10 * 0.25 = 0.5
  const auto lin = nonlinearity_field(ScalarField(g, 1.0), SourceSpec{1.3, 1.0, 1.0, 1.0}, 2.0);
  CHECK(lin[10] == doctest::Approx(1.3));
  CHECK(lin[8] == 0.0);

  CHECK(nonlinearity_field(ScalarField(g, 1.0), SourceSpec{1.0, 0.5, 0.0, 2.0}, 0.0).max_abs() == 0.0);
  CHECK_THROWS_AS(nonlinearity_field(ScalarField(g, 1.0), SourceSpec{1.0, -0.5, 0.0, 2.0}, 0.0),
                  DomainError);

  ScalarField neg(g, 1.0);
  neg[3] = -0.5;
  CHECK_THROWS_AS(nonlinearity_field(neg, SourceSpec{1.0, 0.0, 0.0, 1.5}, 1.0), NegativeBaseError);
  CHECK(nonlinearity_field(neg, SourceSpec{1.0, 0.0, 0.0, 2.0}, 1.0)[3] == doctest::Approx(0.25));
  long clamped = 0;
  const auto c = nonlinearity_field(neg, SourceSpec{1.0, 0.0, 0.0, 1.5}, 1.0, true, &clamped);
  CHECK(c[3] == 0.0);
  CHECK(clamped == 1);
}

TEST_CASE("picard_step trivial fixed points") {
  const GridSpec g{1, 32, 4.0};
  const TimeGrid time(0.5, 10);
  Trajectory zero(11, ScalarField(g));
  for (const auto& u : picard_step(zero, ScalarField(g), SourceSpec{1.0, 0.0, 0.0, 2.0}, 0.5, time)) {
    CHECK(u.max_abs() == 0.0);
  }
  const auto u0 = gaussian_initial(g, 1.0, 0.5);
  Trajectory junk(11, ScalarField(g, 3.0));
  const auto out = picard_step(junk, u0, SourceSpec{0.0, 0.0, 0.0, 2.0}, 0.5, time);
  for (int j = 0; j <= 10; ++j) CHECK(max_abs_diff(out[j], evolve_homogeneous(u0, 0.5, j * 0.05)) <= 1e-14);
  CHECK_THROWS_AS(picard_step(Trajectory(3, ScalarField(g)), u0, SourceSpec{}, 0.5, time), DomainError);
}

TEST_CASE("linear reaction matches e^t times the heat flow") {
  const GridSpec g{1, 128, 8.0};
  const auto u0 = gaussian_initial(g, 1.0, 1.0);
  const SourceSpec lin{1.0, 0.0, 0.0, 1.0};
  auto cfg = config(0.5, 256);
  const auto exact = testing::gaussian_heat_solution(g, std::exp(0.5), 1.0, 0.5);
  for (int window : {1, 16, 0}) {
    cfg.window_nodes = window;
    const auto out = evolve_semilinear(u0, lin, 1.0, cfg);
    REQUIRE(out.status == RunStatus::Global);
    CHECK(max_abs_diff(out.trajectory.back(), exact) <= 1e-5);
    CHECK(out.contraction_ratio < 1.0);
  }
}

TEST_CASE("converged trajectories are fixed points of the mild-solution map") {
  const GridSpec g{1, 64, 4.0};
  const auto u0 = gaussian_initial(g, 0.5, 0.5);
  struct Case {
    double alpha;
    SourceSpec spec;
    int window;
  };
  for (const Case& c : {Case{0.5, {1.0, 0.0, 0.0, 2.0}, 1}, Case{0.8, {2.0, 0.5, 1.0, 3.0}, 4},
                        Case{0.3, {1.0, -0.5, 0.0, 2.0}, 1}, Case{1.0, {1.0, 0.0, 0.0, 2.0}, 0}}) {
    auto cfg = config(0.4, 40);
    cfg.window_nodes = c.window;
    const auto out = evolve_semilinear(u0, c.spec, c.alpha, cfg);
    REQUIRE(out.status == RunStatus::Global);
    const auto psi = picard_step(out.trajectory, u0, c.spec, c.alpha, cfg.time);
    double residual = 0.0;
    for (int j = 0; j <= 40; ++j) residual = std::max(residual, max_abs_diff(psi[j], out.trajectory[j]));
    CHECK(residual <= 10 * cfg.picard_tol);
    CHECK(out.min_value >= -1e-8);
  }
}

TEST_CASE("trivial runs") {
  const GridSpec g{1, 32, 4.0};
  const auto zero = evolve_semilinear(ScalarField(g), SourceSpec{}, 0.5, config(1.0, 20));
  CHECK(zero.status == RunStatus::Global);
  CHECK(zero.max_sup_norm == 0.0);
  const auto u0 = gaussian_initial(g, 2.0, 0.5);
  const auto lin = evolve_semilinear(u0, SourceSpec{0.0, 0.0, 0.0, 2.0}, 0.4, config(1.0, 20));
  CHECK(lin.status == RunStatus::Global);
  CHECK(max_abs_diff(lin.trajectory.back(), evolve_homogeneous(u0, 0.4, 1.0)) <= 1e-13);
  CHECK(contraction_estimate(lin.last_distances) == 0.0);
  CHECK(lin.contraction_ratio == 0.0);

  auto capped = config(1.0, 20);
  capped.picard_max_iters = 2;
  const auto inc = evolve_semilinear(u0, SourceSpec{1.0, 0.0, 0.0, 2.0}, 0.4, capped);
  CHECK(inc.status == RunStatus::Inconclusive);
  CHECK(!inc.t_star);
  CHECK(!inc.note.empty());

  CHECK_THROWS_AS(evolve_semilinear(u0, SourceSpec{}, 0.4, [] {
                    auto c = config(1.0, 10);
                    c.blowup_threshold = 1.0;
                    return c;
                  }()),
                  DomainError);
  ScalarField negative(g, -1.0);
  CHECK_THROWS_AS(evolve_semilinear(negative, SourceSpec{}, 0.4, config(1.0, 10)), DomainError);
}

TEST_CASE("blow-up time agrees with an explicit finite-difference integrator") {
  const double L = 8.0, a = 50.0, w = L / 16.0;
  const GridSpec g{1, 256, L};
  auto cfg = config(0.04, 800);
  const auto out = evolve_semilinear(gaussian_initial(g, a, w), SourceSpec{1.0, 0.0, 0.0, 2.0}, 1.0, cfg);
  INFO(out.note);
  REQUIRE(out.status == RunStatus::BlowUp);
  REQUIRE(out.t_star);
  const auto fd = testing::fd_blowup_time(a, w, L, 256, 2.0, 1.0, cfg.blowup_threshold, 0.04);
  REQUIRE(fd.t_star);
  MESSAGE("spectral t_star " << *out.t_star << ", finite differences " << *fd.t_star);
  CHECK(std::fabs(*out.t_star - *fd.t_star) <= 0.1 * *fd.t_star);
  CHECK(*out.t_star > 0.0);
  CHECK(out.sup_norm_history.back().first >= *out.t_star - cfg.time.dt());
}

TEST_CASE("coupled system") {
  const GridSpec g{1, 64, 4.0};
  const auto u0 = gaussian_initial(g, 0.8, 0.5);
  const auto cfg = config(0.5, 50);

  SUBCASE("symmetric system gives identical components") {
    const SourceSpec s{1.0, 0.3, 0.5, 2.0};
    const auto [ou, ov] = evolve_system(u0, u0, s, s, 0.6, 0.6, cfg);
    CHECK(ou.status == RunStatus::Global);
    CHECK(ov.status == RunStatus::Global);
    for (std::size_t j = 0; j < ou.trajectory.size(); ++j) {
      CHECK(max_abs_diff(ou.trajectory[j], ov.trajectory[j]) <= 1e-12);
    }
  }
  SUBCASE("decoupled system reduces to a forced linear problem") {
    const auto v0 = gaussian_initial(g, 1.2, 0.4);
    const SourceSpec h1{1.5, 0.0, 0.0, 2.0};
    const double beta = 0.7;
    const auto [ou, ov] = evolve_system(u0, v0, h1, SourceSpec{0.0, 0.0, 0.0, 3.0}, 0.5, beta, cfg);
    REQUIRE(ou.status == RunStatus::Global);
    CHECK(max_abs_diff(ov.trajectory.back(), evolve_homogeneous(v0, beta, 0.5)) <= 1e-12);
    const auto forced = evolve_duhamel(
        u0, [&](double t) { return nonlinearity_field(evolve_homogeneous(v0, beta, t), h1, t); }, 0.5,
        cfg.time);
    CHECK(max_abs_diff(ou.trajectory.back(), forced) <= 1e-8);
  }
  SUBCASE("zero data") {
    const auto [ou, ov] = evolve_system(ScalarField(g), ScalarField(g), SourceSpec{}, SourceSpec{}, 0.5,
                                        0.8, cfg);
    CHECK(ou.status == RunStatus::Global);
    CHECK(ov.status == RunStatus::Global);
    CHECK(ou.max_sup_norm == 0.0);
    CHECK(ov.max_sup_norm == 0.0);
  }
  SUBCASE("blow-up of one component stops both") {
    const auto big = gaussian_initial(g, 40.0, 0.5);
    auto c = config(0.2, 200);
    const auto [ou, ov] = evolve_system(big, u0, SourceSpec{1.0, 0.0, 0.0, 2.0},
                                        SourceSpec{1.0, 0.0, 0.0, 2.0}, 1.0, 1.0, c);
    CHECK(ou.status == RunStatus::BlowUp);
    CHECK(ov.status == RunStatus::BlowUp);
    REQUIRE(ou.t_star);
    CHECK(ou.t_star == ov.t_star);
    CHECK(ou.sup_norm_history.size() == ov.sup_norm_history.size());
  }
}

TEST_CASE("truncating the memory changes the answer") {
  const GridSpec g{1, 64, 4.0};
  const auto u0 = gaussian_initial(g, 0.5, 0.5);
  auto cfg = config(1.0, 64);
  const SourceSpec s{1.0, 0.0, 0.0, 2.0};
  const auto full = evolve_semilinear(u0, s, 0.5, cfg);
  cfg.history_limit = 4;
  const auto cut = evolve_semilinear(u0, s, 0.5, cfg);
  REQUIRE(full.status == RunStatus::Global);
  REQUIRE(cut.status == RunStatus::Global);
  CHECK(max_abs_diff(full.trajectory.back(), cut.trajectory.back()) > 1e-3);
}

TEST_CASE("contraction estimates") {
  CHECK(contraction_estimate(std::vector<double>{1.0, 0.5, 0.25, 0.125}) == doctest::Approx(0.5));
  CHECK(contraction_estimate(std::vector<double>{8.0, 1.0, 0.5, 0.25, 0.125}) == doctest::Approx(0.5));
  CHECK(contraction_estimate(std::vector<double>{1.0, 0.0}) == 0.0);
  CHECK(std::isnan(contraction_estimate(std::vector<double>{1.0, 0.5})));

  const GridSpec g{1, 64, 4.0};
  const auto u0 = gaussian_initial(g, 1.0, 0.5);
  const SourceSpec lin{1.0, 0.0, 0.0, 1.0};
  const auto short_run = evolve_semilinear(u0, lin, 0.6, config(0.25, 25));
  const auto long_run = evolve_semilinear(u0, lin, 0.6, config(0.5, 25));
  CHECK(short_run.contraction_ratio < 1.0);
  CHECK(long_run.contraction_ratio >= short_run.contraction_ratio);
  auto whole = config(0.25, 25);
  whole.window_nodes = 0;
  const auto whole_run = evolve_semilinear(u0, lin, 0.6, whole);
  CHECK(whole_run.contraction_ratio < 1.0);
}

TEST_CASE("refinement convergence") {
  const GridSpec g{1, 64, 4.0};
  const auto u0 = gaussian_initial(g, 1.0, 0.5);
  for (double alpha : {0.5, 1.0}) {
    std::vector<ScalarField> finals;
    for (int steps : {20, 40, 80}) {
      finals.push_back(evolve_semilinear(u0, SourceSpec{1.0, 0.0, 0.0, 2.0}, alpha, config(0.5, steps))
                           .trajectory.back());
    }
    const double e1 = max_abs_diff(finals[0], finals[1]);
    const double e2 = max_abs_diff(finals[1], finals[2]);
    MESSAGE("alpha=" << alpha << " observed order " << std::log2(e1 / e2));
    CHECK(std::log2(e1 / e2) >= 1.0);
  }
}
