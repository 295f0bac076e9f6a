#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracstokes/errors.hpp"
#include "fracstokes/linear_propagator.hpp"
#include "fracstokes/special_functions.hpp"
#include "heat_oracles.hpp"

using namespace fracstokes;

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

ScalarField random_field(const GridSpec& g, std::uint64_t seed, double lo = -1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, 1.0);
  ScalarField f(g);
  for (auto& v : f.values) v = u(rng);
  return f;
}

}  // namespace

TEST_CASE("multiplier invariants") {
  const GridSpec g{2, 32, 3.0};
  const auto zero = multiplier(g, 0.6, 0.0);
  for (double v : zero.m) CHECK(v == 1.0);
  const auto wn = wave_numbers(g);
  for (double alpha : {0.2, 0.5, 0.8, 1.0}) {
    for (double t : {0.01, 0.3, 2.0}) {
      const auto m = multiplier(g, alpha, t);
      CHECK(m.m[0] == 1.0);
      for (std::size_t i = 0; i < m.m.size(); ++i) {
        CHECK(m.m[i] >= 0.0);
        CHECK(m.m[i] <= 1.0);
        for (std::size_t j = 0; j < m.m.size(); j += 37) {
          if (wn->shell[j] > wn->shell[i]) CHECK(m.m[j] <= m.m[i]);
        }
      }
      for (std::size_t i = 1; alpha < 1.0 && i < m.m.size(); ++i) CHECK(m.m[i] > 0.0);
    }
  }
  const auto heat = multiplier(g, 1.0, 0.05);
  for (std::size_t i = 0; i < heat.m.size(); ++i) {
    CHECK(std::fabs(heat.m[i] - std::exp(-wn->xi_squared[i] * 0.05)) <= 1e-10);
  }
  CHECK_THROWS_AS(multiplier(g, 0.5, -1.0), DomainError);
  CHECK_THROWS_AS(multiplier(g, 1.5, 1.0), DomainError);
}

TEST_CASE("evolve_homogeneous identity and mean conservation") {
  const GridSpec g{2, 16, 2.0};
  const auto u0 = random_field(g, 3);
  CHECK(max_abs_diff(evolve_homogeneous(u0, 0.4, 0.0), u0) <= 1e-12);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ua(0.05, 1.0), ut(0.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_field(g, 100 + trial);
    const auto out = evolve_homogeneous(f, ua(rng), ut(rng));
    CHECK(std::fabs(out.mean() - f.mean()) <= 1e-12);
  }
}

TEST_CASE("alpha = 1 reproduces the Gaussian heat solution") {
  const GridSpec g{1, 256, 16.0};
  const auto u0 = gaussian_initial(g, 1.0, 1.0);
  const auto out = evolve_homogeneous(u0, 1.0, 1.0);
  CHECK(max_abs_diff(out, testing::gaussian_heat_solution(g, 1.0, 1.0, 1.0)) <= 1e-6);

  const GridSpec g2{2, 64, 8.0};
  const auto out2 = evolve_homogeneous(gaussian_initial(g2, 2.0, 1.0), 1.0, 0.5);
  CHECK(max_abs_diff(out2, testing::gaussian_heat_solution(g2, 2.0, 1.0, 0.5)) <= 1e-6);
}

TEST_CASE("green_function") {
  const GridSpec g{1, 128, 4.0};
  CHECK_THROWS_AS(green_function(g, 0.5, 0.0), DomainError);
  for (double alpha : {0.3, 0.7, 1.0}) {
    for (double t : {0.05, 0.5, 3.0}) {
      const auto G = green_function(g, alpha, t);
      double mass = 0.0;
      for (double v : G.values) mass += v;
      CHECK(std::fabs(mass * g.cell_volume() - 1.0) <= 1e-10);
      for (int i = 1; i < g.points; ++i) CHECK(G[i] == doctest::Approx(G[g.points - i]).epsilon(1e-12).scale(1e-14));
    }
  }
  const GridSpec g3{3, 16, 2.0};
  const auto G3 = green_function(g3, 0.5, 0.2);
  double mass = 0.0;
  for (double v : G3.values) mass += v;
  CHECK(std::fabs(mass * g3.cell_volume() - 1.0) <= 1e-10);

  for (double t : {0.1, 1.0}) {
    const auto G = green_function(g, 1.0, t);
    CHECK(max_abs_diff(G, testing::periodized_heat_kernel(g, t)) <= 1e-8);
  }
}

TEST_CASE("per-mode factor agrees with the time-stepped scalar oracle") {
  const GridSpec g{1, 16, 2.0};
  const TimeGrid time(1.0, 2048);
  const auto wn = wave_numbers(g);
  for (double alpha : {0.4, 0.8}) {
    const auto m = multiplier(g, alpha, 1.0);
    for (std::size_t k = 1; k < 6; ++k) {
      const auto y = solve_scalar_mode(wn->xi_squared[k], alpha, time);
      CHECK(std::fabs(y.back() - m.m[k]) <= 1e-3);
    }
  }
}

TEST_CASE("no semigroup property for alpha < 1") {
  const GridSpec g{1, 64, 4.0};
  const auto u0 = gaussian_initial(g, 1.0, 0.5);
  const auto direct = evolve_homogeneous(u0, 0.5, 1.0);
  const auto composed = evolve_homogeneous(evolve_homogeneous(u0, 0.5, 0.5), 0.5, 0.5);
  CHECK(max_abs_diff(direct, composed) > 1e-2);
  const auto heat_direct = evolve_homogeneous(u0, 1.0, 1.0);
  const auto heat_composed = evolve_homogeneous(evolve_homogeneous(u0, 1.0, 0.5), 1.0, 0.5);
  CHECK(max_abs_diff(heat_direct, heat_composed) <= 1e-12);
}

TEST_CASE("evolve_duhamel") {
  const GridSpec g{1, 64, 4.0};
  const auto u0 = random_field(g, 21);
  const TimeGrid time(0.7, 32);
  SUBCASE("zero source is bit-identical to the homogeneous evolution") {
    const auto out = evolve_duhamel(u0, [&](double) { return ScalarField(g); }, 0.6, time);
    CHECK(out.values == evolve_homogeneous(u0, 0.6, 0.7).values);
  }
  SUBCASE("constant-in-space source drives the mean") {
    const auto out = evolve_duhamel(u0, [&](double t) { return ScalarField(g, 2.0 * t); }, 0.6, time);
    CHECK(out.mean() == doctest::Approx(u0.mean() + 0.49).epsilon(1e-12));
  }
  SUBCASE("manufactured solution at alpha = 1") {
    const GridSpec gm{1, 64, 2.0};
    const double k = std::numbers::pi / gm.half_width;
    auto shape = [&](double scale) {
      ScalarField f(gm);
      for (int i = 0; i < gm.points; ++i) f[i] = scale * std::cos(k * gm.coordinate(i));
      return f;
    };
    const TimeGrid tg(1.0, 128);
    const auto out = evolve_duhamel(shape(1.0), [&](double t) { return shape((k * k - 1.0) * std::exp(-t)); },
                                    1.0, tg);
    CHECK(max_abs_diff(out, shape(std::exp(-1.0))) <= 1e-4);

    double e_prev = 0.0;
    for (int steps : {16, 32, 64}) {
      const auto o = evolve_duhamel(shape(1.0), [&](double t) { return shape((k * k - 1.0) * std::exp(-t)); },
                                    1.0, TimeGrid(1.0, steps));
      const double e = max_abs_diff(o, shape(std::exp(-1.0)));
      if (e_prev > 0.0) CHECK(std::log2(e_prev / e) >= 1.8);
      e_prev = e;
    }
  }
  CHECK_THROWS_AS(evolve_duhamel(u0, [](double) { return ScalarField(GridSpec{1, 32, 4.0}); }, 0.5, time),
                  DomainError);
}

TEST_CASE("stability_report") {
  const GridSpec g{1, 128, 8.0};
  const auto u0 = gaussian_initial(g, 1.0, 0.5);
  const auto r0 = stability_report(u0, 0.5, 0.0, 2.0);
  CHECK(r0.ratio == doctest::Approx(1.0).epsilon(1e-14));
  for (double alpha : {0.3, 0.6, 1.0}) {
    const auto mass = stability_report(u0, alpha, 1.0, 1.0);
    CHECK(std::fabs(mass.ratio - 1.0) <= 1e-10);
  }
  int worst = 0;
  for (double alpha : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    for (double t : {0.01, 0.1, 1.0, 4.0}) {
      const auto sup = stability_report(u0, alpha, t, std::numeric_limits<double>::infinity());
      MESSAGE("sup-norm ratio alpha=" << alpha << " t=" << t << ": " << sup.ratio);
      if (sup.ratio > 1.02) ++worst;
    }
  }
  CHECK(worst == 0);
  const auto zero = stability_report(ScalarField(g), 0.5, 1.0, 2.0);
  CHECK(zero.ratio == 1.0);
}

TEST_CASE("shell tables round-trip through the disk cache") {
  const auto dir = std::filesystem::temp_directory_path() / "fracstokes_ml_cache_test";
  std::filesystem::remove_all(dir);
  setenv("FRACSTOKES_CACHE", dir.c_str(), 1);
  const GridSpec g{1, 32, 1.2345};
  const auto first = shell_multiplier(g, 0.37, 0.77);
  unsetenv("FRACSTOKES_CACHE");
  CHECK(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}) == 1);
  std::filesystem::remove_all(dir);
  const auto again = shell_multiplier(g, 0.37, 0.77);
  CHECK(again.get() == first.get());
}
