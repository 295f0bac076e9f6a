#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracstokes/errors.hpp"
#include "fracstokes/field_io.hpp"
#include "fracstokes/spectral_grid.hpp"

using namespace fracstokes;

namespace {

ScalarField random_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ScalarField f(g);
  for (auto& v : f.values) v = n(rng);
  return f;
}

const GridSpec kGrids[] = {{1, 64, 3.0}, {2, 16, 1.5}, {3, 8, 2.0}};

}  // namespace

TEST_CASE("GridSpec validation") {
  CHECK_NOTHROW((GridSpec{1, 8, 1.0}.validate()));
  CHECK_THROWS_AS((GridSpec{4, 8, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((GridSpec{1, 12, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((GridSpec{1, 4, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((GridSpec{1, 16, 0.0}.validate()), DomainError);
  GridSpec g{2, 16, 2.0};
  CHECK(g.total_points() == 256);
  CHECK(g.dx() == 0.25);
  CHECK(g.cell_volume() == doctest::Approx(0.0625));
  CHECK(g.spectral_size() == 16 * 9);
}

TEST_CASE("wrap-around frequency order") {
  CHECK(wrapped_frequency(0, 8) == 0);
  CHECK(wrapped_frequency(4, 8) == 4);
  CHECK(wrapped_frequency(5, 8) == -3);
  CHECK(wrapped_frequency(7, 8) == -1);
}

TEST_CASE("constant field has only a zero mode") {
  for (const auto& g : kGrids) {
    const auto spec = forward_transform(ScalarField(g, 2.5));
    CHECK(std::abs(spec.coeffs[0] - std::complex<double>(2.5, 0.0)) < 1e-13);
    for (std::size_t i = 1; i < spec.coeffs.size(); ++i) CHECK(std::abs(spec.coeffs[i]) < 1e-13);
  }
}

TEST_CASE("round trip, Parseval, Hermitian symmetry and the mean identity") {
  for (const auto& g : kGrids) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto f = random_field(g, seed);
      const auto spec = forward_transform(f);
      const auto back = inverse_transform(spec);
      double err = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::fabs(back[i] - f[i]));
      CHECK(err <= 1e-12);

      double lhs = 0.0;
      for (double v : f.values) lhs += v * v;
      lhs *= g.cell_volume();
      const WaveNumbers wn(g);
      double rhs = 0.0;
      for (std::size_t i = 0; i < spec.coeffs.size(); ++i) rhs += wn.multiplicity[i] * std::norm(spec.coeffs[i]);
      rhs *= g.box_volume();
      CHECK(std::fabs(lhs - rhs) <= 1e-12 * lhs);

      CHECK(std::fabs(f.mean() - spec.coeffs[0].real()) <= 1e-13);

      std::mt19937_64 rng(seed);
      std::uniform_int_distribution<int> k(-g.points / 2 + 1, g.points / 2);
      for (int t = 0; t < 30; ++t) {
        std::array<int, 3> kv{k(rng), k(rng), k(rng)};
        std::array<int, 3> neg{-kv[0], -kv[1], -kv[2]};
        CHECK(std::abs(spec.coeff(neg) - std::conj(spec.coeff(kv))) < 1e-14);
      }
    }
  }
}

TEST_CASE("inverse_transform rejects non-Hermitian input") {
  GridSpec g{1, 16, 1.0};
  SpectralField spec(g);
  spec.coeffs[0] = {1.0, 1e-3};
  CHECK_THROWS_AS(inverse_transform(spec), SymmetryError);
  spec.coeffs[0] = {1.0, 0.0};
  spec.coeffs[8] = {0.0, 1e-6};  // Nyquist must be real in 1D
  CHECK_THROWS_AS(inverse_transform(spec), SymmetryError);
  spec.coeffs[8] = {0.0, 1e-12};
  CHECK_NOTHROW(inverse_transform(spec));
}

TEST_CASE("wave numbers") {
  GridSpec g{2, 16, 2.0};
  const WaveNumbers wn(g);
  const double base = std::numbers::pi / 2.0;
  for (std::size_t i = 0; i < wn.xi_squared.size(); ++i) {
    CHECK(wn.xi_squared[i] >= 0.0);
    CHECK((wn.xi_squared[i] == 0.0) == (i == 0));
    CHECK(wn.xi_squared[i] == doctest::Approx(base * base * wn.shell[i]));
  }
  SpectralField s(g);
  CHECK(wn.shell[s.storage_index({-3, 2, 0})] == 13);
}

TEST_CASE("gaussian_initial") {
  GridSpec g1{1, 256, 16.0};
  const auto zero = gaussian_initial(g1, 0.0, 1.0);
  CHECK(zero.max_abs() == 0.0);
  CHECK_THROWS_AS(gaussian_initial(g1, 1.0, 2.5), DomainError);
  CHECK_THROWS_AS(gaussian_initial(g1, -1.0, 1.0), DomainError);
  for (const GridSpec& g : {GridSpec{1, 256, 16.0}, GridSpec{2, 64, 8.0}, GridSpec{3, 32, 8.0}}) {
    const double a = 1.7, w = g.half_width / 8.0;
    const auto f = gaussian_initial(g, a, w);
    const double exact = a * std::pow(w * std::sqrt(2 * std::numbers::pi), g.ndim) / g.box_volume();
    CHECK(std::fabs(f.mean() - exact) <= 1e-6 * exact);
    CHECK(field_norm(f, std::numeric_limits<double>::infinity()) == doctest::Approx(a).epsilon(1e-15));
  }
  // reflection about the center x = 0 (sample index M/2): i -> M - i
  const auto f = gaussian_initial(g1, 1.0, 1.3);
  for (int i = 1; i < 256; ++i) CHECK(f[i] == doctest::Approx(f[256 - i]).epsilon(1e-15));
  // off-center wraps periodically
  const auto shifted = gaussian_initial(g1, 1.0, 1.0, {15.5, 0.0, 0.0});
  CHECK(shifted[0] == doctest::Approx(std::exp(-0.125)));
}

TEST_CASE("field_norm") {
  GridSpec g{2, 16, 1.5};
  const ScalarField zero(g);
  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) CHECK(field_norm(zero, p) == 0.0);
  CHECK(field_norm(ScalarField(g, 1.0), 1.0) == doctest::Approx(9.0));
  CHECK(field_norm(ScalarField(g, 1.0), 2.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(field_norm(zero, 3.0), DomainError);
}

TEST_CASE("radial_distance is the minimum image from the center") {
  GridSpec g{2, 8, 2.0};
  const auto r = radial_distance(g);
  CHECK(r[4 * 8 + 4] == 0.0);
  CHECK(r[0] == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("FRDF encoding") {
  GridSpec g{2, 8, 1.25};
  const auto f = random_field(g, 11);
  const std::string bytes = encode_frdf(f);
  CHECK(bytes.size() == 4 + 4 + 4 + 2 * 8 + 8 + 8 * 64);
  CHECK(bytes.substr(0, 4) == "FRDF");
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 2);
  CHECK(bytes[12] == 8);
  const auto back = decode_frdf(bytes);
  CHECK(back.grid == g);
  CHECK(back.values == f.values);

  CHECK_THROWS_AS(decode_frdf("FRDX"), IoError);
  CHECK_THROWS_AS(decode_frdf(bytes.substr(0, bytes.size() - 3)), IoError);
  std::string bad_version = bytes;
  bad_version[4] = 2;
  CHECK_THROWS_AS(decode_frdf(bad_version), IoError);

  const auto dir = std::filesystem::temp_directory_path() / "fracstokes_frdf_test";
  std::filesystem::create_directories(dir);
  write_frdf(dir / "f.frdf", f);
  CHECK(!std::filesystem::exists(dir / "f.frdf.tmp"));
  CHECK(read_frdf(dir / "f.frdf").values == f.values);
  CHECK_THROWS_AS(read_frdf(dir / "missing.frdf"), IoError);
  std::filesystem::remove_all(dir);
}
