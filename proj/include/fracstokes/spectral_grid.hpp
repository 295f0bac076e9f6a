#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace fracstokes {

/// Periodic box [-L, L)^ndim sampled at `points` nodes per axis.
struct GridSpec {
  int ndim = 1;
  int points = 64;
  double half_width = 1.0;

  /// Throws DomainError unless ndim in {1,2,3}, points a power of two >= 8 and L > 0.
  void validate() const;

  std::size_t total_points() const;
  double dx() const { return 2.0 * half_width / points; }
  double cell_volume() const;
  double box_volume() const;
  /// Coordinate of sample index i along any axis: -L + i dx.
  double coordinate(int i) const { return -half_width + i * dx(); }

  /// Shape of the half spectrum: every axis full except the last, which keeps M/2 + 1 entries.
  std::array<int, 3> spectral_shape() const;
  std::size_t spectral_size() const;

  bool operator==(const GridSpec&) const = default;
};

/// Real samples on a grid, row-major with the last axis fastest.
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0);
  ScalarField(const GridSpec& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double mean() const;
  double max_abs() const;
  double min() const;
  bool all_finite() const;
};

/// Discrete Fourier coefficients of a real field stored as a half spectrum
/// (last axis k = 0..M/2). coeff() extends to every integer frequency vector
/// via Hermitian symmetry. Normalized so that the k = 0 coefficient is the
/// spatial mean.
struct SpectralField {
  GridSpec grid;
  std::vector<std::complex<double>> coeffs;

  SpectralField() = default;
  explicit SpectralField(const GridSpec& g);

  /// Coefficient at frequency vector k (components in (-M/2, M/2], unused
  /// trailing components ignored).
  std::complex<double> coeff(const std::array<int, 3>& k) const;
  /// Storage index of frequency k in the half spectrum, valid when k's last
  /// component is in [0, M/2].
  std::size_t storage_index(const std::array<int, 3>& k) const;
};

/// Wrap-around frequency of storage index i on an axis of M points:
/// 0, 1, ..., M/2, -M/2+1, ..., -1.
int wrapped_frequency(int i, int points);

/// |xi|^2 aligned with SpectralField storage, xi = pi k / L componentwise.
struct WaveNumbers {
  GridSpec grid;
  std::vector<double> xi_squared;
  /// Integer shell index |k|^2; xi_squared = (pi/L)^2 * shell.
  std::vector<int> shell;
  /// Multiplicity of each storage entry in the full spectrum (1 or 2).
  std::vector<double> multiplicity;

  explicit WaveNumbers(const GridSpec& g);
  int max_shell() const;
};

SpectralField forward_transform(const ScalarField& field);

/// Throws SymmetryError when the self-conjugate planes of the half spectrum
/// carry an anti-Hermitian part whose contribution to the output could exceed 1e-9.
ScalarField inverse_transform(const SpectralField& spec);

/// In-place variants on raw half-spectrum buffers; no symmetry check.
void forward_transform_into(const GridSpec& grid, const double* in, std::complex<double>* out);
void inverse_transform_into(const GridSpec& grid, const std::complex<double>* in, double* out);

/// a exp(-|x - c|^2 / (2 w^2)) with the minimum-image displacement.
/// Requires a >= 0 and 0 < w <= L/8 (DomainError otherwise).
ScalarField gaussian_initial(const GridSpec& grid, double amplitude, double width,
                             const std::array<double, 3>& center = {0.0, 0.0, 0.0});

/// Discrete L^p norm with volume weight dx^N; p must be 1, 2 or +infinity.
double field_norm(const ScalarField& field, double p);

/// Minimum-image distance of every sample from the box center.
std::vector<double> radial_distance(const GridSpec& grid);

}  // namespace fracstokes
