#include "fracstokes/spectral_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "fracstokes/errors.hpp"

namespace fracstokes {

void GridSpec::validate() const {
  if (ndim < 1 || ndim > 3) throw DomainError("GridSpec: ndim must be 1, 2 or 3");
  if (points < 8 || (points & (points - 1)) != 0) {
    throw DomainError("GridSpec: points per axis must be a power of two >= 8, got " +
                      std::to_string(points));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw DomainError("GridSpec: half_width must be > 0");
  }
}

std::size_t GridSpec::total_points() const {
  std::size_t n = 1;
  for (int d = 0; d < ndim; ++d) n *= static_cast<std::size_t>(points);
  return n;
}

double GridSpec::cell_volume() const { return std::pow(dx(), ndim); }

double GridSpec::box_volume() const { return std::pow(2.0 * half_width, ndim); }

std::array<int, 3> GridSpec::spectral_shape() const {
  std::array<int, 3> s{1, 1, 1};
  for (int d = 0; d < ndim; ++d) s[d] = points;
  s[ndim - 1] = points / 2 + 1;
  return s;
}

std::size_t GridSpec::spectral_size() const {
  const auto s = spectral_shape();
  return static_cast<std::size_t>(s[0]) * s[1] * s[2];
}

ScalarField::ScalarField(const GridSpec& g, double fill) : grid(g) {
  grid.validate();
  values.assign(grid.total_points(), fill);
}

ScalarField::ScalarField(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  grid.validate();
  if (values.size() != grid.total_points()) {
    throw DomainError("ScalarField: sample count does not match grid");
  }
}

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }

bool ScalarField::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

SpectralField::SpectralField(const GridSpec& g) : grid(g) {
  grid.validate();
  coeffs.assign(grid.spectral_size(), {0.0, 0.0});
}

int wrapped_frequency(int i, int points) { return i <= points / 2 ? i : i - points; }

namespace {

int storage_axis_index(int k, int points) { return k >= 0 ? k : k + points; }

int normalize_frequency(int k, int points) {
  int m = ((k % points) + points) % points;
  return wrapped_frequency(m, points);
}

}  // namespace

std::size_t SpectralField::storage_index(const std::array<int, 3>& k) const {
  const auto shape = grid.spectral_shape();
  std::size_t idx = 0;
  for (int d = 0; d < grid.ndim; ++d) {
    const int i = d == grid.ndim - 1 ? k[d] : storage_axis_index(k[d], grid.points);
    idx = idx * shape[d] + i;
  }
  return idx;
}

std::complex<double> SpectralField::coeff(const std::array<int, 3>& k) const {
  std::array<int, 3> kk{0, 0, 0};
  for (int d = 0; d < grid.ndim; ++d) kk[d] = normalize_frequency(k[d], grid.points);
  const int last = grid.ndim - 1;
  if (kk[last] >= 0) return coeffs[storage_index(kk)];
  std::array<int, 3> neg{0, 0, 0};
  for (int d = 0; d < grid.ndim; ++d) neg[d] = normalize_frequency(-kk[d], grid.points);
  return std::conj(coeffs[storage_index(neg)]);
}

WaveNumbers::WaveNumbers(const GridSpec& g) : grid(g) {
  grid.validate();
  const auto shape = grid.spectral_shape();
  const std::size_t n = grid.spectral_size();
  xi_squared.resize(n);
  shell.resize(n);
  multiplicity.resize(n);
  const double base = std::numbers::pi / grid.half_width;
  const int last = grid.ndim - 1;
  std::size_t idx = 0;
  for (int a = 0; a < shape[0]; ++a) {
    for (int b = 0; b < shape[1]; ++b) {
      for (int c = 0; c < shape[2]; ++c, ++idx) {
        const std::array<int, 3> raw{a, b, c};
        int s = 0;
        for (int d = 0; d < grid.ndim; ++d) {
          const int k = d == last ? raw[d] : wrapped_frequency(raw[d], grid.points);
          s += k * k;
        }
        shell[idx] = s;
        xi_squared[idx] = base * base * s;
        const int kl = raw[last];
        multiplicity[idx] = (kl == 0 || kl == grid.points / 2) ? 1.0 : 2.0;
      }
    }
  }
}

int WaveNumbers::max_shell() const { return *std::max_element(shell.begin(), shell.end()); }

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, bool>, fftw_plan> plans;

  fftw_plan get(const GridSpec& grid, bool forward) {
    std::lock_guard lock(mutex);
    const auto key = std::make_tuple(grid.ndim, grid.points, forward);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    int n[3] = {grid.points, grid.points, grid.points};
    const std::size_t real_n = grid.total_points();
    const std::size_t spec_n = grid.spectral_size();
    double* r = fftw_alloc_real(real_n);
    fftw_complex* c = fftw_alloc_complex(spec_n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = forward ? fftw_plan_dft_r2c(grid.ndim, n, r, c, flags)
                          : fftw_plan_dft_c2r(grid.ndim, n, c, r, flags);
    fftw_free(r);
    fftw_free(c);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void forward_transform_into(const GridSpec& grid, const double* in, std::complex<double>* out) {
  fftw_plan p = plan_cache().get(grid, true);
  // r2c plans preserve their input
  fftw_execute_dft_r2c(p, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
  const double norm = 1.0 / static_cast<double>(grid.total_points());
  const std::size_t n = grid.spectral_size();
  for (std::size_t i = 0; i < n; ++i) out[i] *= norm;
}

void inverse_transform_into(const GridSpec& grid, const std::complex<double>* in, double* out) {
  fftw_plan p = plan_cache().get(grid, false);
  thread_local std::vector<std::complex<double>> scratch;
  scratch.assign(in, in + grid.spectral_size());
  fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

SpectralField forward_transform(const ScalarField& field) {
  SpectralField spec(field.grid);
  forward_transform_into(field.grid, field.values.data(), spec.coeffs.data());
  return spec;
}

ScalarField inverse_transform(const SpectralField& spec) {
  const GridSpec& g = spec.grid;
  // The half-spectrum planes kl = 0 and kl = M/2 map onto themselves under
  // k -> -k; their anti-Hermitian part is what would leave an imaginary
  // residue in the output. Bound it by the sum of magnitudes.
  const int last = g.ndim - 1;
  const auto shape = g.spectral_shape();
  double residue = 0.0;
  for (int kl : {0, g.points / 2}) {
    for (int a = 0; a < (last >= 1 ? shape[0] : 1); ++a) {
      for (int b = 0; b < (last >= 2 ? shape[1] : 1); ++b) {
        std::array<int, 3> k{0, 0, 0};
        if (last >= 1) k[0] = wrapped_frequency(a, g.points);
        if (last >= 2) k[1] = wrapped_frequency(b, g.points);
        k[last] = kl;
        std::array<int, 3> neg{0, 0, 0};
        for (int d = 0; d < last; ++d) neg[d] = normalize_frequency(-k[d], g.points);
        neg[last] = kl;
        const auto c = spec.coeffs[spec.storage_index(k)];
        const auto m = spec.coeffs[spec.storage_index(neg)];
        residue += 0.5 * std::abs(c - std::conj(m));
      }
    }
  }
  if (residue > 1e-9) {
    throw SymmetryError("inverse_transform: coefficients are not Hermitian (imaginary residue " +
                        std::to_string(residue) + ")");
  }
  ScalarField out(g);
  inverse_transform_into(g, spec.coeffs.data(), out.values.data());
  return out;
}

ScalarField gaussian_initial(const GridSpec& grid, double amplitude, double width,
                             const std::array<double, 3>& center) {
  grid.validate();
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("gaussian_initial: amplitude must be >= 0");
  }
  if (!(width > 0.0)) throw DomainError("gaussian_initial: width must be > 0");
  if (width > grid.half_width / 8.0) {
    throw DomainError("gaussian_initial: width must not exceed L/8 (" +
                      std::to_string(grid.half_width / 8.0) + ")");
  }
  ScalarField f(grid);
  const double box = 2.0 * grid.half_width;
  const int m = grid.points;
  const int n0 = grid.ndim >= 3 ? m : 1;
  const int n1 = grid.ndim >= 2 ? m : 1;
  std::size_t idx = 0;
  auto disp = [&](int i, int axis) {
    double d = grid.coordinate(i) - center[axis];
    d -= box * std::round(d / box);
    return d * d;
  };
  for (int a = 0; a < n0; ++a) {
    for (int b = 0; b < n1; ++b) {
      for (int c = 0; c < m; ++c, ++idx) {
        double r2 = disp(c, grid.ndim - 1);
        if (grid.ndim >= 2) r2 += disp(b, grid.ndim - 2);
        if (grid.ndim >= 3) r2 += disp(a, 0);
        f.values[idx] = amplitude * std::exp(-r2 / (2.0 * width * width));
      }
    }
  }
  return f;
}

double field_norm(const ScalarField& field, double p) {
  if (std::isinf(p) && p > 0) return field.max_abs();
  const double vol = field.grid.cell_volume();
  if (p == 1.0) {
    double s = 0.0;
    for (double v : field.values) s += std::fabs(v);
    return s * vol;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (double v : field.values) s += v * v;
    return std::sqrt(s * vol);
  }
  throw DomainError("field_norm: p must be 1, 2 or infinity");
}

std::vector<double> radial_distance(const GridSpec& grid) {
  grid.validate();
  const int m = grid.points;
  std::vector<double> r(grid.total_points());
  const int n0 = grid.ndim >= 3 ? m : 1;
  const int n1 = grid.ndim >= 2 ? m : 1;
  std::size_t idx = 0;
  // sample coordinates lie in [-L, L), so |x_i| is already the minimum image
  for (int a = 0; a < n0; ++a) {
    for (int b = 0; b < n1; ++b) {
      for (int c = 0; c < m; ++c, ++idx) {
        double r2 = grid.coordinate(c) * grid.coordinate(c);
        if (grid.ndim >= 2) r2 += grid.coordinate(b) * grid.coordinate(b);
        if (grid.ndim >= 3) r2 += grid.coordinate(a) * grid.coordinate(a);
        r[idx] = std::sqrt(r2);
      }
    }
  }
  return r;
}

}  // namespace fracstokes
