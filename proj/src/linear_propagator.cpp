#include "fracstokes/linear_propagator.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>
#include <tuple>

#include "fracstokes/errors.hpp"
#include "fracstokes/field_io.hpp"
#include "fracstokes/special_functions.hpp"

namespace fracstokes {

namespace {

using GridKey = std::tuple<int, int, std::uint64_t>;
using TableKey = std::tuple<std::uint64_t, std::uint64_t, int, int, std::uint64_t>;

GridKey grid_key(const GridSpec& g) {
  return {g.ndim, g.points, std::bit_cast<std::uint64_t>(g.half_width)};
}

TableKey table_key(const GridSpec& g, double alpha, double t) {
  return {std::bit_cast<std::uint64_t>(alpha), std::bit_cast<std::uint64_t>(t), g.ndim, g.points,
          std::bit_cast<std::uint64_t>(g.half_width)};
}

void validate_alpha_t(double alpha, double t) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and >= 0");
}

std::filesystem::path disk_path(const TableKey& key) {
  const char* dir = std::getenv("FRACSTOKES_CACHE");
  if (!dir || !*dir) return {};
  std::ostringstream name;
  name << std::hex << "ml_" << std::get<0>(key) << '_' << std::get<1>(key) << '_'
       << std::get<2>(key) << '_' << std::get<3>(key) << '_' << std::get<4>(key) << ".bin";
  return std::filesystem::path(dir) / name.str();
}

bool load_from_disk(const std::filesystem::path& path, std::size_t count, std::vector<double>& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != count * sizeof(double)) return false;
  out.resize(count);
  std::memcpy(out.data(), bytes.data(), bytes.size());
  return true;
}

void store_to_disk(const std::filesystem::path& path, const std::vector<double>& values) {
  try {
    std::filesystem::create_directories(path.parent_path());
    std::string bytes(values.size() * sizeof(double), '\0');
    std::memcpy(bytes.data(), values.data(), bytes.size());
    write_file_atomic(path, bytes);
  } catch (const std::exception&) {
    // the disk cache is optional
  }
}

std::vector<double> compute_shell_values(const WaveNumbers& wn, double alpha, double t) {
  const int max_shell = wn.max_shell();
  std::vector<char> present(max_shell + 1, 0);
  for (int s : wn.shell) present[s] = 1;
  std::vector<double> values(max_shell + 1, std::numeric_limits<double>::quiet_NaN());
  const double base = std::numbers::pi / wn.grid.half_width;
  const double ta = std::pow(t, alpha);
  for (int s = 0; s <= max_shell; ++s) {
    if (!present[s]) continue;
    values[s] = s == 0 ? 1.0 : mittag_leffler(alpha, 1.0, -base * base * s * ta);
  }
  return values;
}

class MultiplierCache {
 public:
  std::shared_ptr<const WaveNumbers> waves(const GridSpec& grid) {
    const auto key = grid_key(grid);
    {
      std::shared_lock lock(mutex_);
      if (auto it = waves_.find(key); it != waves_.end()) return it->second;
    }
    auto wn = std::make_shared<const WaveNumbers>(grid);
    std::unique_lock lock(mutex_);
    return waves_.emplace(key, std::move(wn)).first->second;
  }

  std::shared_ptr<const ShellTable> table(const GridSpec& grid, double alpha, double t) {
    const auto key = table_key(grid, alpha, t);
    {
      std::shared_lock lock(mutex_);
      if (auto it = tables_.find(key); it != tables_.end()) return it->second;
    }
    const auto wn = waves(grid);
    auto table = std::make_shared<ShellTable>();
    table->alpha = alpha;
    table->t = t;
    const auto path = disk_path(key);
    const std::size_t count = static_cast<std::size_t>(wn->max_shell()) + 1;
    if (path.empty() || !load_from_disk(path, count, table->values)) {
      table->values = compute_shell_values(*wn, alpha, t);
      if (!path.empty()) store_to_disk(path, table->values);
    }
    std::unique_lock lock(mutex_);
    table_bytes_ += count * sizeof(double);
    if (table_bytes_ > kMaxBytes) {
      tables_.clear();
      table_bytes_ = count * sizeof(double);
    }
    return tables_.emplace(key, std::move(table)).first->second;
  }

 private:
  static constexpr std::size_t kMaxBytes = std::size_t{1} << 30;
  std::shared_mutex mutex_;
  std::map<GridKey, std::shared_ptr<const WaveNumbers>> waves_;
  std::map<TableKey, std::shared_ptr<const ShellTable>> tables_;
  std::size_t table_bytes_ = 0;
};

MultiplierCache& cache() {
  static MultiplierCache c;
  return c;
}

}  // namespace

std::shared_ptr<const ShellTable> shell_multiplier(const GridSpec& grid, double alpha, double t) {
  grid.validate();
  validate_alpha_t(alpha, t);
  return cache().table(grid, alpha, t);
}

std::shared_ptr<const WaveNumbers> wave_numbers(const GridSpec& grid) {
  grid.validate();
  return cache().waves(grid);
}

Multiplier multiplier(const GridSpec& grid, double alpha, double t) {
  const auto table = shell_multiplier(grid, alpha, t);
  const auto wn = wave_numbers(grid);
  Multiplier out{grid, alpha, t, {}};
  out.m.resize(wn->shell.size());
  for (std::size_t i = 0; i < out.m.size(); ++i) out.m[i] = table->values[wn->shell[i]];
  return out;
}

void apply_shell_table(const WaveNumbers& wn, const ShellTable& table,
                       std::complex<double>* coeffs) {
  const std::size_t n = wn.shell.size();
  for (std::size_t i = 0; i < n; ++i) coeffs[i] *= table.values[wn.shell[i]];
}

ScalarField evolve_homogeneous(const ScalarField& u0, double alpha, double t) {
  const auto table = shell_multiplier(u0.grid, alpha, t);
  const auto wn = wave_numbers(u0.grid);
  auto spec = forward_transform(u0);
  apply_shell_table(*wn, *table, spec.coeffs.data());
  ScalarField out(u0.grid);
  inverse_transform_into(u0.grid, spec.coeffs.data(), out.values.data());
  return out;
}

ScalarField green_function(const GridSpec& grid, double alpha, double t) {
  grid.validate();
  if (!(t > 0.0)) throw DomainError("green_function: t must be > 0 (t = 0 is the delta limit)");
  ScalarField delta(grid);
  const int half = grid.points / 2;
  std::size_t idx = 0;
  for (int d = 0; d < grid.ndim; ++d) idx = idx * grid.points + half;
  delta.values[idx] = 1.0 / grid.cell_volume();
  return evolve_homogeneous(delta, alpha, t);
}

ScalarField evolve_duhamel(const ScalarField& u0, const SourceSampler& source, double alpha,
                           const TimeGrid& time) {
  const GridSpec& g = u0.grid;
  const int steps = time.steps();
  if (steps < 8) {
    std::cerr << "warning: evolve_duhamel with " << steps
              << " steps; trapezoidal quadrature is coarse\n";
  }
  const double t_end = time.t_end();
  const auto wn = wave_numbers(g);
  auto acc = forward_transform(u0);
  apply_shell_table(*wn, *shell_multiplier(g, alpha, t_end), acc.coeffs.data());

  const double dt = time.dt();
  std::vector<std::complex<double>> fhat(g.spectral_size());
  for (int j = 0; j <= steps; ++j) {
    const double tau = time.node(j);
    const ScalarField f = source(tau);
    if (!(f.grid == g)) throw DomainError("evolve_duhamel: source grid does not match u0");
    forward_transform_into(g, f.values.data(), fhat.data());
    const double lag = j == steps ? 0.0 : (steps - j) * dt;
    const auto table = shell_multiplier(g, alpha, lag);
    const double w = (j == 0 || j == steps) ? 0.5 * dt : dt;
    for (std::size_t i = 0; i < fhat.size(); ++i) {
      acc.coeffs[i] += w * table->values[wn->shell[i]] * fhat[i];
    }
  }
  ScalarField out(g);
  inverse_transform_into(g, acc.coeffs.data(), out.values.data());
  return out;
}

StabilityReport stability_report(const ScalarField& u0, double alpha, double t, double p) {
  const double n0 = field_norm(u0, p);
  const double nt = field_norm(evolve_homogeneous(u0, alpha, t), p);
  const double ratio = n0 > 0.0 ? nt / n0 : (nt == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  return {nt, n0, ratio};
}

}  // namespace fracstokes
