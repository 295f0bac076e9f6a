#include "fracstokes/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fracstokes/errors.hpp"

namespace fracstokes {

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("FRDF: truncated data");
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<U>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  pos += sizeof(T);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

}  // namespace

std::string encode_frdf(const ScalarField& field) {
  std::string out;
  out.reserve(24 + 8 * field.values.size());
  out.append("FRDF");
  put_le<std::uint32_t>(out, kFrdfVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid.ndim));
  for (int d = 0; d < field.grid.ndim; ++d) put_le<std::uint64_t>(out, field.grid.points);
  put_le<double>(out, field.grid.half_width);
  for (double v : field.values) put_le<double>(out, v);
  return out;
}

ScalarField decode_frdf(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "FRDF") != 0) throw IoError("FRDF: bad magic");
  std::size_t pos = 4;
  const auto version = get_le<std::uint32_t>(bytes, pos);
  if (version != kFrdfVersion) throw IoError("FRDF: unsupported version " + std::to_string(version));
  const auto ndim = get_le<std::uint32_t>(bytes, pos);
  if (ndim < 1 || ndim > 3) throw IoError("FRDF: ndim must be 1..3");
  std::uint64_t dims[3] = {0, 0, 0};
  for (std::uint32_t d = 0; d < ndim; ++d) dims[d] = get_le<std::uint64_t>(bytes, pos);
  for (std::uint32_t d = 1; d < ndim; ++d) {
    if (dims[d] != dims[0]) throw IoError("FRDF: only equal points per axis are supported");
  }
  GridSpec g{static_cast<int>(ndim), static_cast<int>(dims[0]), get_le<double>(bytes, pos)};
  try {
    g.validate();
  } catch (const DomainError& e) {
    throw IoError(std::string("FRDF: ") + e.what());
  }
  const std::size_t n = g.total_points();
  if (bytes.size() - pos != 8 * n) throw IoError("FRDF: sample count does not match dims");
  std::vector<double> values(n);
  for (auto& v : values) v = get_le<double>(bytes, pos);
  return ScalarField(g, std::move(values));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_frdf(const std::filesystem::path& path, const ScalarField& field) {
  write_file_atomic(path, encode_frdf(field));
}

ScalarField read_frdf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_frdf(ss.str());
}

}  // namespace fracstokes
