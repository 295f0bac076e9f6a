#pragma once

#include <filesystem>
#include <string>

#include "fracstokes/spectral_grid.hpp"

namespace fracstokes {

/// FRDF binary field format, little-endian throughout:
///   "FRDF" | u32 version = 1 | u32 ndim | u64 dims[ndim] | f64 half_width | f64 samples (row-major)
inline constexpr std::uint32_t kFrdfVersion = 1;

std::string encode_frdf(const ScalarField& field);
/// Throws IoError on a malformed buffer.
ScalarField decode_frdf(const std::string& bytes);

/// Writes to a temporary sibling and renames it into place. Throws IoError.
void write_frdf(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_frdf(const std::filesystem::path& path);

/// Atomic text write (temp file + rename). Throws IoError.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace fracstokes
