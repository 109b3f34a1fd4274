#pragma once

#include <filesystem>
#include <iosfwd>

#include <nlohmann/json.hpp>

#include "ftn/mps.hpp"

namespace ftn {

/// Binary container:
///   "FTNM" | u32 version | u64 N | u64 D | (N+1) x u64 bond extents |
///   tensors as row-major f64,
/// all little-endian.
inline constexpr std::uint32_t kMpsFormatVersion = 1;

void write_mps(std::ostream& os, const Mps& psi);
Mps read_mps(std::istream& is);

void save_mps(const std::filesystem::path& path, const Mps& psi);
Mps load_mps(const std::filesystem::path& path);

/// {"format": "ftn-mps", "version", "N", "D", "bonds", "tensors": [[[..]]]}
nlohmann::json mps_to_json(const Mps& psi);
Mps mps_from_json(const nlohmann::json& j);

}  // namespace ftn
