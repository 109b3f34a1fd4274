#include "ftn/mps_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "ftn/errors.hpp"

namespace ftn {

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'T', 'N', 'M'};
// Refuse absurd headers before allocating.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <typename T>
void put(std::ostream& os, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& is) {
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), bytes.size())) throw FormatError("mps container: unexpected end of data");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_mps(std::ostream& os, const Mps& psi) {
  os.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(os, kMpsFormatVersion);
  put<std::uint64_t>(os, psi.length());
  put<std::uint64_t>(os, psi.physical_dim());
  for (std::size_t b : psi.bond_extents()) put<std::uint64_t>(os, b);
  for (const auto& t : psi.tensors())
    for (double v : t.values()) put<double>(os, v);
  if (!os) throw FormatError("mps container: write failed");
}

Mps read_mps(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
    throw FormatError("mps container: bad magic");
  }
  const auto version = get<std::uint32_t>(is);
  if (version != kMpsFormatVersion) {
    throw FormatError("mps container: unsupported version " + std::to_string(version));
  }
  const auto n_sites = get<std::uint64_t>(is);
  const auto d = get<std::uint64_t>(is);
  if (n_sites == 0 || d == 0 || n_sites > kMaxElements) throw FormatError("mps container: bad header");
  std::vector<std::uint64_t> bonds(n_sites + 1);
  for (auto& b : bonds) {
    b = get<std::uint64_t>(is);
    if (b == 0 || b > kMaxElements) throw FormatError("mps container: bad bond extent");
  }
  std::vector<DenseTensor> tensors;
  tensors.reserve(n_sites);
  for (std::size_t n = 0; n < n_sites; ++n) {
    if (bonds[n] * d * bonds[n + 1] > kMaxElements) throw FormatError("mps container: tensor too large");
    DenseTensor t({bonds[n], d, bonds[n + 1]});
    for (double& v : t.data()) v = get<double>(is);
    tensors.push_back(std::move(t));
  }
  try {
    return Mps(std::move(tensors));
  } catch (const ShapeError& e) {
    throw FormatError(std::string("mps container: ") + e.what());
  }
}

void save_mps(const std::filesystem::path& path, const Mps& psi) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_mps(os, psi);
}

Mps load_mps(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_mps(is);
}

nlohmann::json mps_to_json(const Mps& psi) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : psi.tensors()) {
    nlohmann::json site = nlohmann::json::array();
    for (std::size_t a = 0; a < t.extent(0); ++a) {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t s = 0; s < t.extent(1); ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t b = 0; b < t.extent(2); ++b) row.push_back(t(a, s, b));
        rows.push_back(std::move(row));
      }
      site.push_back(std::move(rows));
    }
    tensors.push_back(std::move(site));
  }
  return {{"format", "ftn-mps"},
          {"version", kMpsFormatVersion},
          {"N", psi.length()},
          {"D", psi.physical_dim()},
          {"bonds", psi.bond_extents()},
          {"tensors", std::move(tensors)}};
}

Mps mps_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "ftn-mps") throw FormatError("mps json: unknown format");
    if (j.at("version").get<std::uint32_t>() != kMpsFormatVersion) {
      throw FormatError("mps json: unsupported version");
    }
    const auto n_sites = j.at("N").get<std::size_t>();
    const auto d = j.at("D").get<std::size_t>();
    const auto bonds = j.at("bonds").get<std::vector<std::size_t>>();
    const auto& sites = j.at("tensors");
    if (bonds.size() != n_sites + 1 || sites.size() != n_sites) {
      throw FormatError("mps json: inconsistent site count");
    }
    std::vector<DenseTensor> tensors;
    for (std::size_t n = 0; n < n_sites; ++n) {
      DenseTensor t({bonds[n], d, bonds[n + 1]});
      const auto& site = sites[n];
      if (site.size() != bonds[n]) throw FormatError("mps json: bad left extent");
      for (std::size_t a = 0; a < bonds[n]; ++a) {
        if (site[a].size() != d) throw FormatError("mps json: bad physical extent");
        for (std::size_t s = 0; s < d; ++s) {
          if (site[a][s].size() != bonds[n + 1]) throw FormatError("mps json: bad right extent");
          for (std::size_t b = 0; b < bonds[n + 1]; ++b) t(a, s, b) = site[a][s][b].get<double>();
        }
      }
      tensors.push_back(std::move(t));
    }
    return Mps(std::move(tensors));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("mps json: ") + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(std::string("mps json: ") + e.what());
  }
}

}  // namespace ftn
