#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pado/oracle.hpp"

namespace pado {

inline constexpr std::uint16_t kOracleFormatVersion = 1;

// Binary container; layout in docs/oracle_format.md. Equal oracles give equal bytes.
std::vector<std::uint8_t> serialize_oracle(const DistanceOracle& oracle);

// Throws VersionMismatch for another format version and CorruptFile for bad
// magic, truncation, checksum mismatch or out-of-range ids.
DistanceOracle deserialize_oracle(std::span<const std::uint8_t> bytes);

void save_oracle(const DistanceOracle& oracle, std::ostream& out);
DistanceOracle load_oracle(std::istream& in);
void save_oracle_file(const DistanceOracle& oracle, const std::string& path);
DistanceOracle load_oracle_file(const std::string& path);

}  // namespace pado
