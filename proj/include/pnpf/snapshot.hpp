#pragma once

// Field snapshots: a binary file plus a JSON sidecar (same stem, ".json").
// Layout of the binary file (all little-endian):
//   bytes  0..3   magic "PNPF"
//   bytes  4..7   u32 format version (1)
//   bytes  8..11  u32 dim
//   bytes 12..15  u32 points per axis N
//   bytes 16..23  f64 box length L
//   bytes 24..27  u32 field count F
//   bytes 28..63  zero
//   then F arrays of N^dim f64 values each, in grid order.
// The sidecar holds {"format": "pnpf-snapshot", "version": 1, "fields": [...],
// "metadata": {...}} with field names in file order.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pnpf/grid.hpp"

namespace pnpf {

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 64;

struct NamedField {
  std::string name;
  ScalarField field;
};

struct Snapshot {
  GridSpec grid;
  std::vector<NamedField> fields;
  nlohmann::json metadata;

  const ScalarField& field(const std::string& name) const;
};

std::filesystem::path sidecar_path(const std::filesystem::path& binary);

/// Every field must live on the same grid. Throws Error on I/O failure.
void write_snapshot(const std::filesystem::path& binary,
                    const std::vector<NamedField>& fields,
                    const nlohmann::json& metadata = nlohmann::json::object());

/// Throws Error for a malformed file or a sidecar that does not match it.
Snapshot read_snapshot(const std::filesystem::path& binary);

}  // namespace pnpf
