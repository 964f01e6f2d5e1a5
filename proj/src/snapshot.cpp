#include "pnpf/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "pnpf/errors.hpp"

namespace pnpf {
namespace {

template <class T>
void put_le(unsigned char* dst, T value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = static_cast<unsigned char>(bits >> (8 * i));
}

template <class T>
T get_le(const unsigned char* src) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t{src[i]} << (8 * i);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

void write_values(std::ofstream& out, const ScalarField& f) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
  } else {
    std::array<unsigned char, 8> buf;
    for (double v : f.values()) {
      put_le(buf.data(), v);
      out.write(reinterpret_cast<const char*>(buf.data()), 8);
    }
  }
}

void read_values(std::ifstream& in, ScalarField& f) {
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(f.data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));
  } else {
    std::array<unsigned char, 8> buf;
    for (double& v : f.values()) {
      in.read(reinterpret_cast<char*>(buf.data()), 8);
      v = get_le<double>(buf.data());
    }
  }
}

}  // namespace

const ScalarField& Snapshot::field(const std::string& name) const {
  for (const auto& f : fields) {
    if (f.name == name) return f.field;
  }
  throw Error("snapshot has no field named " + name);
}

std::filesystem::path sidecar_path(const std::filesystem::path& binary) {
  std::filesystem::path p = binary;
  p.replace_extension(".json");
  return p;
}

void write_snapshot(const std::filesystem::path& binary,
                    const std::vector<NamedField>& fields,
                    const nlohmann::json& metadata) {
  if (fields.empty()) throw Error("snapshot needs at least one field");
  const GridSpec& spec = fields.front().field.grid()->spec();
  std::array<unsigned char, kSnapshotHeaderBytes> header{};
  std::memcpy(header.data(), "PNPF", 4);
  put_le<std::uint32_t>(header.data() + 4, kSnapshotVersion);
  put_le<std::uint32_t>(header.data() + 8, static_cast<std::uint32_t>(spec.dim));
  put_le<std::uint32_t>(header.data() + 12, static_cast<std::uint32_t>(spec.points_per_axis));
  put_le<double>(header.data() + 16, spec.box_length);
  put_le<std::uint32_t>(header.data() + 24, static_cast<std::uint32_t>(fields.size()));

  std::ofstream out(binary, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write snapshot " + binary.string());
  out.write(reinterpret_cast<const char*>(header.data()), header.size());
  nlohmann::json names = nlohmann::json::array();
  for (const auto& f : fields) {
    const GridSpec& s = f.field.grid()->spec();
    if (s.dim != spec.dim || s.points_per_axis != spec.points_per_axis ||
        s.box_length != spec.box_length) {
      throw Error("snapshot fields must share one grid");
    }
    write_values(out, f.field);
    names.push_back(f.name);
  }
  if (!out) throw Error("failed writing snapshot " + binary.string());

  nlohmann::json side{{"format", "pnpf-snapshot"},
                      {"version", kSnapshotVersion},
                      {"binary", binary.filename().string()},
                      {"fields", names},
                      {"metadata", metadata}};
  std::ofstream js(sidecar_path(binary), std::ios::trunc);
  if (!js) throw Error("cannot write snapshot sidecar for " + binary.string());
  js << side.dump(2) << '\n';
}

Snapshot read_snapshot(const std::filesystem::path& binary) {
  std::ifstream in(binary, std::ios::binary);
  if (!in) throw Error("cannot open snapshot " + binary.string());
  std::array<unsigned char, kSnapshotHeaderBytes> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (!in || std::memcmp(header.data(), "PNPF", 4) != 0) {
    throw Error(binary.string() + " is not a PNPF snapshot");
  }
  if (get_le<std::uint32_t>(header.data() + 4) != kSnapshotVersion) {
    throw Error("unsupported snapshot version in " + binary.string());
  }
  GridSpec spec;
  spec.dim = static_cast<int>(get_le<std::uint32_t>(header.data() + 8));
  spec.points_per_axis = static_cast<int>(get_le<std::uint32_t>(header.data() + 12));
  spec.box_length = get_le<double>(header.data() + 16);
  const std::uint32_t count = get_le<std::uint32_t>(header.data() + 24);
  GridPtr grid = Grid::create(spec);

  std::ifstream js(sidecar_path(binary));
  if (!js) throw Error("missing snapshot sidecar for " + binary.string());
  const nlohmann::json side = nlohmann::json::parse(js);
  const auto& names = side.at("fields");
  if (names.size() != count) throw Error("snapshot sidecar field count mismatch");

  Snapshot snap{spec, {}, side.value("metadata", nlohmann::json::object())};
  for (std::uint32_t i = 0; i < count; ++i) {
    ScalarField f(grid, ScalarField::uninitialized);
    read_values(in, f);
    if (!in) throw Error("truncated snapshot " + binary.string());
    snap.fields.push_back(NamedField{names[i].get<std::string>(), std::move(f)});
  }
  return snap;
}

}  // namespace pnpf
