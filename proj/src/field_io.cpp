#include "cmalab/field_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace cmalab {

namespace {

constexpr const char* kMagic = "cmalab-field 1";
constexpr const char* kLayout = "row-major-last-axis-fastest";

std::uint64_t to_little(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(x);
  return x;
}

std::string header_value(std::istream& is, const std::string& key) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::Io, "field header ends before '" + key + "'");
  const auto space = line.find(' ');
  if (space == std::string::npos || line.substr(0, space) != key)
    throw Error(ErrorKind::Io, "field header: expected '" + key + "', got '" + line + "'");
  return line.substr(space + 1);
}

long parse_count(const std::string& text, const std::string& key) {
  long value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || value <= 0)
    throw Error(ErrorKind::Io, "field header: bad " + key + " '" + text + "'");
  return value;
}

}  // namespace

void write_field(std::ostream& os, const ScalarField& field, FieldEncoding encoding) {
  require(field.on_torus(), ErrorKind::Argument, "only torus fields are serialized");
  const TorusGrid& g = field.torus();
  os << kMagic << '\n'
     << "real_dim " << g.real_dim() << '\n'
     << "nodes_per_axis " << g.nodes_per_axis() << '\n'
     << "layout " << kLayout << '\n'
     << "encoding " << (encoding == FieldEncoding::Binary ? "binary-le-f64" : "csv") << '\n'
     << "count " << field.size() << '\n'
     << "end\n";
  if (encoding == FieldEncoding::Binary) {
    for (double v : field.values()) {
      const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
      char bytes[8];
      std::memcpy(bytes, &bits, 8);
      os.write(bytes, 8);
    }
  } else {
    char buf[32];
    for (double v : field.values()) {
      const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
      os.write(buf, end - buf);
      os.put('\n');
    }
  }
  if (!os) throw Error(ErrorKind::Io, "failed writing field payload");
}

void write_field(const std::filesystem::path& path, const ScalarField& field, FieldEncoding encoding) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  write_field(os, field, encoding);
}

ScalarField read_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kMagic) throw Error(ErrorKind::Io, "not a field file (bad magic line)");
  const long m = parse_count(header_value(is, "real_dim"), "real_dim");
  const long N = parse_count(header_value(is, "nodes_per_axis"), "nodes_per_axis");
  if (header_value(is, "layout") != kLayout) throw Error(ErrorKind::Io, "unsupported field layout");
  const std::string encoding = header_value(is, "encoding");
  const long count = parse_count(header_value(is, "count"), "count");
  if (!std::getline(is, line) || line != "end") throw Error(ErrorKind::Io, "field header is not terminated");
  if (m % 2 != 0 || m > kMaxRealDim) throw Error(ErrorKind::Io, "field real_dim must be even and at most 8");
  TorusGrid grid(static_cast<int>(m / 2), static_cast<int>(N));
  if (static_cast<std::size_t>(count) != grid.size()) throw Error(ErrorKind::Io, "field count does not match the grid");
  std::vector<double> values(grid.size());
  if (encoding == "binary-le-f64") {
    for (auto& v : values) {
      char bytes[8];
      if (!is.read(bytes, 8)) throw Error(ErrorKind::Io, "field payload is truncated");
      std::uint64_t bits;
      std::memcpy(&bits, bytes, 8);
      v = std::bit_cast<double>(to_little(bits));
    }
  } else if (encoding == "csv") {
    for (auto& v : values) {
      if (!std::getline(is, line)) throw Error(ErrorKind::Io, "field payload is truncated");
      const auto [end, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
      if (ec != std::errc() || end != line.data() + line.size())
        throw Error(ErrorKind::Io, "bad field value '" + line + "'");
    }
  } else {
    throw Error(ErrorKind::Io, "unknown field encoding '" + encoding + "'");
  }
  return ScalarField(std::move(grid), std::move(values));
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_field(is);
}

}  // namespace cmalab
