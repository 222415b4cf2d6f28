#pragma once

#include <filesystem>
#include <iosfwd>

#include "cmalab/grid.hpp"

namespace cmalab {

enum class FieldEncoding { Binary, Csv };

/// Text header followed by the node values in flat grid order (row-major,
/// last axis fastest). Binary payloads are little-endian IEEE doubles; CSV
/// payloads hold one value per line with 17 significant digits, so both
/// round-trip exactly. Layout is documented in docs/field_format.md.
void write_field(std::ostream& os, const ScalarField& field, FieldEncoding encoding);
void write_field(const std::filesystem::path& path, const ScalarField& field, FieldEncoding encoding);

/// Throws Io on malformed headers, truncated payloads or unknown encodings.
ScalarField read_field(std::istream& is);
ScalarField read_field(const std::filesystem::path& path);

}  // namespace cmalab
