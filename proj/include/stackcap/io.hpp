#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stackcap::io {

/// Fixed-width round-trippable formatting (%.17g); used for every numeric
/// value written to disk so identical runs produce byte-identical files.
std::string format_double(double v);

/// FNV-1a 64-bit hash of a byte string (used to stamp outputs with the
/// configuration they came from).
std::uint64_t fnv1a64(const std::string& data);

/// Lower-case 16-digit hex rendering of a 64-bit value.
std::string hex64(std::uint64_t v);

/// CSV payload: `#`-prefixed metadata lines, a header row, numeric rows.
struct CsvTable {
  std::vector<std::string> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Renders a table to its exact on-disk byte representation.
std::string render_csv(const CsvTable& table);

/// Writes text to `path` atomically (temp file in the same directory, then
/// rename), creating parent directories as needed. Throws NumericError on
/// I/O failure.
void write_text_atomic(const std::string& path, const std::string& text);

/// render + write in one step.
void write_csv_atomic(const std::string& path, const CsvTable& table);

}  // namespace stackcap::io
