#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "arissar/core.hpp"

namespace arissar {

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

/// Writes `bytes` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

/// Simple CSV table; numbers are printed with round-trip precision.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  CsvTable& row() {
    rows_.emplace_back();
    return *this;
  }
  CsvTable& add(const std::string& cell);
  CsvTable& add(double value);
  CsvTable& add(std::int64_t value);
  CsvTable& add(std::size_t value) { return add(static_cast<std::int64_t>(value)); }
  CsvTable& add(int value) { return add(static_cast<std::int64_t>(value)); }
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);

/// 8-bit binary PGM, min-max normalised (a constant image maps to 0).
std::string encode_pgm(const RMatrix& image);
void write_pgm(const std::filesystem::path& path, const RMatrix& image);
/// Row-major float32 little-endian.
void write_float32(const std::filesystem::path& path, const RMatrix& image);

}  // namespace arissar
