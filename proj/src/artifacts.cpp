#include "arissar/artifacts.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace arissar {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable& CsvTable::add(const std::string& cell) {
  if (rows_.empty()) rows_.emplace_back();
  const bool quote = cell.find_first_of(",\"\n") != std::string::npos;
  if (!quote) {
    rows_.back().push_back(cell);
    return *this;
  }
  std::string q = "\"";
  for (char c : cell) {
    if (c == '"') q += '"';
    q += c;
  }
  rows_.back().push_back(q + "\"");
  return *this;
}

CsvTable& CsvTable::add(double value) { return add(format_double(value)); }
CsvTable& CsvTable::add(std::int64_t value) { return add(std::to_string(value)); }

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::string encode_pgm(const RMatrix& image) {
  if (image.empty()) throw std::invalid_argument("cannot encode an empty image");
  const auto [lo_it, hi_it] = std::minmax_element(image.values().begin(), image.values().end());
  const double lo = *lo_it, hi = *hi_it;
  std::string out = "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
  out.reserve(out.size() + image.size());
  for (double v : image.values()) {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0))));
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const RMatrix& image) { write_file_atomic(path, encode_pgm(image)); }

void write_float32(const std::filesystem::path& path, const RMatrix& image) {
  static_assert(std::endian::native == std::endian::little, "float32 dumps assume a little-endian host");
  std::string bytes(image.size() * sizeof(float), '\0');
  for (std::size_t k = 0; k < image.size(); ++k) {
    const float f = static_cast<float>(image.values()[k]);
    std::memcpy(bytes.data() + k * sizeof(float), &f, sizeof(float));
  }
  write_file_atomic(path, bytes);
}

}  // namespace arissar
