#include "qgpt/io.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "qgpt/errors.h"

namespace qgpt {

void WriteFile(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("short write to '" + path + "'");
}

std::string EncodePgm(int width, int height, const std::vector<std::uint8_t>& pixels) {
  if (width < 0 || height < 0 ||
      pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("EncodePgm: pixel count does not match dimensions");
  }
  std::string out =
      "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(pixels.begin(), pixels.end());
  return out;
}

std::string FormatFixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

}  // namespace qgpt
