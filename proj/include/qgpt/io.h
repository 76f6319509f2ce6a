#pragma once

// Small file helpers shared by the command-line tools and exporters.

#include <cstdint>
#include <string>
#include <vector>

namespace qgpt {

// Writes `content` to `path`, creating parent directories. Throws
// ConfigError when the file cannot be written.
void WriteFile(const std::string& path, const std::string& content);

// Binary greyscale image; `pixels` is row-major with the top row first.
std::string EncodePgm(int width, int height, const std::vector<std::uint8_t>& pixels);

// %.*f without locale surprises.
std::string FormatFixed(double value, int digits);

}  // namespace qgpt
