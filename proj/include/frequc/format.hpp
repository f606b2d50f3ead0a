#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace frequc {

/// Locale-independent "%.{digits}g" rendering used by every CSV/JSON writer.
std::string format_number(double value, int digits = 9);

/// Write `contents` to `path` through a temporary file and a rename, so
/// readers never observe a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace frequc
