#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

namespace frequc::testing {

inline std::filesystem::path data_dir() { return FREQUC_DATA_DIR; }

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("frequc_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace frequc::testing
