#pragma once

#include "tml2/parser.hpp"
#include "tml2/validator.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tml2::testing {

inline const std::filesystem::path kSourceDir = TML2_SOURCE_DIR;
inline const std::filesystem::path kModelsDir = kSourceDir / "models";
inline const std::filesystem::path kFixturesDir = kSourceDir / "tests" / "fixtures";
inline const std::filesystem::path kGoldenDir = kSourceDir / "tests" / "golden";
inline const std::filesystem::path kBinaryDir = TML2_BINARY_DIR;

inline const char* const kBundledModels[] = {
    "pingpong.tml2", "smart_pingpong.tml2", "smart_pingpong_gnb.tml2", "smart_pingpong_knn.tml2", "thermostat.tml2",
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

/// Parses a file that is expected to be well formed.
inline Model parse_file(const std::filesystem::path& path) {
    auto result = parse(read_file(path), path.string());
    if (!result.ok()) {
        std::string msg = "parse failed: " + path.string();
        for (const auto& d : result.diagnostics) msg += "\n" + format(d);
        throw std::runtime_error(msg);
    }
    return std::move(*result.model);
}

inline Model parse_text(std::string_view text, std::string_view name = "test.tml2") {
    auto result = parse(text, name);
    if (!result.ok()) {
        std::string msg = "parse failed";
        for (const auto& d : result.diagnostics) msg += "\n" + format(d);
        throw std::runtime_error(msg);
    }
    return std::move(*result.model);
}

/// Fresh, empty scratch directory below the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = kBinaryDir / "scratch" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace tml2::testing
