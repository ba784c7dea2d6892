#pragma once

#include "tml2/model.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tml2::codegen {

struct GeneratedArtifact {
    std::string path;  // relative, '/'-separated
    std::string content;

    bool operator==(const GeneratedArtifact&) const = default;
};

/// `DataAnalytics` -> `data_analytics`.
std::string snake_case(std::string_view name);

/// Emits one Python data-analytics script per DA block of every thing
/// instantiated in `config_name`, then `manifest.json` and
/// `requirements.txt`. Output depends only on the model.
///
/// Throws Error E-NODA when no instantiated thing has a DA block and
/// std::invalid_argument for an unknown configuration.
std::vector<GeneratedArtifact> generate(const Model& model, std::string_view config_name);

/// Writes every artifact below `out_dir` (created if missing), overwriting
/// existing files. Throws Error E-IO on filesystem failures.
std::size_t write_artifacts(const std::vector<GeneratedArtifact>& artifacts, const std::filesystem::path& out_dir);

}  // namespace tml2::codegen
