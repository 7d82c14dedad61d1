#pragma once

#include <filesystem>
#include <string>

#include "spde/mc.hpp"

namespace spde::cli {

/// Everything a config file describes. Sections: [model], [scheme],
/// [estimators], [study]; unknown sections or keys are rejected.
struct RunConfig {
    StudySpec study;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace spde::cli
