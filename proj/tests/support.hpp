#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "impactlab/impactlab.hpp"

namespace testsupport {

using namespace impactlab;

std::filesystem::path corpus_dir();
std::filesystem::path project_src(const std::string& name);
std::vector<std::string> corpus_names();

/// Cached parse+check+baseline of a corpus project (step budget 1e6).
const ProjectContext& project(const std::string& name);

/// Parses and checks a single inline unit; aborts the test on failure.
CheckedProgram check_source(const std::string& text);

MethodRef mref(std::string owner, std::string name, std::vector<std::string> params = {},
               bool is_static = false);

}  // namespace testsupport
