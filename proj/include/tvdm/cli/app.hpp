#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tvdm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDependency = 3;
inline constexpr int kExitNumeric = 4;

// Run layout: every command writes <out>/<command>/; training stages leave checkpoint.tvdm there.
std::filesystem::path stage_dir(const std::filesystem::path& root, const std::string& command);
std::filesystem::path checkpoint_file(const std::filesystem::path& root, const std::string& stage);
std::filesystem::path manifest_file(const std::filesystem::path& root);

// args excludes the program name. Errors are reported on err and mapped to the exit codes above.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tvdm::cli
