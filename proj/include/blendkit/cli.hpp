#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace blendkit::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kIo = 3,
  kDiverged = 4,
};

/// Runs one subcommand. `args` excludes the program name. Errors go to `err`
/// as a single JSON line {"error": kind, "message": text}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "sha256:<hex>" digest of a file's bytes. Throws UnreadableError.
std::string file_digest(const std::filesystem::path& path);

}  // namespace blendkit::cli
