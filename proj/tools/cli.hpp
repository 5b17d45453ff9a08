#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fcodt::cli {

/// Runs one command line (without the program name). Returns the exit status;
/// diagnostics go to `err`, reports to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes through a sibling temporary file renamed into place, so `path`
/// either keeps its old contents or receives the complete new ones.
void write_atomic(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer);

}  // namespace fcodt::cli
