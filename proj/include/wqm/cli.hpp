#pragma once

// Command-line front end. Each command returns a process exit status:
// 0 on success, 1 on configuration, format or I/O failure, 2 on usage errors.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace wqm::cli {

int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out,
                 const std::filesystem::path& trace, std::ostream& log);
int cmd_scan(const std::filesystem::path& config, const std::string& deltas, const std::filesystem::path& out,
             std::ostream& log);
int cmd_chsh(const std::filesystem::path& tsv, std::ostream& out, std::ostream& log);
int cmd_replay(const std::filesystem::path& tsv, const std::filesystem::path& trace, const std::string& angles,
               const std::filesystem::path& out, std::ostream& log);
int cmd_condense(const std::filesystem::path& tsv, std::ostream& out, std::ostream& log);

/// Parses argv (argv[0] is the program name) and dispatches.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wqm::cli
