#pragma once

// Subcommand driver behind the hqcsim tool: loads the config, runs one
// subcommand, writes its files and a manifest into the output directory.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hqc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunOptions {
  std::string subcommand;
  std::string config_path;
  std::string out_dir;                 // overrides output.directory
  std::optional<std::uint64_t> seed;   // overrides ensemble.seed
  int threads = 0;                     // 0: hardware concurrency
  bool reproducible = false;           // bitwise-reproducible reductions
  std::map<std::string, std::string> extra_versions;  // recorded in the manifest
};

const std::vector<std::string>& subcommand_names();

// Returns the exit status. Progress goes to `log`, errors to `err`. Errors
// name the offending config key or grid node.
int run(const RunOptions& options, std::ostream& log, std::ostream& err);

std::string library_version();

}  // namespace hqc
