#pragma once

#include <string>
#include <vector>

#include "solpath/config.hpp"

// Subcommand implementations behind the CLI binary.  Each returns a process
// exit code: 0 success, 1 configuration/validation error, 2 divergence.
// Artifacts land in resolve_output_dir(cfg); errors go to stderr.

namespace solpath {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitDiverged = 2;

// $SOLPATH_OUT (when set) joined with output.dir (default "out"); created on
// demand.
std::string resolve_output_dir(const Config& cfg);

int cmd_run(const Config& cfg);
int cmd_groundtruth(const Config& cfg);
int cmd_audit(const Config& cfg);
int cmd_spectra(const Config& cfg);
int cmd_frontier(const Config& cfg);
int cmd_compare(const std::vector<Config>& cfgs);

}  // namespace solpath
