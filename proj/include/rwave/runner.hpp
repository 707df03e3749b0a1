#pragma once

#include "rwave/config.hpp"

#include <string>
#include <vector>

namespace rwave {

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> outputs; // file names inside the output directory
    std::string manifest_path;
};

// Executes the configured command, writing CSV artifacts plus manifest.json
// (config echo, seed, git-style blob hash per output) into config.out_dir.
// The directory is locked for the duration of the run; on failure the files
// written so far are removed and a FAILED marker is left instead. Identical
// configs produce byte-identical artifacts.
RunResult run_experiment(const ExperimentConfig& config);

// Git-style blob hash (sha1 over "blob <size>\0" + bytes) of a file's
// contents; the manifest stores one per emitted artifact.
std::string git_blob_hash(const std::string& path);

} // namespace rwave
