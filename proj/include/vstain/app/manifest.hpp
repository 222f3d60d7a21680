#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace vstain::app {

inline constexpr const char* kRunManifestName = "run_manifest.txt";
inline constexpr const char* kResolvedConfigName = "config.resolved.ini";

// Record of one command run. Inputs and outputs are listed by relative
// name with their size and content hash, so two runs from the same inputs
// and config produce identical manifests apart from duration_s.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  bool deterministic = true;
  std::vector<std::string> inputs;   // "name size hash"
  std::vector<std::string> outputs;  // "relative/path size hash"
  double duration_s = 0.0;
};

// "name size hash" for one file.
std::string file_record(const std::filesystem::path& path, const std::string& name);

// Every regular file below dir except the manifest itself, sorted.
std::vector<std::string> inventory(const std::filesystem::path& dir);

std::string format_run_manifest(const RunManifest& manifest);

// Fills outputs from the directory contents, checks that each exists and
// writes run_manifest.txt.
void write_run_manifest(const std::filesystem::path& dir, RunManifest manifest);

}  // namespace vstain::app
