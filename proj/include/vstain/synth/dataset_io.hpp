#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vstain/img/image.hpp"
#include "vstain/synth/autofocus.hpp"

namespace vstain::synth {

// On-disk dataset: one PGM per (fov, channel) named "<fov>_<channel>.pgm"
// plus manifest.txt with line-based key=value entries.
enum class DatasetKind { kChannels, kAutofocus };

struct DatasetEntry {
  std::string fov;
  int scene_index = 0;
  double z = 0.0;
  bool near_focus = false;
};

struct DatasetManifest {
  DatasetKind kind = DatasetKind::kChannels;
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  int bit_depth = 16;
  std::vector<std::string> channels;
  std::vector<DatasetEntry> entries;
};

inline constexpr const char* kManifestName = "manifest.txt";
inline constexpr const char* kDefocusedChannel = "defocused";
inline constexpr const char* kFocusedChannel = "focused";

std::string channel_file_name(const std::string& fov, const std::string& channel);
std::string scene_fov_name(int scene_index);
std::string af_fov_name(int scene_index, double z_um);

std::string format_manifest(const DatasetManifest& manifest);
DatasetManifest parse_manifest(const std::string& text);

// Writes files and manifest; returns written file names (relative).
std::vector<std::string> write_channel_dataset(const std::filesystem::path& dir,
                                               std::uint64_t seed,
                                               const std::vector<img::FieldOfView>& fovs,
                                               int bit_depth);
std::vector<std::string> write_af_dataset(const std::filesystem::path& dir, std::uint64_t seed,
                                          const std::vector<AfSample>& samples, int bit_depth);

DatasetManifest read_manifest(const std::filesystem::path& dir);
img::FieldOfView load_fov(const std::filesystem::path& dir, const DatasetManifest& manifest,
                          const DatasetEntry& entry);

}  // namespace vstain::synth
