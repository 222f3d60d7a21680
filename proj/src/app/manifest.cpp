#include "vstain/app/manifest.hpp"

#include <algorithm>
#include <cstdio>

#include "vstain/app/config.hpp"
#include "vstain/error.hpp"
#include "vstain/img/pgm.hpp"

namespace vstain::app {

namespace fs = std::filesystem;

std::string file_record(const fs::path& path, const std::string& name) {
  const auto bytes = img::read_file_bytes(path);
  return name + " " + std::to_string(bytes.size()) + " " +
         fnv1a_hex(std::string(bytes.begin(), bytes.end()));
}

std::vector<std::string> inventory(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    if (rel != kRunManifestName) names.push_back(rel);
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::string format_run_manifest(const RunManifest& m) {
  std::string out = "format=vstain-run\n";
  out += "command=" + m.command + "\n";
  out += "config_hash=" + m.config_hash + "\n";
  out += "seed=" + std::to_string(m.seed) + "\n";
  out += std::string("deterministic=") + (m.deterministic ? "1" : "0") + "\n";
  for (const auto& i : m.inputs) out += "input=" + i + "\n";
  for (const auto& o : m.outputs) out += "output=" + o + "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "duration_s=%.3f\n", m.duration_s);
  out += buf;
  return out;
}

void write_run_manifest(const fs::path& dir, RunManifest manifest) {
  manifest.outputs.clear();
  for (const auto& name : inventory(dir)) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) throw Error("listed output " + p.string() + " does not exist");
    manifest.outputs.push_back(file_record(p, name));
  }
  const std::string text = format_run_manifest(manifest);
  img::write_file_bytes(dir / kRunManifestName,
                        {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

}  // namespace vstain::app
