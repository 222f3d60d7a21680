#include "vstain/synth/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vstain/error.hpp"
#include "vstain/img/pgm.hpp"

namespace vstain::synth {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string format_z(double z) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", z);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string channel_file_name(const std::string& fov, const std::string& channel) {
  return fov + "_" + channel + ".pgm";
}

std::string scene_fov_name(int scene_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene%04d", scene_index);
  return buf;
}

std::string af_fov_name(int scene_index, double z_um) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "scene%04d-z%+06.2f", scene_index, z_um);
  return buf;
}

std::string format_manifest(const DatasetManifest& m) {
  std::ostringstream out;
  out << "format=vstain-dataset\n";
  out << "version=1\n";
  out << "kind=" << (m.kind == DatasetKind::kChannels ? "channels" : "af") << "\n";
  out << "seed=" << m.seed << "\n";
  out << "width=" << m.width << "\n";
  out << "height=" << m.height << "\n";
  out << "bit_depth=" << m.bit_depth << "\n";
  out << "channels=" << join(m.channels, ',') << "\n";
  out << "count=" << m.entries.size() << "\n";
  for (const auto& e : m.entries) {
    out << "sample=" << e.fov << " " << e.scene_index << " " << format_z(e.z) << " "
        << (e.near_focus ? 1 : 0) << "\n";
  }
  return out.str();
}

DatasetManifest parse_manifest(const std::string& text) {
  DatasetManifest m;
  bool saw_format = false;
  std::size_t count = 0;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DatasetError("manifest line " + std::to_string(line_no) + " is not key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "format") {
        if (value != "vstain-dataset") throw DatasetError("unknown dataset format '" + value + "'");
        saw_format = true;
      } else if (key == "version") {
        if (value != "1") throw DatasetError("unsupported dataset version " + value);
      } else if (key == "kind") {
        if (value == "channels") {
          m.kind = DatasetKind::kChannels;
        } else if (value == "af") {
          m.kind = DatasetKind::kAutofocus;
        } else {
          throw DatasetError("unknown dataset kind '" + value + "'");
        }
      } else if (key == "seed") {
        m.seed = std::stoull(value);
      } else if (key == "width") {
        m.width = std::stoi(value);
      } else if (key == "height") {
        m.height = std::stoi(value);
      } else if (key == "bit_depth") {
        m.bit_depth = std::stoi(value);
      } else if (key == "channels") {
        m.channels = split(value, ',');
      } else if (key == "count") {
        count = std::stoull(value);
      } else if (key == "sample") {
        std::istringstream fields(value);
        DatasetEntry e;
        int flag = 0;
        if (!(fields >> e.fov >> e.scene_index >> e.z >> flag)) {
          throw DatasetError("manifest line " + std::to_string(line_no) + ": bad sample entry");
        }
        e.near_focus = flag != 0;
        m.entries.push_back(std::move(e));
      } else {
        throw DatasetError("manifest line " + std::to_string(line_no) + ": unknown key '" + key +
                           "'");
      }
    } catch (const std::invalid_argument&) {
      throw DatasetError("manifest line " + std::to_string(line_no) + ": bad number");
    } catch (const std::out_of_range&) {
      throw DatasetError("manifest line " + std::to_string(line_no) + ": number out of range");
    }
  }
  if (!saw_format) throw DatasetError("manifest has no format line");
  if (count != m.entries.size()) {
    throw DatasetError("manifest declares " + std::to_string(count) + " samples but lists " +
                       std::to_string(m.entries.size()));
  }
  if (m.channels.empty()) throw DatasetError("manifest lists no channels");
  return m;
}

std::vector<std::string> write_channel_dataset(const fs::path& dir, std::uint64_t seed,
                                               const std::vector<img::FieldOfView>& fovs,
                                               int bit_depth) {
  if (fovs.empty()) throw DatasetError("no fields of view to write");
  fs::create_directories(dir);
  DatasetManifest m;
  m.kind = DatasetKind::kChannels;
  m.seed = seed;
  m.width = fovs.front().width();
  m.height = fovs.front().height();
  m.bit_depth = bit_depth;
  m.channels = fovs.front().names();
  std::vector<std::string> written;
  for (std::size_t i = 0; i < fovs.size(); ++i) {
    const std::string fov = scene_fov_name(static_cast<int>(i));
    for (const auto& [name, image] : fovs[i].channels()) {
      const std::string file = channel_file_name(fov, name);
      img::write_pgm_file(dir / file, image, bit_depth);
      written.push_back(file);
    }
    m.entries.push_back({fov, static_cast<int>(i), 0.0, false});
  }
  write_text(dir / kManifestName, format_manifest(m));
  written.push_back(kManifestName);
  return written;
}

std::vector<std::string> write_af_dataset(const fs::path& dir, std::uint64_t seed,
                                          const std::vector<AfSample>& samples, int bit_depth) {
  if (samples.empty()) throw DatasetError("no autofocus samples to write");
  fs::create_directories(dir);
  DatasetManifest m;
  m.kind = DatasetKind::kAutofocus;
  m.seed = seed;
  m.width = samples.front().focused.width();
  m.height = samples.front().focused.height();
  m.bit_depth = bit_depth;
  m.channels = {kDefocusedChannel, kFocusedChannel};
  std::vector<std::string> written;
  for (const auto& s : samples) {
    const std::string fov = af_fov_name(s.scene_index, s.z);
    img::write_pgm_file(dir / channel_file_name(fov, kDefocusedChannel), s.defocused, bit_depth);
    img::write_pgm_file(dir / channel_file_name(fov, kFocusedChannel), s.focused, bit_depth);
    written.push_back(channel_file_name(fov, kDefocusedChannel));
    written.push_back(channel_file_name(fov, kFocusedChannel));
    m.entries.push_back({fov, s.scene_index, s.z, s.near_focus});
  }
  write_text(dir / kManifestName, format_manifest(m));
  written.push_back(kManifestName);
  return written;
}

DatasetManifest read_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifestName;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset manifest " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_manifest(text.str());
}

img::FieldOfView load_fov(const fs::path& dir, const DatasetManifest& manifest,
                          const DatasetEntry& entry) {
  img::FieldOfView fov;
  for (const auto& channel : manifest.channels) {
    fov.add(channel, img::read_pgm_file(dir / channel_file_name(entry.fov, channel)));
  }
  return fov;
}

}  // namespace vstain::synth
