#include "vstain/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "vstain/error.hpp"
#include "vstain/img/pgm.hpp"

namespace vstain::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename N>
N parse_number(const std::string& s, const std::string& what) {
  N v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(what + ": '" + s + "' is not a valid number");
  }
  return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(what + ": '" + s + "' is not a boolean");
}

std::string choice(const std::string& s, std::initializer_list<const char*> allowed,
                   const std::string& what) {
  std::string list;
  for (const char* a : allowed) {
    if (s == a) return s;
    list += list.empty() ? a : std::string("|") + a;
  }
  throw ConfigError(what + ": '" + s + "' is not one of " + list);
}

// One configurable value: where it lives and how to read and print it.
struct Field {
  std::string section;
  std::string key;
  std::function<void(const std::string&, const std::string&)> set;  // (value, context)
  std::function<std::string()> get;
};

template <typename N>
Field number(std::string section, std::string key, N& ref) {
  return {std::move(section), std::move(key),
          [&ref](const std::string& v, const std::string& what) { ref = parse_number<N>(v, what); },
          [&ref] {
            if constexpr (std::is_floating_point_v<N>) return format_double(ref);
            else return std::to_string(ref);
          }};
}

Field flag(std::string section, std::string key, bool& ref) {
  return {std::move(section), std::move(key),
          [&ref](const std::string& v, const std::string& what) { ref = parse_bool(v, what); },
          [&ref] { return std::string(ref ? "true" : "false"); }};
}

Field text(std::string section, std::string key, std::string& ref,
           std::initializer_list<const char*> allowed = {}) {
  std::vector<const char*> keep(allowed);
  return {std::move(section), std::move(key),
          [&ref, keep](const std::string& v, const std::string& what) {
            if (!keep.empty()) {
              bool ok = std::find_if(keep.begin(), keep.end(),
                                     [&](const char* a) { return v == a; }) != keep.end();
              if (!ok) {
                std::string list;
                for (const char* a : keep) list += list.empty() ? a : std::string("|") + a;
                throw ConfigError(what + ": '" + v + "' is not one of " + list);
              }
            }
            if (v.empty()) throw ConfigError(what + ": value is empty");
            ref = v;
          },
          [&ref] { return ref; }};
}

std::vector<Field> fields(RunConfig& c) {
  auto& sc = c.scene;
  auto& tr = c.train;
  auto& to = c.train.options;
  auto& ev = c.eval;
  std::vector<Field> f = {
      number("", "seed", c.seed),

      text("scene", "dataset", sc.dataset, {"channels", "af"}),
      number("scene", "count", sc.count),
      number("scene", "width", sc.spec.width),
      number("scene", "height", sc.spec.height),
      number("scene", "bit_depth", sc.bit_depth),
      number("scene", "cell_count_min", sc.spec.cell_count.min),
      number("scene", "cell_count_max", sc.spec.cell_count.max),
      number("scene", "nucleus_radius_min", sc.spec.nucleus_radius.min),
      number("scene", "nucleus_radius_max", sc.spec.nucleus_radius.max),
      number("scene", "filament_count_min", sc.spec.filament_count.min),
      number("scene", "filament_count_max", sc.spec.filament_count.max),
      number("scene", "noise_sigma", sc.spec.noise_sigma),
      {"scene", "z_values",
       [&sc](const std::string& v, const std::string& what) {
         sc.z_values.clear();
         for (const auto& item : split_list(v)) sc.z_values.push_back(parse_number<double>(item, what));
         if (sc.z_values.empty()) throw ConfigError(what + ": list is empty");
       },
       [&sc] {
         std::string out;
         for (double z : sc.z_values) out += (out.empty() ? "" : ", ") + format_double(z);
         return out;
       }},
      text("scene", "near_focus", sc.near_focus, {"reject", "flag"}),

      number("psf", "sigma0", c.psf.sigma0),
      number("psf", "slope", c.psf.slope),

      number("generator", "depth", c.generator.depth),
      number("generator", "base_width", c.generator.base_width),
      number("generator", "kernel", c.generator.kernel),
      number("generator", "leaky_slope", c.generator.leaky_slope),

      number("discriminator", "base_width", c.discriminator.base_width),
      number("discriminator", "kernel", c.discriminator.kernel),
      number("discriminator", "block_count", c.discriminator.block_count),
      number("discriminator", "leaky_slope", c.discriminator.leaky_slope),

      number("loss", "lambda1", c.loss.lambda1),
      number("loss", "lambda2", c.loss.lambda2),
      number("loss", "lambda3", c.loss.lambda3),
      {"loss", "mae_form",
       [&to](const std::string& v, const std::string& what) {
         try {
           to.mae_form = net::parse_mae_form(v);
         } catch (const ConfigError& e) {
           throw ConfigError(what + ": " + e.what());
         }
       },
       [&to] { return net::mae_form_name(to.mae_form); }},

      text("train", "task", tr.task, {"auto", "cgan", "af"}),
      text("train", "adversarial", tr.adversarial, {"auto", "true", "false"}),
      flag("train", "exclude_near_focus", tr.exclude_near_focus),
      {"train", "input_channels",
       [&tr](const std::string& v, const std::string& what) {
         tr.input_channels = split_list(v);
         if (tr.input_channels.empty()) throw ConfigError(what + ": list is empty");
       },
       [&tr] {
         std::string out;
         for (const auto& s : tr.input_channels) out += (out.empty() ? "" : ", ") + s;
         return out;
       }},
      text("train", "target_channel", tr.target_channel),
      number("train", "steps", to.steps),
      number("train", "batch_size", to.batch_size),
      number("train", "learning_rate", to.adam.learning_rate),
      number("train", "adam_beta1", to.adam.beta1),
      number("train", "adam_beta2", to.adam.beta2),
      number("train", "adam_epsilon", to.adam.epsilon),
      number("train", "d_steps_per_g_step", to.d_steps_per_g_step),
      number("train", "patch_side", to.patch_side),
      number("train", "val_interval", to.val_interval),
      number("train", "val_fraction", to.val_fraction),
      number("train", "val_overlap", to.val_overlap),
      flag("train", "equalize_inputs", to.equalize_inputs),

      number("eval", "beta1", ev.index.beta1),
      number("eval", "beta2", ev.index.beta2),
      {"eval", "mode",
       [&ev](const std::string& v, const std::string& what) {
         try {
           ev.index.mode = metrics::parse_mode(v);
         } catch (const ConfigError& e) {
           throw ConfigError(what + ": " + e.what());
         }
       },
       [&ev] { return metrics::mode_name(ev.index.mode); }},
      {"eval", "ie_scale",
       [&ev](const std::string& v, const std::string& what) {
         choice(v, {"bit_depth", "gt_mean"}, what);
         ev.index.ie_scale =
             v == "bit_depth" ? metrics::IeScale::kBitDepth : metrics::IeScale::kGroundTruthMean;
       },
       [&ev] {
         return std::string(ev.index.ie_scale == metrics::IeScale::kBitDepth ? "bit_depth"
                                                                             : "gt_mean");
       }},
      number("eval", "mask_threshold", ev.mask_threshold),
      number("eval", "tile_side", ev.tile_side),
      number("eval", "overlap", ev.overlap),
  };
  return f;
}

}  // namespace

IniDocument parse_ini(const std::string& text) {
  IniDocument doc;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto comment = raw.find_first_of("#;");
    const std::string s = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(line) + ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError("line " + std::to_string(line) + ": empty section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
    }
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": missing key");
    doc.entries.push_back({section, key, trim(s.substr(eq + 1)), line});
  }
  return doc;
}

void RunConfig::validate() const {
  synth::SceneSpec spec = scene.spec;
  spec.validate();
  if (scene.count < 1) throw ConfigError("scene.count must be >= 1");
  if (scene.bit_depth != 8 && scene.bit_depth != 16) throw ConfigError("scene.bit_depth must be 8 or 16");
  for (double z : scene.z_values) {
    if (!(z >= synth::kMinZ && z <= synth::kMaxZ)) {
      throw ConfigError("scene.z_values: " + format_double(z) + " is outside [" +
                        format_double(synth::kMinZ) + ", " + format_double(synth::kMaxZ) + "]");
    }
  }
  psf.validate();
  net::GeneratorConfig g = generator;
  g.in_channels = static_cast<int>(train.input_channels.size());
  g.validate();
  g.check_input_side(train.options.patch_side);
  net::DiscriminatorConfig d = discriminator;
  d.in_channels = g.in_channels + g.out_channels;
  d.input_side = train.options.patch_side;
  d.validate();
  loss.validate();
  train.options.validate();
  if (!(eval.index.beta1 >= 0.0) || !(eval.index.beta2 >= 0.0)) {
    throw ConfigError("eval.beta1 and eval.beta2 must be >= 0");
  }
  if (eval.mask_threshold < 0 || eval.mask_threshold > 255) {
    throw ConfigError("eval.mask_threshold must be in 0..255");
  }
  if (eval.tile_side < 0) throw ConfigError("eval.tile_side must be >= 0");
  if (eval.overlap < -1) throw ConfigError("eval.overlap must be >= -1");
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  auto table = fields(config);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : parse_ini(text).entries) {
    const std::string where = "line " + std::to_string(e.line) + ": " +
                              (e.section.empty() ? "" : e.section + ".") + e.key;
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) {
      return f.section == e.section && f.key == e.key;
    });
    if (it == table.end()) {
      const bool known_section = std::any_of(table.begin(), table.end(),
                                             [&](const Field& f) { return f.section == e.section; });
      throw ConfigError(where + (known_section ? ": unknown key" : ": unknown section"));
    }
    if (!seen.insert({e.section, e.key}).second) throw ConfigError(where + ": duplicate key");
    it->set(e.value, where);
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  const auto bytes = img::read_file_bytes(path);
  return parse_config(std::string(bytes.begin(), bytes.end()));
}

std::string format_config(const RunConfig& config) {
  RunConfig copy = config;
  std::string out, section = "\x01";
  for (const auto& f : fields(copy)) {
    if (f.section != section) {
      section = f.section;
      if (!section.empty()) out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += f.key + " = " + f.get() + "\n";
  }
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vstain::app
