#include "vstain/net/model.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>

#include "vstain/img/pgm.hpp"

namespace vstain::net {
namespace {

template <typename Item>
std::size_t total_size(const std::vector<Item*>& items) {
  std::size_t n = 0;
  for (const auto* p : items) n += p->value.size();
  return n;
}

void append_values(std::vector<float>& out, std::span<const float> values) {
  out.insert(out.end(), values.begin(), values.end());
}

template <typename Item>
std::size_t restore_values(const std::vector<Item*>& items, std::span<const float> flat,
                           std::size_t pos) {
  for (auto* p : items) {
    if (pos + p->value.size() > flat.size()) throw DimensionError("snapshot too short");
    std::copy(flat.begin() + pos, flat.begin() + pos + p->value.size(), p->value.begin());
    pos += p->value.size();
  }
  return pos;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ',';
    out += items[i];
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
  return v;
}

void put_float(std::vector<std::uint8_t>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("checkpoint config line without '='", 16);
      values_[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  const std::string& get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ParseError("checkpoint config missing key " + key, 16);
    return it->second;
  }
  int get_int(const std::string& key) const { return std::stoi(get(key)); }
  long long get_ll(const std::string& key) const { return std::stoll(get(key)); }
  double get_double(const std::string& key) const { return std::stod(get(key)); }

 private:
  std::map<std::string, std::string> values_;
};

template <typename T>
std::vector<float> moments(const AdamState<T>& s) {
  std::vector<float> out;
  for (const auto& m : s.m) out.insert(out.end(), m.begin(), m.end());
  for (const auto& v : s.v) out.insert(out.end(), v.begin(), v.end());
  return out;
}

template <typename T>
std::size_t restore_moments(AdamState<T>& s, const std::vector<Param<T>*>& params,
                            std::span<const float> flat, std::size_t pos) {
  s.reset(params);
  for (auto* group : {&s.m, &s.v}) {
    for (auto& vec : *group) {
      std::copy(flat.begin() + pos, flat.begin() + pos + vec.size(), vec.begin());
      pos += vec.size();
    }
  }
  return pos;
}

}  // namespace

ModelParams ModelParams::build(const GeneratorConfig& gen, DiscriminatorConfig disc,
                               std::vector<std::string> input_channels, std::string target_channel,
                               std::uint64_t seed) {
  if (static_cast<int>(input_channels.size()) != gen.in_channels) {
    throw ConfigError("generator.in_channels is " + std::to_string(gen.in_channels) + " but " +
                      std::to_string(input_channels.size()) + " input channels were named");
  }
  disc.in_channels = gen.in_channels + gen.out_channels;
  ModelParams m;
  m.generator_config = gen;
  m.discriminator_config = disc;
  m.input_channels = std::move(input_channels);
  m.target_channel = std::move(target_channel);
  m.generator = Generator(gen);
  m.discriminator = Discriminator(disc);
  const CounterRng root = CounterRng(seed).split("init");
  m.generator.init(root);
  m.discriminator.init(root);
  m.generator_opt.reset(m.generator.params());
  m.discriminator_opt.reset(m.discriminator.params());
  return m;
}

std::vector<float> ModelParams::generator_snapshot() {
  std::vector<float> out;
  for (auto* p : generator.params()) append_values(out, p->value);
  for (auto* b : generator.buffers()) append_values(out, b->value);
  return out;
}

void ModelParams::restore_generator(std::span<const float> flat) {
  std::size_t pos = restore_values(generator.params(), flat, 0);
  pos = restore_values(generator.buffers(), flat, pos);
  if (pos != flat.size()) throw DimensionError("generator snapshot size mismatch");
}

std::vector<float> ModelParams::discriminator_snapshot() {
  std::vector<float> out;
  for (auto* p : discriminator.params()) append_values(out, p->value);
  for (auto* b : discriminator.buffers()) append_values(out, b->value);
  return out;
}

void ModelParams::restore_discriminator(std::span<const float> flat) {
  std::size_t pos = restore_values(discriminator.params(), flat, 0);
  pos = restore_values(discriminator.buffers(), flat, pos);
  if (pos != flat.size()) throw DimensionError("discriminator snapshot size mismatch");
}

std::vector<std::uint8_t> serialize_checkpoint(ModelParams& model) {
  const auto& g = model.generator_config;
  const auto& d = model.discriminator_config;
  const auto gp = model.generator.params();
  const auto gb = model.generator.buffers();
  const auto dp = model.discriminator.params();
  const auto db = model.discriminator.buffers();
  const std::vector<float> gm = moments(model.generator_opt);
  const std::vector<float> dm = moments(model.discriminator_opt);

  std::string text;
  auto kv = [&](const std::string& k, const std::string& v) { text += k + "=" + v + "\n"; };
  kv("format", "vstain-checkpoint");
  kv("generator.in_channels", std::to_string(g.in_channels));
  kv("generator.out_channels", std::to_string(g.out_channels));
  kv("generator.depth", std::to_string(g.depth));
  kv("generator.base_width", std::to_string(g.base_width));
  kv("generator.kernel", std::to_string(g.kernel));
  kv("generator.leaky_slope", format_double(g.leaky_slope));
  kv("discriminator.in_channels", std::to_string(d.in_channels));
  kv("discriminator.input_side", std::to_string(d.input_side));
  kv("discriminator.base_width", std::to_string(d.base_width));
  kv("discriminator.kernel", std::to_string(d.kernel));
  kv("discriminator.block_count", std::to_string(d.block_count));
  kv("discriminator.leaky_slope", format_double(d.leaky_slope));
  kv("input_channels", join(model.input_channels));
  kv("target_channel", model.target_channel);
  kv("generator.param_values", std::to_string(total_size(gp)));
  kv("generator.buffer_values", std::to_string(total_size(gb)));
  kv("discriminator.param_values", std::to_string(total_size(dp)));
  kv("discriminator.buffer_values", std::to_string(total_size(db)));
  kv("optimizer.generator_step", std::to_string(model.generator_opt.step));
  kv("optimizer.generator_values", std::to_string(gm.size()));
  kv("optimizer.discriminator_step", std::to_string(model.discriminator_opt.step));
  kv("optimizer.discriminator_values", std::to_string(dm.size()));

  std::vector<std::uint8_t> out(kCheckpointMagic, kCheckpointMagic + 8);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  auto put_items = [&](const auto& items) {
    for (const auto* p : items) {
      for (float v : p->value) put_float(out, v);
    }
  };
  put_items(gp);
  put_items(gb);
  put_items(dp);
  put_items(db);
  for (float v : gm) put_float(out, v);
  for (float v : dm) put_float(out, v);
  return out;
}

ModelParams deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kCheckpointMagic, 8) != 0) {
    throw ParseError("not a checkpoint (bad magic)", 0);
  }
  const std::uint32_t version = get_u32(bytes, 8);
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version), 8);
  }
  const std::uint32_t text_len = get_u32(bytes, 12);
  if (bytes.size() < 16 + static_cast<std::size_t>(text_len)) {
    throw ParseError("truncated checkpoint config block", 16);
  }
  const KeyValues kv(std::string(bytes.begin() + 16, bytes.begin() + 16 + text_len));
  if (kv.get("format") != "vstain-checkpoint") throw ParseError("unknown checkpoint format", 16);

  GeneratorConfig g;
  g.in_channels = kv.get_int("generator.in_channels");
  g.out_channels = kv.get_int("generator.out_channels");
  g.depth = kv.get_int("generator.depth");
  g.base_width = kv.get_int("generator.base_width");
  g.kernel = kv.get_int("generator.kernel");
  g.leaky_slope = kv.get_double("generator.leaky_slope");
  DiscriminatorConfig d;
  d.in_channels = kv.get_int("discriminator.in_channels");
  d.input_side = kv.get_int("discriminator.input_side");
  d.base_width = kv.get_int("discriminator.base_width");
  d.kernel = kv.get_int("discriminator.kernel");
  d.block_count = kv.get_int("discriminator.block_count");
  d.leaky_slope = kv.get_double("discriminator.leaky_slope");

  ModelParams m;
  m.generator_config = g;
  m.discriminator_config = d;
  m.input_channels = split_list(kv.get("input_channels"));
  m.target_channel = kv.get("target_channel");
  if (static_cast<int>(m.input_channels.size()) != g.in_channels) {
    throw DimensionError("checkpoint lists " + std::to_string(m.input_channels.size()) +
                         " input channels for a generator with " +
                         std::to_string(g.in_channels));
  }
  m.generator = Generator(g);
  m.discriminator = Discriminator(d);

  const auto gp = m.generator.params();
  const auto gb = m.generator.buffers();
  const auto dp = m.discriminator.params();
  const auto db = m.discriminator.buffers();
  auto expect = [&](const std::string& key, std::size_t actual) {
    if (static_cast<std::size_t>(kv.get_ll(key)) != actual) {
      throw DimensionError("checkpoint " + key + " does not match the architecture");
    }
  };
  expect("generator.param_values", total_size(gp));
  expect("generator.buffer_values", total_size(gb));
  expect("discriminator.param_values", total_size(dp));
  expect("discriminator.buffer_values", total_size(db));
  const std::size_t gm = static_cast<std::size_t>(kv.get_ll("optimizer.generator_values"));
  const std::size_t dm = static_cast<std::size_t>(kv.get_ll("optimizer.discriminator_values"));
  if ((gm != 0 && gm != 2 * total_size(gp)) || (dm != 0 && dm != 2 * total_size(dp))) {
    throw DimensionError("checkpoint optimizer state does not match the architecture");
  }

  const std::size_t count =
      total_size(gp) + total_size(gb) + total_size(dp) + total_size(db) + gm + dm;
  const std::size_t payload = 16 + static_cast<std::size_t>(text_len);
  if (bytes.size() != payload + 4 * count) {
    throw ParseError("checkpoint payload has " + std::to_string(bytes.size() - payload) +
                         " bytes, expected " + std::to_string(4 * count),
                     payload);
  }
  std::vector<float> flat(count);
  for (std::size_t i = 0; i < count; ++i) {
    flat[i] = std::bit_cast<float>(get_u32(bytes, payload + 4 * i));
  }
  std::span<const float> all(flat);
  std::size_t pos = restore_values(gp, all, 0);
  pos = restore_values(gb, all, pos);
  pos = restore_values(dp, all, pos);
  pos = restore_values(db, all, pos);
  if (gm != 0) {
    pos = restore_moments(m.generator_opt, gp, all, pos);
  } else {
    m.generator_opt.reset(gp);
  }
  if (dm != 0) {
    pos = restore_moments(m.discriminator_opt, dp, all, pos);
  } else {
    m.discriminator_opt.reset(dp);
  }
  m.generator_opt.step = kv.get_ll("optimizer.generator_step");
  m.discriminator_opt.step = kv.get_ll("optimizer.discriminator_step");
  return m;
}

void save_checkpoint(ModelParams& model, const std::filesystem::path& path) {
  img::write_file_bytes(path, serialize_checkpoint(model));
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = img::read_file_bytes(path);
  return deserialize_checkpoint(bytes);
}

}  // namespace vstain::net
