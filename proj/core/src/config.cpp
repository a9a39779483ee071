// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ctvgan {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  if constexpr (std::is_floating_point_v<T>) {
    std::size_t used = 0;
    try {
      out = static_cast<T>(std::stod(value, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw std::invalid_argument(key + ": expected a number, got '" + value + "'");
  } else {
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw std::invalid_argument(key + ": expected an integer, got '" + value + "'");
    }
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw std::invalid_argument(key + ": expected true/false, got '" + value + "'");
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Field {
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

#define CTV_NUM(key, member)                                                                          \
  {key, Field{[](Config& c, const std::string& v) {                                                   \
                c.member = parse_number<std::remove_reference_t<decltype(c.member)>>(key, v);         \
              },                                                                                      \
              [](const Config& c) {                                                                   \
                if constexpr (std::is_floating_point_v<std::remove_cvref_t<decltype(c.member)>>) {    \
                  return fmt_double(c.member);                                                        \
                } else {                                                                              \
                  return std::to_string(c.member);                                                    \
                }                                                                                     \
              }}}

#define CTV_BOOL(key, member)                                                                  \
  {key, Field{[](Config& c, const std::string& v) { c.member = parse_bool(key, v); },           \
              [](const Config& c) { return std::string(c.member ? "true" : "false"); }}}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      CTV_NUM("motion.spacing", motion.spacing),
      CTV_NUM("motion.omega_min", motion.omega_min),
      CTV_NUM("motion.omega_max", motion.omega_max),
      CTV_NUM("motion.dim", motion.dim),
      CTV_NUM("motion.kernel_size", motion.kernel_size),
      CTV_NUM("motion.layers", motion.layers),
      CTV_NUM("motion.lead_tokens", motion.lead_tokens),
      {"motion.representation",
       Field{[](Config& c, const std::string& v) {
               // "lstm-free-ablation-off" selects the default (acyclic) codes.
               if (v == "acyclic" || v == "lstm-free-ablation-off") {
                 c.motion.representation = MotionRepresentation::kAcyclic;
               } else if (v == "interp") {
                 c.motion.representation = MotionRepresentation::kInterp;
               } else {
                 throw std::invalid_argument("motion.representation: expected acyclic|interp|lstm-free-ablation-off, got '" +
                                             v + "'");
               }
             },
             [](const Config& c) { return to_string(c.motion.representation); }}},
      CTV_NUM("gen.resolution", gen.resolution),
      CTV_NUM("gen.fmaps", gen.fmaps),
      CTV_NUM("gen.w_dim", gen.w_dim),
      CTV_NUM("gen.z_dim", gen.z_dim),
      CTV_NUM("gen.mapping_layers", gen.mapping_layers),
      CTV_NUM("disc.fmaps", disc.fmaps),
      CTV_NUM("disc.k", disc.k),
      CTV_BOOL("disc.time_conditioning", disc.time_conditioning),
      CTV_NUM("disc.d_pe", disc.d_pe),
      CTV_NUM("sample.k", sample.k),
      CTV_NUM("sample.t_max", sample.t_max),
      CTV_NUM("sample.max_span", sample.max_span),
      CTV_NUM("train.steps", train.steps),
      CTV_NUM("train.batch", train.batch),
      CTV_NUM("train.lr", train.lr),
      CTV_NUM("train.beta1", train.beta1),
      CTV_NUM("train.beta2", train.beta2),
      CTV_NUM("train.r1_gamma", train.r1_gamma),
      CTV_NUM("train.r1_interval", train.r1_interval),
      CTV_NUM("train.seed", train.seed),
      CTV_NUM("train.flip_prob", train.flip_prob),
      CTV_NUM("train.translate_max", train.translate_max),
      CTV_NUM("train.checkpoint_every", train.checkpoint_every),
      CTV_NUM("train.eval_every", train.eval_every),
      CTV_NUM("train.log_every", train.log_every),
      CTV_NUM("train.divergence_threshold", train.divergence_threshold),
      CTV_NUM("eval.clip_len", eval.clip_len),
      CTV_NUM("eval.num_fake", eval.num_fake),
      CTV_NUM("eval.real_clips_per_video", eval.real_clips_per_video),
      {"eval.offset_policy",
       Field{[](Config& c, const std::string& v) {
               if (v == "random") {
                 c.eval.offset_policy = OffsetPolicy::kRandom;
               } else if (v == "first") {
                 c.eval.offset_policy = OffsetPolicy::kFirst;
               } else {
                 throw std::invalid_argument("eval.offset_policy: expected random|first, got '" + v + "'");
               }
             },
             [](const Config& c) { return to_string(c.eval.offset_policy); }}},
      CTV_NUM("eval.subsample_stride", eval.subsample_stride),
      CTV_BOOL("eval.all_clips", eval.all_clips),
      CTV_BOOL("eval.jpeg", eval.jpeg),
      CTV_NUM("eval.jpeg_quality", eval.jpeg_quality),
      CTV_NUM("eval.seed", eval.seed),
      {"data.path", Field{[](Config& c, const std::string& v) { c.data.path = v; },
                          [](const Config& c) { return c.data.path; }}},
  };
  return table;
}

#undef CTV_NUM
#undef CTV_BOOL

}  // namespace

std::string to_string(MotionRepresentation r) { return r == MotionRepresentation::kAcyclic ? "acyclic" : "interp"; }
std::string to_string(OffsetPolicy p) { return p == OffsetPolicy::kRandom ? "random" : "first"; }

void SamplerConfig::validate() const {
  if (k < 2) throw std::invalid_argument("sample.k must be >= 2, got " + std::to_string(k));
  if (max_span < k - 1) {
    throw std::invalid_argument("sample.max_span (" + std::to_string(max_span) + ") must be >= k - 1 (" +
                                std::to_string(k - 1) + ")");
  }
  if (max_span >= t_max) {
    throw std::invalid_argument("sample.max_span (" + std::to_string(max_span) + ") must be < sample.t_max (" +
                                std::to_string(t_max) + ")");
  }
}

void ProtocolConfig::validate() const {
  if (clip_len < 2) throw std::invalid_argument("eval.clip_len must be >= 2");
  if (num_fake < 1) throw std::invalid_argument("eval.num_fake must be positive");
  if (real_clips_per_video != 1) throw std::invalid_argument("eval.real_clips_per_video must be 1 (use eval.all_clips)");
  if (subsample_stride < 1) throw std::invalid_argument("eval.subsample_stride must be >= 1");
  if (jpeg_quality < 1 || jpeg_quality > 100) throw std::invalid_argument("eval.jpeg_quality must be in [1, 100]");
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& table = fields();
  auto it = table.find(key);
  if (it == table.end()) {
    std::string valid;
    for (const auto& [k, _] : table) valid += (valid.empty() ? "" : ", ") + k;
    throw std::invalid_argument("unknown config key '" + key + "'; valid keys: " + valid);
  }
  it->second.set(*this, value);
}

std::string Config::get(const std::string& key) const {
  auto it = fields().find(key);
  if (it == fields().end()) throw std::invalid_argument("unknown config key '" + key + "'");
  return it->second.get(*this);
}

std::vector<std::string> Config::keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : fields()) out.push_back(k);
  return out;
}

void Config::validate() const {
  if (!(motion.spacing > 0)) throw std::invalid_argument("motion.spacing must be positive");
  if (!(motion.omega_min > 0) || !(motion.omega_max >= motion.omega_min)) {
    throw std::invalid_argument("motion periods need 0 < omega_min <= omega_max");
  }
  if (motion.dim < 1) throw std::invalid_argument("motion.dim must be positive");
  if (motion.kernel_size < 1 || motion.layers < 1) throw std::invalid_argument("motion.kernel_size and motion.layers must be positive");
  if (motion.lead_tokens < motion.receptive_field()) {
    throw std::invalid_argument("motion.lead_tokens must be >= layers * (kernel_size - 1) = " +
                                std::to_string(motion.receptive_field()));
  }
  if (gen.resolution < 8 || (gen.resolution & (gen.resolution - 1)) != 0) {
    throw std::invalid_argument("gen.resolution must be a power of two >= 8");
  }
  if (gen.fmaps < 1 || gen.w_dim < 1 || gen.z_dim < 1 || gen.mapping_layers < 1) {
    throw std::invalid_argument("gen.* sizes must be positive");
  }
  if (disc.fmaps < 1 || disc.d_pe < 1) throw std::invalid_argument("disc.* sizes must be positive");
  if (disc.k != sample.k) {
    throw std::invalid_argument("disc.k (" + std::to_string(disc.k) + ") must equal sample.k (" +
                                std::to_string(sample.k) + ")");
  }
  sample.validate();
  if (train.batch < 1 || train.steps < 0) throw std::invalid_argument("train.batch must be positive and train.steps >= 0");
  if (train.r1_interval < 1) throw std::invalid_argument("train.r1_interval must be >= 1");
  if (train.r1_gamma < 0) throw std::invalid_argument("train.r1_gamma must be non-negative");
  if (train.flip_prob < 0 || train.flip_prob > 1) throw std::invalid_argument("train.flip_prob must be in [0, 1]");
  if (train.translate_max < 0) throw std::invalid_argument("train.translate_max must be non-negative");
  eval.validate();
}

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& [k, f] : fields()) out += k + " = " + f.get(*this) + "\n";
  return out;
}

}  // namespace ctvgan
