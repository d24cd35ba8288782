#pragma once

// Run configuration addressed by dotted keys ("cusum.drift"). Config files
// are JSON, either nested ({"cusum": {"drift": 1}}) or flat; command-line
// overrides use the same keys.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "actrep/error.hpp"
#include "actrep/pipeline.hpp"

namespace actrep {

struct RunConfig {
  std::optional<std::string> topology_path;
  PipelineConfig pipeline;
};

namespace config_detail {

using nlohmann::json;

struct Key {
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
};

template <typename T>
T as(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw Error(ErrorCode::Config, key + ": expected true or false");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw Error(ErrorCode::Config, key + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (v.get<long long>() < 0) throw Error(ErrorCode::Config, key + ": must be non-negative");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw Error(ErrorCode::Config, key + ": expected a number");
    } else {
      if (!v.is_string()) throw Error(ErrorCode::Config, key + ": expected a string");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, key + ": " + e.what());
  }
}

#define ACTREP_KEY(name, type, member)                                                                  \
  {                                                                                                     \
    name, Key {                                                                                         \
      [](RunConfig& c, const json& v) { c.member = as<type>(v, name); },                               \
          [](const RunConfig& c) { return json(c.member); }                                             \
    }                                                                                                   \
  }

#define ACTREP_OPT_KEY(name, type, member)                                                              \
  {                                                                                                     \
    name, Key {                                                                                         \
      [](RunConfig& c, const json& v) {                                                                 \
        if (v.is_null())                                                                                \
          c.member.reset();                                                                             \
        else                                                                                            \
          c.member = as<type>(v, name);                                                                 \
      },                                                                                                \
          [](const RunConfig& c) { return c.member ? json(*c.member) : json(); }                        \
    }                                                                                                   \
  }

inline const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> table = {
      ACTREP_OPT_KEY("topology", std::string, topology_path),
      ACTREP_KEY("cusum.threshold_angle", double, pipeline.segmenter.threshold_angle),
      ACTREP_OPT_KEY("cusum.threshold_bone", double, pipeline.segmenter.threshold_bone),
      ACTREP_KEY("cusum.threshold_bone_rel", double, pipeline.segmenter.threshold_bone_rel),
      ACTREP_KEY("cusum.drift", double, pipeline.segmenter.drift),
      ACTREP_KEY("cusum.w_min", FrameIndex, pipeline.segmenter.w_min),
      ACTREP_KEY("cusum.smoothing_window", std::size_t, pipeline.segmenter.smoothing_window),
      ACTREP_OPT_KEY("fit.stationary_eps", double, pipeline.segmenter.fit.stationary_eps),
      ACTREP_OPT_KEY("fit.max_radius", double, pipeline.segmenter.fit.max_radius),
      ACTREP_KEY("fit.model_margin", double, pipeline.segmenter.fit.model_margin),
      ACTREP_KEY("fit.frame_diagonal", double, pipeline.segmenter.fit.frame_diagonal),
      ACTREP_KEY("match.tau", double, pipeline.counter.match.tau),
      ACTREP_KEY("match.strict_kinds", bool, pipeline.counter.match.strict_kinds),
      ACTREP_KEY("segmenter.min_segment_len", FrameIndex, pipeline.segmenter.min_segment_len),
      ACTREP_KEY("segmenter.refractory", bool, pipeline.segmenter.refractory),
      ACTREP_KEY("segmenter.buffer_capacity", std::size_t, pipeline.segmenter.buffer_capacity),
      ACTREP_KEY("counter.capacity", std::size_t, pipeline.counter.capacity),
      ACTREP_KEY("features.confidence_floor", double, pipeline.segmenter.features.confidence_floor),
      ACTREP_KEY("features.normalize", bool, pipeline.segmenter.features.normalize),
  };
  return table;
}

#undef ACTREP_KEY
#undef ACTREP_OPT_KEY

inline void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object())
      flatten(v, key, out);
    else
      out.emplace_back(key, v);
  }
}

inline bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace config_detail

inline std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : config_detail::keys()) out.push_back(k);
  return out;
}

inline void set_config_value(RunConfig& cfg, const std::string& key, const nlohmann::json& value) {
  const auto& table = config_detail::keys();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorCode::Config, "unknown key '" + key + "'");
  it->second.set(cfg, value);
}

/// `key=value`; the value is read as JSON, falling back to a bare string.
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::Config, "expected key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  set_config_value(cfg, key, value);
}

inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
  std::vector<std::pair<std::string, nlohmann::json>> flat;
  config_detail::flatten(j, "", flat);
  for (const auto& [k, v] : flat) set_config_value(cfg, k, v);
}

inline nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, key] : config_detail::keys()) out[k] = key.get(cfg);
  return out;
}

/// Range checks applied after all sources have been merged.
inline void validate_config(const RunConfig& cfg) {
  using config_detail::positive;
  const auto& s = cfg.pipeline.segmenter;
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::Config, what); };
  if (!positive(s.threshold_angle)) fail("cusum.threshold_angle must be > 0");
  if (s.threshold_bone && !positive(*s.threshold_bone)) fail("cusum.threshold_bone must be > 0");
  if (!positive(s.threshold_bone_rel)) fail("cusum.threshold_bone_rel must be > 0");
  if (!(std::isfinite(s.drift) && s.drift >= 0.0)) fail("cusum.drift must be >= 0");
  if (s.w_min < 1) fail("cusum.w_min must be >= 1");
  if (s.smoothing_window < 1) fail("cusum.smoothing_window must be >= 1");
  if (s.fit.stationary_eps && !positive(*s.fit.stationary_eps)) fail("fit.stationary_eps must be > 0");
  if (s.fit.max_radius && !positive(*s.fit.max_radius)) fail("fit.max_radius must be > 0");
  if (!(s.fit.model_margin >= 0.0 && s.fit.model_margin < 1.0)) fail("fit.model_margin must lie in [0, 1)");
  if (!positive(s.fit.frame_diagonal)) fail("fit.frame_diagonal must be > 0");
  if (!positive(cfg.pipeline.counter.match.tau)) fail("match.tau must be > 0");
  if (s.min_segment_len < 1) fail("segmenter.min_segment_len must be >= 1");
  if (s.buffer_capacity < 8) fail("segmenter.buffer_capacity must be >= 8");
  if (cfg.pipeline.counter.capacity < 1) fail("counter.capacity must be >= 1");
  if (!(s.features.confidence_floor >= 0.0 && s.features.confidence_floor <= 1.0))
    fail("features.confidence_floor must lie in [0, 1]");
}

}  // namespace actrep
