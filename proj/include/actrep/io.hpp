#pragma once

// JSON and JSON Lines encodings for frames, topologies, motion scripts,
// ground truth and pipeline events.

#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "actrep/counter.hpp"
#include "actrep/error.hpp"
#include "actrep/features.hpp"
#include "actrep/pipeline.hpp"
#include "actrep/synth.hpp"

namespace actrep::io {

using json = nlohmann::ordered_json;

namespace detail {

inline double number_or_nan(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw Error(ErrorCode::Parse, "expected a number");
  return v.get<double>();
}

inline Point2 point(const json& v) {
  if (!v.is_array() || v.size() != 2) throw Error(ErrorCode::Parse, "expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

inline json point_json(Point2 p) { return json::array({p.x, p.y}); }

template <typename T>
T require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw Error(ErrorCode::Parse, std::string("missing key '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::Parse, std::string("bad value for '") + key + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------- frames

/// One frame: {"t": int, "kp": [[x, y], ...], "conf": [c, ...]}. A null
/// coordinate (or null keypoint) decodes to NaN and is treated as missing.
inline KeypointFrame parse_frame(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Parse, "frame must be a JSON object");
  KeypointFrame f;
  const auto& t = j.contains("t") ? j["t"] : json();
  if (!t.is_number_integer() || t.get<std::int64_t>() < 0)
    throw Error(ErrorCode::Parse, "'t' must be a non-negative integer");
  f.t = t.get<std::int64_t>();
  if (!j.contains("kp") || !j["kp"].is_array()) throw Error(ErrorCode::Parse, "'kp' must be an array");
  for (const auto& p : j["kp"]) {
    if (p.is_null()) {
      f.keypoints.push_back({std::nan(""), std::nan("")});
      continue;
    }
    if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::Parse, "keypoints must be [x, y] pairs");
    f.keypoints.push_back({detail::number_or_nan(p[0]), detail::number_or_nan(p[1])});
  }
  if (j.contains("conf") && !j["conf"].is_null()) {
    if (!j["conf"].is_array()) throw Error(ErrorCode::Parse, "'conf' must be an array");
    for (const auto& c : j["conf"]) {
      if (!c.is_number()) throw Error(ErrorCode::Parse, "confidence values must be numbers");
      const double v = c.get<double>();
      if (v < 0.0 || v > 1.0) throw Error(ErrorCode::Parse, "confidence values must lie in [0, 1]");
      f.confidence.push_back(v);
    }
    if (f.confidence.size() != f.keypoints.size())
      throw Error(ErrorCode::Parse, "'conf' length differs from 'kp' length");
  }
  return f;
}

inline std::string format_frame(const KeypointFrame& f) {
  json j;
  j["t"] = f.t;
  json kp = json::array();
  for (const auto& p : f.keypoints) kp.push_back(detail::point_json(p));
  j["kp"] = std::move(kp);
  if (f.has_confidence()) j["conf"] = f.confidence;
  return j.dump();
}

/// Reads frames line by line, invoking `sink` on each; blank lines are
/// skipped. Parse failures name the 1-based line number.
template <typename Sink>
std::size_t read_frames(std::istream& in, Sink&& sink) {
  std::string line;
  std::size_t line_no = 0, count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    KeypointFrame frame;
    try {
      frame = parse_frame(line);
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    sink(frame, line_no);
    ++count;
  }
  return count;
}

/// Structural stream checks: consecutive t, constant keypoint count.
class StreamValidator {
 public:
  void check(const KeypointFrame& f, std::size_t line_no) {
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (last_t_ && f.t != *last_t_ + 1)
      throw Error(ErrorCode::Parse, where + "expected t=" + std::to_string(*last_t_ + 1) + ", got " + std::to_string(f.t));
    if (keypoints_ && f.keypoints.size() != *keypoints_)
      throw Error(ErrorCode::Parse, where + "keypoint count changed from " + std::to_string(*keypoints_) + " to " +
                                        std::to_string(f.keypoints.size()));
    last_t_ = f.t;
    keypoints_ = f.keypoints.size();
  }

  std::optional<std::size_t> keypoint_count() const noexcept { return keypoints_; }

 private:
  std::optional<FrameIndex> last_t_;
  std::optional<std::size_t> keypoints_;
};

// -------------------------------------------------------------- topology

inline SkeletonTopology parse_topology(const json& j) {
  std::vector<JointSpec> joints;
  std::vector<BoneSpec> bones;
  try {
    for (const auto& e : j.value("joints", json::array()))
      joints.push_back({e.at("name").get<std::string>(), e.at("a").get<std::size_t>(), e.at("b").get<std::size_t>(),
                        e.at("c").get<std::size_t>()});
    for (const auto& e : j.value("bones", json::array()))
      bones.push_back({e.at("name").get<std::string>(), e.at("a").get<std::size_t>(), e.at("b").get<std::size_t>()});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, std::string("topology: ") + e.what());
  }
  return SkeletonTopology(std::move(joints), std::move(bones));
}

inline json topology_json(const SkeletonTopology& topo) {
  json j;
  j["joints"] = json::array();
  j["bones"] = json::array();
  for (const auto& x : topo.joints()) j["joints"].push_back({{"name", x.name}, {"a", x.a}, {"b", x.b}, {"c", x.c}});
  for (const auto& x : topo.bones()) j["bones"].push_back({{"name", x.name}, {"a", x.a}, {"b", x.b}});
  return j;
}

// ---------------------------------------------------------------- events

inline json segment_json(const SegmentRepresentation& rep) {
  json j;
  j["type"] = "segment";
  j["t_start"] = rep.t_start;
  j["t_change"] = rep.t_change;
  j["t_end"] = rep.t_end;
  j["signal"] = rep.signal;
  json prims = json::array();
  for (const auto& k : rep.keypoints) {
    prims.push_back({{"kind", std::string(to_string(k.kind))},
                     {"S", detail::point_json(k.start)},
                     {"M", detail::point_json(k.mid)},
                     {"E", detail::point_json(k.end)}});
  }
  j["prims"] = std::move(prims);
  j["angles"] = rep.angles;
  j["bones"] = rep.bones;
  return j;
}

inline json count_json(const CountEvent& c) {
  return {{"type", "count"}, {"t", c.t}, {"reps", c.reps}, {"period", c.period}};
}

inline std::string format_event(const Event& e) {
  if (const auto* s = std::get_if<SegmentEvent>(&e)) return segment_json(s->rep).dump();
  return count_json(std::get<CountEvent>(e)).dump();
}

inline PrimitiveKind parse_kind(const std::string& s) {
  if (s == "stationary") return PrimitiveKind::Stationary;
  if (s == "line") return PrimitiveKind::Line;
  if (s == "circle") return PrimitiveKind::Circle;
  throw Error(ErrorCode::Parse, "unknown primitive kind '" + s + "'");
}

inline SegmentRepresentation parse_segment(const json& j) {
  SegmentRepresentation rep;
  rep.t_start = detail::require<FrameIndex>(j, "t_start");
  rep.t_end = detail::require<FrameIndex>(j, "t_end");
  rep.t_change = j.value("t_change", rep.t_start);
  rep.signal = j.value("signal", std::string{});
  for (const auto& p : j.value("prims", json::array()))
    rep.keypoints.push_back({parse_kind(detail::require<std::string>(p, "kind")), detail::point(p.at("S")),
                             detail::point(p.at("M")), detail::point(p.at("E"))});
  rep.angles = j.value("angles", std::vector<SignalTriple>{});
  rep.bones = j.value("bones", std::vector<SignalTriple>{});
  return rep;
}

struct EventLog {
  std::vector<SegmentRepresentation> segments;
  std::vector<CountEvent> counts;
};

inline EventLog read_events(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      const auto type = detail::require<std::string>(j, "type");
      if (type == "segment") {
        log.segments.push_back(parse_segment(j));
      } else if (type == "count") {
        log.counts.push_back({detail::require<FrameIndex>(j, "t"), detail::require<int>(j, "reps"),
                              detail::require<std::size_t>(j, "period")});
      } else {
        throw Error(ErrorCode::Parse, "unknown event type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

// --------------------------------------------------------------- scripts

/// Angles in script files are in degrees.
inline synth::MotionScript parse_script(const json& j) {
  synth::MotionScript s;
  try {
    s.keypoints = j.at("keypoints").get<std::size_t>();
    s.noise = j.value("noise", 0.0);
    s.repeat = j.value("repeat", 1);
    for (const auto& tl : j.at("timelines")) {
      std::vector<synth::Phase> phases;
      for (const auto& ph : tl) {
        synth::Phase phase;
        phase.frames = ph.at("frames").get<FrameIndex>();
        if (ph.contains("hold")) {
          synth::Hold h;
          if (!ph["hold"].is_null()) h.at = detail::point(ph["hold"]);
          phase.shape = h;
        } else if (ph.contains("line")) {
          phase.shape = synth::Line{detail::point(ph["line"].at("from")), detail::point(ph["line"].at("to"))};
        } else if (ph.contains("arc")) {
          const auto& a = ph["arc"];
          phase.shape = synth::Arc{detail::point(a.at("center")), a.at("radius").get<double>(),
                                   deg_to_rad(a.at("theta0").get<double>()), deg_to_rad(a.at("theta1").get<double>())};
        } else {
          throw Error(ErrorCode::InvalidScript, "phase needs one of hold, line, arc");
        }
        phases.push_back(phase);
      }
      s.timelines.push_back(std::move(phases));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidScript, e.what());
  }
  synth::validate(s);
  return s;
}

inline json script_json(const synth::MotionScript& s) {
  json j;
  j["keypoints"] = s.keypoints;
  j["noise"] = s.noise;
  j["repeat"] = s.repeat;
  j["timelines"] = json::array();
  for (const auto& tl : s.timelines) {
    json phases = json::array();
    for (const auto& ph : tl) {
      json p;
      p["frames"] = ph.frames;
      if (const auto* h = std::get_if<synth::Hold>(&ph.shape)) {
        p["hold"] = h->at ? detail::point_json(*h->at) : json();
      } else if (const auto* l = std::get_if<synth::Line>(&ph.shape)) {
        p["line"] = {{"from", detail::point_json(l->from)}, {"to", detail::point_json(l->to)}};
      } else {
        const auto& a = std::get<synth::Arc>(ph.shape);
        p["arc"] = {{"center", detail::point_json(a.center)},
                    {"radius", a.radius},
                    {"theta0", rad_to_deg(a.theta0)},
                    {"theta1", rad_to_deg(a.theta1)}};
      }
      phases.push_back(std::move(p));
    }
    j["timelines"].push_back(std::move(phases));
  }
  return j;
}

inline json truth_json(const synth::GroundTruth& t) {
  json segs = json::array();
  for (const auto& s : t.segments) segs.push_back({s.start, s.end});
  return {{"count", t.count}, {"segments", segs}};
}

inline synth::GroundTruth parse_truth(const json& j) {
  synth::GroundTruth t;
  try {
    t.count = j.at("count").get<int>();
    for (const auto& s : j.value("segments", json::array())) t.segments.push_back({s.at(0).get<FrameIndex>(), s.at(1).get<FrameIndex>()});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("truth: ") + e.what());
  }
  return t;
}

}  // namespace actrep::io
