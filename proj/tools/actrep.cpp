// actrep: command-line front end for the segmentation and counting engine.
//
// Exit codes: 0 ok, 1 parse or config error, 2 capacity error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "actrep/config.hpp"
#include "actrep/evaluation.hpp"
#include "actrep/io.hpp"
#include "actrep/pipeline.hpp"
#include "actrep/plot.hpp"
#include "actrep/synth.hpp"
#include "actrep/synth_presets.hpp"

namespace fs = std::filesystem;
using namespace actrep;
using json = nlohmann::ordered_json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string topology_path;
  std::string input = "-";
  std::string output = "-";
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> flags;  // from --<dotted.key> options
};

class InputFile {
 public:
  explicit InputFile(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ifstream>(path);
    if (!*file_) throw Error(ErrorCode::Config, "cannot open '" + path + "' for reading");
  }
  std::istream& get() { return file_ ? *file_ : std::cin; }

 private:
  std::unique_ptr<std::ifstream> file_;
};

class OutputFile {
 public:
  explicit OutputFile(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw Error(ErrorCode::Config, "cannot open '" + path + "' for writing");
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

json read_json_file(const std::string& path, ErrorCode code) {
  std::ifstream in(path);
  if (!in) throw Error(code, "cannot open '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(code, "'" + path + "' is not valid JSON");
  return j;
}

RunConfig load_config(const CommonOptions& opt) {
  RunConfig cfg;
  if (!opt.config_path.empty()) {
    apply_json(cfg, read_json_file(opt.config_path, ErrorCode::Config));
    if (cfg.topology_path && fs::path(*cfg.topology_path).is_relative())
      cfg.topology_path = (fs::path(opt.config_path).parent_path() / *cfg.topology_path).string();
  }
  for (const auto& [key, value] : opt.flags) apply_override(cfg, key + "=" + value);
  for (const auto& s : opt.sets) apply_override(cfg, s);
  if (!opt.topology_path.empty()) cfg.topology_path = opt.topology_path;
  validate_config(cfg);
  return cfg;
}

SkeletonTopology load_topology(const RunConfig& cfg) {
  if (!cfg.topology_path) return default_topology();
  return io::parse_topology(read_json_file(*cfg.topology_path, ErrorCode::Config));
}

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_config) {
  cmd->add_option("--input,-i", opt.input, "Input path, or - for stdin")->capture_default_str();
  cmd->add_option("--output,-o", opt.output, "Output path, or - for stdout")->capture_default_str();
  if (!with_config) return;
  cmd->add_option("--config,-c", opt.config_path, "JSON config file");
  cmd->add_option("--topology", opt.topology_path, "Skeleton topology JSON (default: built-in 13-keypoint layout)");
  cmd->add_option("--set", opt.sets, "Override a config key: key=value (repeatable)");
  auto* group = cmd->add_option_group("config keys", "Each config key is also a flag of the same dotted name");
  for (const auto& key : config_keys()) {
    if (key == "topology") continue;
    group->add_option_function<std::string>(
        "--" + key, [&opt, key](const std::string& v) { opt.flags.emplace_back(key, v); }, "Config key " + key);
  }
}

// ------------------------------------------------------------ subcommands

int run_pipeline(const CommonOptions& opt, bool counting) {
  RunConfig cfg = load_config(opt);
  cfg.pipeline.counting = counting;
  Pipeline pipeline(load_topology(cfg), cfg.pipeline);
  InputFile in(opt.input);
  OutputFile out(opt.output);
  std::ostream& os = out.get();
  const auto emit = [&os](const std::vector<Event>& events) {
    for (const auto& e : events) os << io::format_event(e) << '\n' << std::flush;
  };
  io::read_frames(in.get(), [&](const KeypointFrame& f, std::size_t line_no) {
    try {
      emit(pipeline.push_frame(f));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Capacity) throw;
      throw Error(e.code() == ErrorCode::Config ? ErrorCode::Config : ErrorCode::Parse,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  emit(pipeline.finish());
  return 0;
}

struct SynthOptions {
  std::string preset;
  int repeat = 5;
  double noise = 0.0;
  std::vector<FrameIndex> timing{20, 10, 20, 10};
  std::uint64_t seed = 0;
  std::string truth_path;
  std::string script_out;
};

synth::MotionScript preset_script(const SynthOptions& s) {
  if (s.timing.size() != 4) throw Error(ErrorCode::Config, "--timing takes four durations");
  const synth::presets::Timing t{s.timing[0], s.timing[1], s.timing[2], s.timing[3]};
  if (s.preset == "jumping_jack") return synth::presets::jumping_jack(t, s.repeat, s.noise);
  if (s.preset == "arm_raise") return synth::presets::arm_raise(t, s.repeat, s.noise);
  if (s.preset == "squat") return synth::presets::squat(t, s.repeat, s.noise);
  if (s.preset == "knee_march") return synth::presets::knee_march(t, s.repeat, s.noise);
  if (s.preset == "static") {
    auto script = synth::presets::jumping_jack(t, s.repeat, s.noise);
    const auto pose = synth::presets::detail::standing();
    for (std::size_t k = 0; k < script.keypoints; ++k)
      script.timelines[k] = {{synth::Hold{pose.p[k]}, synth::presets::detail::cycle(t)}};
    return script;
  }
  throw Error(ErrorCode::Config, "unknown preset '" + s.preset + "'");
}

int run_synth(const CommonOptions& opt, const SynthOptions& s) {
  synth::MotionScript script;
  if (!s.preset.empty()) {
    script = preset_script(s);
  } else {
    InputFile in(opt.input);
    json j = json::parse(in.get(), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::Parse, "script is not valid JSON");
    script = io::parse_script(j);
  }
  if (!s.script_out.empty()) {
    OutputFile so(s.script_out);
    so.get() << io::script_json(script).dump(2) << '\n';
  }
  const auto stream = synth::generate_stream(script, s.seed);
  {
    OutputFile out(opt.output);
    for (const auto& f : stream.frames) out.get() << io::format_frame(f) << '\n';
  }
  std::string truth = s.truth_path;
  if (truth.empty() && opt.output != "-") truth = opt.output + ".truth.json";
  if (!truth.empty()) {
    OutputFile tf(truth);
    tf.get() << io::truth_json(stream.truth).dump() << '\n';
  }
  return 0;
}

int run_eval(const CommonOptions& opt, const std::vector<std::string>& events, const std::vector<std::string>& truths) {
  if (events.size() != truths.size()) throw Error(ErrorCode::Config, "need one --truth per --events file");
  OutputFile out(opt.output);
  std::ostream& os = out.get();
  os << "stream\tpredicted\ttrue\taccuracy\n";
  double sum = 0.0;
  std::size_t exact = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    InputFile in(events[i]);
    const auto log = io::read_events(in.get());
    const auto truth = io::parse_truth(read_json_file(truths[i], ErrorCode::Parse));
    const long predicted = predicted_count(log.counts);
    const double acc = percentage_accuracy(predicted, truth.count);
    sum += acc;
    exact += predicted == truth.count;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", acc);
    os << events[i] << '\t' << predicted << '\t' << truth.count << '\t' << buf << '\n';
  }
  if (!events.empty()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", sum / static_cast<double>(events.size()));
    os << "mean\t-\t-\t" << buf << "\nexact\t" << exact << '/' << events.size() << '\n';
  }
  return 0;
}

int run_plot(const CommonOptions& opt, const std::string& events_path, const std::string& signal) {
  const RunConfig cfg = load_config(opt);
  const SkeletonTopology topo = load_topology(cfg);
  const auto id = topo.find_signal(signal);
  if (!id) throw Error(ErrorCode::Config, "unknown signal '" + signal + "'");
  FeatureExtractor extractor(topo, cfg.pipeline.segmenter.features);
  std::vector<FrameIndex> times;
  std::vector<double> values;
  InputFile in(opt.input);
  io::read_frames(in.get(), [&](const KeypointFrame& f, std::size_t) {
    times.push_back(f.t);
    values.push_back(extractor.compute(extractor.prepare(f)).signal(*id));
  });
  std::vector<SegmentRepresentation> segments;
  if (!events_path.empty()) {
    InputFile ev(events_path);
    segments = io::read_events(ev.get()).segments;
  }
  OutputFile out(opt.output);
  out.get() << render_signal_svg(times, values, segments, {960, 320, signal});
  return 0;
}

int run_validate(const CommonOptions& opt) {
  const RunConfig cfg = load_config(opt);
  const SkeletonTopology topo = load_topology(cfg);
  io::StreamValidator validator;
  InputFile in(opt.input);
  const std::size_t n = io::read_frames(in.get(), [&](const KeypointFrame& f, std::size_t line_no) {
    validator.check(f, line_no);
    if (f.keypoints.size() <= topo.max_index())
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + std::to_string(f.keypoints.size()) +
                                        " keypoints, topology needs " + std::to_string(topo.max_index() + 1));
  });
  OutputFile out(opt.output);
  out.get() << "ok " << n << " frames, " << validator.keypoint_count().value_or(0) << " keypoints\n";
  return 0;
}

int run_config(const CommonOptions& opt) {
  const RunConfig cfg = load_config(opt);
  OutputFile out(opt.output);
  out.get() << config_json(cfg).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online action segmentation and repetition counting on keypoint streams"};
  app.require_subcommand(1);

  CommonOptions opt;
  auto* segment = app.add_subcommand("segment", "Frames -> segment events (JSONL)");
  add_common(segment, opt, true);
  auto* count = app.add_subcommand("count", "Frames -> segment and count events (JSONL)");
  add_common(count, opt, true);

  SynthOptions synth_opt;
  auto* synth_cmd = app.add_subcommand("synth", "Motion script -> frame JSONL plus ground-truth JSON");
  add_common(synth_cmd, opt, false);
  synth_cmd->add_option("--preset", synth_opt.preset,
                        "Built-in script instead of --input: jumping_jack, arm_raise, squat, knee_march, static");
  synth_cmd->add_option("--repeat", synth_opt.repeat, "Preset repetitions")->capture_default_str();
  synth_cmd->add_option("--noise", synth_opt.noise, "Preset keypoint noise sigma")->capture_default_str();
  synth_cmd->add_option("--timing", synth_opt.timing, "Preset durations: move_up hold_up move_down hold_down")
      ->expected(4);
  synth_cmd->add_option("--seed", synth_opt.seed, "Noise seed")->capture_default_str();
  synth_cmd->add_option("--truth", synth_opt.truth_path, "Ground-truth path (default: <output>.truth.json)");
  synth_cmd->add_option("--write-script", synth_opt.script_out, "Also write the script JSON here");

  std::vector<std::string> eval_events, eval_truths;
  auto* eval = app.add_subcommand("eval", "Count events + ground truth -> accuracy table");
  eval->add_option("--output,-o", opt.output, "Output path, or - for stdout");
  eval->add_option("--events", eval_events, "Event JSONL file (repeatable)")->required();
  eval->add_option("--truth", eval_truths, "Ground-truth JSON, one per --events (repeatable)")->required();

  std::string plot_events, plot_signal;
  auto* plot = app.add_subcommand("plot", "Frames + segment events -> SVG of one signal");
  add_common(plot, opt, true);
  plot->add_option("--events", plot_events, "Event JSONL to mark");
  plot->add_option("--plot-signal", plot_signal, "Signal name, e.g. left_knee or torso")->required();

  auto* validate = app.add_subcommand("validate", "Check a frame JSONL stream: schema, consecutive t, keypoint count");
  add_common(validate, opt, true);

  auto* config = app.add_subcommand("config", "Print the effective configuration");
  add_common(config, opt, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (segment->parsed()) return run_pipeline(opt, false);
    if (count->parsed()) return run_pipeline(opt, true);
    if (synth_cmd->parsed()) return run_synth(opt, synth_opt);
    if (eval->parsed()) return run_eval(opt, eval_events, eval_truths);
    if (plot->parsed()) return run_plot(opt, plot_events, plot_signal);
    if (validate->parsed()) return run_validate(opt);
    if (config->parsed()) return run_config(opt);
  } catch (const Error& e) {
    std::cout.flush();
    std::cerr << "actrep: " << e.what() << '\n';
    return e.code() == ErrorCode::Capacity ? 2 : 1;
  } catch (const std::exception& e) {
    std::cout.flush();
    std::cerr << "actrep: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
