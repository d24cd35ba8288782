#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
};

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("actrep_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

/// Runs the CLI with stdout captured; stderr goes to err.txt in the scratch directory.
Result cli(const std::string& args) {
  const std::string cmd = std::string(ACTREP_CLI_PATH) + " " + args + " 2>" + (scratch() / "err.txt").string();
  FILE* p = ::popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int raw = ::pclose(p);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string samples(const std::string& name) { return (fs::path(ACTREP_SAMPLES_DIR) / name).string(); }

std::string last_line(const std::string& s) {
  const auto end = s.find_last_not_of('\n');
  const auto start = s.rfind('\n', end);
  return s.substr(start == std::string::npos ? 0 : start + 1, end - (start == std::string::npos ? 0 : start + 1) + 1);
}

}  // namespace

TEST(Cli, JumpingJackCountsFive) {
  const auto frames = (scratch() / "jj.jsonl").string();
  ASSERT_EQ(cli("synth -i " + samples("jumping_jack.json") + " -o " + frames).status, 0);
  EXPECT_EQ(slurp(frames + ".truth.json").find("\"count\":5"), 1u);
  const auto r = cli("count -i " + frames);
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(last_line(r.out), R"({"type":"count","t":291,"reps":5,"period":2})");
}

TEST(Cli, StaticSceneEmitsNothing) {
  const auto frames = (scratch() / "static.jsonl").string();
  ASSERT_EQ(cli("synth -i " + samples("static.json") + " -o " + frames).status, 0);
  const auto r = cli("count -i " + frames);
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "");
}

TEST(Cli, MalformedLineSeventeen) {
  const auto frames = (scratch() / "bad.jsonl").string();
  ASSERT_EQ(cli("synth -i " + samples("jumping_jack.json") + " -o " + frames).status, 0);
  std::stringstream in(slurp(frames));
  std::ofstream out(frames);
  std::string line;
  for (int i = 1; std::getline(in, line) && i <= 30; ++i) out << (i == 17 ? line.substr(0, 25) : line) << "\n";
  out.close();
  const auto r = cli("segment -i " + frames);
  EXPECT_EQ(r.status, 1);
  const auto err = slurp(scratch() / "err.txt");
  EXPECT_NE(err.find("line 17"), std::string::npos) << err;
  EXPECT_NE(err.find("Parse"), std::string::npos) << err;
  EXPECT_EQ(cli("validate -i " + frames).status, 1);
}

TEST(Cli, DeterministicOutput) {
  const auto frames = (scratch() / "noisy.jsonl").string();
  ASSERT_EQ(cli("synth -i " + samples("knee_march_noisy.json") + " --seed 3 -o " + frames).status, 0);
  const auto a = cli("count -i " + frames), b = cli("count < " + frames);
  ASSERT_EQ(a.status, 0);
  EXPECT_FALSE(a.out.empty());
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ExitCodes) {
  const auto frames = (scratch() / "jj_codes.jsonl").string();
  ASSERT_EQ(cli("synth --preset jumping_jack --repeat 2 -o " + frames).status, 0);
  EXPECT_EQ(cli("count -i " + frames + " --set segmenter.buffer_capacity=16").status, 2);
  EXPECT_EQ(cli("count -i " + frames + " --set cusum.nope=1").status, 1);
  EXPECT_EQ(cli("count -i " + frames + " --set match.tau=0").status, 1);
  EXPECT_EQ(cli("count -i /nonexistent/file").status, 1);
  EXPECT_EQ(cli("frobnicate").status, 1);
  EXPECT_EQ(cli("count -i " + frames + " --topology " + samples("topology.json")).status, 0);
}

TEST(Cli, DottedFlagsAndConfigFile) {
  const auto frames = (scratch() / "jj_flags.jsonl").string();
  ASSERT_EQ(cli("synth --preset arm_raise --repeat 3 -o " + frames).status, 0);
  const auto cfg = cli("config --cusum.w_min 9 --set match.tau=0.07 -c " + samples("config.json"));
  ASSERT_EQ(cfg.status, 0);
  EXPECT_NE(cfg.out.find("\"cusum.w_min\": 9"), std::string::npos) << cfg.out;
  EXPECT_NE(cfg.out.find("\"match.tau\": 0.07"), std::string::npos);
  EXPECT_EQ(cli("count -c " + samples("config.json") + " -i " + frames).out, cli("count -i " + frames).out);
}

TEST(Cli, ValidateEvalPlot) {
  const auto frames = (scratch() / "jj_eval.jsonl").string();
  const auto events = (scratch() / "jj_eval.events.jsonl").string();
  ASSERT_EQ(cli("synth --preset jumping_jack --repeat 4 --noise 0.004 --seed 2 -o " + frames).status, 0);
  const auto v = cli("validate -i " + frames);
  EXPECT_EQ(v.status, 0);
  EXPECT_EQ(v.out, "ok 240 frames, 13 keypoints\n");
  ASSERT_EQ(cli("count -i " + frames + " -o " + events).status, 0);
  const auto e = cli("eval --events " + events + " --truth " + frames + ".truth.json");
  ASSERT_EQ(e.status, 0);
  EXPECT_NE(e.out.find("\t4\t4\t100.0\n"), std::string::npos) << e.out;
  EXPECT_NE(e.out.find("exact\t1/1"), std::string::npos);
  const auto svg = (scratch() / "plot.svg").string();
  ASSERT_EQ(cli("plot -i " + frames + " --events " + events + " --plot-signal left_shoulder -o " + svg).status, 0);
  const auto text = slurp(svg);
  EXPECT_EQ(text.rfind("<svg", 0), 0u);
  EXPECT_NE(text.find("stroke=\"#2a9d3a\""), std::string::npos);
  EXPECT_EQ(cli("plot -i " + frames + " --plot-signal tail").status, 1);
}

TEST(Cli, ValidateCatchesGapsAndShortFrames) {
  const auto gap = (scratch() / "gap.jsonl").string();
  {
    std::ofstream out(gap);
    out << R"({"t":0,"kp":[[0,0]]})" << "\n" << R"({"t":2,"kp":[[0,0]]})" << "\n";
  }
  EXPECT_EQ(cli("validate -i " + gap + " --topology " + samples("topology.json")).status, 1);
  const auto err = slurp(scratch() / "err.txt");
  EXPECT_NE(err.find("line 1"), std::string::npos) << err;  // one keypoint cannot cover the topology
}
