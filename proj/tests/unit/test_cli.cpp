#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "ovcd/dataset.hpp"
#include "ovcd/image_io.hpp"
#include "ovcd/scene.hpp"
#include "ovcd/synthetic.hpp"

using namespace ovcd;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("ovcd_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args, const std::atomic<bool>* cancel = nullptr) {
    args.insert(args.begin(), "ovcd");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_, cancel);
  }

  std::string p(const std::string& rel) const { return (dir_ / rel).string(); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json read_json(const fs::path& f) { return nlohmann::json::parse(slurp(f)); }

// Relative path -> contents for every file under root.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return files;
}

}  // namespace

TEST(ParseQuery, Forms) {
  const QuerySpec a = cli::parse_query("building");
  EXPECT_EQ(a.prompts, std::vector<std::string>{"building"});
  EXPECT_EQ(a.category, "building");
  const QuerySpec b = cli::parse_query("roofs=house,rooftop");
  EXPECT_EQ(b.query_id, "roofs");
  EXPECT_EQ(b.prompts, (std::vector<std::string>{"house", "rooftop"}));
  EXPECT_FALSE(b.category);
  EXPECT_ANY_THROW(cli::parse_query("x="));
  EXPECT_ANY_THROW(cli::parse_query("=a"));
}

TEST(BackendUrl, Forms) {
  EXPECT_EQ(cli::backend_url("remote:http://h:1"), "http://h:1");
  EXPECT_ANY_THROW(cli::backend_url("quantum"));
}

TEST_F(CliTest, SynthIsDeterministic) {
  ASSERT_EQ(run({"synth", "--seed", "7", "--n", "3", "--size", "64", "--out", p("a")}), 0);
  ASSERT_EQ(run({"synth", "--seed", "7", "--n", "3", "--size", "64", "--out", p("b")}), 0);
  EXPECT_EQ(snapshot(dir_ / "a"), snapshot(dir_ / "b"));
  ASSERT_EQ(run({"synth", "--seed", "8", "--n", "3", "--size", "64", "--out", p("c")}), 0);
  EXPECT_NE(snapshot(dir_ / "a"), snapshot(dir_ / "c"));
}

TEST_F(CliTest, SynthZeroPairsWritesManifest) {
  ASSERT_EQ(run({"synth", "--n", "0", "--out", p("empty")}), 0);
  EXPECT_TRUE(fs::exists(dir_ / "empty" / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir_ / "empty" / "config.json"));
  EXPECT_TRUE(fs::is_empty(dir_ / "empty" / "A"));
  EXPECT_TRUE(read_json(dir_ / "empty" / "manifest.json")["pairs"].empty());
}

TEST_F(CliTest, SynthLabelsMatchSceneObjects) {
  ASSERT_EQ(run({"synth", "--seed", "3", "--n", "2", "--size", "96", "--out", p("d")}), 0);
  const auto manifest = read_json(dir_ / "d" / "manifest.json");
  for (const auto& entry : manifest["pairs"]) {
    const auto spec = synthetic::scene_from_json(entry["scene"]);
    const std::string name = entry["pair"];
    for (const auto& cat : synthetic::categories()) {
      BitMask a(spec.width, spec.height), b(spec.width, spec.height);
      for (const auto& o : spec.objects) {
        if (o.category != cat.name) continue;
        const BitMask fp = synthetic::object_footprint(o, spec.width, spec.height);
        if (o.at_t1) a = mask_union(a, fp);
        if (o.at_t2) b = mask_union(b, fp);
      }
      BitMask x(spec.width, spec.height);
      for (std::size_t i = 0; i < x.size(); ++i) x.set(i, a[i] != b[i]);
      EXPECT_EQ(io::read_mask_png(dir_ / "d" / "label" / cat.name / (name + ".png")), x);
    }
  }
}

TEST_F(CliTest, DetectSinglePair) {
  ASSERT_EQ(run({"synth", "--seed", "5", "--n", "1", "--size", "96", "--out", p("ds")}), 0);
  const int code = run({"detect", "--t1", p("ds/A/pair_0000.png"), "--t2", p("ds/B/pair_0000.png"),
                        "--query", "building", "--query", "greens=tree,vegetation",
                        "--set", "tile_size=64", "--set", "tile_stride=48", "--out", p("det")});
  ASSERT_EQ(code, 0) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "det" / "building_change.png"));
  EXPECT_TRUE(fs::exists(dir_ / "det" / "greens_overlay.png"));
  const auto cfg = read_json(dir_ / "det" / "config.json");
  EXPECT_EQ(cfg["tile_size"], 64);
  const auto manifest = read_json(dir_ / "det" / "manifest.json");
  EXPECT_EQ(manifest["status"], "ok");
  EXPECT_EQ(manifest["queries"].size(), 2u);
}

TEST_F(CliTest, DetectMissingT2IsUsageError) {
  EXPECT_EQ(run({"detect", "--t1", p("x.png"), "--query", "building"}), 2);
  EXPECT_NE(err_.str().find("--t2"), std::string::npos) << err_.str();
}

TEST_F(CliTest, UnknownFlagAndSubcommandAreUsageErrors) {
  EXPECT_EQ(run({"detect", "--bogus"}), 2);
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"synth", "--out", p("s"), "--set", "tau=1"}), 2);
}

TEST_F(CliTest, DetectUnreachableRemoteIsBackendError) {
  ASSERT_EQ(run({"synth", "--n", "1", "--size", "32", "--out", p("ds")}), 0);
  const int code = run({"detect", "--t1", p("ds/A/pair_0000.png"), "--t2", p("ds/B/pair_0000.png"),
                        "--query", "building", "--backend", "remote:http://127.0.0.1:1",
                        "--out", p("det")});
  EXPECT_EQ(code, 3);
  EXPECT_EQ(read_json(dir_ / "det" / "manifest.json")["status"], "failed");
}

TEST_F(CliTest, DetectMissingInputIsIoError) {
  EXPECT_EQ(run({"detect", "--t1", p("nope.png"), "--t2", p("nope.png"), "--query", "building",
                 "--out", p("det")}),
            4);
}

TEST_F(CliTest, EvalPerfectEmptyAndMissing) {
  ASSERT_EQ(run({"synth", "--seed", "2", "--n", "3", "--size", "96", "--out", p("gt")}), 0);
  ASSERT_EQ(run({"eval", "--pred", p("gt/label"), "--gt", p("gt"), "--out", p("rep")}), 0);
  EXPECT_NE(out_.str().find("F1 100.0"), std::string::npos) << out_.str();
  EXPECT_TRUE(fs::exists(dir_ / "rep" / "report.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "rep" / "config.json"));

  const Corpus gt = load_dataset(dir_ / "gt");
  ConfusionCounts pooled;
  for (const auto& pr : gt.pairs) {
    for (const auto& [cat, m] : pr.labels) {
      fs::create_directories(dir_ / "empty" / cat);
      io::write_mask_png(dir_ / "empty" / cat / (pr.name + ".png"), BitMask(m.width(), m.height()));
      pooled += count_confusion(BitMask(m.width(), m.height()), m);
    }
  }
  ASSERT_GT(pooled.fn, 0u);
  ASSERT_EQ(run({"eval", "--pred", p("empty"), "--gt", p("gt")}), 0);
  EXPECT_NE(out_.str().find("Rec 0.0"), std::string::npos) << out_.str();
  EXPECT_NE(out_.str().find(format_metrics(derive_metrics(pooled))), std::string::npos);

  fs::remove(dir_ / "empty" / "building" / "pair_0002.png");
  EXPECT_EQ(run({"eval", "--pred", p("empty"), "--gt", p("gt")}), 4);
}

TEST_F(CliTest, DatasetDetectScoresAndWritesPredictions) {
  ASSERT_EQ(run({"synth", "--seed", "4", "--n", "2", "--size", "96", "--out", p("gt")}), 0);
  ASSERT_EQ(run({"detect", "--dataset", p("gt"), "--set", "tile_size=64", "--set",
                 "tile_stride=48", "--out", p("run")}),
            0)
      << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "run" / "pred" / "water" / "pair_0001.png"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "report.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "config.json"));
  EXPECT_EQ(read_json(dir_ / "run" / "manifest.json")["pairs"].size(), 2u);
  ASSERT_EQ(run({"eval", "--pred", p("run/pred"), "--gt", p("gt"), "--out", p("rep")}), 0);
}

TEST_F(CliTest, CancelFlushesPartialManifest) {
  ASSERT_EQ(run({"synth", "--n", "2", "--size", "64", "--out", p("gt")}), 0);
  std::atomic<bool> cancel{true};
  EXPECT_EQ(run({"detect", "--dataset", p("gt"), "--set", "tile_size=64", "--set", "tile_stride=48",
                 "--out", p("run")},
                &cancel),
            130);
  const auto manifest = read_json(dir_ / "run" / "manifest.json");
  EXPECT_EQ(manifest["status"], "cancelled");
  EXPECT_TRUE(manifest["pairs"].empty());
}

TEST_F(CliTest, SweepPresetWritesTables) {
  ASSERT_EQ(run({"sweep", "--preset", "ablation", "--n", "2", "--size", "96", "--set",
                 "tile_size=64", "--set", "tile_stride=48", "--out", p("sw")}),
            0)
      << err_.str();
  const std::string csv = slurp(dir_ / "sw" / "sweep.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_NE(slurp(dir_ / "sw" / "sweep.txt").find("Full model"), std::string::npos);
  EXPECT_EQ(read_json(dir_ / "sw" / "config.json")["base"]["tile_size"], 64);
  EXPECT_EQ(run({"sweep", "--preset", "nope", "--out", p("sw2")}), 2);
}

TEST_F(CliTest, BridgeDebugWritesFrames) {
  ASSERT_EQ(run({"synth", "--n", "1", "--size", "32", "--out", p("ds")}), 0);
  ASSERT_EQ(run({"bridge-debug", "--t1", p("ds/A/pair_0000.png"), "--t2", p("ds/B/pair_0000.png"),
                 "--k", "2", "--out", p("br")}),
            0);
  for (const char* f : {"frame_00.png", "frame_01.png", "frame_02.png", "frame_03.png",
                        "config.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "br" / f)) << f;
  }
  EXPECT_FALSE(fs::exists(dir_ / "br" / "frame_04.png"));
  EXPECT_EQ(io::read_rgb_png(dir_ / "br" / "frame_00.png"),
            io::read_rgb_png(dir_ / "ds" / "A" / "pair_0000.png"));
  EXPECT_EQ(run({"bridge-debug", "--t1", p("ds/A/pair_0000.png"), "--t2", p("ds/B/pair_0000.png"),
                 "--direction", "sideways", "--out", p("br2")}),
            2);
}
