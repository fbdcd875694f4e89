#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "relnet/pipeline.hpp"

using namespace relnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("relnet_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig tiny(const fs::path& out) {
  RunConfig c;
  std::istringstream in(
      "# tiny end-to-end run\n"
      "synth.dyads = 120,80,60,40,40\n"
      "topics.k = 10\n"
      "topics.iterations = 20\n"
      "bootstrap.resamples = 50\n"
      "learn.epochs = 5\n"
      "retweet.per_category_n = 60\n"
      "retweet.epochs = 1\n"
      "features.min_freq = 2\n"
      "retweet.text_min_freq = 2\n");
  c.load(in, "tiny");
  c.set("out", out.string());
  return c;
}

}  // namespace

TEST_CASE("config parsing, overrides and unknown keys") {
  RunConfig c;
  CHECK(c.get_int("topics.k") == 20);
  std::istringstream in("topics.k = 7\n\n# comment\nseed=3\n");
  c.load(in);
  CHECK(c.get_int("topics.k") == 7);
  CHECK(c.seed() == 3);
  c.assign("split.ratios=7,2,1");
  CHECK(c.get_doubles("split.ratios") == std::vector<double>{7, 2, 1});
  CHECK_THROWS_AS(c.set("topics.kk", "1"), ConfigError);
  CHECK_THROWS_AS(c.assign("no equals sign"), ConfigError);
  std::istringstream bad("nonsense.key = 1\n");
  CHECK_THROWS_AS(c.load(bad), ConfigError);
  c.set("topics.k", "x");
  CHECK_THROWS_AS(c.get_int("topics.k"), ConfigError);
}

TEST_CASE("config hash ignores output directory and workers") {
  RunConfig a, b;
  b.set("out", "elsewhere");
  b.set("workers", "4");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.set("seed", "9");
  CHECK(a.hash() != b.hash());
  CHECK(b.header().find("seed=9") != std::string::npos);
  CHECK(b.header().rfind("# relnet ", 0) == 0);
}

TEST_CASE("stages report missing prerequisites") {
  const auto dir = scratch("missing");
  RunConfig c;
  c.set("out", dir.string());
  CHECK_THROWS_AS(run_stage("no-such-stage", c), ConfigError);
  try {
    run_stage("eval-rel", c);
    FAIL("eval-rel ran without a model");
  } catch (const MissingArtifactError& e) {
    CHECK(e.stage() == "train-rel");
    CHECK(std::string(e.what()).find("train-rel") != std::string::npos);
  }
  try {
    run_stage("extract", c);
    FAIL("extract ran without a corpus");
  } catch (const MissingArtifactError& e) {
    CHECK(e.stage() == "synth");
  }
  CHECK_THROWS_AS(run_stage("report", c), Error);
  fs::remove_all(dir);
}

TEST_CASE("the full pipeline runs and is reproducible across worker counts") {
  const auto one = scratch("e2e_1"), four = scratch("e2e_4");
  auto c1 = tiny(one), c4 = tiny(four);
  c4.set("workers", "4");
  for (const auto& stage : stage_names()) {
    INFO(stage);
    const auto r = run_stage(stage, c1);
    CHECK(!r.outputs.empty());
    run_stage(stage, c4);
  }
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(one)) {
    if (!entry.is_regular_file()) continue;
    ++files;
    const auto rel = fs::relative(entry.path(), one);
    INFO(rel.string());
    const std::string text = slurp(entry.path());
    CHECK(text == slurp(four / rel));
    if (entry.path().extension() == ".json") CHECK(text.find(c1.header()) != std::string::npos);
    else CHECK(text.rfind(c1.header(), 0) == 0);
  }
  CHECK(files > 20);
  const std::string report = slurp(one / "report.txt");
  CHECK(report.find("[eval-rel]") != std::string::npos);
  CHECK(report.find("[eval-rt]") != std::string::npos);
  fs::remove_all(one);
  fs::remove_all(four);
}
