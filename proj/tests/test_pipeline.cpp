#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "snnfra/config.hpp"
#include "snnfra/error.hpp"
#include "snnfra/io.hpp"
#include "snnfra/pipeline.hpp"
#include "snnfra/synthetic.hpp"

using namespace snnfra;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with SNNFRA_RUN_ROOT pointing into `root`.
Result cli(const fixture::TempDir& root, const std::string& args) {
  const fs::path err = root / "stderr.txt";
  const std::string cmd = "SNNFRA_RUN_ROOT='" + (root / "runs").string() + "' '" SNNFRA_CLI_PATH "' " + args +
                          " >/dev/null 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(err)};
}

std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

// Small planted fixture written next to a config.ini.
fs::path small_fixture(const fixture::TempDir& dir) {
  SyntheticSpec spec;
  spec.drugs = 60;
  spec.targets = 48;
  spec.interactions = 90;
  write_synthetic(make_synthetic(spec), dir / "fx", 5);
  std::ofstream(dir / "fx" / "config.ini", std::ios::app) << "\n[classifier]\nn_estimators = 30\n";
  return dir / "fx" / "config.ini";
}

}  // namespace

TEST_CASE("stage manifests round-trip") {
  StageManifest m;
  m.stage = "score";
  m.seed = 42;
  m.config_digest = "00112233aabbccdd";
  m.inputs = {{"reduce/positives.csv", "0123456789abcdef"}};
  m.outputs = {{"scores.csv", "fedcba9876543210"}};
  const auto back = StageManifest::parse(m.render());
  CHECK(back.stage == m.stage);
  CHECK(back.seed == 42);
  CHECK(back.config_digest == m.config_digest);
  CHECK(back.inputs == m.inputs);
  CHECK(back.outputs == m.outputs);
  CHECK(m.render().find("wall") == std::string::npos);
}

TEST_CASE("stage config text only carries the keys a stage reads") {
  RunConfig a = parse_config("[general]\nseed = 1\n");
  RunConfig b = a;
  b.set("sampling.tp", "0.9");
  CHECK(stage_config_text(Stage::score, a) == stage_config_text(Stage::score, b));
  CHECK(stage_config_text(Stage::balance, a) != stage_config_text(Stage::balance, b));
  b = a;
  b.set("general.seed", "2");
  CHECK(stage_config_text(Stage::normalize, a) != stage_config_text(Stage::normalize, b));
}

TEST_CASE("stage names and exit codes") {
  for (Stage s : pipeline_stages()) CHECK(parse_stage(stage_name(s)) == s);
  CHECK(parse_stage("sweep") == Stage::sweep);
  CHECK(!parse_stage("bogus"));
  CHECK(exit_code_for(Error(ErrorCode::ConfigError, "x")) == 2);
  CHECK(exit_code_for(StageFailure(Stage::normalize, Error(ErrorCode::IoError, "x"))) == 3);
  CHECK(exit_code_for(StageFailure(Stage::train, Error(ErrorCode::InvalidInput, "x"))) == 4);
}

TEST_CASE("command line runs") {
  const fixture::TempDir dir("pipeline");
  const fs::path config = small_fixture(dir);
  const std::string cfg = "--config '" + config.string() + "'";
  const fs::path run = dir / "runs" / "r";

  auto r = cli(dir, "pipeline " + cfg + " --run r");
  REQUIRE(r.status == 0);
  for (Stage s : pipeline_stages()) {
    CHECK(fs::exists(run / std::string(stage_name(s)) / "manifest.json"));
    CHECK(fs::exists(run / std::string(stage_name(s)) / "timing.txt"));
  }
  const std::string metrics = slurp(run / "evaluate" / "metrics.json");

  SUBCASE("a rerun skips every stage and --force redoes them") {
    r = cli(dir, "pipeline " + cfg + " --run r");
    CHECK(r.status == 0);
    CHECK(occurrences(r.err, "up to date, skipped") == pipeline_stages().size());
    r = cli(dir, "pipeline " + cfg + " --run r --force");
    CHECK(r.status == 0);
    CHECK(occurrences(r.err, "up to date, skipped") == 0);
    CHECK(slurp(run / "evaluate" / "metrics.json") == metrics);
  }

  SUBCASE("balance with explicit thresholds") {
    r = cli(dir, "balance " + cfg + " --run r --tp 0.8 --tq 0.2");
    REQUIRE(r.status == 0);
    const auto scores = load_score_table(run / "score" / "scores.csv");
    std::size_t promoted = 0, retained = 0;
    for (double s : scores.degrees) {
      promoted += s >= 0.8;
      retained += s <= 0.2 && s < 0.8;
    }
    const auto positives = load_pair_dataset(run / "candidates" / "positives.csv").data.size();
    const auto table = load_pair_dataset(run / "balance" / "balanced.csv");
    std::size_t pos = 0, neg = 0, real_pos = 0, real_neg = 0;
    for (std::size_t i = 0; i < table.data.size(); ++i) {
      const bool p = table.data[i].label == Label::positive;
      (p ? pos : neg) += 1;
      if (!table.synthetic[i]) (p ? real_pos : real_neg) += 1;
    }
    CHECK(real_pos == positives + promoted);
    CHECK(real_neg == retained);
    CHECK((pos > neg ? pos - neg : neg - pos) <= std::min(real_pos, real_neg));
  }

  SUBCASE("sweep writes one row per threshold") {
    r = cli(dir, "sweep " + cfg + " --run r --thresholds 0.1,0.2,0.3");
    REQUIRE(r.status == 0);
    const std::string csv = slurp(run / "sweep" / "sweep.csv");
    CHECK(occurrences(csv, "\n") == 4);
    CHECK(csv.rfind("threshold,auc,f1,gmean,runtime_s,error\n", 0) == 0);
  }

  SUBCASE("a stage without its upstream output names the missing stage") {
    REQUIRE(cli(dir, "normalize " + cfg + " --run fresh").status == 0);
    r = cli(dir, "score " + cfg + " --run fresh");
    CHECK(r.status == 4);
    CHECK(r.err.find("candidates") != std::string::npos);
    CHECK(!fs::exists(dir / "runs" / "fresh" / "score"));
  }
}

TEST_CASE("failures map to exit codes and leave no partial output") {
  const fixture::TempDir dir("failures");
  const fs::path config = small_fixture(dir);
  const std::string cfg = "--config '" + config.string() + "'";

  fs::remove(dir / "fx" / "interactions.csv");
  auto r = cli(dir, "pipeline " + cfg + " --run broken");
  CHECK(r.status == 3);
  const fs::path run = dir / "runs" / "broken";
  if (fs::exists(run)) CHECK(fs::is_empty(run));

  r = cli(dir, "pipeline " + cfg + " --run bad --set classifier.type=bogus");
  CHECK(r.status == 2);
  CHECK(r.err.find("bogus") != std::string::npos);
  CHECK(!fs::exists(dir / "runs" / "bad"));
}
