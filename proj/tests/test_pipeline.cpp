#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "emocorr/errors.hpp"
#include "emocorr/matrix_io.hpp"
#include "emocorr/pipeline.hpp"
#include "emocorr/reports.hpp"
#include "json.hpp"

using namespace emocorr;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = EMOCORR_FIXTURE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("emocorr_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CliResult {
  int code = -1;
  std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& workdir) {
  const auto err_file = workdir / "stderr.txt";
  const std::string cmd = std::string(EMOCORR_CLI) + " " + args + " >" + (workdir / "stdout.txt").string() +
                          " 2>" + err_file.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err_file)};
}

std::vector<fs::path> matrix_files(const fs::path& out) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(out / "matrices")) {
    if (e.path().string().ends_with(".matrix.tsv")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

const char* const kReportFiles[] = {"confusion_report.json", "evolution_report.json",
                                    "confusion_law.tsv",     "absolute_confusion.tsv",
                                    "sequence_matrices.tsv", "misjudgment_law.tsv",
                                    "evolution_traces.tsv",  "shortest_paths.tsv"};

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    out_ = scratch("run_a");
    auto config = load_pipeline_config(kFixtures / "config.json");
    config.output_dir = out_;
    result_ = new RunResult(run_pipeline(config));
  }
  static void TearDownTestSuite() {
    delete result_;
    result_ = nullptr;
  }
  static fs::path out_;
  static RunResult* result_;
};

fs::path PipelineTest::out_;
RunResult* PipelineTest::result_ = nullptr;

}  // namespace

TEST_F(PipelineTest, WritesAllArtifacts) {
  EXPECT_EQ(matrix_files(out_).size(), 6u);
  for (const char* f : kReportFiles) EXPECT_TRUE(fs::exists(out_ / kReportsDir / f)) << f;
  EXPECT_EQ(result_->accuracy.size(), 6u);
  EXPECT_TRUE(fs::exists(out_ / "summary.tsv"));
  std::size_t ckpts = 0;
  for (const auto& e : fs::directory_iterator(out_ / "checkpoints")) ckpts += e.path().extension() == ".ckpt";
  EXPECT_EQ(ckpts, 6u);

  const auto manifest = nlohmann::json::parse(slurp(out_ / kManifestFile));
  EXPECT_EQ(manifest["status"], "ok");
  EXPECT_EQ(manifest["seed"], 11);
  EXPECT_EQ(manifest["config_sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(manifest["artifacts"].size(), result_->artifacts.size());
  for (const auto& m : matrix_files(out_)) EXPECT_NO_THROW(read_matrix_file(m));
}

TEST_F(PipelineTest, RerunIsByteIdentical) {
  const auto out_b = scratch("run_b");
  auto config = load_pipeline_config(kFixtures / "config.json");
  config.output_dir = out_b;
  config.workers = 3;
  run_pipeline(config);
  for (const char* f : kReportFiles) {
    EXPECT_EQ(slurp(out_ / kReportsDir / f), slurp(out_b / kReportsDir / f)) << f;
  }
  const auto a = matrix_files(out_), b = matrix_files(out_b);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(slurp(a[i]), slurp(b[i]));
  EXPECT_EQ(slurp(out_ / kManifestFile), slurp(out_b / kManifestFile));
}

TEST_F(PipelineTest, MineReproducesRunReports) {
  const auto out_m = scratch("mine");
  MineOptions options;
  run_mine(matrix_files(out_), options, out_m);
  for (const char* f : kReportFiles) {
    EXPECT_EQ(slurp(out_ / kReportsDir / f), slurp(out_m / kReportsDir / f)) << f;
  }
}

TEST_F(PipelineTest, MineMatchesDirectLibraryCalls) {
  std::vector<CorrelationMatrix> ms;
  for (const auto& f : matrix_files(out_)) ms.push_back(read_matrix_file(f).matrix);
  const auto set = assemble_perspectives(ms);
  const std::vector<ConfusionAnalysis> conf{analyze_confusion("comment", set, 0.85)};
  const std::vector<EvolutionAnalysis> evo{analyze_evolution("comment", set, {})};
  EXPECT_EQ(slurp(out_ / kReportsDir / kConfusionReportFile), confusion_report_json(conf, 0.85));
  EXPECT_EQ(slurp(out_ / kReportsDir / kEvolutionReportFile), evolution_report_json(evo, {}));
}

TEST_F(PipelineTest, CliMineReportAndErrors) {
  const auto work = scratch("cli");
  std::string files;
  for (const auto& f : matrix_files(out_)) files += " " + f.string();
  auto r = run_cli("mine" + files + " --out " + (work / "m").string(), work);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(work / "m" / kReportsDir / kEvolutionReportFile),
            slurp(out_ / kReportsDir / kEvolutionReportFile));

  r = run_cli("report --out " + out_.string(), work);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(work / "stdout.txt").find("misjudgment law"), std::string::npos);

  // One row summing to 0.8.
  auto text = slurp(matrix_files(out_)[0]);
  const auto lines_start = text.find("kind\tcorrelation\n") + 17;
  text.replace(lines_start, text.find('\n', lines_start) - lines_start, "0.8\t0\t0\t0\t0\t0");
  const auto bad = work / "bad.matrix.tsv";
  std::ofstream(bad) << text;
  auto mats = matrix_files(out_);
  std::string bad_files = " " + bad.string();
  for (std::size_t i = 1; i < mats.size(); ++i) bad_files += " " + mats[i].string();
  r = run_cli("mine" + bad_files + " --out " + (work / "m2").string(), work);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("row 0"), std::string::npos) << r.err;

  // Duplicate (feature, model) tags.
  std::string dup = " " + mats[0].string();
  for (std::size_t i = 0; i < 5; ++i) dup += " " + mats[0].string();
  r = run_cli("mine" + dup + " --out " + (work / "m3").string(), work);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("duplicate"), std::string::npos) << r.err;

  r = run_cli("mine" + files + " --quorum 7 --out " + (work / "m4").string(), work);
  EXPECT_NE(r.code, 0);
  r = run_cli("frobnicate", work);
  EXPECT_EQ(r.code, 1);
  r = run_cli("run", work);
  EXPECT_EQ(r.code, 1);
}

TEST(PipelineConfig, MissingLexiconNamesPath) {
  const auto work = scratch("nolex");
  auto json = nlohmann::json::parse(slurp(kFixtures / "config.json"));
  json["lexicon"] = "missing_lexicon.tsv";
  json["datasets"][0]["corpus"] = (kFixtures / "corpus.tsv").string();
  json["output_dir"] = (work / "out").string();
  std::ofstream(work / "config.json") << json.dump();
  const auto r = run_cli("run --config " + (work / "config.json").string(), work);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find((work / "missing_lexicon.tsv").string()), std::string::npos) << r.err;
}

TEST(PipelineConfig, ParsesAndValidates) {
  const auto c = load_pipeline_config(kFixtures / "config.json");
  ASSERT_EQ(c.datasets.size(), 1u);
  EXPECT_EQ(c.datasets[0].pad_length[static_cast<std::size_t>(FeatureView::kCharacter)], 40u);
  EXPECT_EQ(c.datasets[0].corpus, kFixtures / "corpus.tsv");
  EXPECT_EQ(c.train_m1.epochs, 15u);
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW(parse_pipeline_config("{\"bogus\": 1}", kFixtures), ConfigError);
  EXPECT_THROW(parse_pipeline_config("not json", kFixtures), ConfigError);
  auto bad = c;
  bad.quorum = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.variance_threshold = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);

  Overrides o;
  o.seed = 5;
  o.trace_length = 4;
  auto d = c;
  apply_overrides(d, o);
  EXPECT_EQ(d.seed, 5u);
  EXPECT_EQ(d.trace_length, 4u);
  EXPECT_EQ(d.quorum, c.quorum);
}

TEST(PipelineFailure, DivergenceKeepsPartialArtifactsAndManifest) {
  auto config = load_pipeline_config(kFixtures / "config.json");
  config.output_dir = scratch("diverge");
  config.train_m2.learning_rate = 1e300;
  try {
    run_pipeline(config);
    FAIL();
  } catch (const StageFailure& f) {
    EXPECT_EQ(f.stage(), "train");
    EXPECT_EQ(f.exit_code(), 3);
  }
  const auto manifest = nlohmann::json::parse(slurp(config.output_dir / kManifestFile));
  EXPECT_EQ(manifest["status"], "failed");
  EXPECT_EQ(manifest["failed_stage"], "train");
  EXPECT_FALSE(manifest["artifacts"].empty());
  EXPECT_TRUE(fs::exists(config.output_dir / "splits" / "comment.split.tsv"));
}
