#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emocorr/errors.hpp"
#include "emocorr/pipeline.hpp"
#include "emocorr/reports.hpp"

namespace fs = std::filesystem;
using namespace emocorr;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

int run_cmd(const fs::path& config_path, const Overrides& overrides) {
  PipelineConfig config;
  try {
    config = load_pipeline_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "emocorr: stage 'config' failed: " << e.what() << '\n';
    return kExitData;
  }
  apply_overrides(config, overrides);
  try {
    const auto result = run_pipeline(config, &std::cerr);
    std::cout << format_accuracy_table(result.accuracy);
    std::cout << "reports written to " << (config.output_dir / kReportsDir).string() << '\n';
    return 0;
  } catch (const StageFailure& f) {
    std::cerr << "emocorr: " << f.what() << '\n';
    return f.exit_code();
  }
}

int mine_cmd(const std::vector<std::string>& files, const fs::path& out, const Overrides& o) {
  MineOptions options;
  if (o.variance_threshold) options.variance_threshold = *o.variance_threshold;
  if (o.quorum) options.evolution.quorum = *o.quorum;
  if (o.trace_length) options.evolution.trace_steps = *o.trace_length;
  if (options.evolution.trace_steps < 1 || options.evolution.trace_steps > kDefaultTraceSteps) {
    std::cerr << "emocorr: --trace-len must lie in [1, 8]\n";
    return kExitUsage;
  }
  try {
    std::vector<fs::path> paths(files.begin(), files.end());
    const auto result = run_mine(paths, options, out);
    for (const auto& p : result.artifacts) std::cout << p.string() << '\n';
    return 0;
  } catch (const StageFailure& f) {
    std::cerr << "emocorr: " << f.what() << '\n';
    return f.exit_code();
  }
}

int report_cmd(const fs::path& dir) {
  fs::path reports = dir;
  if (!fs::exists(reports / kConfusionReportFile) && fs::exists(dir / kReportsDir)) {
    reports = dir / kReportsDir;
  }
  try {
    std::cout << render_report_summary(reports);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "emocorr: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion correlation mining: train, mine and report"};
  app.require_subcommand(1);

  Overrides overrides;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t quorum = 0;
  std::size_t trace_len = 0;
  double threshold = 0.0;
  auto add_mining_flags = [&](CLI::App* cmd) {
    cmd->add_option("--quorum", quorum, "Minimum perspectives endorsing a misjudgment pair");
    cmd->add_option("--trace-len", trace_len, "Steps in each evolution trace (1-8)");
    cmd->add_option("--variance-threshold", threshold, "Cumulative variance share kept by PCA");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the full pipeline from a config file");
  run->add_option("--config", config_path, "Pipeline config (JSON)")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out, "Override the output directory");
  add_mining_flags(run);

  std::vector<std::string> matrix_files;
  std::string mine_out = "mine_out";
  auto* mine = app.add_subcommand("mine", "Mine six correlation matrix files");
  mine->add_option("matrices", matrix_files, "Six matrix files")->required();
  mine->add_option("--out", mine_out, "Output directory");
  add_mining_flags(mine);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Summarise reports from an output directory");
  report->add_option("--out", report_dir, "Output directory of a run or mine")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  auto* active = app.get_subcommands().front();
  auto given = [&](const char* name) {
    const auto* opt = active->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--seed")) overrides.seed = seed;
  if (given("--out") && active == run) overrides.output_dir = fs::absolute(out);
  if (given("--quorum")) overrides.quorum = quorum;
  if (given("--trace-len")) overrides.trace_length = trace_len;
  if (given("--variance-threshold")) overrides.variance_threshold = threshold;

  if (active == run) return run_cmd(config_path, overrides);
  if (active == mine) return mine_cmd(matrix_files, mine_out, overrides);
  return report_cmd(report_dir);
}
