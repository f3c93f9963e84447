#ifndef EMOCORR_PIPELINE_HPP
#define EMOCORR_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "emocorr/confusion.hpp"
#include "emocorr/corpus.hpp"
#include "emocorr/evolution.hpp"
#include "emocorr/train.hpp"

namespace emocorr {

struct DatasetConfig {
  std::string name;
  SourceKind kind = SourceKind::kComment;
  std::filesystem::path corpus;
  // Pad length N per feature view, indexed by FeatureView.
  std::array<std::size_t, 3> pad_length{32, 12, 12};
};

// JSON config; relative paths resolve against the config file's directory.
//
//   {
//     "datasets": [{"name": "comment", "kind": "comment", "corpus": "c.tsv",
//                   "pad_length": {"character": 40, "implicit": 10, "explicit": 10}}],
//     "lexicon": "lexicon.tsv",
//     "test_fraction": 0.2,
//     "train": {"M1": {"epochs": 30, ...}, "M2": {...}},
//     "variance_threshold": 0.85, "quorum": 2, "trace_length": 8,
//     "output_dir": "out", "seed": 1, "workers": 1
//   }
struct PipelineConfig {
  std::vector<DatasetConfig> datasets;
  std::filesystem::path lexicon;
  std::string tokenizer = "whitespace";
  std::int64_t min_total_votes = 200;
  double min_vote_ratio = 0.5;
  double test_fraction = 0.2;
  nn::TrainConfig train_m1;
  nn::TrainConfig train_m2;
  double variance_threshold = 0.85;
  std::size_t quorum = kDefaultQuorum;
  std::size_t trace_length = kDefaultTraceSteps;
  bool allow_self_steps = false;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  // SHA-256 of the config file text; empty when built in code.
  std::string config_sha256;

  // Ranges and file existence. Throws ConfigError naming the offending field or path.
  void validate() const;
  EvolutionOptions evolution_options() const;
};

PipelineConfig parse_pipeline_config(const std::string& json_text,
                                     const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::size_t> quorum;
  std::optional<std::size_t> trace_length;
  std::optional<double> variance_threshold;
};

void apply_overrides(PipelineConfig& config, const Overrides& overrides);

// A pipeline stage failed. exit_code is 2 for data/config errors, 3 for divergence.
class StageFailure : public std::runtime_error {
 public:
  StageFailure(std::string stage, int exit_code, const std::string& message)
      : std::runtime_error("stage '" + stage + "' failed: " + message),
        stage_(std::move(stage)),
        exit_code_(exit_code) {}
  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

struct AccuracyRow {
  std::string dataset;
  FeatureView feature = FeatureView::kCharacter;
  ModelVariant model = ModelVariant::kM1;
  double accuracy = 0.0;
  std::size_t test_size = 0;
};

struct RunResult {
  std::vector<AccuracyRow> accuracy;
  std::vector<ConfusionAnalysis> confusion;
  std::vector<EvolutionAnalysis> evolution;
  std::vector<std::filesystem::path> artifacts;
};

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kReportsDir = "reports";

// Corpus -> features -> six trainings -> matrices -> mining -> reports. Writes
// a manifest whether or not a stage fails; throws StageFailure on failure.
// Progress lines go to `log` when given.
RunResult run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

// Accuracy table: one row per feature, one column per model, per dataset.
std::string format_accuracy_table(const std::vector<AccuracyRow>& rows);

struct MineOptions {
  double variance_threshold = 0.85;
  EvolutionOptions evolution;
};

// Mining only, on six externally supplied correlation matrix files that share a
// dataset name and carry distinct (feature, model) tags. Reports go to
// `out_dir`/reports.
RunResult run_mine(const std::vector<std::filesystem::path>& matrix_files,
                   const MineOptions& options, const std::filesystem::path& out_dir);

}  // namespace emocorr

#endif  // EMOCORR_PIPELINE_HPP
