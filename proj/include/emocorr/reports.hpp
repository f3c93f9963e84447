#ifndef EMOCORR_REPORTS_HPP
#define EMOCORR_REPORTS_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "emocorr/confusion.hpp"
#include "emocorr/evolution.hpp"

namespace emocorr {

// "0->5->0"
std::string format_path(std::span<const Emotion> path);
// "0-5"
std::string format_cycle(const Cycle& cycle);

// Machine-readable reports (JSON, schema tags "emocorr.confusion_report/1" and
// "emocorr.evolution_report/1").
std::string confusion_report_json(std::span<const ConfusionAnalysis> analyses,
                                  double variance_threshold);
std::string evolution_report_json(std::span<const EvolutionAnalysis> analyses,
                                  const EvolutionOptions& options);

// TAB-separated plot data, one file per figure family.
std::string confusion_law_tsv(std::span<const ConfusionAnalysis> analyses);
std::string absolute_confusion_tsv(std::span<const ConfusionAnalysis> analyses);
std::string sequence_matrices_tsv(std::span<const ConfusionAnalysis> analyses);
std::string misjudgment_law_tsv(std::span<const EvolutionAnalysis> analyses);
std::string evolution_traces_tsv(std::span<const EvolutionAnalysis> analyses);
std::string shortest_paths_tsv(std::span<const EvolutionAnalysis> analyses);

// Writes every report into `dir` and returns the paths written.
std::vector<std::filesystem::path> write_reports(const std::filesystem::path& dir,
                                                 std::span<const ConfusionAnalysis> confusion,
                                                 std::span<const EvolutionAnalysis> evolution,
                                                 double variance_threshold,
                                                 const EvolutionOptions& options);

inline constexpr const char* kConfusionReportFile = "confusion_report.json";
inline constexpr const char* kEvolutionReportFile = "evolution_report.json";

// Human-readable digest of the two JSON reports found in `dir`.
std::string render_report_summary(const std::filesystem::path& dir);

}  // namespace emocorr

#endif  // EMOCORR_REPORTS_HPP
