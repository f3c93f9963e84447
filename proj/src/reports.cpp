#include "emocorr/reports.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "emocorr/errors.hpp"
#include "emocorr/matrix_io.hpp"
#include "json.hpp"

namespace emocorr {

using Json = nlohmann::ordered_json;

namespace {

std::string name_of(Emotion e) { return std::string(emotion_name(e)); }

Json optional_emotion(const std::optional<Emotion>& e) {
  return e ? Json(name_of(*e)) : Json(nullptr);
}

std::string join_doubles(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

Json trace_json(const std::optional<Trace>& t) {
  Json j;
  if (t) {
    j["path"] = format_path(t->path);
    j["steps"] = t->steps;
    j["step_probs"] = t->step_probs;
    j["log_prob"] = t->log_prob;
  } else {
    j["path"] = nullptr;
    j["steps"] = nullptr;
    j["step_probs"] = Json::array();
    j["log_prob"] = nullptr;
  }
  return j;
}

Json cycles_json(const std::vector<Cycle>& cycles) {
  Json arr = Json::array();
  for (const auto& c : cycles) arr.push_back(format_cycle(c));
  return arr;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string format_path(std::span<const Emotion> path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += "->";
    out += std::to_string(idx(path[i]));
  }
  return out;
}

std::string format_cycle(const Cycle& cycle) {
  std::string out;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(idx(cycle[i]));
  }
  return out;
}

std::string confusion_report_json(std::span<const ConfusionAnalysis> analyses,
                                  double variance_threshold) {
  Json root;
  root["schema"] = "emocorr.confusion_report/1";
  root["variance_threshold"] = variance_threshold;
  Json perspectives = Json::array();
  for (std::size_t k = 0; k < kNumPerspectives; ++k) perspectives.push_back(perspective_label(k));
  root["perspectives"] = perspectives;
  root["datasets"] = Json::array();
  for (const auto& a : analyses) {
    Json d;
    d["dataset"] = a.dataset;
    d["retained_components"] = a.features.retained;
    Json rows = Json::array();
    for (const auto& row : a.features.rows) rows.push_back(row);
    d["feature_matrix"] = rows;
    Json scores;
    for (auto e : kAllEmotions) scores[name_of(e)] = a.distances[idx(e)].absolute_score;
    d["absolute_scores"] = scores;
    Json ranking = Json::array();
    for (auto e : a.confusion_ranking) ranking.push_back(name_of(e));
    d["confusion_ranking"] = ranking;
    Json seqs;
    for (auto e : kAllEmotions) {
      const auto& s = a.sequences[idx(e)];
      Json srows = Json::array();
      for (const auto& row : s.rows) {
        Json r = Json::array();
        for (auto x : row) r.push_back(idx(x));
        srows.push_back(r);
      }
      seqs[name_of(e)] = Json{{"rows", srows}, {"entropy", s.entropy}};
    }
    d["sequence_matrices"] = seqs;
    d["mean_entropy"] = a.law.mean_entropy;
    Json records = Json::array();
    for (const auto& e : a.law.entries) {
      Json r;
      r["dataset"] = a.dataset;
      r["center"] = name_of(e.center);
      r["relation"] = std::string(relation_name(e.relation));
      r["partner"] = name_of(e.partner);
      r["entropy"] = e.entropy;
      r["kept"] = e.kept;
      r["low_confidence"] = e.low_confidence;
      records.push_back(r);
    }
    d["records"] = records;
    root["datasets"].push_back(d);
  }
  return root.dump(2) + "\n";
}

std::string evolution_report_json(std::span<const EvolutionAnalysis> analyses,
                                  const EvolutionOptions& options) {
  Json root;
  root["schema"] = "emocorr.evolution_report/1";
  root["quorum"] = options.quorum;
  root["trace_steps"] = options.trace_steps;
  root["allow_self_steps"] = options.allow_self_steps;
  root["datasets"] = Json::array();
  for (const auto& a : analyses) {
    Json d;
    d["dataset"] = a.dataset;
    Json mis = Json::array();
    for (const auto& m : a.misjudgments) {
      Json r;
      r["source"] = name_of(m.source);
      r["target"] = name_of(m.target);
      Json endorsers = Json::array();
      for (auto k : m.endorsers) endorsers.push_back(perspective_label(k));
      r["endorsers"] = endorsers;
      r["endorser_count"] = m.endorsers.size();
      r["mean_prob"] = m.mean_prob;
      mis.push_back(r);
    }
    d["misjudgments"] = mis;
    Json traces = Json::array();
    for (const auto& t : a.traces) {
      Json r;
      r["dataset"] = a.dataset;
      r["perspective"] = perspective_label(t.perspective);
      r["condition"] = std::string(condition_name(t.condition));
      r["initial"] = optional_emotion(t.initial);
      r["ultimate"] = optional_emotion(t.ultimate);
      r.update(trace_json(t.trace));
      r["cycles"] = cycles_json(t.cycles);
      r["status"] = t.status;
      traces.push_back(r);
    }
    d["traces"] = traces;
    Json paths = Json::array();
    for (const auto& p : a.shortest_paths) {
      Json r;
      r["dataset"] = a.dataset;
      r["perspective"] = perspective_label(p.perspective);
      r["initial"] = name_of(p.initial);
      r["ultimate"] = name_of(p.ultimate);
      r.update(trace_json(p.trace));
      r["status"] = p.status;
      paths.push_back(r);
    }
    d["shortest_paths"] = paths;
    Json circ = Json::array();
    for (const auto& c : a.circulations) {
      Json r;
      r["perspective"] = perspective_label(c.perspective);
      for (auto cond : {TraceCondition::kGivenInitial, TraceCondition::kGivenUltimate,
                        TraceCondition::kGivenBoth}) {
        r[std::string(condition_name(cond))] =
            cycles_json(c.by_condition[static_cast<std::size_t>(cond)]);
      }
      r["conditions_agree"] = c.conditions_agree;
      circ.push_back(r);
    }
    d["circulations"] = circ;
    root["datasets"].push_back(d);
  }
  return root.dump(2) + "\n";
}

std::string confusion_law_tsv(std::span<const ConfusionAnalysis> analyses) {
  std::ostringstream out;
  out << "dataset\tcenter\trelation\tpartner\tentropy\tkept\tlow_confidence\n";
  for (const auto& a : analyses) {
    for (const auto& e : a.law.entries) {
      out << a.dataset << '\t' << idx(e.center) << '\t' << relation_name(e.relation) << '\t'
          << idx(e.partner) << '\t' << format_double(e.entropy) << '\t' << (e.kept ? 1 : 0)
          << '\t' << (e.low_confidence ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string absolute_confusion_tsv(std::span<const ConfusionAnalysis> analyses) {
  std::ostringstream out;
  out << "dataset\temotion\tabsolute_score\trank\n";
  for (const auto& a : analyses) {
    for (auto e : kAllEmotions) {
      std::size_t rank = 0;
      while (a.confusion_ranking[rank] != e) ++rank;
      out << a.dataset << '\t' << idx(e) << '\t'
          << format_double(a.distances[idx(e)].absolute_score) << '\t' << rank + 1 << '\n';
    }
  }
  return out.str();
}

std::string sequence_matrices_tsv(std::span<const ConfusionAnalysis> analyses) {
  std::ostringstream out;
  out << "dataset\tcenter\tperspective\ts1\ts2\ts3\ts4\ts5\ts6\n";
  for (const auto& a : analyses) {
    for (auto e : kAllEmotions) {
      const auto& s = a.sequences[idx(e)];
      for (std::size_t k = 0; k < kNumPerspectives; ++k) {
        out << a.dataset << '\t' << idx(e) << '\t' << perspective_label(k);
        for (auto x : s.rows[k]) out << '\t' << idx(x);
        out << '\n';
      }
      out << a.dataset << '\t' << idx(e) << "\tentropy";
      for (double h : s.entropy) out << '\t' << format_double(h);
      out << '\n';
    }
  }
  return out.str();
}

std::string misjudgment_law_tsv(std::span<const EvolutionAnalysis> analyses) {
  std::ostringstream out;
  out << "dataset\tsource\ttarget\tendorsers\tendorser_count\tmean_prob\n";
  for (const auto& a : analyses) {
    for (const auto& m : a.misjudgments) {
      out << a.dataset << '\t' << idx(m.source) << '\t' << idx(m.target) << '\t';
      for (std::size_t i = 0; i < m.endorsers.size(); ++i) {
        out << (i ? "," : "") << perspective_label(m.endorsers[i]);
      }
      out << '\t' << m.endorsers.size() << '\t' << format_double(m.mean_prob) << '\n';
    }
  }
  return out.str();
}

std::string evolution_traces_tsv(std::span<const EvolutionAnalysis> analyses) {
  std::ostringstream out;
  out << "dataset\tperspective\tcondition\tinitial\tultimate\tpath\tstep_probs\tlog_prob\tcycles\tstatus\n";
  for (const auto& a : analyses) {
    for (const auto& t : a.traces) {
      out << a.dataset << '\t' << perspective_label(t.perspective) << '\t'
          << condition_name(t.condition) << '\t'
          << (t.initial ? std::to_string(idx(*t.initial)) : "-") << '\t'
          << (t.ultimate ? std::to_string(idx(*t.ultimate)) : "-") << '\t';
      if (t.trace) {
        out << format_path(t.trace->path) << '\t' << join_doubles(t.trace->step_probs) << '\t'
            << format_double(t.trace->log_prob);
      } else {
        out << "-\t-\t-";
      }
      out << '\t';
      for (std::size_t i = 0; i < t.cycles.size(); ++i) out << (i ? "," : "") << format_cycle(t.cycles[i]);
      if (t.cycles.empty()) out << '-';
      out << '\t' << t.status << '\n';
    }
  }
  return out.str();
}

std::string shortest_paths_tsv(std::span<const EvolutionAnalysis> analyses) {
  std::ostringstream out;
  out << "dataset\tperspective\tinitial\tultimate\tpath\tsteps\tstep_probs\tlog_prob\tstatus\n";
  for (const auto& a : analyses) {
    for (const auto& p : a.shortest_paths) {
      out << a.dataset << '\t' << perspective_label(p.perspective) << '\t' << idx(p.initial)
          << '\t' << idx(p.ultimate) << '\t';
      if (p.trace) {
        out << format_path(p.trace->path) << '\t' << p.trace->steps << '\t'
            << join_doubles(p.trace->step_probs) << '\t' << format_double(p.trace->log_prob);
      } else {
        out << "-\t-\t-\t-";
      }
      out << '\t' << p.status << '\n';
    }
  }
  return out.str();
}

std::vector<std::filesystem::path> write_reports(const std::filesystem::path& dir,
                                                 std::span<const ConfusionAnalysis> confusion,
                                                 std::span<const EvolutionAnalysis> evolution,
                                                 double variance_threshold,
                                                 const EvolutionOptions& options) {
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> files = {
      {kConfusionReportFile, confusion_report_json(confusion, variance_threshold)},
      {kEvolutionReportFile, evolution_report_json(evolution, options)},
      {"confusion_law.tsv", confusion_law_tsv(confusion)},
      {"absolute_confusion.tsv", absolute_confusion_tsv(confusion)},
      {"sequence_matrices.tsv", sequence_matrices_tsv(confusion)},
      {"misjudgment_law.tsv", misjudgment_law_tsv(evolution)},
      {"evolution_traces.tsv", evolution_traces_tsv(evolution)},
      {"shortest_paths.tsv", shortest_paths_tsv(evolution)},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [name, text] : files) {
    write_file(dir / name, text);
    written.push_back(dir / name);
  }
  return written;
}

std::string render_report_summary(const std::filesystem::path& dir) {
  auto load = [&](const char* name) {
    std::ifstream in(dir / name);
    if (!in) throw IoError("cannot open " + (dir / name).string());
    try {
      return Json::parse(in);
    } catch (const Json::exception& e) {
      throw DataError((dir / name).string() + ": " + e.what());
    }
  };
  const Json confusion = load(kConfusionReportFile);
  const Json evolution = load(kEvolutionReportFile);

  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  for (const auto& d : confusion.at("datasets")) {
    out << "== " << d.at("dataset").get<std::string>() << " : confusion ==\n";
    out << "absolute confusion (most confusable first):";
    for (const auto& e : d.at("confusion_ranking")) {
      const auto name = e.get<std::string>();
      out << ' ' << name << '(' << d.at("absolute_scores").at(name).get<double>() << ')';
    }
    out << "\nreliable relations (entropy <= " << d.at("mean_entropy").get<double>() << "):\n";
    for (const auto& r : d.at("records")) {
      if (!r.at("kept").get<bool>()) continue;
      out << "  " << r.at("center").get<std::string>() << ' '
          << (r.at("relation") == "max" ? "most" : "least") << " confused with "
          << r.at("partner").get<std::string>() << "  H=" << r.at("entropy").get<double>()
          << (r.at("low_confidence").get<bool>() ? "  (tied mode)" : "") << '\n';
    }
  }
  for (const auto& d : evolution.at("datasets")) {
    out << "== " << d.at("dataset").get<std::string>() << " : evolution ==\n";
    out << "misjudgment law (quorum " << evolution.at("quorum").get<std::size_t>() << "):\n";
    for (const auto& m : d.at("misjudgments")) {
      out << "  " << m.at("source").get<std::string>() << " -> "
          << m.at("target").get<std::string>() << "  endorsers="
          << m.at("endorser_count").get<std::size_t>() << "  p=" << m.at("mean_prob").get<double>()
          << '\n';
    }
    out << "circulations:\n";
    for (const auto& c : d.at("circulations")) {
      out << "  " << c.at("perspective").get<std::string>() << ':';
      for (const auto& x : c.at("given_initial")) out << ' ' << x.get<std::string>();
      out << (c.at("conditions_agree").get<bool>() ? "" : "  (conditions differ)") << '\n';
    }
    out << "multi-step shortest paths:\n";
    for (const auto& p : d.at("shortest_paths")) {
      if (p.at("steps").is_null() || p.at("steps").get<std::size_t>() < 2) continue;
      out << "  " << p.at("perspective").get<std::string>() << ' '
          << p.at("path").get<std::string>() << '\n';
    }
  }
  return out.str();
}

}  // namespace emocorr
