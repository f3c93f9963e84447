#include "emocorr/pipeline.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "emocorr/checkpoint.hpp"
#include "emocorr/digest.hpp"
#include "emocorr/errors.hpp"
#include "emocorr/matrix_io.hpp"
#include "emocorr/random.hpp"
#include "emocorr/reports.hpp"
#include "json.hpp"

namespace emocorr {

namespace fs = std::filesystem;
using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

namespace {

void check_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_field(const Json& obj, const char* key, T& into, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    into = obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

nn::TrainConfig parse_train(const Json& j, const std::string& where) {
  check_keys(j,
             {"learning_rate", "epochs", "batch_size", "dropout", "optimizer", "momentum",
              "clip_norm", "embedding", "conv", "hidden1", "hidden2"},
             where);
  nn::TrainConfig t;
  read_field(j, "learning_rate", t.learning_rate, where);
  read_field(j, "epochs", t.epochs, where);
  read_field(j, "batch_size", t.batch_size, where);
  read_field(j, "dropout", t.dropout, where);
  read_field(j, "momentum", t.momentum, where);
  read_field(j, "clip_norm", t.clip_norm, where);
  read_field(j, "embedding", t.dims.embedding, where);
  read_field(j, "conv", t.dims.conv, where);
  read_field(j, "hidden1", t.dims.hidden1, where);
  read_field(j, "hidden2", t.dims.hidden2, where);
  std::string opt = "sgd";
  read_field(j, "optimizer", opt, where);
  if (opt == "sgd") {
    t.optimizer = nn::Optimizer::kSgd;
  } else if (opt == "momentum") {
    t.optimizer = nn::Optimizer::kMomentum;
  } else {
    throw ConfigError(where + ".optimizer must be 'sgd' or 'momentum'");
  }
  return t;
}

int exit_code_for(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const DivergenceError&) {
    return 3;
  } catch (...) {
    return 2;
  }
}

std::string message_of(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string stem(const std::string& dataset, FeatureView view, ModelVariant model) {
  return dataset + "." + std::string(view_name(view)) + "." + std::string(variant_name(model));
}

// Writes the manifest for whatever artifacts exist so far.
void write_manifest(const fs::path& out_dir, const PipelineConfig& config,
                    const std::vector<fs::path>& artifacts, const std::string& failed_stage,
                    const std::string& error) {
  OrderedJson m;
  m["schema"] = "emocorr.manifest/1";
  m["status"] = failed_stage.empty() ? "ok" : "failed";
  m["failed_stage"] = failed_stage.empty() ? OrderedJson(nullptr) : OrderedJson(failed_stage);
  m["error"] = error.empty() ? OrderedJson(nullptr) : OrderedJson(error);
  m["config_sha256"] = config.config_sha256;
  m["seed"] = config.seed;
  OrderedJson list = OrderedJson::array();
  for (const auto& p : artifacts) {
    if (!fs::exists(p)) continue;
    list.push_back({{"path", fs::relative(p, out_dir).generic_string()}, {"sha256", sha256_file(p)}});
  }
  m["artifacts"] = list;
  write_text(out_dir / kManifestFile, m.dump(2) + "\n");
}

struct Job {
  std::size_t dataset = 0;
  FeatureView view = FeatureView::kCharacter;
  ModelVariant model = ModelVariant::kM1;
};

struct EncodedDataset {
  std::array<Vocabulary, 3> vocab{Vocabulary(FeatureView::kCharacter),
                                  Vocabulary(FeatureView::kImplicit),
                                  Vocabulary(FeatureView::kExplicit)};
  std::array<std::vector<nn::Example>, 3> train;
  std::array<std::vector<nn::Example>, 3> test;
};

std::vector<nn::Example> encode(const std::vector<LabeledText>& records, FeatureView view,
                                const Vocabulary& vocab, std::size_t length,
                                const Tokenizer& tokenizer, const SynonymLexicon& lexicon) {
  std::vector<nn::Example> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back({pad_and_mask(extract_view_tokens(r.body, view, tokenizer, &lexicon), vocab,
                                length),
                   r.label});
  }
  return out;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Every index runs even
// if others fail; the failure with the lowest index is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::max<std::size_t>(1, std::min(workers, n));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void mine_into(RunResult& result, const std::string& dataset,
               const std::vector<CorrelationMatrix>& matrices, double variance_threshold,
               const EvolutionOptions& options, std::string& stage) {
  stage = "perspectives";
  const auto set = assemble_perspectives(matrices);
  stage = "confusion";
  result.confusion.push_back(analyze_confusion(dataset, set, variance_threshold));
  stage = "evolution";
  result.evolution.push_back(analyze_evolution(dataset, set, options));
}

}  // namespace

void PipelineConfig::validate() const {
  if (datasets.empty()) throw ConfigError("config lists no datasets");
  std::set<std::string> names;
  for (const auto& d : datasets) {
    if (d.name.empty()) throw ConfigError("dataset name must not be empty");
    if (d.name.find_first_of("/\\\t\n") != std::string::npos) {
      throw ConfigError("dataset name '" + d.name + "' contains a path separator or tab");
    }
    if (!names.insert(d.name).second) throw ConfigError("duplicate dataset '" + d.name + "'");
    if (!fs::is_regular_file(d.corpus)) {
      throw ConfigError("corpus file not found: " + d.corpus.string());
    }
    for (auto n : d.pad_length) {
      if (n == 0) throw ConfigError("pad_length of dataset '" + d.name + "' must be positive");
    }
  }
  if (!fs::is_regular_file(lexicon)) throw ConfigError("lexicon file not found: " + lexicon.string());
  if (tokenizer != "whitespace") throw ConfigError("unknown tokenizer '" + tokenizer + "'");
  if (min_total_votes < 0) throw ConfigError("min_total_votes must be non-negative");
  if (!(min_vote_ratio >= 0.0 && min_vote_ratio < 1.0)) {
    throw ConfigError("min_vote_ratio must lie in [0, 1)");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
  train_m1.validate();
  train_m2.validate();
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) {
    throw ConfigError("variance_threshold must lie in (0, 1]");
  }
  if (quorum < 1 || quorum > kNumBasePerspectives) throw ConfigError("quorum must lie in [1, 6]");
  if (trace_length < 1 || trace_length > kDefaultTraceSteps) {
    throw ConfigError("trace_length must lie in [1, 8]");
  }
  if (workers == 0) throw ConfigError("workers must be positive");
}

EvolutionOptions PipelineConfig::evolution_options() const {
  EvolutionOptions o;
  o.quorum = quorum;
  o.trace_steps = trace_length;
  o.allow_self_steps = allow_self_steps;
  return o;
}

PipelineConfig parse_pipeline_config(const std::string& json_text, const fs::path& base_dir) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"datasets", "lexicon", "tokenizer", "min_total_votes", "min_vote_ratio",
              "test_fraction", "train", "variance_threshold", "quorum", "trace_length",
              "allow_self_steps", "output_dir", "seed", "workers"},
             "config");
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };

  PipelineConfig c;
  if (!j.contains("datasets") || !j["datasets"].is_array()) {
    throw ConfigError("config.datasets must be an array");
  }
  for (std::size_t i = 0; i < j["datasets"].size(); ++i) {
    const auto& d = j["datasets"][i];
    const std::string where = "datasets[" + std::to_string(i) + "]";
    check_keys(d, {"name", "kind", "corpus", "pad_length"}, where);
    DatasetConfig ds;
    std::string kind = "comment";
    std::string corpus;
    read_field(d, "name", ds.name, where);
    read_field(d, "kind", kind, where);
    read_field(d, "corpus", corpus, where);
    const auto k = source_kind_from_name(kind);
    if (!k) throw ConfigError(where + ".kind '" + kind + "' is not comment, news_body or news_title");
    ds.kind = *k;
    if (corpus.empty()) throw ConfigError(where + ".corpus is required");
    ds.corpus = resolve(corpus);
    if (d.contains("pad_length")) {
      const auto& pl = d["pad_length"];
      if (pl.is_number_unsigned()) {
        ds.pad_length.fill(pl.get<std::size_t>());
      } else {
        check_keys(pl, {"character", "implicit", "explicit"}, where + ".pad_length");
        for (auto v : kAllViews) {
          read_field(pl, std::string(view_name(v)).c_str(), ds.pad_length[static_cast<std::size_t>(v)],
                     where + ".pad_length");
        }
      }
    }
    c.datasets.push_back(std::move(ds));
  }
  std::string lexicon;
  read_field(j, "lexicon", lexicon, "config");
  if (lexicon.empty()) throw ConfigError("config.lexicon is required");
  c.lexicon = resolve(lexicon);
  read_field(j, "tokenizer", c.tokenizer, "config");
  read_field(j, "min_total_votes", c.min_total_votes, "config");
  read_field(j, "min_vote_ratio", c.min_vote_ratio, "config");
  read_field(j, "test_fraction", c.test_fraction, "config");
  if (j.contains("train")) {
    check_keys(j["train"], {"M1", "M2"}, "config.train");
    if (j["train"].contains("M1")) c.train_m1 = parse_train(j["train"]["M1"], "train.M1");
    if (j["train"].contains("M2")) c.train_m2 = parse_train(j["train"]["M2"], "train.M2");
  }
  read_field(j, "variance_threshold", c.variance_threshold, "config");
  read_field(j, "quorum", c.quorum, "config");
  read_field(j, "trace_length", c.trace_length, "config");
  read_field(j, "allow_self_steps", c.allow_self_steps, "config");
  std::string out = "out";
  read_field(j, "output_dir", out, "config");
  c.output_dir = resolve(out);
  read_field(j, "seed", c.seed, "config");
  read_field(j, "workers", c.workers, "config");
  c.config_sha256 = sha256_hex(json_text);
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_pipeline_config(text.str(), path.parent_path());
}

void apply_overrides(PipelineConfig& config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.output_dir) config.output_dir = *o.output_dir;
  if (o.quorum) config.quorum = *o.quorum;
  if (o.trace_length) config.trace_length = *o.trace_length;
  if (o.variance_threshold) config.variance_threshold = *o.variance_threshold;
}

RunResult run_pipeline(const PipelineConfig& config, std::ostream* log) {
  RunResult result;
  std::string stage = "config";
  const fs::path out = config.output_dir;
  bool out_ready = false;
  auto note = [&](const std::string& msg) {
    if (log) *log << msg << '\n';
  };

  try {
    config.validate();
    for (const char* sub : {"splits", "vocab", "checkpoints", "matrices", kReportsDir}) {
      fs::create_directories(out / sub);
    }
    out_ready = true;

    stage = "corpus";
    const auto lexicon = load_synonym_lexicon(config.lexicon);
    const auto tokenizer = whitespace_tokenizer();
    std::vector<TrainTestSplit> splits;
    for (std::size_t d = 0; d < config.datasets.size(); ++d) {
      const auto& ds = config.datasets[d];
      const auto raw = parse_corpus(ds.corpus, ds.kind);
      auto labeled = label_records(raw, config.min_total_votes, config.min_vote_ratio);
      splits.push_back(split_train_test(std::move(labeled.labeled), config.test_fraction,
                                        mix_seed(config.seed, 0x5711 + d)));
      const auto& s = splits.back();
      if (s.train.empty() || s.test.empty()) {
        throw DataError("dataset '" + ds.name + "' has an empty train or test split");
      }
      const auto path = out / "splits" / (ds.name + ".split.tsv");
      std::ostringstream text;
      write_split(text, s);
      write_text(path, text.str());
      result.artifacts.push_back(path);
      note(ds.name + ": " + std::to_string(raw.size()) + " records, " +
           std::to_string(labeled.discarded) + " discarded, " + std::to_string(s.train.size()) +
           " train / " + std::to_string(s.test.size()) + " test");
    }

    stage = "features";
    std::vector<EncodedDataset> encoded(config.datasets.size());
    for (std::size_t d = 0; d < config.datasets.size(); ++d) {
      const auto& ds = config.datasets[d];
      for (auto view : kAllViews) {
        const auto v = static_cast<std::size_t>(view);
        auto& e = encoded[d];
        e.vocab[v] = build_vocab(splits[d].train, view, tokenizer, &lexicon);
        e.train[v] = encode(splits[d].train, view, e.vocab[v], ds.pad_length[v], tokenizer, lexicon);
        e.test[v] = encode(splits[d].test, view, e.vocab[v], ds.pad_length[v], tokenizer, lexicon);
        std::string text;
        for (const auto& t : e.vocab[v].tokens()) text += t + '\n';
        const auto path = out / "vocab" / (ds.name + "." + std::string(view_name(view)) + ".vocab.txt");
        write_text(path, text);
        result.artifacts.push_back(path);
      }
    }

    stage = "train";
    std::vector<Job> jobs;
    for (std::size_t d = 0; d < config.datasets.size(); ++d) {
      for (auto view : kAllViews) {
        for (auto model : kAllVariants) jobs.push_back({d, view, model});
      }
    }
    std::vector<nn::TrainResult> trained(jobs.size());
    std::vector<nn::Evaluation> evals(jobs.size());
    parallel_for(jobs.size(), config.workers, [&](std::size_t i) {
      const auto& job = jobs[i];
      const auto v = static_cast<std::size_t>(job.view);
      const auto& e = encoded[job.dataset];
      nn::TrainConfig tc = job.model == ModelVariant::kM1 ? config.train_m1 : config.train_m2;
      tc.seed = mix_seed(config.seed, job.dataset * 16 + v * 2 + (job.model == ModelVariant::kM1 ? 0 : 1));
      trained[i] = nn::train(e.train[v], tc, job.model, e.vocab[v].size());
      evals[i] = nn::evaluate_confusion_counts(trained[i].params, e.test[v]);
    });

    stage = "evaluate";
    std::vector<std::vector<CorrelationMatrix>> matrices(config.datasets.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const auto& job = jobs[i];
      const auto& name = config.datasets[job.dataset].name;
      const auto base = stem(name, job.view, job.model);
      const auto ckpt = out / "checkpoints" / (base + ".ckpt");
      nn::save_checkpoint(ckpt, trained[i].params);
      result.artifacts.push_back(ckpt);

      std::ostringstream counts;
      write_counts_file(counts, name, job.view, job.model, evals[i].counts);
      const auto counts_path = out / "matrices" / (base + ".counts.tsv");
      write_text(counts_path, counts.str());
      result.artifacts.push_back(counts_path);

      const auto corr = row_normalize(evals[i].counts, job.view, job.model);
      std::ostringstream mtext;
      write_matrix_file(mtext, {name, corr});
      const auto matrix_path = out / "matrices" / (base + ".matrix.tsv");
      write_text(matrix_path, mtext.str());
      result.artifacts.push_back(matrix_path);
      matrices[job.dataset].push_back(corr);

      result.accuracy.push_back(
          {name, job.view, job.model, evals[i].accuracy, evals[i].predictions.size()});
      note(base + ": accuracy " + format_double(evals[i].accuracy) + ", final loss " +
           format_double(trained[i].epoch_loss.empty() ? 0.0 : trained[i].epoch_loss.back()));
    }
    const auto summary_path = out / "summary.tsv";
    write_text(summary_path, format_accuracy_table(result.accuracy));
    result.artifacts.push_back(summary_path);

    for (std::size_t d = 0; d < config.datasets.size(); ++d) {
      mine_into(result, config.datasets[d].name, matrices[d], config.variance_threshold,
                config.evolution_options(), stage);
    }

    stage = "reports";
    for (const auto& p : write_reports(out / kReportsDir, result.confusion, result.evolution,
                                       config.variance_threshold, config.evolution_options())) {
      result.artifacts.push_back(p);
    }
    write_manifest(out, config, result.artifacts, "", "");
  } catch (...) {
    const auto err = std::current_exception();
    const std::string msg = message_of(err);
    if (out_ready) {
      try {
        write_manifest(out, config, result.artifacts, stage, msg);
      } catch (const std::exception&) {
        // The original failure is the one worth reporting.
      }
    }
    throw StageFailure(stage, exit_code_for(err), msg);
  }
  return result;
}

std::string format_accuracy_table(const std::vector<AccuracyRow>& rows) {
  std::ostringstream out;
  out << "dataset\tfeature\tM1\tM2\n";
  std::vector<std::string> datasets;
  for (const auto& r : rows) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) {
      datasets.push_back(r.dataset);
    }
  }
  for (const auto& d : datasets) {
    for (auto view : kAllViews) {
      out << d << '\t' << view_name(view);
      for (auto model : kAllVariants) {
        out << '\t';
        bool found = false;
        for (const auto& r : rows) {
          if (r.dataset == d && r.feature == view && r.model == model) {
            out << std::fixed << std::setprecision(4) << r.accuracy;
            found = true;
          }
        }
        if (!found) out << '-';
      }
      out << '\n';
    }
  }
  return out.str();
}

RunResult run_mine(const std::vector<fs::path>& matrix_files, const MineOptions& options,
                   const fs::path& out_dir) {
  std::string stage = "input";
  RunResult result;
  try {
    if (matrix_files.size() != kNumBasePerspectives) {
      throw ConfigError("mine needs exactly 6 matrix files, got " +
                        std::to_string(matrix_files.size()));
    }
    if (!(options.variance_threshold > 0.0 && options.variance_threshold <= 1.0)) {
      throw ConfigError("variance_threshold must lie in (0, 1]");
    }
    const auto& evo = options.evolution;
    if (evo.quorum < 1 || evo.quorum > kNumBasePerspectives) {
      throw ConfigError("quorum must lie in [1, 6]");
    }
    if (evo.trace_steps < 1 || evo.trace_steps > kDefaultTraceSteps) {
      throw ConfigError("trace_length must lie in [1, 8]");
    }
    std::vector<CorrelationMatrix> matrices;
    std::string dataset;
    for (const auto& path : matrix_files) {
      auto file = read_matrix_file(path);
      if (matrices.empty()) {
        dataset = file.dataset;
      } else if (file.dataset != dataset) {
        throw ConfigError(path.string() + ": dataset '" + file.dataset + "' differs from '" +
                          dataset + "'");
      }
      matrices.push_back(file.matrix);
    }
    mine_into(result, dataset, matrices, options.variance_threshold, options.evolution, stage);
    stage = "reports";
    result.artifacts = write_reports(out_dir / kReportsDir, result.confusion, result.evolution,
                                     options.variance_threshold, options.evolution);
  } catch (const StageFailure&) {
    throw;
  } catch (...) {
    const auto err = std::current_exception();
    throw StageFailure(stage, exit_code_for(err), message_of(err));
  }
  return result;
}

}  // namespace emocorr
