#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "emocorr/synthetic.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic corpus, synonym lexicon and pipeline config"};
  std::string out = "synthetic";
  emocorr::SyntheticOptions opts;
  bool separable = false;
  std::size_t epochs = 30;
  app.add_option("--out", out, "Destination directory");
  app.add_option("--records", opts.records_per_emotion, "Texts per emotion");
  app.add_option("--swap", opts.love_anger_swap, "Love/anger vote swap rate");
  app.add_option("--noise", opts.label_noise, "Uniform vote noise rate");
  app.add_option("--seed", opts.seed, "Generator seed");
  app.add_option("--epochs", epochs, "Training epochs written to the config");
  app.add_flag("--separable", separable, "One marker word decides the label");
  CLI11_PARSE(app, argc, argv);

  const auto corpus = separable
                          ? emocorr::generate_separable_corpus(opts.records_per_emotion, 6, opts.seed)
                          : emocorr::generate_synthetic_corpus(opts);
  fs::create_directories(out);
  {
    std::ofstream f(fs::path(out) / "corpus.tsv");
    emocorr::write_corpus(f, corpus.records);
  }
  {
    std::ofstream f(fs::path(out) / "lexicon.tsv");
    emocorr::write_lexicon(f, corpus);
  }
  nlohmann::ordered_json train = {{"learning_rate", 0.5}, {"epochs", epochs}, {"batch_size", 8},
                                  {"embedding", 12},      {"conv", 12},       {"hidden1", 12},
                                  {"hidden2", 12}};
  nlohmann::ordered_json config = {
      {"datasets",
       {{{"name", "comment"},
         {"kind", "comment"},
         {"corpus", "corpus.tsv"},
         {"pad_length", {{"character", 40}, {"implicit", 8}, {"explicit", 8}}}}}},
      {"lexicon", "lexicon.tsv"},
      {"test_fraction", 0.25},
      {"train", {{"M1", train}, {"M2", train}}},
      {"variance_threshold", 0.85},
      {"quorum", 2},
      {"trace_length", 8},
      {"output_dir", "out"},
      {"seed", opts.seed}};
  std::ofstream(fs::path(out) / "config.json") << config.dump(2) << '\n';
  std::cout << "wrote " << corpus.records.size() << " records to " << out << '\n';
  return 0;
}
