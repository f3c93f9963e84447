#include "emocorr/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "emocorr/errors.hpp"

namespace emocorr {

namespace {

constexpr std::string_view kHeader = "# emocorr matrix v1";

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos ? tab : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

void write_header(std::ostream& out, const std::string& dataset, FeatureView feature,
                  ModelVariant model, std::string_view kind) {
  out << kHeader << '\n'
      << "dataset\t" << dataset << '\n'
      << "feature\t" << view_name(feature) << '\n'
      << "model\t" << variant_name(model) << '\n'
      << "kind\t" << kind << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw DataError("cannot format number");
  return std::string(buf, ptr);
}

void write_matrix_file(std::ostream& out, const MatrixFile& file) {
  write_header(out, file.dataset, file.matrix.feature, file.matrix.model, "correlation");
  for (const auto& row : file.matrix.values) {
    for (std::size_t c = 0; c < kNumEmotions; ++c) out << (c ? "\t" : "") << format_double(row[c]);
    out << '\n';
  }
}

void write_matrix_file(const std::filesystem::path& path, const MatrixFile& file) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_matrix_file(out, file);
}

void write_counts_file(std::ostream& out, const std::string& dataset, FeatureView feature,
                       ModelVariant model, const CountMatrix& counts) {
  write_header(out, dataset, feature, model, "counts");
  for (const auto& row : counts) {
    for (std::size_t c = 0; c < kNumEmotions; ++c) out << (c ? "\t" : "") << row[c];
    out << '\n';
  }
}

MatrixFile read_matrix_file(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };

  if (!next() || line != kHeader) throw ParseError(line_no, "missing '# emocorr matrix v1' header");
  std::map<std::string, std::string, std::less<>> fields;
  for (const char* key : {"dataset", "feature", "model", "kind"}) {
    if (!next()) throw ParseError(line_no, std::string("missing ") + key + " field");
    const auto parts = split_tabs(line);
    if (parts.size() != 2 || parts[0] != key) {
      throw ParseError(line_no, std::string("expected ") + key + "<TAB>value");
    }
    fields[key] = std::string(parts[1]);
  }
  if (fields["kind"] != "correlation") {
    throw ParseError(line_no, "kind must be 'correlation', got '" + fields["kind"] + "'");
  }
  MatrixFile file;
  file.dataset = fields["dataset"];
  const auto feature = view_from_name(fields["feature"]);
  if (!feature) throw ParseError(3, "unknown feature '" + fields["feature"] + "'");
  const auto model = variant_from_name(fields["model"]);
  if (!model) throw ParseError(4, "unknown model '" + fields["model"] + "'");
  file.matrix.feature = *feature;
  file.matrix.model = *model;

  for (std::size_t r = 0; r < kNumEmotions; ++r) {
    if (!next()) throw ParseError(line_no, "expected 6 matrix rows");
    const auto parts = split_tabs(line);
    if (parts.size() != kNumEmotions) throw ParseError(line_no, "expected 6 values per row");
    for (std::size_t c = 0; c < kNumEmotions; ++c) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(parts[c].data(), parts[c].data() + parts[c].size(), v);
      if (ec != std::errc() || ptr != parts[c].data() + parts[c].size()) {
        throw ParseError(line_no, "'" + std::string(parts[c]) + "' is not a number");
      }
      file.matrix.values[r][c] = v;
    }
  }
  check_row_stochastic(file.matrix.values, 1e-6);
  return file;
}

MatrixFile read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file " + path.string());
  try {
    return read_matrix_file(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace emocorr
