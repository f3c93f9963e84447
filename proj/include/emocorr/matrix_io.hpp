#ifndef EMOCORR_MATRIX_IO_HPP
#define EMOCORR_MATRIX_IO_HPP

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "emocorr/confusion.hpp"
#include "emocorr/emotion.hpp"

namespace emocorr {

// Matrix files are UTF-8 text:
//
//   # emocorr matrix v1
//   dataset<TAB>comment
//   feature<TAB>character
//   model<TAB>M1
//   kind<TAB>correlation        (or counts)
//   six lines of six TAB-separated values, row = true emotion
//
// Correlation values use the shortest decimal form that reads back to the
// identical double, so write/read round trips are exact.
struct MatrixFile {
  std::string dataset;
  CorrelationMatrix matrix;
};

void write_matrix_file(std::ostream& out, const MatrixFile& file);
void write_matrix_file(const std::filesystem::path& path, const MatrixFile& file);
void write_counts_file(std::ostream& out, const std::string& dataset, FeatureView feature,
                       ModelVariant model, const CountMatrix& counts);

// Reads a correlation matrix file and checks every row sums to 1 within 1e-6.
MatrixFile read_matrix_file(std::istream& in);
MatrixFile read_matrix_file(const std::filesystem::path& path);

// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace emocorr

#endif  // EMOCORR_MATRIX_IO_HPP
