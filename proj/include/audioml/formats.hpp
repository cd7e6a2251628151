// Small on-disk formats shared by the command line tools: a binary float32
// matrix container, headerless CSV matrices, per-item score tables, and PGM
// rendering for quick visual inspection of spectrograms.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "audioml/errors.hpp"

namespace audioml::formats {

// Whole-file text helpers. Throw IoError when the file cannot be read or
// written.
std::string read_file_text(const std::string& path);
void write_file_text(const std::string& path, const std::string& text);

// Binary matrix container: the 4 bytes "F32M", then rows and cols as
// little-endian uint32, then rows*cols little-endian float32 values in
// row-major order. The payload size must match the header exactly.
Eigen::MatrixXd read_f32m(const std::string& path);
void write_f32m(const std::string& path, const Eigen::MatrixXd& m);

// Headerless CSV matrix with one row per line. Values are written with %.9g
// (float32 round-trip precision); every row must have the same width.
Eigen::MatrixXd read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m);

// Extension dispatch: ".f32m" uses the binary container, ".csv" the text one.
// Anything else is a UsageError.
Eigen::MatrixXd read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);

// Scores for named items over named classes. Serialized as CSV with the
// header "id,<class>,<class>,...", one row per item.
struct ScoreTable {
  std::vector<std::string> ids;
  std::vector<std::string> class_names;
  Eigen::MatrixXd scores;  // ids.size() x class_names.size()
};

ScoreTable read_score_table(const std::string& path);
void write_score_table(const std::string& path, const ScoreTable& table);

// Binary PGM (P5, maxval 255). The input is a dB matrix with frequency bins
// as rows; values are clamped to the top 80 dB and mapped linearly to
// 0..255, and rows are flipped so low bins land at the bottom of the image.
void write_pgm(const std::string& path, const Eigen::MatrixXd& db);

// %.9g rendering used for all floating point text output.
std::string format_float(double v);

}  // namespace audioml::formats
