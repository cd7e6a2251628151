#include "audioml/formats.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace audioml::formats {

namespace {

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void append_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t pos = 0; pos <= line.size(); ++pos) {
    if (pos == line.size() || line[pos] == ',') {
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
  }
  return fields;
}

double parse_double(const std::string& token, const std::string& path,
                    std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path + " line " + std::to_string(line_no) +
                     ": not a number: '" + token + "'");
  }
}

}  // namespace

std::string read_file_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on " + path);
  return ss.str();
}

void write_file_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed on " + path);
}

Eigen::MatrixXd read_f32m(const std::string& path) {
  const std::string blob = read_file_text(path);
  if (blob.size() < 12 || blob.compare(0, 4, "F32M") != 0)
    throw ParseError(path + ": missing F32M header");
  const auto* p = reinterpret_cast<const unsigned char*>(blob.data());
  const std::uint64_t rows = read_u32_le(p + 4);
  const std::uint64_t cols = read_u32_le(p + 8);
  const std::uint64_t expected = 12 + 4 * rows * cols;
  if (blob.size() != expected)
    throw ParseError(path + ": payload is " + std::to_string(blob.size()) +
                     " bytes, header implies " + std::to_string(expected));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  const char* cursor = blob.data() + 12;
  for (std::uint64_t r = 0; r < rows; ++r)
    for (std::uint64_t c = 0; c < cols; ++c) {
      float v;
      std::memcpy(&v, cursor, 4);
      cursor += 4;
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  return m;
}

void write_f32m(const std::string& path, const Eigen::MatrixXd& m) {
  std::string blob = "F32M";
  append_u32_le(blob, static_cast<std::uint32_t>(m.rows()));
  append_u32_le(blob, static_cast<std::uint32_t>(m.cols()));
  blob.reserve(blob.size() + 4 * static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const float v = static_cast<float>(m(r, c));
      char bytes[4];
      std::memcpy(bytes, &v, 4);
      blob.append(bytes, 4);
    }
  write_file_text(path, blob);
}

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  const std::string text = read_file_text(path);
  std::stringstream ss(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& tok : split_csv_row(line))
      row.push_back(parse_double(tok, path, line_no));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(path + " line " + std::to_string(line_no) +
                       ": expected " + std::to_string(rows.front().size()) +
                       " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_float(m(r, c));
    }
    out += '\n';
  }
  write_file_text(path, out);
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  if (ends_with(path, ".f32m")) return read_f32m(path);
  if (ends_with(path, ".csv")) return read_csv_matrix(path);
  throw UsageError("unsupported matrix extension on " + path +
                   " (expected .f32m or .csv)");
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  if (ends_with(path, ".f32m")) {
    write_f32m(path, m);
  } else if (ends_with(path, ".csv")) {
    write_csv_matrix(path, m);
  } else {
    throw UsageError("unsupported matrix extension on " + path +
                     " (expected .f32m or .csv)");
  }
}

ScoreTable read_score_table(const std::string& path) {
  const std::string text = read_file_text(path);
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  ScoreTable table;
  std::vector<std::vector<double>> rows;
  while (std::getline(ss, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_row(line);
    if (line_no == 1) {
      if (fields.size() < 2 || fields[0] != "id")
        throw ParseError(path + ": header must be id,<class>,...");
      table.class_names.assign(fields.begin() + 1, fields.end());
      continue;
    }
    if (fields.size() != table.class_names.size() + 1)
      throw ParseError(path + " line " + std::to_string(line_no) +
                       ": expected " +
                       std::to_string(table.class_names.size() + 1) +
                       " fields, got " + std::to_string(fields.size()));
    table.ids.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i)
      row.push_back(parse_double(fields[i], path, line_no));
    rows.push_back(std::move(row));
  }
  if (table.class_names.empty())
    throw ParseError(path + ": missing header row");
  table.scores.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.class_names.size()));
  for (Eigen::Index r = 0; r < table.scores.rows(); ++r)
    for (Eigen::Index c = 0; c < table.scores.cols(); ++c)
      table.scores(r, c) =
          rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return table;
}

void write_score_table(const std::string& path, const ScoreTable& table) {
  if (table.scores.rows() != static_cast<Eigen::Index>(table.ids.size()) ||
      table.scores.cols() !=
          static_cast<Eigen::Index>(table.class_names.size()))
    throw ValueError("score table: shape does not match ids/class names");
  std::string out = "id";
  for (const auto& name : table.class_names) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (Eigen::Index r = 0; r < table.scores.rows(); ++r) {
    out += table.ids[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < table.scores.cols(); ++c) {
      out += ',';
      out += format_float(table.scores(r, c));
    }
    out += '\n';
  }
  write_file_text(path, out);
}

void write_pgm(const std::string& path, const Eigen::MatrixXd& db) {
  if (db.size() == 0) throw ValueError("write_pgm: empty matrix");
  const double hi = db.maxCoeff();
  const double lo = hi - 80.0;
  std::string out = "P5\n" + std::to_string(db.cols()) + " " +
                    std::to_string(db.rows()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(db.size()));
  // Row 0 of the matrix is the lowest bin; write it last so it sits at the
  // bottom of the image.
  for (Eigen::Index r = db.rows(); r-- > 0;)
    for (Eigen::Index c = 0; c < db.cols(); ++c) {
      const double clamped = std::clamp(db(r, c), lo, hi);
      const double unit = (hi > lo) ? (clamped - lo) / (hi - lo) : 0.0;
      out.push_back(static_cast<char>(
          static_cast<unsigned char>(std::lround(unit * 255.0))));
    }
  write_file_text(path, out);
}

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace audioml::formats
