// SPDX-License-Identifier: Apache-2.0
#include "kbgen/inference/attention_dump.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "kbgen/errors.hpp"

namespace kbgen::inference {

namespace {

void put_field(std::ostream& out, const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

std::string format_real(double x) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(len));
}

// One CSV record; quoted fields may span lines.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (quoted) throw DataError("unterminated quoted CSV field");
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

double parse_real(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError("bad number in CSV: '" + s + "'");
  return v;
}

std::vector<std::string> labels(const model::ModelInput& in) { return in.labels; }

}  // namespace

void write_csv(std::ostream& out, const LabeledMatrix& m) {
  const bool row_labeled = !m.row_labels.empty();
  if (row_labeled && static_cast<Eigen::Index>(m.row_labels.size()) != m.values.rows()) {
    throw ShapeError("row labels do not match matrix rows");
  }
  if (static_cast<Eigen::Index>(m.col_labels.size()) != m.values.cols()) {
    throw ShapeError("column labels do not match matrix columns");
  }
  bool first = !row_labeled;  // leading empty cell above the row labels
  for (const auto& l : m.col_labels) {
    if (!first) out << ',';
    put_field(out, l);
    first = false;
  }
  out << '\n';
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
    if (row_labeled) {
      put_field(out, m.row_labels[static_cast<std::size_t>(r)]);
      out << ',';
    }
    for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
      if (c) out << ',';
      out << format_real(m.values(r, c));
    }
    out << '\n';
  }
}

LabeledMatrix read_csv(std::istream& in, bool row_labeled) {
  LabeledMatrix m;
  std::vector<std::string> fields;
  if (!read_record(in, fields)) throw DataError("empty CSV");
  const std::size_t skip = row_labeled ? 1 : 0;
  if (fields.size() < skip) throw DataError("CSV header too short");
  m.col_labels.assign(fields.begin() + static_cast<std::ptrdiff_t>(skip), fields.end());
  std::vector<std::vector<double>> rows;
  while (read_record(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != m.col_labels.size() + skip) {
      throw DataError("CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(m.col_labels.size() + skip));
    }
    if (row_labeled) m.row_labels.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t i = skip; i < fields.size(); ++i) row.push_back(parse_real(fields[i]));
    rows.push_back(std::move(row));
  }
  m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m.col_labels.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

LabeledMatrix read_csv(const std::filesystem::path& path, bool row_labeled) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in, row_labeled);
}

LabeledMatrix attention_table(const std::vector<StepTrace>& trace, const model::ModelInput& in) {
  LabeledMatrix m;
  m.col_labels = labels(in);
  m.values.resize(static_cast<Eigen::Index>(trace.size()), in.size());
  for (std::size_t t = 0; t < trace.size(); ++t) {
    if (trace[t].alpha.size() != in.size()) throw ShapeError("trace alpha length differs from the input");
    m.values.row(static_cast<Eigen::Index>(t)) = trace[t].alpha.transpose();
  }
  return m;
}

LabeledMatrix position_table(const model::Mat& F, const model::ModelInput& in) {
  if (F.rows() != in.size() || F.cols() != in.size()) throw ShapeError("F has shape " + numkit::shape_of(F));
  return {labels(in), labels(in), F};
}

AttentionFiles dump_attention(const std::vector<StepTrace>& trace, const model::Mat& F, const model::ModelInput& in,
                              const std::filesystem::path& stem) {
  auto write = [](const std::filesystem::path& path, const LabeledMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv(out, m);
    if (!out) throw IoError("write failed: " + path.string());
  };
  AttentionFiles files;
  files.alpha = stem;
  files.alpha += ".alpha.csv";
  write(files.alpha, attention_table(trace, in));
  if (F.size() > 0) {
    files.position = stem;
    files.position += ".F.csv";
    write(files.position, position_table(F, in));
  }
  return files;
}

}  // namespace kbgen::inference
