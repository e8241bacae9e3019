#include "sica/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sica/errors.hpp"

namespace sica::csv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& field, double* value) {
  if (field.empty()) return false;
  errno = 0;
  char* end = nullptr;
  *value = std::strtod(field.c_str(), &end);
  return errno == 0 && end == field.c_str() + field.size() && std::isfinite(*value);
}

Eigen::MatrixXd parse_lines(std::istream& in, const std::string& source, bool allow_header,
                            std::vector<std::string>* header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    std::vector<double> row(fields.size());
    bool ok = true;
    for (std::size_t k = 0; k < fields.size() && ok; ++k) ok = parse_number(fields[k], &row[k]);
    if (!ok) {
      if (allow_header && first_content) {
        if (header) *header = fields;
        first_content = false;
        continue;
      }
      throw ParseError(source + ":" + std::to_string(line_no) + ": cannot parse '" + line + "'");
    }
    first_content = false;
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(width) + " fields, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source + ": no numeric rows");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return in;
}

}  // namespace

Eigen::MatrixXd parse_matrix(std::istream& in, const std::string& source) {
  return parse_lines(in, source, false, nullptr);
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  auto in = open_input(path);
  return parse_matrix(in, path);
}

Eigen::VectorXd read_vector(const std::string& path) {
  const Eigen::MatrixXd m = read_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ParseError(path + ": expected a single row or column, found " + std::to_string(m.rows()) +
                   "x" + std::to_string(m.cols()));
}

Eigen::MatrixXd read_matrix_with_header(const std::string& path,
                                        std::vector<std::string>* header) {
  auto in = open_input(path);
  return parse_lines(in, path, true, header);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  write_matrix(out, m);
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  write_matrix(out, Eigen::MatrixXd(v));
}

void write_vector(const std::string& path, const Eigen::VectorXd& v) {
  write_matrix(path, Eigen::MatrixXd(v));
}

}  // namespace sica::csv
