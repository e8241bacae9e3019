#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sica::csv {

// Headerless comma-separated decimals. Dimensions are inferred; every row
// must have the same number of fields. Blank lines are skipped. Parse
// failures throw ParseError naming the 1-based line.
Eigen::MatrixXd parse_matrix(std::istream& in, const std::string& source = "<stream>");
Eigen::MatrixXd read_matrix(const std::string& path);

// A vector may be stored as one column or as one row.
Eigen::VectorXd read_vector(const std::string& path);

// As parse_matrix but the first line may be a header of names.
Eigen::MatrixXd read_matrix_with_header(const std::string& path, std::vector<std::string>* header);

std::string format_double(double v);

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);
void write_vector(std::ostream& out, const Eigen::VectorXd& v);
void write_vector(const std::string& path, const Eigen::VectorXd& v);

}  // namespace sica::csv
