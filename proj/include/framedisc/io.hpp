#pragma once

#include <string>

#include <Eigen/Dense>

#include "json.hpp"

#include "framedisc/coverings.hpp"
#include "framedisc/kernel_algebra.hpp"
#include "framedisc/quadrature_space.hpp"

namespace framedisc {

using Json = nlohmann::json;

// {"points": [[...], ...], "weights": [...]}
Json space_to_json(const QuadratureSpace& space);
SpacePtr space_from_json(const Json& doc);

// {"sets": [[indices], ...]}
Json covering_to_json(const Covering& cov);
Covering covering_from_json(const Json& doc, SpacePtr space);

// {"n": n, "re": [[...]], "im": [[...]]}, rows indexed by x.
Json kernel_to_json(const Kernel& kernel);
Kernel kernel_from_json(const Json& doc, SpacePtr space);

// Flat row-major (re, im) pairs of little-endian IEEE doubles, no header.
void write_matrix_binary(const std::string& path, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_matrix_binary(const std::string& path, Eigen::Index rows, Eigen::Index cols);
void write_kernel_binary(const std::string& path, const Kernel& kernel);
Kernel read_kernel_binary(const std::string& path, SpacePtr space);

// Parse failures and unreadable files raise ConfigError.
Json read_json_file(const std::string& path);
// Two-space indentation and a trailing newline.
void write_json_file(const std::string& path, const Json& doc);

}  // namespace framedisc
