#include "framedisc/io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "framedisc/errors.hpp"

namespace framedisc {

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffU) << (8 * (7 - b));
    return r;
  }
  return v;
}

void put_double(std::ostream& out, double x) {
  const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(x));
  out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

double get_double(std::istream& in) {
  std::uint64_t bits = 0;
  in.read(reinterpret_cast<char*>(&bits), sizeof bits);
  return std::bit_cast<double>(to_little_endian(bits));
}

}  // namespace

Json space_to_json(const QuadratureSpace& space) {
  Json points = Json::array();
  for (const auto& p : space.points()) points.push_back(p);
  std::vector<double> w(space.weights().data(), space.weights().data() + space.size());
  return Json{{"points", std::move(points)}, {"weights", std::move(w)}};
}

SpacePtr space_from_json(const Json& doc) {
  try {
    auto points = doc.at("points").get<std::vector<std::vector<double>>>();
    auto weights = doc.at("weights").get<std::vector<double>>();
    return make_space(std::move(points), std::move(weights));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("space_from_json: ") + e.what());
  }
}

Json covering_to_json(const Covering& cov) { return Json{{"sets", cov.sets()}}; }

Covering covering_from_json(const Json& doc, SpacePtr space) {
  try {
    return Covering(std::move(space), doc.at("sets").get<std::vector<IndexSet>>());
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("covering_from_json: ") + e.what());
  }
}

Json kernel_to_json(const Kernel& kernel) {
  const auto& k = kernel.entries();
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index x = 0; x < k.rows(); ++x) {
    std::vector<double> r(static_cast<std::size_t>(k.cols())), i(r.size());
    for (Eigen::Index y = 0; y < k.cols(); ++y) {
      r[static_cast<std::size_t>(y)] = k(x, y).real();
      i[static_cast<std::size_t>(y)] = k(x, y).imag();
    }
    re.push_back(std::move(r));
    im.push_back(std::move(i));
  }
  return Json{{"n", k.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Kernel kernel_from_json(const Json& doc, SpacePtr space) {
  try {
    const auto re = doc.at("re").get<std::vector<std::vector<double>>>();
    const auto im = doc.at("im").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(re.size());
    if (im.size() != re.size()) throw StructuralError("kernel_from_json: re/im row count differs");
    Eigen::MatrixXcd k(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
      const auto& r = re[static_cast<std::size_t>(x)];
      const auto& i = im[static_cast<std::size_t>(x)];
      if (static_cast<Eigen::Index>(r.size()) != n || i.size() != r.size())
        throw StructuralError("kernel_from_json: rows must have length n");
      for (Eigen::Index y = 0; y < n; ++y)
        k(x, y) = Complex(r[static_cast<std::size_t>(y)], i[static_cast<std::size_t>(y)]);
    }
    return Kernel(std::move(space), std::move(k));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("kernel_from_json: ") + e.what());
  }
}

void write_matrix_binary(const std::string& path, const Eigen::MatrixXcd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("write_matrix_binary: cannot open " + path);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_double(out, m(r, c).real());
      put_double(out, m(r, c).imag());
    }
  if (!out) throw ConfigError("write_matrix_binary: write failed for " + path);
}

Eigen::MatrixXcd read_matrix_binary(const std::string& path, Eigen::Index rows, Eigen::Index cols) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw ConfigError("read_matrix_binary: cannot open " + path);
  const auto bytes = static_cast<std::int64_t>(in.tellg());
  if (bytes != static_cast<std::int64_t>(rows * cols * 16))
    throw StructuralError("read_matrix_binary: " + path + " holds " + std::to_string(bytes) +
                          " bytes, expected " + std::to_string(rows * cols * 16));
  in.seekg(0);
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double re = get_double(in);
      const double im = get_double(in);
      m(r, c) = Complex(re, im);
    }
  return m;
}

void write_kernel_binary(const std::string& path, const Kernel& kernel) {
  write_matrix_binary(path, kernel.entries());
}

Kernel read_kernel_binary(const std::string& path, SpacePtr space) {
  const auto n = static_cast<Eigen::Index>(space->size());
  return Kernel(std::move(space), read_matrix_binary(path, n, n));
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace framedisc
