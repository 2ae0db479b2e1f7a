#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace framedisc {

using Complex = std::complex<double>;

// One complex value per grid point.  Functions whose role is real
// (weights, partitions of unity) use Eigen::VectorXd instead.
using GridFunction = Eigen::VectorXcd;

// Default cap on the number of grid points; dense kernels are O(n^2) in
// memory and composition is O(n^3).
inline constexpr std::size_t kDefaultMaxPoints = 4096;

// A finite weighted point set standing in for a measure space (X, mu).
//
// Points carry real coordinate tuples of a common dimension; their order is
// the index order used everywhere else.  Weights are strictly positive.
// Instances are immutable and shared through SpacePtr.
class QuadratureSpace {
 public:
  QuadratureSpace(std::vector<std::vector<double>> points,
                  std::vector<double> weights,
                  std::size_t max_points = kDefaultMaxPoints);

  std::size_t size() const { return weights_.size(); }
  std::size_t coordinate_dim() const { return coord_dim_; }

  const std::vector<double>& point(std::size_t i) const { return points_.at(i); }
  const std::vector<std::vector<double>>& points() const { return points_; }

  double weight(std::size_t i) const { return weights_(static_cast<Eigen::Index>(i)); }
  const Eigen::VectorXd& weights() const { return weights_; }

  // Structural equality: same coordinates and same weights.
  bool same_as(const QuadratureSpace& other) const;

 private:
  std::vector<std::vector<double>> points_;
  Eigen::VectorXd weights_;
  std::size_t coord_dim_ = 0;
};

using SpacePtr = std::shared_ptr<const QuadratureSpace>;

SpacePtr make_space(std::vector<std::vector<double>> points, std::vector<double> weights);

// n points 0, h, 2h, ... on a line, each with weight `weight`.
SpacePtr uniform_line(std::size_t n, double spacing = 1.0, double weight = 1.0);

// Row-major product grid: point (a, b) has index a * nb + b and
// coordinates (a * ha, b * hb).
SpacePtr product_grid(std::size_t na, std::size_t nb, double ha = 1.0, double hb = 1.0,
                      double weight = 1.0);

// Throws StructuralError unless both sides describe the same grid.
void require_same_space(const QuadratureSpace& a, const QuadratureSpace& b, const char* what);
void require_length(const QuadratureSpace& space, Eigen::Index length, const char* what);

// Sum_x weight(x) f(x), accumulated in index order.
Complex integrate(const QuadratureSpace& space, const GridFunction& f);
double integrate(const QuadratureSpace& space, const Eigen::VectorXd& f);

// mu(U) for a set of point indices.
double subset_measure(const QuadratureSpace& space, std::span<const std::size_t> subset);

}  // namespace framedisc
