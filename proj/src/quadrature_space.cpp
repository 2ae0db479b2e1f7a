#include "framedisc/quadrature_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "framedisc/errors.hpp"

namespace framedisc {

QuadratureSpace::QuadratureSpace(std::vector<std::vector<double>> points,
                                 std::vector<double> weights, std::size_t max_points)
    : points_(std::move(points)) {
  if (points_.empty()) throw ConfigError("quadrature space needs at least one point");
  if (points_.size() != weights.size())
    throw StructuralError("quadrature space: " + std::to_string(points_.size()) +
                          " points but " + std::to_string(weights.size()) + " weights");
  if (points_.size() > max_points)
    throw ConfigError("quadrature space: " + std::to_string(points_.size()) +
                      " points exceeds the cap of " + std::to_string(max_points));

  coord_dim_ = points_.front().size();
  if (coord_dim_ == 0) throw ConfigError("quadrature space: points need at least one coordinate");
  for (const auto& p : points_) {
    if (p.size() != coord_dim_)
      throw StructuralError("quadrature space: points have inconsistent dimensions");
    for (double c : p)
      if (!std::isfinite(c)) throw ConfigError("quadrature space: non-finite coordinate");
  }

  weights_.resize(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw ConfigError("quadrature space: weight " + std::to_string(i) +
                        " is not strictly positive");
    weights_(static_cast<Eigen::Index>(i)) = weights[i];
  }

  // Labels must be unique.
  std::vector<std::size_t> order(points_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points_[a] < points_[b]; });
  for (std::size_t k = 1; k < order.size(); ++k)
    if (points_[order[k]] == points_[order[k - 1]])
      throw ConfigError("quadrature space: duplicate point at indices " +
                        std::to_string(order[k - 1]) + " and " + std::to_string(order[k]));
}

bool QuadratureSpace::same_as(const QuadratureSpace& other) const {
  if (this == &other) return true;
  return points_ == other.points_ && weights_.size() == other.weights_.size() &&
         weights_ == other.weights_;
}

SpacePtr make_space(std::vector<std::vector<double>> points, std::vector<double> weights) {
  return std::make_shared<const QuadratureSpace>(std::move(points), std::move(weights));
}

SpacePtr uniform_line(std::size_t n, double spacing, double weight) {
  if (!(spacing > 0.0)) throw ConfigError("uniform_line: spacing must be positive");
  std::vector<std::vector<double>> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {static_cast<double>(i) * spacing};
  return make_space(std::move(pts), std::vector<double>(n, weight));
}

SpacePtr product_grid(std::size_t na, std::size_t nb, double ha, double hb, double weight) {
  if (!(ha > 0.0) || !(hb > 0.0)) throw ConfigError("product_grid: spacings must be positive");
  std::vector<std::vector<double>> pts;
  pts.reserve(na * nb);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b)
      pts.push_back({static_cast<double>(a) * ha, static_cast<double>(b) * hb});
  return make_space(std::move(pts), std::vector<double>(na * nb, weight));
}

void require_same_space(const QuadratureSpace& a, const QuadratureSpace& b, const char* what) {
  if (!a.same_as(b)) throw StructuralError(std::string(what) + ": operands live on different spaces");
}

void require_length(const QuadratureSpace& space, Eigen::Index length, const char* what) {
  if (length != static_cast<Eigen::Index>(space.size()))
    throw StructuralError(std::string(what) + ": length " + std::to_string(length) +
                          " does not match " + std::to_string(space.size()) + " grid points");
}

Complex integrate(const QuadratureSpace& space, const GridFunction& f) {
  require_length(space, f.size(), "integrate");
  Complex sum{0.0, 0.0};
  for (Eigen::Index i = 0; i < f.size(); ++i) sum += space.weights()(i) * f(i);
  return sum;
}

double integrate(const QuadratureSpace& space, const Eigen::VectorXd& f) {
  require_length(space, f.size(), "integrate");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) sum += space.weights()(i) * f(i);
  return sum;
}

double subset_measure(const QuadratureSpace& space, std::span<const std::size_t> subset) {
  double sum = 0.0;
  for (std::size_t idx : subset) {
    if (idx >= space.size())
      throw StructuralError("subset_measure: index " + std::to_string(idx) + " out of range");
    sum += space.weight(idx);
  }
  return sum;
}

}  // namespace framedisc
