#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "framedisc/quadrature_space.hpp"

namespace framedisc {

// Symmetric positive weight m on X x X together with a reference point z
// and its trace v(x) = m(x, z).
class Weight2D {
 public:
  // m == 1 everywhere.
  static Weight2D constant_one(SpacePtr space);

  // The weight associated with a 1-D weight w:
  //   m(x, y) = max{w(x)/w(y), w(y)/w(x)}.
  static Weight2D associated(SpacePtr space, const Eigen::VectorXd& w, std::size_t reference = 0);

  // Arbitrary dense table; must be finite, positive and exactly symmetric.
  static Weight2D from_matrix(SpacePtr space, Eigen::MatrixXd m, std::size_t reference = 0);

  double operator()(std::size_t x, std::size_t y) const {
    return m_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  const Eigen::MatrixXd& matrix() const { return m_; }
  const Eigen::VectorXd& v() const { return v_; }
  std::size_t reference_point() const { return reference_; }
  bool is_trivial() const { return trivial_; }

  const QuadratureSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

 private:
  Weight2D(SpacePtr space, Eigen::MatrixXd m, std::size_t reference, bool trivial);

  SpacePtr space_;
  Eigen::MatrixXd m_;
  Eigen::VectorXd v_;
  std::size_t reference_ = 0;
  bool trivial_ = false;
};

// A complex kernel K(x, y) on a quadrature space, stored densely.  Acting on
// functions it integrates against the quadrature weights:
//   (K f)(x) = sum_y w_y K(x, y) f(y).
class Kernel {
 public:
  Kernel(SpacePtr space, Eigen::MatrixXcd entries);

  static Kernel zero(SpacePtr space);
  // delta_{x=y} / w_x, the unit of composition.
  static Kernel identity(SpacePtr space);
  // chi_U(x) chi_V(y).
  static Kernel indicator(SpacePtr space, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols);

  std::size_t size() const { return space_->size(); }
  Complex operator()(std::size_t x, std::size_t y) const {
    return entries_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  // True only for kernels made by identity(); apply and compose then
  // return their other argument unchanged instead of multiplying by
  // w_x / w_x, which need not round to 1.
  bool is_identity() const { return identity_; }
  const QuadratureSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

  // Entry-wise modulus |K|.
  Kernel abs() const;

  Kernel operator+(const Kernel& other) const;
  Kernel operator-(const Kernel& other) const;
  Kernel operator*(Complex scale) const;

 private:
  SpacePtr space_;
  Eigen::MatrixXcd entries_;
  bool identity_ = false;
};

// Sum_i lambda_i eps_{x_i}.  Duplicate atoms are allowed; their
// coefficients add.
struct Atom {
  std::size_t index;
  Complex coefficient;
};

class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

  void add(std::size_t index, Complex coefficient) { atoms_.push_back({index, coefficient}); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }

  // Coefficients accumulated per grid point; throws StructuralError for
  // atoms off the grid.
  GridFunction dense(std::size_t n_points) const;

 private:
  std::vector<Atom> atoms_;
};

// Weighted Schur norm on A_m: the larger of
//   sup_x sum_y w_y |K(x,y)| m(x,y)   and   sup_y sum_x w_x |K(x,y)| m(x,y).
double schur_norm(const Kernel& kernel, const Weight2D& weight);

// Row and column Schur integrals separately (same order as schur_norm).
struct SchurSides {
  double rows = 0.0;
  double cols = 0.0;
};
SchurSides schur_sides(const Kernel& kernel, const Weight2D& weight);

GridFunction apply(const Kernel& kernel, const GridFunction& f);
// (K nu)(x) = sum_i lambda_i K(x, x_i); no quadrature weights on atoms.
GridFunction apply_measure(const Kernel& kernel, const DiscreteMeasure& nu);
// (K1 o K2)(x, y) = sum_z w_z K1(x, z) K2(z, y).
Kernel compose(const Kernel& k1, const Kernel& k2);
// K*(x, y) = conj(K(y, x)).
Kernel involution(const Kernel& kernel);

}  // namespace framedisc
