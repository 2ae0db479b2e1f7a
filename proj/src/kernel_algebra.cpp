#include "framedisc/kernel_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "framedisc/errors.hpp"

namespace framedisc {

namespace {

Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_index(const QuadratureSpace& space, std::size_t i, const char* what) {
  if (i >= space.size())
    throw StructuralError(std::string(what) + ": point index " + std::to_string(i) +
                          " is off the grid");
}

}  // namespace

// ---------------------------------------------------------------------------
// Weight2D

Weight2D::Weight2D(SpacePtr space, Eigen::MatrixXd m, std::size_t reference, bool trivial)
    : space_(std::move(space)), m_(std::move(m)), reference_(reference), trivial_(trivial) {
  require_index(*space_, reference_, "Weight2D");
  v_ = m_.col(as_index(reference_));
}

Weight2D Weight2D::constant_one(SpacePtr space) {
  const auto n = as_index(space->size());
  return Weight2D(std::move(space), Eigen::MatrixXd::Ones(n, n), 0, true);
}

Weight2D Weight2D::associated(SpacePtr space, const Eigen::VectorXd& w, std::size_t reference) {
  require_length(*space, w.size(), "Weight2D::associated");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!(w(i) > 0.0) || !std::isfinite(w(i)))
      throw ConfigError("Weight2D::associated: weight must be positive and finite");
  const auto n = w.size();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index y = 0; y < n; ++y)
    for (Eigen::Index x = 0; x < n; ++x) m(x, y) = std::max(w(x) / w(y), w(y) / w(x));
  const bool trivial = (m.array() == 1.0).all();
  return Weight2D(std::move(space), std::move(m), reference, trivial);
}

Weight2D Weight2D::from_matrix(SpacePtr space, Eigen::MatrixXd m, std::size_t reference) {
  const auto n = as_index(space->size());
  if (m.rows() != n || m.cols() != n) throw StructuralError("Weight2D: matrix shape mismatch");
  for (Eigen::Index y = 0; y < n; ++y)
    for (Eigen::Index x = 0; x < n; ++x) {
      if (!(m(x, y) > 0.0) || !std::isfinite(m(x, y)))
        throw ConfigError("Weight2D: entries must be positive and finite");
      if (m(x, y) != m(y, x)) throw ConfigError("Weight2D: matrix must be symmetric");
    }
  const bool trivial = (m.array() == 1.0).all();
  return Weight2D(std::move(space), std::move(m), reference, trivial);
}

// ---------------------------------------------------------------------------
// Kernel

Kernel::Kernel(SpacePtr space, Eigen::MatrixXcd entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  const auto n = as_index(space_->size());
  if (entries_.rows() != n || entries_.cols() != n)
    throw StructuralError("Kernel: expected " + std::to_string(n) + "x" + std::to_string(n) +
                          " entries, got " + std::to_string(entries_.rows()) + "x" +
                          std::to_string(entries_.cols()));
  if (!entries_.allFinite()) throw StructuralError("Kernel: non-finite entry");
}

Kernel Kernel::zero(SpacePtr space) {
  const auto n = as_index(space->size());
  return Kernel(std::move(space), Eigen::MatrixXcd::Zero(n, n));
}

Kernel Kernel::identity(SpacePtr space) {
  const auto n = as_index(space->size());
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) e(i, i) = 1.0 / space->weights()(i);
  Kernel k(std::move(space), std::move(e));
  k.identity_ = true;
  return k;
}

Kernel Kernel::indicator(SpacePtr space, const std::vector<std::size_t>& rows,
                         const std::vector<std::size_t>& cols) {
  const auto n = as_index(space->size());
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
  for (auto x : rows) {
    require_index(*space, x, "Kernel::indicator");
    for (auto y : cols) {
      require_index(*space, y, "Kernel::indicator");
      e(as_index(x), as_index(y)) = 1.0;
    }
  }
  return Kernel(std::move(space), std::move(e));
}

Kernel Kernel::abs() const {
  return Kernel(space_, entries_.cwiseAbs().cast<Complex>());
}

Kernel Kernel::operator+(const Kernel& other) const {
  require_same_space(*space_, other.space(), "Kernel::operator+");
  return Kernel(space_, entries_ + other.entries_);
}

Kernel Kernel::operator-(const Kernel& other) const {
  require_same_space(*space_, other.space(), "Kernel::operator-");
  return Kernel(space_, entries_ - other.entries_);
}

Kernel Kernel::operator*(Complex scale) const { return Kernel(space_, entries_ * scale); }

GridFunction DiscreteMeasure::dense(std::size_t n_points) const {
  GridFunction out = GridFunction::Zero(as_index(n_points));
  for (const auto& a : atoms_) {
    if (a.index >= n_points)
      throw StructuralError("DiscreteMeasure: atom at index " + std::to_string(a.index) +
                            " is off the grid");
    out(as_index(a.index)) += a.coefficient;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Algebra

SchurSides schur_sides(const Kernel& kernel, const Weight2D& weight) {
  require_same_space(kernel.space(), weight.space(), "schur_norm");
  const auto& k = kernel.entries();
  const auto& m = weight.matrix();
  const auto& w = kernel.space().weights();
  const Eigen::Index n = k.rows();

  // Both sides accumulate in plain index order so that the norm of K and
  // of its involution agree bit for bit when m is symmetric.
  SchurSides s;
  for (Eigen::Index x = 0; x < n; ++x) {
    double row = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) row += w(y) * std::abs(k(x, y)) * m(x, y);
    s.rows = std::max(s.rows, row);
  }
  for (Eigen::Index y = 0; y < n; ++y) {
    double col = 0.0;
    for (Eigen::Index x = 0; x < n; ++x) col += w(x) * std::abs(k(x, y)) * m(x, y);
    s.cols = std::max(s.cols, col);
  }
  return s;
}

double schur_norm(const Kernel& kernel, const Weight2D& weight) {
  const auto s = schur_sides(kernel, weight);
  return std::max(s.rows, s.cols);
}

GridFunction apply(const Kernel& kernel, const GridFunction& f) {
  require_length(kernel.space(), f.size(), "apply");
  if (kernel.is_identity()) return f;
  const GridFunction weighted = kernel.space().weights().cast<Complex>().cwiseProduct(f);
  return kernel.entries() * weighted;
}

GridFunction apply_measure(const Kernel& kernel, const DiscreteMeasure& nu) {
  const auto n = as_index(kernel.size());
  GridFunction out = GridFunction::Zero(n);
  for (const auto& a : nu.atoms()) {
    require_index(kernel.space(), a.index, "apply_measure");
    out += a.coefficient * kernel.entries().col(as_index(a.index));
  }
  return out;
}

Kernel compose(const Kernel& k1, const Kernel& k2) {
  require_same_space(k1.space(), k2.space(), "compose");
  if (k1.is_identity()) return Kernel(k1.space_ptr(), k2.entries());
  if (k2.is_identity()) return Kernel(k1.space_ptr(), k1.entries());
  const Eigen::VectorXcd w = k1.space().weights().cast<Complex>();
  Eigen::MatrixXcd prod = k1.entries() * w.asDiagonal() * k2.entries();
  return Kernel(k1.space_ptr(), std::move(prod));
}

Kernel involution(const Kernel& kernel) {
  return Kernel(kernel.space_ptr(), kernel.entries().adjoint());
}

}  // namespace framedisc
