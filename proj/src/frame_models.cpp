#include "framedisc/frame_models.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "framedisc/errors.hpp"

namespace framedisc {

namespace {

Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_dim(const FrameModel& model, Eigen::Index size, const char* what) {
  if (size != as_index(model.dim()))
    throw StructuralError(std::string(what) + ": vector has dimension " + std::to_string(size) +
                          ", the model has " + std::to_string(model.dim()));
}

Eigen::MatrixXcd checked_psi(const QuadratureSpace& space, Eigen::MatrixXcd psi) {
  if (psi.cols() != as_index(space.size()))
    throw StructuralError("FrameModel: need one frame vector per grid point");
  if (psi.rows() == 0) throw StructuralError("FrameModel: dimension must be positive");
  if (!psi.allFinite()) throw StructuralError("FrameModel: non-finite frame vector");
  return psi;
}

}  // namespace

FrameModel::FrameModel(SpacePtr space, Eigen::MatrixXcd psi, double floor)
    : space_(space), psi_(checked_psi(*space, std::move(psi))), r_(Kernel::zero(space)) {
  const Eigen::VectorXcd w = space_->weights().cast<Complex>();
  s_ = psi_ * w.asDiagonal() * psi_.adjoint();
  s_ = 0.5 * (s_ + s_.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(s_);
  if (eig.info() != Eigen::Success) throw NumericalError("FrameModel: eigensolver failed on S");
  s_eig_ = eig.eigenvalues();
  if (!(s_eig_(0) > floor))
    throw NumericalError("FrameModel: frame operator is singular (smallest eigenvalue " +
                         std::to_string(s_eig_(0)) +
                         "); the frame vectors do not span, use more points");
  const auto& u = eig.eigenvectors();
  s_inv_ = u * s_eig_.cwiseInverse().cast<Complex>().asDiagonal() * u.adjoint();
  dual_ = s_inv_ * psi_;

  // R = A^* A with A = S^{-1/2} Psi, then symmetrized so R(x,y) = conj(R(y,x)) exactly.
  const Eigen::MatrixXcd a =
      s_eig_.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * (u.adjoint() * psi_);
  Eigen::MatrixXcd r = a.adjoint() * a;
  r = 0.5 * (r + r.adjoint()).eval();
  r_ = Kernel(space_, std::move(r));
}

GridFunction transform_V(const FrameModel& model, const HilbertVector& f) {
  require_dim(model, f.size(), "transform_V");
  return model.psi().adjoint() * f;
}

GridFunction transform_W(const FrameModel& model, const HilbertVector& f) {
  require_dim(model, f.size(), "transform_W");
  return model.dual_atoms().adjoint() * f;
}

HilbertVector invert_V(const FrameModel& model, const GridFunction& F) {
  require_length(model.space(), F.size(), "invert_V");
  return model.dual_atoms() * model.space().weights().cast<Complex>().cwiseProduct(F);
}

HilbertVector invert_W(const FrameModel& model, const GridFunction& F) {
  require_length(model.space(), F.size(), "invert_W");
  return model.psi() * model.space().weights().cast<Complex>().cwiseProduct(F);
}

HilbertVector synthesize(const FrameModel& model, const DiscreteMeasure& coeffs) {
  return model.psi() * coeffs.dense(model.size());
}

HilbertVector synthesize_dual(const FrameModel& model, const DiscreteMeasure& coeffs) {
  return model.dual_atoms() * coeffs.dense(model.size());
}

Kernel gram_kernel(const FrameModel& model) {
  return Kernel(model.space_ptr(), model.psi().adjoint() * model.psi());
}

FrameModel build_gabor_model(std::size_t n_time, std::size_t n_freq, double window_width) {
  if (n_time == 0 || n_freq == 0) throw ConfigError("build_gabor_model: grid sizes must be positive");
  if (!(window_width > 0.0) || !std::isfinite(window_width))
    throw ConfigError("build_gabor_model: window width must be positive");
  if (n_time * n_freq > kDefaultMaxPoints)
    throw ConfigError("build_gabor_model: phase grid exceeds " +
                      std::to_string(kDefaultMaxPoints) + " points");

  const auto L = as_index(n_time);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(L);
  for (Eigen::Index j = 0; j < L; ++j)
    for (int wrap = -3; wrap <= 3; ++wrap) {
      const double t = static_cast<double>(j + wrap * L);
      // Distance to the nearest copy of the origin, so g is centered at 0.
      g(j) += std::exp(-0.5 * t * t / (window_width * window_width));
    }
  g /= g.norm();

  auto space = product_grid(n_time, n_freq);
  Eigen::MatrixXcd psi(L, as_index(n_time * n_freq));
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t t = 0; t < n_time; ++t)
    for (std::size_t k = 0; k < n_freq; ++k) {
      const auto col = as_index(t * n_freq + k);
      for (Eigen::Index j = 0; j < L; ++j) {
        const auto shift = (j - as_index(t) + L) % L;
        const double phase = two_pi * static_cast<double>(k) * static_cast<double>(j) /
                             static_cast<double>(n_freq);
        psi(j, col) = g(shift) * std::polar(1.0, phase);
      }
    }
  return FrameModel(std::move(space), std::move(psi));
}

FrameModel build_random_smooth_model(SpacePtr space, std::size_t d, double smoothness,
                                     std::uint64_t seed) {
  if (d == 0) throw ConfigError("build_random_smooth_model: dimension must be positive");
  if (!(smoothness >= 0.0) || !std::isfinite(smoothness))
    throw ConfigError("build_random_smooth_model: smoothness must be non-negative");
  const auto n = as_index(space->size());
  if (n < as_index(d))
    throw ConfigError("build_random_smooth_model: need at least d points to span C^d");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd raw(as_index(d), n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index k = 0; k < as_index(d); ++k) raw(k, x) = Complex(gauss(rng), gauss(rng));

  Eigen::MatrixXcd psi = raw;
  if (smoothness > 0.0) {
    const auto radius = static_cast<Eigen::Index>(std::ceil(4.0 * smoothness));
    for (Eigen::Index x = 0; x < n; ++x) {
      Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(as_index(d));
      for (Eigen::Index s = std::max<Eigen::Index>(0, x - radius);
           s <= std::min<Eigen::Index>(n - 1, x + radius); ++s) {
        const double t = static_cast<double>(s - x) / smoothness;
        acc += std::exp(-0.5 * t * t) * raw.col(s);
      }
      psi.col(x) = acc;
    }
  }
  for (Eigen::Index x = 0; x < n; ++x) psi.col(x).normalize();
  return FrameModel(std::move(space), std::move(psi));
}

FrameModel build_random_smooth_model(std::size_t d, std::size_t n_points, double smoothness,
                                     std::uint64_t seed) {
  return build_random_smooth_model(uniform_line(n_points), d, smoothness, seed);
}

FrameModel build_orthonormal_model(std::size_t d, double weight) {
  if (d == 0) throw ConfigError("build_orthonormal_model: dimension must be positive");
  auto space = uniform_line(d, 1.0, weight);
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Identity(as_index(d), as_index(d));
  // Unit vectors with S = weight * Id; the dual atoms are e_x / weight.
  return FrameModel(std::move(space), std::move(psi));
}

}  // namespace framedisc
