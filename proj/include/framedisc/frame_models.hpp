#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "framedisc/kernel_algebra.hpp"
#include "framedisc/quadrature_space.hpp"

namespace framedisc {

// Element of the Hilbert space C^d.
using HilbertVector = Eigen::VectorXcd;

inline constexpr double kDefaultFrameFloor = 1e-10;

// A sampled continuous frame {psi_x} in C^d indexed by the points of a
// quadrature space.  Inner products are linear in the first argument,
// <a, b> = b^* a.
//
//   S       = sum_x w_x psi_x psi_x^*
//   R(x, y) = W(psi_y)(x) = psi_x^* S^{-1} psi_y
//
// R is stored exactly Hermitian.  Construction throws NumericalError when
// the smallest eigenvalue of S does not exceed `floor`.
class FrameModel {
 public:
  FrameModel(SpacePtr space, Eigen::MatrixXcd psi, double floor = kDefaultFrameFloor);

  std::size_t dim() const { return static_cast<std::size_t>(psi_.rows()); }
  std::size_t size() const { return space_->size(); }

  // d x n; column x is psi_x.
  const Eigen::MatrixXcd& psi() const { return psi_; }
  // d x n; column x is S^{-1} psi_x.
  const Eigen::MatrixXcd& dual_atoms() const { return dual_; }
  const Eigen::MatrixXcd& S() const { return s_; }
  const Eigen::MatrixXcd& S_inv() const { return s_inv_; }
  // Ascending.
  const Eigen::VectorXd& S_eigenvalues() const { return s_eig_; }
  const Kernel& R() const { return r_; }

  const QuadratureSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

 private:
  SpacePtr space_;
  Eigen::MatrixXcd psi_;
  Eigen::MatrixXcd s_;
  Eigen::MatrixXcd s_inv_;
  Eigen::VectorXd s_eig_;
  Eigen::MatrixXcd dual_;
  Kernel r_;
};

// Vf(x) = <f, psi_x>
GridFunction transform_V(const FrameModel& model, const HilbertVector& f);
// Wf(x) = <f, S^{-1} psi_x>
GridFunction transform_W(const FrameModel& model, const HilbertVector& f);

// Left inverses on the ranges: invert_V(Vf) = f and invert_W(Wf) = f.
//   invert_V(F) = sum_y w_y F(y) S^{-1} psi_y,   invert_W(F) = sum_y w_y F(y) psi_y.
// On all of Y they return the mu-weighted least-squares preimage.
HilbertVector invert_V(const FrameModel& model, const GridFunction& F);
HilbertVector invert_W(const FrameModel& model, const GridFunction& F);

// sum_i lambda_i psi_{x_i}; no quadrature weights on atoms.
HilbertVector synthesize(const FrameModel& model, const DiscreteMeasure& coeffs);
// sum_i lambda_i S^{-1} psi_{x_i}.
HilbertVector synthesize_dual(const FrameModel& model, const DiscreteMeasure& coeffs);

// G(x, y) = <psi_y, psi_x>, so that V(synthesize(nu)) = apply_measure(G, nu).
Kernel gram_kernel(const FrameModel& model);

// Periodic discrete short-time Fourier frame on C^{n_time}.  The phase
// space is the n_time x n_freq grid with point (t, k) at index t * n_freq + k
// and coordinates (t, k), unit weights:
//   psi_{t,k}[j] = g(j - t mod n_time) exp(2 pi i k j / n_freq)
// with g a periodized Gaussian of standard deviation `window_width`,
// normalized to unit norm.  For n_freq >= n_time the frame is tight,
// S = n_freq Id.
FrameModel build_gabor_model(std::size_t n_time, std::size_t n_freq, double window_width);

// Random complex vector field over a line of n_points unit-weight points,
// smoothed along the point index by a Gaussian of standard deviation
// `smoothness` (in points; 0 disables smoothing) and normalized pointwise.
FrameModel build_random_smooth_model(std::size_t d, std::size_t n_points, double smoothness,
                                     std::uint64_t seed);
// Same on a given space; smoothing runs along the index order.
FrameModel build_random_smooth_model(SpacePtr space, std::size_t d, double smoothness,
                                     std::uint64_t seed);

// psi_x = e_x on d points of weight `weight`; R is the identity kernel.
FrameModel build_orthonormal_model(std::size_t d, double weight = 1.0);

}  // namespace framedisc
