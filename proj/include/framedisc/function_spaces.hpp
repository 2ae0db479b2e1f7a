#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "framedisc/coverings.hpp"
#include "framedisc/kernel_algebra.hpp"
#include "framedisc/quadrature_space.hpp"

namespace framedisc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// L^p_w(X, mu):  ||F|| = (sum_x mu_x |F(x)|^p w(x)^p)^{1/p},
// and max_x |F(x)| w(x) for p = infinity.
class WeightedLp {
 public:
  WeightedLp(SpacePtr space, double p, Eigen::VectorXd w, std::size_t reference = 0);
  static WeightedLp unweighted(SpacePtr space, double p);

  double p() const { return p_; }
  const Eigen::VectorXd& w() const { return w_; }
  // m(x, y) = max{w(x)/w(y), w(y)/w(x)}; A_m kernels act boundedly on this space.
  const Weight2D& weight() const { return m_; }

  double norm(const GridFunction& f) const;
  double norm(const Eigen::VectorXd& f) const;

  const QuadratureSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

 private:
  SpacePtr space_;
  double p_;
  Eigen::VectorXd w_;
  Weight2D m_;
};

double norm_Y(const WeightedLp& y, const GridFunction& f);

// Per-set weights of the discrete sequence spaces.
struct SequenceWeights {
  Eigen::VectorXd mu;       // mu(U_i)
  Eigen::VectorXd w_tilde;  // sup_{U_i} w
  Eigen::VectorXd v_tilde;  // sup_{U_i} v
  Eigen::VectorXd b;        // mu^{1/p} w_tilde
  Eigen::VectorXd d;        // mu^{1/p - 1} w_tilde;  b = d * mu exactly
  Eigen::VectorXd r;        // v_tilde * mu
};

// v is taken from y.weight().
SequenceWeights sequence_weights(const Covering& cov, const WeightedLp& y);

// ||sum_i |lambda_i| chi_{U_i} | Y||
double norm_flat(const Eigen::VectorXcd& lambda, const Covering& cov, const WeightedLp& y);
// ||sum_i |lambda_i| mu(U_i)^{-1} chi_{U_i} | Y||
double norm_natural(const Eigen::VectorXcd& lambda, const Covering& cov, const WeightedLp& y);

// Weighted l^p over the index set (counting measure): (sum_i (|lambda_i| s_i)^p)^{1/p}.
double lp_sequence_norm(const Eigen::VectorXcd& lambda, const Eigen::VectorXd& s, double p);

// ||K_i | A_m|| for K_i(x, y) = chi_{U_k}(x) chi_{U_i}(y), without forming K_i.
double set_pair_kernel_norm(const Covering& cov, const Weight2D& weight, std::size_t k,
                            std::size_t i);

struct EmbeddingReport {
  double observed_ratio = 0.0;   // max |lambda_i| / (r(i) ||lambda|Y_nat||) over the tested sequences
  double apriori_bound = 0.0;    // max_i ||K_i|A_m|| / (||chi_{U_k}|Y|| r(i))
  std::size_t worst_index = 0;
  std::size_t sequences_tested = 0;
};

// Y_nat into l^inf_{1/r}: Dirac sequences plus `trials` random complex ones.
EmbeddingReport embedding_constant_linf(const Covering& cov, const WeightedLp& y,
                                        std::size_t trials = 100, std::uint64_t seed = 1,
                                        std::size_t k = 0);

// ||nu | D(U, M, Y_nat)|| = ||(|nu|(U_i))_i | Y_nat||.  Atoms at the same point are
// merged before taking moduli.
double d_space_norm(const DiscreteMeasure& nu, const Covering& cov, const WeightedLp& y);
// D(U, L^1, Y_nat): |F|(U_i) = int_{U_i} |F| dmu.
double d_space_norm(const GridFunction& f, const Covering& cov, const WeightedLp& y);

// Constant C with ||F | D(U, L^1, (L^inf_{1/v})_nat)|| <= C ||F|Y||, following
// the K_i argument with a fixed reference set U_k:
//   int_{U_i}|F| <= ||chi_{U_k}/w|L^{p'}|| mu(U_k)^{-1} ||K_i|A_m|| ||F|Y||.
double local_l1_embedding_constant(const Covering& cov, const WeightedLp& y, std::size_t k = 0);

// The target space L^inf_{1/v} of the previous estimate.
WeightedLp linf_inverse_v(const WeightedLp& y);

}  // namespace framedisc
