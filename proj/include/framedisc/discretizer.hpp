#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "framedisc/coverings.hpp"
#include "framedisc/frame_models.hpp"
#include "framedisc/function_spaces.hpp"
#include "framedisc/oscillation.hpp"

namespace framedisc {

enum class SampleRule { max_weight, medoid };

// One sample point x_i in U_i per covering set, together with the
// partition of unity and c_i = int phi_i dmu.
struct SamplingPlan {
  Covering covering;
  PartitionOfUnity pou;
  std::vector<std::size_t> points;

  std::size_t size() const { return points.size(); }
  const Eigen::VectorXd& c() const { return pou.c(); }
};

// max_weight: largest mu-weight in U_i; medoid: smallest sum of coordinate
// (l^1) distances to the other points of U_i.  Ties go to the lowest index.
SamplingPlan select_samples(const Covering& cov, const PartitionOfUnity& pou, SampleRule rule);
SamplingPlan make_plan(const Covering& cov, PouKind pou, SampleRule rule);

// U_Phi F = sum_i c_i F(x_i) R(., x_i).  Columns of F are treated separately.
GridFunction u_phi(const FrameModel& model, const SamplingPlan& plan, const GridFunction& F);
Eigen::MatrixXcd u_phi(const FrameModel& model, const SamplingPlan& plan,
                       const Eigen::MatrixXcd& F);
// Dense grid matrix of U_Phi.
Eigen::MatrixXcd u_phi_matrix(const FrameModel& model, const SamplingPlan& plan);

// S_Phi F = R(sum_i conj(Gamma(., x_i)) F(x_i) phi_i).
GridFunction s_phi(const FrameModel& model, const SamplingPlan& plan, const PhaseFunction& gamma,
                   const GridFunction& F);

struct ContractionBounds {
  double nominal = 0.0;  // delta (||R|| + sigma)
  double sharp = 0.0;    // ||osc|| (||R|| + sigma(||osc||))
};

ContractionBounds contraction_bound(const OscReport& report);

// Largest delta with delta (||R|| + max{C ||R||, ||R|| + delta}) <= 1.
double max_admissible_delta(double r_norm, double c_mu);

struct PowerIterationResult {
  double estimate = 0.0;  // largest ||T F|Y|| / ||F|Y|| seen; a lower bound
  std::size_t iterations = 0;
};

// Power iteration for the norm of R o (Id - U_Phi) o R in Y.
PowerIterationResult contraction_observed(const FrameModel& model, const SamplingPlan& plan,
                                          const WeightedLp& y, std::uint64_t seed = 7,
                                          std::size_t max_iterations = 200,
                                          double stagnation = 1e-10);

enum class InversionMethod { neumann, direct };

struct InversionOptions {
  InversionMethod method = InversionMethod::neumann;
  double tol = 1e-12;          // Neumann: stop when ||term|Y|| <= tol ||G|Y||
  std::size_t n_max = 200;
  // Upper bound on ||(Id - U_Phi)|R(Y)||; Neumann refuses unless it is < 1.
  std::optional<double> certificate;
};

// U_Phi^{-1} on R(Y).  Inputs are projected through R first.  The model,
// plan and space are referenced, not copied, and must outlive the handle.
class InverseOperator {
 public:
  InverseOperator(const FrameModel& model, const SamplingPlan& plan, const WeightedLp& y,
                  const InversionOptions& options);

  GridFunction apply(const GridFunction& G) const;
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& G) const;

  InversionMethod method() const { return options_.method; }
  // Y-norms of the Neumann terms of the last single-vector apply.
  const std::vector<double>& last_term_norms() const { return term_norms_; }

 private:
  const FrameModel* model_;
  const SamplingPlan* plan_;
  const WeightedLp* y_;
  InversionOptions options_;
  Eigen::MatrixXcd basis_;  // Psi^*: columns span R(Y)
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr_;
  mutable std::vector<double> term_norms_;
};

InverseOperator invert_u_phi(const FrameModel& model, const SamplingPlan& plan,
                             const WeightedLp& y, const InversionOptions& options);

// With swap_roles the analysis transform W becomes V and the atoms psi_x
// become S^{-1} psi_x; U_Phi is unchanged.

// lambda_i(f) = c_i (U_Phi^{-1} W f)(x_i)
Eigen::VectorXcd atomic_decomposition(const FrameModel& model, const SamplingPlan& plan,
                                      const InverseOperator& inverse, const HilbertVector& f,
                                      bool swap_roles = false);
// sum_i lambda_i psi_{x_i}
HilbertVector synthesize_plan(const FrameModel& model, const SamplingPlan& plan,
                              const Eigen::VectorXcd& lambda, bool swap_roles = false);
// Samples (V f(x_i))_i, or (W f(x_i))_i when swapped.
Eigen::VectorXcd sample(const FrameModel& model, const SamplingPlan& plan, const HilbertVector& f,
                        bool swap_roles = false);
// V^{-1} U_Phi^{-1} (sum_i c_i s_i R(., x_i))
HilbertVector banach_frame_reconstruct(const FrameModel& model, const SamplingPlan& plan,
                                       const InverseOperator& inverse,
                                       const Eigen::VectorXcd& samples, bool swap_roles = false);
// d x |I|; column i is e_i = V^{-1}(c_i U_Phi^{-1} R(., x_i)).
Eigen::MatrixXcd dual_frame(const FrameModel& model, const SamplingPlan& plan,
                            const InverseOperator& inverse, bool swap_roles = false);

// Endpoints of ||Vf|Y|| / ||(Vf(x_i))|Y_flat|| over random f.
struct NormEquivalence {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t trials = 0;
};

NormEquivalence norm_equivalence(const FrameModel& model, const SamplingPlan& plan,
                                 const WeightedLp& y, std::size_t trials = 50,
                                 std::uint64_t seed = 13);

struct FrameBounds {
  double C1 = 0.0;
  double C2 = 0.0;
};

// Extreme eigenvalues of sum_i mu(U_i) psi_{x_i} psi_{x_i}^*.
FrameBounds hilbert_frame_bounds(const FrameModel& model, const SamplingPlan& plan);

struct InequalityCheck {
  double constant = 0.0;        // the certified constant
  double worst_ratio = 0.0;     // max observed lhs / rhs
  std::size_t trials = 0;
  std::size_t violations = 0;   // lhs > constant * rhs + slack
};

struct CorollaryReport {
  double D_const = 0.0;         // ||K|A_m||, K(x,y) = sum_i |R(x_i,y)| chi_{U_i}(x)
  double sigma_kernel = 0.0;    // ||sum_i |R(x_i,y)| phi_i(x) | A_m||
  double sigma = 0.0;           // max{C_mU ||R||, ||R|| + ||osc||}
  InequalityCheck samples_flat;      // ||(F(x_i))|Y_flat|| <= D ||F|Y||
  InequalityCheck samples_pou;       // ||sum |F(x_i)| phi_i|Y|| <= sigma ||F|Y||
  InequalityCheck coeffs_flat;       // ||(Vf(x_i))|Y_flat|| <= D ||Vf|Y||
  InequalityCheck l1v_into_y;        // ||Vf|Y|| <= C ||Vf|L^1_v||
  InequalityCheck y_into_linf;       // ||Vf|L^inf_{1/v}|| <= C ||Vf|Y||
  InequalityCheck synthesis;         // ||sum lambda_i R(.,x_i)|Y|| <= C' ||lambda|Y_nat||
  InequalityCheck range_into_linf;   // ||R F|L^inf_{1/v}|| <= C ||F|Y||
  bool all_hold() const;
};

CorollaryReport verify_corollaries(const FrameModel& model, const SamplingPlan& plan,
                                   const WeightedLp& y, const OscReport& osc,
                                   std::size_t trials = 50, std::uint64_t seed = 11,
                                   double slack = 1e-10);

// Random element of R(Y): R applied to a random complex grid function.
GridFunction random_range_function(const FrameModel& model, std::uint64_t seed);
HilbertVector random_vector(std::size_t d, std::uint64_t seed);

}  // namespace framedisc
