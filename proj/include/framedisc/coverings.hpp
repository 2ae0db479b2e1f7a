#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "framedisc/kernel_algebra.hpp"
#include "framedisc/quadrature_space.hpp"

namespace framedisc {

using IndexSet = std::vector<std::size_t>;

// An indexed family (U_i) of point subsets.  Sets are stored sorted and
// deduplicated.  Uncovered points and empty sets are representable so that
// validate_covering can report them; everything downstream expects a
// covering that validated as admissible.
class Covering {
 public:
  Covering(SpacePtr space, std::vector<IndexSet> sets);

  std::size_t size() const { return sets_.size(); }
  const IndexSet& set(std::size_t i) const { return sets_.at(i); }
  const std::vector<IndexSet>& sets() const { return sets_; }

  // {i : x in U_i}
  const IndexSet& sets_containing(std::size_t x) const { return membership_.at(x); }
  // i* = {j : U_i and U_j intersect}, including i itself.
  const IndexSet& neighbors(std::size_t i) const { return neighbors_.at(i); }
  // Q_y = union of the U_i containing y.
  const IndexSet& q_neighborhood(std::size_t y) const { return q_.at(y); }

  bool contains(std::size_t i, std::size_t x) const;
  double measure(std::size_t i) const { return measures_(static_cast<Eigen::Index>(i)); }
  const Eigen::VectorXd& measures() const { return measures_; }

  const QuadratureSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }

  // Stable FNV-1a digest of the set structure, rendered as hex.
  std::string id() const;

 private:
  SpacePtr space_;
  std::vector<IndexSet> sets_;
  std::vector<IndexSet> membership_;
  std::vector<IndexSet> neighbors_;
  std::vector<IndexSet> q_;
  Eigen::VectorXd measures_;
};

struct CoveringReport {
  bool admissible = false;
  bool moderate = false;
  std::size_t N = 0;         // sup_j #{i : U_i meets U_j}
  double D = 0.0;            // min_i mu(U_i)
  double C_tilde = 0.0;      // max mu(U_i)/mu(U_j) over intersecting pairs
  std::size_t uncovered = 0; // points outside every set
  std::size_t empty_sets = 0;
};

CoveringReport validate_covering(const Covering& cov);

// C_{m,U} = max_i max_{x,y in U_i} m(x, y).
double weight_compatibility(const Covering& cov, const Weight2D& weight);

enum class PouKind { flat, smooth };

// Partition of unity subordinate to a covering.  phi_i is stored only on
// U_i (aligned with cov.set(i)); it vanishes elsewhere.
class PartitionOfUnity {
 public:
  PartitionOfUnity(std::vector<std::vector<double>> values, const Covering& cov);

  double value(std::size_t i, std::size_t x) const;
  const std::vector<double>& on_set(std::size_t i) const { return values_.at(i); }
  Eigen::VectorXd dense(std::size_t i) const;
  double c(std::size_t i) const { return c_(static_cast<Eigen::Index>(i)); }
  const Eigen::VectorXd& c() const { return c_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<std::vector<double>> values_;
  std::vector<IndexSet> sets_;
  std::size_t n_points_ = 0;
  Eigen::VectorXd c_;
};

// flat:   phi_i = chi_{U_i} / #{j : x in U_j}
// smooth: quadratic bump around the centroid of U_i, positive on all of U_i,
//         normalized to sum to one.
PartitionOfUnity build_pou(const Covering& cov, PouKind kind);

struct EquivalenceReport {
  bool equivalent = false;
  double C1 = 0.0;       // min_i mu(V_i)/mu(U_i)
  double C2 = 0.0;       // max_i mu(V_i)/mu(U_i)
  double C_prime = 0.0;  // max_i sup_{x in U_i, y in V_i} m(x, y)
};

EquivalenceReport check_m_equivalent(const Covering& cov_u, const Covering& cov_v,
                                     const Weight2D& weight);

// L(x, y) = sum_j chi_{U_j}(x) chi_{V_j}(y) / mu(V_j).
Kernel equivalence_kernel(const Covering& cov_u, const Covering& cov_v);

// A-priori bound on the A_m norm of L from the two one-variable integrals:
// C' * max(N_U, N_V / C1).
double equivalence_kernel_bound(const Covering& cov_u, const Covering& cov_v,
                                const Weight2D& weight);

// Sliding windows along each coordinate axis.  Windows are half-open,
// [start, start + width), with starts advancing by width - overlap from the
// smallest coordinate until the largest one is inside a window.  In more
// than one dimension the sets are the products of per-axis windows.
Covering uniform_covering(SpacePtr space, double width, double overlap);
Covering uniform_covering(SpacePtr space, const std::vector<double>& widths,
                          const std::vector<double>& overlaps);
Covering singleton_covering(SpacePtr space);

// ---------------------------------------------------------------------------
// U-regularity of the natural sequence space.

// lambda^+_i = sum_{j in i*} lambda_j.
Eigen::VectorXcd lambda_plus(const Covering& cov, const Eigen::VectorXcd& lambda);

// K_pi(x, y) = sum_i chi_{U_{pi^-1(i)}}(x) chi_{U_i}(y) / mu(U_{pi^-1(i)}).
Kernel permutation_kernel(const Covering& cov, const std::vector<std::size_t>& pi);

// pi(i) in i* for all i.
bool is_admissible_permutation(const Covering& cov, const std::vector<std::size_t>& pi);

// The identity followed by `count` random products of disjoint neighbor
// transpositions (each admissible).
std::vector<std::vector<std::size_t>> sample_admissible_permutations(const Covering& cov,
                                                                     std::size_t count,
                                                                     std::uint64_t seed);

// K_+(x, y) = sum_i sum_{j in i*} chi_{U_i}(x) chi_{U_j}(y) / mu(U_i).
// Pointwise it dominates the lambda^+ pile-up:
//   sum_i |lambda^+_i| chi_{U_i}/mu(U_i) <= K_+(sum_j |lambda_j| chi_{U_j}/mu(U_j)).
Kernel neighbor_sum_kernel(const Covering& cov);

struct RegularityConstants {
  std::size_t N = 0;
  std::size_t permutations_tested = 0;
  double max_permutation_norm = 0.0;   // max_pi ||K_pi | A_m||
  double permutation_constant = 0.0;   // N * max_pi ||K_pi | A_m||
  double apriori_bound = 0.0;          // N * C_mU^2 * max(N, C_tilde N)
  double neighbor_kernel_norm = 0.0;   // ||K_+ | A_m||
};

RegularityConstants lambda_plus_constants(const Covering& cov, const Weight2D& weight,
                                          std::size_t permutations, std::uint64_t seed);

}  // namespace framedisc
