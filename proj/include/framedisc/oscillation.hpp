#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "framedisc/coverings.hpp"
#include "framedisc/errors.hpp"
#include "framedisc/frame_models.hpp"
#include "framedisc/kernel_algebra.hpp"

namespace framedisc {

enum class PhaseRule { constant_one, kernel_phase, user_table };

inline constexpr double kPhaseEpsilon = 1e-12;

// Unimodular Gamma(y, z) on X x X.
class PhaseFunction {
 public:
  static PhaseFunction constant_one(std::size_t n_points);
  // Entries must have modulus one to 1e-14.
  static PhaseFunction from_table(Eigen::MatrixXcd table);

  Complex operator()(std::size_t y, std::size_t z) const {
    return table_ ? (*table_)(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(z))
                  : Complex(1.0, 0.0);
  }
  PhaseRule rule() const { return rule_; }
  std::size_t size() const { return n_; }

 private:
  PhaseFunction(PhaseRule rule, std::size_t n, std::optional<Eigen::MatrixXcd> table)
      : rule_(rule), n_(n), table_(std::move(table)) {}
  friend PhaseFunction kernel_phase(const FrameModel& model, double eps);

  PhaseRule rule_;
  std::size_t n_;
  std::optional<Eigen::MatrixXcd> table_;
};

// Gamma(y, z) = R(z, y) / |R(z, y)|, or 1 where |R(z, y)| <= eps.
PhaseFunction kernel_phase(const FrameModel& model, double eps = kPhaseEpsilon);
PhaseFunction make_phase(const FrameModel& model, PhaseRule rule);

// osc(x, y) = max_{z in Q_y} |R(x, y) - Gamma(y, z) R(x, z)|, by enumeration.
Kernel osc_kernel(const FrameModel& model, const Covering& cov, const PhaseFunction& gamma);

// sigma = max{C_mU ||R||, ||R|| + delta}
double sigma_constant(double r_norm, double c_mu, double delta);
// delta (||R|| + sigma)
double contraction_condition_lhs(double r_norm, double c_mu, double delta);
bool contraction_condition_holds(double r_norm, double c_mu, double delta);

struct OscReport {
  Kernel osc;
  double norm = 0.0;       // ||osc | A_m||
  double delta = 0.0;
  double sigma = 0.0;
  double R_norm = 0.0;     // ||R | A_m||
  double C_mU = 0.0;
  double condition_lhs = 0.0;
  bool holds_D = false;    // norm < delta
  bool holds_58 = false;   // condition_lhs <= 1
  std::string covering_id;
};

OscReport check_property_D(const FrameModel& model, const Covering& cov,
                           const PhaseFunction& gamma, const Weight2D& weight, double delta);

struct RefineOptions {
  // Per coordinate axis; empty means half the coordinate extent.
  std::vector<double> initial_width;
  double overlap_fraction = 0.5;
  bool enforce_condition = true;
  std::size_t max_rounds = 16;
};

struct RefineResult {
  Covering covering;
  OscReport report;
  std::size_t rounds = 0;
  std::vector<double> width;  // empty when the singleton covering was reached
};

class RefineError : public NumericalError {
 public:
  RefineError(const std::string& what, OscReport last)
      : NumericalError(what), last_(std::move(last)) {}
  const OscReport& last_report() const { return last_; }

 private:
  OscReport last_;
};

// Halves the window widths (and overlaps) until property D and, if
// enforced, the contraction condition hold.  Once every width is at or below the grid spacing
// the singleton covering is tried, for which osc vanishes.
RefineResult refine_until(const FrameModel& model, const Weight2D& weight, double delta,
                          PhaseRule rule, const RefineOptions& options = {});

}  // namespace framedisc
