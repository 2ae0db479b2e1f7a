#include "framedisc/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace framedisc {

namespace {

Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Per axis: extent (max - min) and the smallest positive gap between
// distinct coordinates.
struct AxisStats {
  double extent = 0.0;
  double spacing = 0.0;
};

std::vector<AxisStats> axis_stats(const QuadratureSpace& space) {
  std::vector<AxisStats> out(space.coordinate_dim());
  for (std::size_t d = 0; d < out.size(); ++d) {
    std::vector<double> c(space.size());
    for (std::size_t x = 0; x < space.size(); ++x) c[x] = space.point(x)[d];
    std::sort(c.begin(), c.end());
    out[d].extent = c.back() - c.front();
    double gap = 0.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
      const double g = c[k] - c[k - 1];
      if (g > 1e-12 * std::max(1.0, out[d].extent) && (gap == 0.0 || g < gap)) gap = g;
    }
    out[d].spacing = gap;
  }
  return out;
}

}  // namespace

PhaseFunction PhaseFunction::constant_one(std::size_t n_points) {
  return PhaseFunction(PhaseRule::constant_one, n_points, std::nullopt);
}

PhaseFunction PhaseFunction::from_table(Eigen::MatrixXcd table) {
  if (table.rows() != table.cols()) throw StructuralError("PhaseFunction: table must be square");
  for (Eigen::Index z = 0; z < table.cols(); ++z)
    for (Eigen::Index y = 0; y < table.rows(); ++y)
      if (!(std::abs(std::abs(table(y, z)) - 1.0) <= 1e-14))
        throw ConfigError("PhaseFunction: table entries must be unimodular");
  const auto n = static_cast<std::size_t>(table.rows());
  return PhaseFunction(PhaseRule::user_table, n, std::move(table));
}

PhaseFunction kernel_phase(const FrameModel& model, double eps) {
  const auto& r = model.R().entries();
  const Eigen::Index n = r.rows();
  Eigen::MatrixXcd table(n, n);
  for (Eigen::Index z = 0; z < n; ++z)
    for (Eigen::Index y = 0; y < n; ++y) {
      const Complex v = r(z, y);
      const double a = std::abs(v);
      table(y, z) = a > eps ? v / a : Complex(1.0, 0.0);
    }
  return PhaseFunction(PhaseRule::kernel_phase, model.size(), std::move(table));
}

PhaseFunction make_phase(const FrameModel& model, PhaseRule rule) {
  switch (rule) {
    case PhaseRule::constant_one:
      return PhaseFunction::constant_one(model.size());
    case PhaseRule::kernel_phase:
      return kernel_phase(model);
    case PhaseRule::user_table:
      break;
  }
  throw ConfigError("make_phase: user tables must be supplied explicitly");
}

Kernel osc_kernel(const FrameModel& model, const Covering& cov, const PhaseFunction& gamma) {
  require_same_space(model.space(), cov.space(), "osc_kernel");
  if (gamma.size() != model.size()) throw StructuralError("osc_kernel: phase table size mismatch");
  const auto& r = model.R().entries();
  const Eigen::Index n = r.rows();
  Eigen::MatrixXd osc = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index y = 0; y < n; ++y) {
    auto col = osc.col(y);
    for (auto z : cov.q_neighborhood(static_cast<std::size_t>(y))) {
      const Complex g = gamma(static_cast<std::size_t>(y), z);
      const auto rz = r.col(as_index(z));
      for (Eigen::Index x = 0; x < n; ++x) col(x) = std::max(col(x), std::abs(r(x, y) - g * rz(x)));
    }
  }
  return Kernel(model.space_ptr(), osc.cast<Complex>());
}

double sigma_constant(double r_norm, double c_mu, double delta) {
  return std::max(c_mu * r_norm, r_norm + delta);
}

double contraction_condition_lhs(double r_norm, double c_mu, double delta) {
  return delta * (r_norm + sigma_constant(r_norm, c_mu, delta));
}

bool contraction_condition_holds(double r_norm, double c_mu, double delta) {
  return contraction_condition_lhs(r_norm, c_mu, delta) <= 1.0;
}

OscReport check_property_D(const FrameModel& model, const Covering& cov,
                           const PhaseFunction& gamma, const Weight2D& weight, double delta) {
  OscReport rep{.osc = osc_kernel(model, cov, gamma), .covering_id = cov.id()};
  rep.norm = schur_norm(rep.osc, weight);
  rep.delta = delta;
  rep.R_norm = schur_norm(model.R(), weight);
  rep.C_mU = weight_compatibility(cov, weight);
  rep.sigma = sigma_constant(rep.R_norm, rep.C_mU, delta);
  rep.condition_lhs = contraction_condition_lhs(rep.R_norm, rep.C_mU, delta);
  rep.holds_D = rep.norm < delta;
  rep.holds_58 = rep.condition_lhs <= 1.0;
  return rep;
}

RefineResult refine_until(const FrameModel& model, const Weight2D& weight, double delta,
                          PhaseRule rule, const RefineOptions& options) {
  if (!(delta > 0.0)) throw ConfigError("refine_until: delta must be positive");
  if (!(options.overlap_fraction >= 0.0 && options.overlap_fraction < 1.0))
    throw ConfigError("refine_until: overlap fraction must lie in [0, 1)");
  const auto stats = axis_stats(model.space());
  std::vector<double> width = options.initial_width;
  if (width.empty()) {
    for (const auto& s : stats) width.push_back(std::max(0.5 * (s.extent + s.spacing), s.spacing));
  }
  if (width.size() != stats.size())
    throw ConfigError("refine_until: need one initial width per coordinate axis");

  const auto gamma = make_phase(model, rule);
  std::optional<OscReport> last;
  for (std::size_t round = 1; round <= options.max_rounds; ++round) {
    bool at_floor = true;
    for (std::size_t d = 0; d < width.size(); ++d)
      at_floor = at_floor && width[d] <= stats[d].spacing * (1.0 + 1e-12);

    if (at_floor) {
      auto cov = singleton_covering(model.space_ptr());
      auto rep = check_property_D(model, cov, gamma, weight, delta);
      if (rep.holds_D && (!options.enforce_condition || rep.holds_58))
        return RefineResult{std::move(cov), std::move(rep), round, {}};
      throw RefineError("refine_until: the singleton covering fails the contraction condition; delta = " +
                            std::to_string(delta) + " is too large for ||R|A_m|| = " +
                            std::to_string(rep.R_norm),
                        std::move(rep));
    }

    std::vector<double> overlap(width.size());
    for (std::size_t d = 0; d < width.size(); ++d)
      overlap[d] = width[d] > stats[d].spacing ? options.overlap_fraction * width[d] : 0.0;
    try {
      auto cov = uniform_covering(model.space_ptr(), width, overlap);
      auto rep = check_property_D(model, cov, gamma, weight, delta);
      if (rep.holds_D && (!options.enforce_condition || rep.holds_58))
        return RefineResult{std::move(cov), std::move(rep), round, width};
      last = std::move(rep);
    } catch (const ConfigError&) {
      // Windows that miss the grid entirely; keep shrinking.
    }
    for (std::size_t d = 0; d < width.size(); ++d)
      width[d] = std::max(0.5 * width[d], stats[d].spacing);
  }
  const std::string msg = "refine_until: no certified covering within " +
                          std::to_string(options.max_rounds) + " rounds";
  if (last) throw RefineError(msg, std::move(*last));
  throw RefineError(msg, check_property_D(model, singleton_covering(model.space_ptr()),
                                          gamma, weight, delta));
}

}  // namespace framedisc
