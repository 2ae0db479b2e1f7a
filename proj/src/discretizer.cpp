#include "framedisc/discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "framedisc/errors.hpp"

namespace framedisc {

namespace {

Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

// n x |I| matrix whose column i is R(., x_i).
Eigen::MatrixXcd sample_columns(const FrameModel& model, const SamplingPlan& plan) {
  const auto& r = model.R().entries();
  Eigen::MatrixXcd cols(r.rows(), as_index(plan.size()));
  for (std::size_t i = 0; i < plan.size(); ++i) cols.col(as_index(i)) = r.col(as_index(plan.points[i]));
  return cols;
}

void require_plan(const FrameModel& model, const SamplingPlan& plan, const char* what) {
  require_same_space(model.space(), plan.covering.space(), what);
}

void record(InequalityCheck& check, double lhs, double rhs, double slack) {
  ++check.trials;
  const double bound = check.constant * rhs;
  if (lhs > bound + slack * std::max(1.0, bound)) ++check.violations;
  if (rhs > 0.0) check.worst_ratio = std::max(check.worst_ratio, lhs / rhs);
}

bool holds(const InequalityCheck& c) { return c.violations == 0; }

}  // namespace

// ---------------------------------------------------------------------------
// Sampling plans

SamplingPlan select_samples(const Covering& cov, const PartitionOfUnity& pou, SampleRule rule) {
  if (pou.size() != cov.size())
    throw StructuralError("select_samples: partition of unity does not match the covering");
  const auto& space = cov.space();
  std::vector<std::size_t> points(cov.size());
  for (std::size_t i = 0; i < cov.size(); ++i) {
    const auto& s = cov.set(i);
    if (s.empty()) throw StructuralError("select_samples: empty covering set");
    std::size_t best = s.front();
    if (rule == SampleRule::max_weight) {
      for (auto x : s)
        if (space.weight(x) > space.weight(best)) best = x;
    } else {
      double best_cost = std::numeric_limits<double>::infinity();
      for (auto x : s) {
        double cost = 0.0;
        for (auto y : s)
          for (std::size_t d = 0; d < space.coordinate_dim(); ++d)
            cost += std::abs(space.point(x)[d] - space.point(y)[d]);
        if (cost < best_cost) {
          best_cost = cost;
          best = x;
        }
      }
    }
    points[i] = best;
  }
  return SamplingPlan{cov, pou, std::move(points)};
}

SamplingPlan make_plan(const Covering& cov, PouKind pou, SampleRule rule) {
  return select_samples(cov, build_pou(cov, pou), rule);
}

// ---------------------------------------------------------------------------
// U_Phi and S_Phi

Eigen::MatrixXcd u_phi(const FrameModel& model, const SamplingPlan& plan,
                       const Eigen::MatrixXcd& F) {
  require_plan(model, plan, "u_phi");
  require_length(model.space(), F.rows(), "u_phi");
  Eigen::MatrixXcd picked(as_index(plan.size()), F.cols());
  for (std::size_t i = 0; i < plan.size(); ++i)
    picked.row(as_index(i)) = plan.c()(as_index(i)) * F.row(as_index(plan.points[i]));
  return sample_columns(model, plan) * picked;
}

GridFunction u_phi(const FrameModel& model, const SamplingPlan& plan, const GridFunction& F) {
  return u_phi(model, plan, Eigen::MatrixXcd(F)).col(0);
}

Eigen::MatrixXcd u_phi_matrix(const FrameModel& model, const SamplingPlan& plan) {
  const auto n = as_index(model.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  const auto& r = model.R().entries();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto x = as_index(plan.points[i]);
    m.col(x) += plan.c()(as_index(i)) * r.col(x);
  }
  return m;
}

GridFunction s_phi(const FrameModel& model, const SamplingPlan& plan, const PhaseFunction& gamma,
                   const GridFunction& F) {
  require_plan(model, plan, "s_phi");
  require_length(model.space(), F.size(), "s_phi");
  GridFunction g = GridFunction::Zero(as_index(model.size()));
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto xi = plan.points[i];
    const auto& set = plan.covering.set(i);
    const auto& phi = plan.pou.on_set(i);
    for (std::size_t k = 0; k < set.size(); ++k)
      g(as_index(set[k])) += std::conj(gamma(set[k], xi)) * F(as_index(xi)) * phi[k];
  }
  return framedisc::apply(model.R(), g);
}

// ---------------------------------------------------------------------------
// Contraction

ContractionBounds contraction_bound(const OscReport& report) {
  ContractionBounds b;
  b.nominal = report.delta * (report.R_norm + report.sigma);
  b.sharp = report.norm * (report.R_norm + sigma_constant(report.R_norm, report.C_mU, report.norm));
  return b;
}

double max_admissible_delta(double r_norm, double c_mu) {
  if (!(r_norm > 0.0)) throw ConfigError("max_admissible_delta: ||R|| must be positive");
  // Branch where sigma = ||R|| + delta: delta^2 + 2 ||R|| delta - 1 = 0.
  double delta = 1.0 / (r_norm + std::sqrt(r_norm * r_norm + 1.0));
  if (delta < (c_mu - 1.0) * r_norm) delta = 1.0 / (r_norm * (1.0 + c_mu));
  while (delta > 0.0 && !contraction_condition_holds(r_norm, c_mu, delta)) delta = std::nextafter(delta, 0.0);
  return delta;
}

PowerIterationResult contraction_observed(const FrameModel& model, const SamplingPlan& plan,
                                          const WeightedLp& y, std::uint64_t seed,
                                          std::size_t max_iterations, double stagnation) {
  PowerIterationResult res;
  GridFunction f = random_range_function(model, seed);
  double norm = y.norm(f);
  if (norm == 0.0) return res;
  f /= norm;
  double previous = -1.0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    GridFunction g = framedisc::apply(model.R(), GridFunction(f - u_phi(model, plan, f)));
    const double ratio = y.norm(g);  // ||f|Y|| == 1
    res.iterations = it + 1;
    res.estimate = std::max(res.estimate, ratio);
    if (ratio == 0.0) break;
    if (std::abs(ratio - previous) <= stagnation * ratio) break;
    previous = ratio;
    f = g / ratio;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Inversion

InverseOperator::InverseOperator(const FrameModel& model, const SamplingPlan& plan,
                                 const WeightedLp& y, const InversionOptions& options)
    : model_(&model), plan_(&plan), y_(&y), options_(options) {
  require_plan(model, plan, "invert_u_phi");
  require_same_space(model.space(), y.space(), "invert_u_phi");
  if (!(options.tol > 0.0)) throw ConfigError("invert_u_phi: tol must be positive");
  if (options.n_max == 0) throw ConfigError("invert_u_phi: n_max must be positive");

  if (options.method == InversionMethod::neumann) {
    if (!options.certificate)
      throw CertificationError(
          "invert_u_phi: no contraction certificate for the Neumann series; run the "
          "oscillation check first or use the direct method");
    if (!(*options.certificate < 1.0))
      throw CertificationError("invert_u_phi: contraction bound " +
                               std::to_string(*options.certificate) +
                               " is not below 1; refine the covering (smaller sets) or "
                               "use the direct method");
    return;
  }

  basis_ = model.psi().adjoint();
  const Eigen::MatrixXcd m = u_phi(model, plan, basis_);
  qr_.setThreshold(1e-10);
  qr_.compute(m);
  if (qr_.rank() < m.cols())
    throw NumericalError("invert_u_phi: U_Phi is singular on R(Y) (rank " +
                         std::to_string(qr_.rank()) + " of " + std::to_string(m.cols()) +
                         "); the sample set is too sparse");
}

Eigen::MatrixXcd InverseOperator::apply(const Eigen::MatrixXcd& G) const {
  require_length(model_->space(), G.rows(), "InverseOperator::apply");
  const Eigen::VectorXcd w = model_->space().weights().cast<Complex>();
  const Eigen::MatrixXcd projected = model_->R().entries() * (w.asDiagonal() * G);

  if (options_.method == InversionMethod::direct) return basis_ * qr_.solve(projected);

  const Eigen::Index k = G.cols();
  std::vector<double> scale(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j)
    scale[static_cast<std::size_t>(j)] = y_->norm(GridFunction(projected.col(j)));

  Eigen::MatrixXcd term = projected;
  Eigen::MatrixXcd sum = projected;
  term_norms_.clear();
  auto converged = [&]() {
    bool all = true;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double t = y_->norm(GridFunction(term.col(j)));
      if (k == 1) term_norms_.push_back(t);
      all = all && t <= options_.tol * scale[static_cast<std::size_t>(j)];
    }
    return all;
  };
  if (converged()) return sum;
  for (std::size_t n = 1; n <= options_.n_max; ++n) {
    term -= u_phi(*model_, *plan_, term);
    sum += term;
    if (converged()) return sum;
  }
  throw NumericalError("invert_u_phi: Neumann series did not reach tol " +
                       std::to_string(options_.tol) + " within " +
                       std::to_string(options_.n_max) + " terms");
}

GridFunction InverseOperator::apply(const GridFunction& G) const {
  return apply(Eigen::MatrixXcd(G)).col(0);
}

InverseOperator invert_u_phi(const FrameModel& model, const SamplingPlan& plan,
                             const WeightedLp& y, const InversionOptions& options) {
  return InverseOperator(model, plan, y, options);
}

// ---------------------------------------------------------------------------
// Atomic decompositions, Banach frames, dual frames

Eigen::VectorXcd atomic_decomposition(const FrameModel& model, const SamplingPlan& plan,
                                      const InverseOperator& inverse, const HilbertVector& f,
                                      bool swap_roles) {
  const GridFunction analysed = swap_roles ? transform_V(model, f) : transform_W(model, f);
  const GridFunction h = inverse.apply(analysed);
  Eigen::VectorXcd lambda(as_index(plan.size()));
  for (std::size_t i = 0; i < plan.size(); ++i)
    lambda(as_index(i)) = plan.c()(as_index(i)) * h(as_index(plan.points[i]));
  return lambda;
}

HilbertVector synthesize_plan(const FrameModel& model, const SamplingPlan& plan,
                              const Eigen::VectorXcd& lambda, bool swap_roles) {
  if (lambda.size() != as_index(plan.size()))
    throw StructuralError("synthesize_plan: one coefficient per sample point required");
  DiscreteMeasure nu;
  for (std::size_t i = 0; i < plan.size(); ++i) nu.add(plan.points[i], lambda(as_index(i)));
  return swap_roles ? synthesize_dual(model, nu) : synthesize(model, nu);
}

Eigen::VectorXcd sample(const FrameModel& model, const SamplingPlan& plan, const HilbertVector& f,
                        bool swap_roles) {
  if (f.size() != as_index(model.dim())) throw StructuralError("sample: dimension mismatch");
  const auto& atoms = swap_roles ? model.dual_atoms() : model.psi();
  Eigen::VectorXcd s(as_index(plan.size()));
  for (std::size_t i = 0; i < plan.size(); ++i)
    s(as_index(i)) = atoms.col(as_index(plan.points[i])).dot(f);
  return s;
}

HilbertVector banach_frame_reconstruct(const FrameModel& model, const SamplingPlan& plan,
                                       const InverseOperator& inverse,
                                       const Eigen::VectorXcd& samples, bool swap_roles) {
  if (samples.size() != as_index(plan.size()))
    throw StructuralError("banach_frame_reconstruct: one sample per sample point required");
  const GridFunction g = sample_columns(model, plan) * plan.c().cast<Complex>().cwiseProduct(samples);
  const GridFunction F = inverse.apply(g);
  return swap_roles ? invert_W(model, F) : invert_V(model, F);
}

Eigen::MatrixXcd dual_frame(const FrameModel& model, const SamplingPlan& plan,
                            const InverseOperator& inverse, bool swap_roles) {
  const Eigen::MatrixXcd e_grid =
      inverse.apply(Eigen::MatrixXcd(sample_columns(model, plan) * plan.c().cast<Complex>().asDiagonal()));
  const Eigen::VectorXcd w = model.space().weights().cast<Complex>();
  const auto& atoms = swap_roles ? model.psi() : model.dual_atoms();
  return atoms * (w.asDiagonal() * e_grid);
}

NormEquivalence norm_equivalence(const FrameModel& model, const SamplingPlan& plan,
                                 const WeightedLp& y, std::size_t trials, std::uint64_t seed) {
  NormEquivalence ne;
  ne.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const HilbertVector f = random_vector(model.dim(), seed + t);
    const double flat = norm_flat(sample(model, plan, f), plan.covering, y);
    if (flat == 0.0) continue;
    const double ratio = y.norm(transform_V(model, f)) / flat;
    ne.min_ratio = std::min(ne.min_ratio, ratio);
    ne.max_ratio = std::max(ne.max_ratio, ratio);
    ++ne.trials;
  }
  if (ne.trials == 0) ne.min_ratio = 0.0;
  return ne;
}

FrameBounds hilbert_frame_bounds(const FrameModel& model, const SamplingPlan& plan) {
  require_plan(model, plan, "hilbert_frame_bounds");
  const auto d = as_index(model.dim());
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto psi = model.psi().col(as_index(plan.points[i]));
    op += plan.covering.measure(i) * (psi * psi.adjoint());
  }
  op = 0.5 * (op + op.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(op, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("hilbert_frame_bounds: eigensolver failed");
  return FrameBounds{eig.eigenvalues()(0), eig.eigenvalues()(d - 1)};
}

// ---------------------------------------------------------------------------
// Inequality suite

bool CorollaryReport::all_hold() const {
  return holds(samples_flat) && holds(samples_pou) && holds(coeffs_flat) && holds(l1v_into_y) &&
         holds(y_into_linf) && holds(synthesis) && holds(range_into_linf);
}

CorollaryReport verify_corollaries(const FrameModel& model, const SamplingPlan& plan,
                                   const WeightedLp& y, const OscReport& osc, std::size_t trials,
                                   std::uint64_t seed, double slack) {
  require_plan(model, plan, "verify_corollaries");
  require_same_space(model.space(), y.space(), "verify_corollaries");
  if (osc.covering_id != plan.covering.id())
    throw StructuralError("verify_corollaries: oscillation report belongs to another covering");

  const auto& cov = plan.covering;
  const auto& m = y.weight();
  const auto& r = model.R().entries();
  const auto& mu = model.space().weights();
  const auto& v = m.v();
  const auto n = as_index(model.size());
  const double r_norm = schur_norm(model.R(), m);
  const double osc_norm = schur_norm(osc.osc, m);
  const double c_mu = weight_compatibility(cov, m);

  CorollaryReport rep;
  {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd kp = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < plan.size(); ++i) {
      const Eigen::RowVectorXd row = r.row(as_index(plan.points[i])).cwiseAbs();
      const auto& set = cov.set(i);
      const auto& phi = plan.pou.on_set(i);
      for (std::size_t q = 0; q < set.size(); ++q) {
        k.row(as_index(set[q])) += row.cast<Complex>();
        kp.row(as_index(set[q])) += (phi[q] * row).cast<Complex>();
      }
    }
    rep.D_const = schur_norm(Kernel(model.space_ptr(), std::move(k)), m);
    rep.sigma_kernel = schur_norm(Kernel(model.space_ptr(), std::move(kp)), m);
  }
  rep.sigma = sigma_constant(r_norm, c_mu, osc_norm);
  rep.samples_flat.constant = rep.D_const;
  rep.coeffs_flat.constant = rep.D_const;
  rep.samples_pou.constant = rep.sigma;

  // Coorbit inclusions through the reproducing formula Vf = R(Vf).
  const double inv_p = std::isinf(y.p()) ? 0.0 : 1.0 / y.p();
  for (Eigen::Index col = 0; col < n; ++col) {
    rep.l1v_into_y.constant =
        std::max(rep.l1v_into_y.constant, y.norm(GridFunction(r.col(col))) / v(col));
  }
  for (Eigen::Index x = 0; x < n; ++x) {
    // ||R(x,.)/w | L^{p'}||
    double acc = 0.0;
    for (Eigen::Index z = 0; z < n; ++z) {
      const double t = std::abs(r(x, z)) / y.w()(z);
      if (inv_p == 1.0)
        acc = std::max(acc, t);
      else if (inv_p == 0.0)
        acc += mu(z) * t;
      else
        acc += mu(z) * std::pow(t, 1.0 / (1.0 - inv_p));
    }
    if (inv_p > 0.0 && inv_p < 1.0) acc = std::pow(acc, 1.0 - inv_p);
    rep.y_into_linf.constant = std::max(rep.y_into_linf.constant, acc / v(x));
  }
  rep.synthesis.constant = (osc_norm + r_norm) * schur_norm(neighbor_sum_kernel(cov), m);
  const WeightedLp linf = linf_inverse_v(y);
  rep.range_into_linf.constant = (schur_norm(osc.osc, linf.weight()) +
                                  schur_norm(model.R(), linf.weight())) *
                                 local_l1_embedding_constant(cov, y);
  const WeightedLp l1v(model.space_ptr(), 1.0, v, m.reference_point());

  auto flat_of = [&](const GridFunction& F) {
    Eigen::VectorXcd s(as_index(plan.size()));
    for (std::size_t i = 0; i < plan.size(); ++i) s(as_index(i)) = F(as_index(plan.points[i]));
    return s;
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const GridFunction F = random_range_function(model, rng());
    const double fy = y.norm(F);
    const auto s = flat_of(F);
    record(rep.samples_flat, norm_flat(s, cov, y), fy, slack);
    Eigen::VectorXd pile = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < plan.size(); ++i)
      for (std::size_t q = 0; q < cov.set(i).size(); ++q)
        pile(as_index(cov.set(i)[q])) += std::abs(s(as_index(i))) * plan.pou.on_set(i)[q];
    record(rep.samples_pou, y.norm(pile), fy, slack);

    const HilbertVector f = random_vector(model.dim(), rng());
    const GridFunction vf = transform_V(model, f);
    const double vfy = y.norm(vf);
    record(rep.coeffs_flat, norm_flat(flat_of(vf), cov, y), vfy, slack);
    record(rep.l1v_into_y, vfy, l1v.norm(vf), slack);
    record(rep.y_into_linf, linf.norm(vf), vfy, slack);

    Eigen::VectorXcd lambda(as_index(plan.size()));
    for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda(i) = Complex(g(rng), g(rng));
    DiscreteMeasure nu;
    for (std::size_t i = 0; i < plan.size(); ++i) nu.add(plan.points[i], lambda(as_index(i)));
    record(rep.synthesis, y.norm(apply_measure(model.R(), nu)), norm_natural(lambda, cov, y),
           slack);

    GridFunction raw(n);
    for (Eigen::Index x = 0; x < n; ++x) raw(x) = Complex(g(rng), g(rng));
    record(rep.range_into_linf, linf.norm(framedisc::apply(model.R(), raw)), y.norm(raw), slack);
  }
  return rep;
}

GridFunction random_range_function(const FrameModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  GridFunction raw(as_index(model.size()));
  for (Eigen::Index x = 0; x < raw.size(); ++x) raw(x) = Complex(g(rng), g(rng));
  return framedisc::apply(model.R(), raw);
}

HilbertVector random_vector(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  HilbertVector f(as_index(d));
  for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = Complex(g(rng), g(rng));
  return f;
}

}  // namespace framedisc
