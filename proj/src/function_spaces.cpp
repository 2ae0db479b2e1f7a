#include "framedisc/function_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "framedisc/errors.hpp"

namespace framedisc {

namespace {

Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_sequence(const Covering& cov, const Eigen::VectorXcd& lambda, const char* what) {
  if (lambda.size() != as_index(cov.size()))
    throw StructuralError(std::string(what) + ": sequence has " + std::to_string(lambda.size()) +
                          " entries, the covering has " + std::to_string(cov.size()) + " sets");
}

double check_exponent(double p) {
  if (!(p >= 1.0)) throw ConfigError("WeightedLp: exponent p must lie in [1, inf]");
  return p;
}

Eigen::VectorXd check_weight(const QuadratureSpace& space, Eigen::VectorXd w) {
  require_length(space, w.size(), "WeightedLp");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!(w(i) > 0.0) || !std::isfinite(w(i)))
      throw ConfigError("WeightedLp: weight must be positive and finite");
  return w;
}

// Pile-up sum_i s_i chi_{U_i}.
Eigen::VectorXd pile_up(const Covering& cov, const Eigen::VectorXd& s) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(as_index(cov.space().size()));
  for (std::size_t i = 0; i < cov.size(); ++i)
    for (auto x : cov.set(i)) out(as_index(x)) += s(as_index(i));
  return out;
}

}  // namespace

WeightedLp::WeightedLp(SpacePtr space, double p, Eigen::VectorXd w, std::size_t reference)
    : space_(space),
      p_(check_exponent(p)),
      w_(check_weight(*space, std::move(w))),
      m_(Weight2D::associated(space, w_, reference)) {}

WeightedLp WeightedLp::unweighted(SpacePtr space, double p) {
  const auto n = as_index(space->size());
  return WeightedLp(std::move(space), p, Eigen::VectorXd::Ones(n));
}

double WeightedLp::norm(const Eigen::VectorXd& f) const {
  require_length(*space_, f.size(), "norm_Y");
  const auto& mu = space_->weights();
  if (std::isinf(p_)) {
    double s = 0.0;
    for (Eigen::Index x = 0; x < f.size(); ++x) s = std::max(s, std::abs(f(x)) * w_(x));
    return s;
  }
  double s = 0.0;
  if (p_ == 1.0) {
    for (Eigen::Index x = 0; x < f.size(); ++x) s += mu(x) * std::abs(f(x)) * w_(x);
    return s;
  }
  for (Eigen::Index x = 0; x < f.size(); ++x) s += mu(x) * std::pow(std::abs(f(x)) * w_(x), p_);
  return p_ == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p_);
}

double WeightedLp::norm(const GridFunction& f) const {
  return norm(Eigen::VectorXd(f.cwiseAbs()));
}

double norm_Y(const WeightedLp& y, const GridFunction& f) { return y.norm(f); }

SequenceWeights sequence_weights(const Covering& cov, const WeightedLp& y) {
  require_same_space(cov.space(), y.space(), "sequence_weights");
  const auto n = as_index(cov.size());
  const auto& v = y.weight().v();
  SequenceWeights s;
  s.mu = cov.measures();
  s.w_tilde = Eigen::VectorXd::Zero(n);
  s.v_tilde = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < cov.size(); ++i)
    for (auto x : cov.set(i)) {
      s.w_tilde(as_index(i)) = std::max(s.w_tilde(as_index(i)), y.w()(as_index(x)));
      s.v_tilde(as_index(i)) = std::max(s.v_tilde(as_index(i)), v(as_index(x)));
    }
  const double inv_p = std::isinf(y.p()) ? 0.0 : 1.0 / y.p();
  s.d.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) s.d(i) = std::pow(s.mu(i), inv_p - 1.0) * s.w_tilde(i);
  s.b = s.d.cwiseProduct(s.mu);
  s.r = s.v_tilde.cwiseProduct(s.mu);
  return s;
}

double norm_flat(const Eigen::VectorXcd& lambda, const Covering& cov, const WeightedLp& y) {
  require_sequence(cov, lambda, "norm_flat");
  require_same_space(cov.space(), y.space(), "norm_flat");
  return y.norm(pile_up(cov, lambda.cwiseAbs()));
}

double norm_natural(const Eigen::VectorXcd& lambda, const Covering& cov, const WeightedLp& y) {
  require_sequence(cov, lambda, "norm_natural");
  require_same_space(cov.space(), y.space(), "norm_natural");
  return y.norm(pile_up(cov, lambda.cwiseAbs().cwiseQuotient(cov.measures())));
}

double lp_sequence_norm(const Eigen::VectorXcd& lambda, const Eigen::VectorXd& s, double p) {
  if (lambda.size() != s.size()) throw StructuralError("lp_sequence_norm: length mismatch");
  check_exponent(p);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double t = std::abs(lambda(i)) * s(i);
    acc = std::isinf(p) ? std::max(acc, t) : acc + std::pow(t, p);
  }
  return std::isinf(p) || p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double set_pair_kernel_norm(const Covering& cov, const Weight2D& weight, std::size_t k,
                            std::size_t i) {
  const auto& mu = cov.space().weights();
  double rows = 0.0, cols = 0.0;
  for (auto x : cov.set(k)) {
    double r = 0.0;
    for (auto y : cov.set(i)) r += mu(as_index(y)) * weight(x, y);
    rows = std::max(rows, r);
  }
  for (auto y : cov.set(i)) {
    double c = 0.0;
    for (auto x : cov.set(k)) c += mu(as_index(x)) * weight(x, y);
    cols = std::max(cols, c);
  }
  return std::max(rows, cols);
}

EmbeddingReport embedding_constant_linf(const Covering& cov, const WeightedLp& y,
                                        std::size_t trials, std::uint64_t seed, std::size_t k) {
  if (k >= cov.size()) throw StructuralError("embedding_constant_linf: reference set out of range");
  const auto sw = sequence_weights(cov, y);
  const auto n = as_index(cov.size());
  EmbeddingReport rep;

  auto observe = [&](const Eigen::VectorXcd& lambda) {
    const double nat = norm_natural(lambda, cov, y);
    ++rep.sequences_tested;
    if (nat == 0.0) return;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ratio = std::abs(lambda(i)) / (sw.r(i) * nat);
      if (ratio > rep.observed_ratio) {
        rep.observed_ratio = ratio;
        rep.worst_index = static_cast<std::size_t>(i);
      }
    }
  };
  for (Eigen::Index j = 0; j < n; ++j) observe(Eigen::VectorXcd::Unit(n, j));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    Eigen::VectorXcd lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) lambda(i) = Complex(g(rng), g(rng));
    observe(lambda);
  }

  Eigen::VectorXd chi_k = Eigen::VectorXd::Zero(as_index(cov.space().size()));
  for (auto x : cov.set(k)) chi_k(as_index(x)) = 1.0;
  const double chi_norm = y.norm(chi_k);
  for (std::size_t i = 0; i < cov.size(); ++i)
    rep.apriori_bound =
        std::max(rep.apriori_bound, set_pair_kernel_norm(cov, y.weight(), k, i) /
                                        (chi_norm * sw.r(as_index(i))));
  return rep;
}

double d_space_norm(const DiscreteMeasure& nu, const Covering& cov, const WeightedLp& y) {
  const Eigen::VectorXd mass = nu.dense(cov.space().size()).cwiseAbs();
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(as_index(cov.size()));
  for (std::size_t i = 0; i < cov.size(); ++i) {
    double t = 0.0;
    for (auto x : cov.set(i)) t += mass(as_index(x));
    s(as_index(i)) = t;
  }
  return norm_natural(s, cov, y);
}

double d_space_norm(const GridFunction& f, const Covering& cov, const WeightedLp& y) {
  require_length(cov.space(), f.size(), "d_space_norm");
  const auto& mu = cov.space().weights();
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(as_index(cov.size()));
  for (std::size_t i = 0; i < cov.size(); ++i) {
    double t = 0.0;
    for (auto x : cov.set(i)) t += mu(as_index(x)) * std::abs(f(as_index(x)));
    s(as_index(i)) = t;
  }
  return norm_natural(s, cov, y);
}

double local_l1_embedding_constant(const Covering& cov, const WeightedLp& y, std::size_t k) {
  if (k >= cov.size())
    throw StructuralError("local_l1_embedding_constant: reference set out of range");
  const auto& mu = cov.space().weights();
  const double p = y.p();

  // ||chi_{U_k} / w | L^{p'}||, the L^1_loc embedding constant on U_k.
  double c_loc = 0.0;
  for (auto x : cov.set(k)) {
    const double inv_w = 1.0 / y.w()(as_index(x));
    if (p == 1.0)
      c_loc = std::max(c_loc, inv_w);
    else if (std::isinf(p))
      c_loc += mu(as_index(x)) * inv_w;
    else
      c_loc += mu(as_index(x)) * std::pow(inv_w, p / (p - 1.0));
  }
  if (p > 1.0 && !std::isinf(p)) c_loc = std::pow(c_loc, (p - 1.0) / p);

  Eigen::VectorXd per_set(as_index(cov.size()));
  for (std::size_t i = 0; i < cov.size(); ++i)
    per_set(as_index(i)) = c_loc * set_pair_kernel_norm(cov, y.weight(), k, i) /
                           (cov.measure(k) * cov.measure(i));
  const auto& v = y.weight().v();
  double c = 0.0;
  for (std::size_t x = 0; x < cov.space().size(); ++x) {
    double h = 0.0;
    for (auto i : cov.sets_containing(x)) h += per_set(as_index(i));
    c = std::max(c, h / v(as_index(x)));
  }
  return c;
}

WeightedLp linf_inverse_v(const WeightedLp& y) {
  return WeightedLp(y.space_ptr(), kInfinity, y.weight().v().cwiseInverse(),
                    y.weight().reference_point());
}

}  // namespace framedisc
