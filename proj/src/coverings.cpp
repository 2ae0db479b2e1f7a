#include "framedisc/coverings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "framedisc/errors.hpp"

namespace framedisc {

namespace {

Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

void merge_into(IndexSet& target, const IndexSet& extra) {
  IndexSet merged;
  merged.reserve(target.size() + extra.size());
  std::set_union(target.begin(), target.end(), extra.begin(), extra.end(),
                 std::back_inserter(merged));
  target.swap(merged);
}

}  // namespace

// ---------------------------------------------------------------------------
// Covering

Covering::Covering(SpacePtr space, std::vector<IndexSet> sets)
    : space_(std::move(space)), sets_(std::move(sets)) {
  const std::size_t n = space_->size();
  membership_.assign(n, {});
  measures_.resize(as_index(sets_.size()));
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    auto& s = sets_[i];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (auto x : s) {
      if (x >= n)
        throw StructuralError("Covering: set " + std::to_string(i) + " references point " +
                              std::to_string(x) + " outside the grid");
      membership_[x].push_back(i);
    }
    measures_(as_index(i)) = subset_measure(*space_, s);
  }

  neighbors_.assign(sets_.size(), {});
  for (std::size_t i = 0; i < sets_.size(); ++i)
    for (auto x : sets_[i]) merge_into(neighbors_[i], membership_[x]);

  q_.assign(n, {});
  for (std::size_t y = 0; y < n; ++y)
    for (auto i : membership_[y]) merge_into(q_[y], sets_[i]);
}

bool Covering::contains(std::size_t i, std::size_t x) const {
  const auto& s = sets_.at(i);
  return std::binary_search(s.begin(), s.end(), x);
}

std::string Covering::id() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(space_->size());
  mix(sets_.size());
  for (const auto& s : sets_) {
    mix(s.size());
    for (auto x : s) mix(x);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CoveringReport validate_covering(const Covering& cov) {
  CoveringReport r;
  for (std::size_t x = 0; x < cov.space().size(); ++x)
    if (cov.sets_containing(x).empty()) ++r.uncovered;
  for (const auto& s : cov.sets())
    if (s.empty()) ++r.empty_sets;

  for (std::size_t i = 0; i < cov.size(); ++i) r.N = std::max(r.N, cov.neighbors(i).size());

  r.D = cov.size() ? cov.measures().minCoeff() : 0.0;
  r.C_tilde = cov.size() ? 1.0 : 0.0;
  for (std::size_t i = 0; i < cov.size(); ++i)
    for (auto j : cov.neighbors(i))
      if (cov.measure(j) > 0.0)
        r.C_tilde = std::max(r.C_tilde, cov.measure(i) / cov.measure(j));

  r.admissible = cov.size() > 0 && r.uncovered == 0 && r.empty_sets == 0;
  r.moderate = r.admissible && r.D > 0.0 && std::isfinite(r.C_tilde);
  return r;
}

double weight_compatibility(const Covering& cov, const Weight2D& weight) {
  require_same_space(cov.space(), weight.space(), "weight_compatibility");
  double c = 0.0;
  for (const auto& s : cov.sets())
    for (auto x : s)
      for (auto y : s) c = std::max(c, weight(x, y));
  return c;
}

// ---------------------------------------------------------------------------
// Partitions of unity

PartitionOfUnity::PartitionOfUnity(std::vector<std::vector<double>> values, const Covering& cov)
    : values_(std::move(values)), sets_(cov.sets()), n_points_(cov.space().size()) {
  if (values_.size() != sets_.size())
    throw StructuralError("PartitionOfUnity: one function per covering set required");
  c_.resize(as_index(sets_.size()));
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    if (values_[i].size() != sets_[i].size())
      throw StructuralError("PartitionOfUnity: values must align with the covering set");
    double ci = 0.0;
    for (std::size_t k = 0; k < sets_[i].size(); ++k) {
      const double v = values_[i][k];
      if (!(v >= 0.0 && v <= 1.0)) throw NumericalError("PartitionOfUnity: value outside [0, 1]");
      ci += cov.space().weight(sets_[i][k]) * v;
    }
    c_(as_index(i)) = ci;
  }
}

double PartitionOfUnity::value(std::size_t i, std::size_t x) const {
  const auto& s = sets_.at(i);
  auto it = std::lower_bound(s.begin(), s.end(), x);
  if (it == s.end() || *it != x) return 0.0;
  return values_[i][static_cast<std::size_t>(it - s.begin())];
}

Eigen::VectorXd PartitionOfUnity::dense(std::size_t i) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(as_index(n_points_));
  const auto& s = sets_.at(i);
  for (std::size_t k = 0; k < s.size(); ++k) out(as_index(s[k])) = values_[i][k];
  return out;
}

PartitionOfUnity build_pou(const Covering& cov, PouKind kind) {
  const auto report = validate_covering(cov);
  if (!report.admissible)
    throw StructuralError("build_pou: covering is not admissible (" +
                          std::to_string(report.uncovered) + " uncovered points, " +
                          std::to_string(report.empty_sets) + " empty sets)");
  const auto& space = cov.space();
  const std::size_t dim = space.coordinate_dim();

  std::vector<std::vector<double>> raw(cov.size());
  for (std::size_t i = 0; i < cov.size(); ++i) {
    const auto& s = cov.set(i);
    raw[i].assign(s.size(), 1.0);
    if (kind == PouKind::flat) continue;

    std::vector<double> centroid(dim, 0.0);
    for (auto x : s)
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += space.point(x)[d];
    for (auto& c : centroid) c /= static_cast<double>(s.size());
    std::vector<double> dist(s.size());
    double radius = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      double acc = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = space.point(s[k])[d] - centroid[d];
        acc += diff * diff;
      }
      dist[k] = std::sqrt(acc);
      radius = std::max(radius, dist[k]);
    }
    // Support radius 1.5x the set radius keeps the bump strictly positive on U_i.
    const double support = 1.5 * radius;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (support == 0.0) continue;
      const double t = dist[k] / support;
      raw[i][k] = (1.0 - t * t) * (1.0 - t * t);
    }
  }

  Eigen::VectorXd total = Eigen::VectorXd::Zero(as_index(space.size()));
  for (std::size_t i = 0; i < cov.size(); ++i)
    for (std::size_t k = 0; k < cov.set(i).size(); ++k) total(as_index(cov.set(i)[k])) += raw[i][k];
  for (std::size_t i = 0; i < cov.size(); ++i)
    for (std::size_t k = 0; k < cov.set(i).size(); ++k)
      raw[i][k] /= total(as_index(cov.set(i)[k]));
  return PartitionOfUnity(std::move(raw), cov);
}

// ---------------------------------------------------------------------------
// m-equivalence

EquivalenceReport check_m_equivalent(const Covering& cov_u, const Covering& cov_v,
                                     const Weight2D& weight) {
  if (cov_u.size() != cov_v.size())
    throw StructuralError("check_m_equivalent: coverings have different index sets");
  require_same_space(cov_u.space(), cov_v.space(), "check_m_equivalent");
  require_same_space(cov_u.space(), weight.space(), "check_m_equivalent");

  EquivalenceReport r;
  r.C1 = std::numeric_limits<double>::infinity();
  r.C2 = 0.0;
  for (std::size_t i = 0; i < cov_u.size(); ++i) {
    const double ratio = cov_v.measure(i) / cov_u.measure(i);
    r.C1 = std::min(r.C1, ratio);
    r.C2 = std::max(r.C2, ratio);
    for (auto x : cov_u.set(i))
      for (auto y : cov_v.set(i)) r.C_prime = std::max(r.C_prime, weight(x, y));
  }
  r.equivalent = std::isfinite(r.C1) && r.C1 > 0.0 && std::isfinite(r.C2) &&
                 std::isfinite(r.C_prime);
  return r;
}

Kernel equivalence_kernel(const Covering& cov_u, const Covering& cov_v) {
  if (cov_u.size() != cov_v.size())
    throw StructuralError("equivalence_kernel: coverings have different index sets");
  require_same_space(cov_u.space(), cov_v.space(), "equivalence_kernel");
  const auto n = as_index(cov_u.space().size());
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t j = 0; j < cov_u.size(); ++j) {
    const double scale = 1.0 / cov_v.measure(j);
    for (auto x : cov_u.set(j))
      for (auto y : cov_v.set(j)) l(as_index(x), as_index(y)) += scale;
  }
  return Kernel(cov_u.space_ptr(), std::move(l));
}

double equivalence_kernel_bound(const Covering& cov_u, const Covering& cov_v,
                                const Weight2D& weight) {
  const auto eq = check_m_equivalent(cov_u, cov_v, weight);
  const double n_u = static_cast<double>(validate_covering(cov_u).N);
  const double n_v = static_cast<double>(validate_covering(cov_v).N);
  return eq.C_prime * std::max(n_u, n_v / eq.C1);
}

// ---------------------------------------------------------------------------
// Constructors

Covering uniform_covering(SpacePtr space, double width, double overlap) {
  const std::size_t dim = space->coordinate_dim();
  return uniform_covering(std::move(space), std::vector<double>(dim, width),
                          std::vector<double>(dim, overlap));
}

Covering uniform_covering(SpacePtr space, const std::vector<double>& widths,
                          const std::vector<double>& overlaps) {
  const std::size_t dim = space->coordinate_dim();
  const std::size_t n = space->size();
  if (widths.size() != dim || overlaps.size() != dim)
    throw ConfigError("uniform_covering: need one width and overlap per coordinate axis");

  // Per axis: window starts and, for each point, the windows that hold it.
  std::vector<std::size_t> n_windows(dim);
  std::vector<std::vector<std::vector<std::size_t>>> hits(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const double width = widths[d];
    const double overlap = overlaps[d];
    if (!(width > 0.0) || !std::isfinite(width))
      throw ConfigError("uniform_covering: width must be positive");
    if (!(overlap >= 0.0 && overlap < width))
      throw ConfigError("uniform_covering: overlap must satisfy 0 <= overlap < width");
    double lo = space->point(0)[d], hi = lo;
    for (std::size_t x = 0; x < n; ++x) {
      lo = std::min(lo, space->point(x)[d]);
      hi = std::max(hi, space->point(x)[d]);
    }
    const double tol = 1e-9 * std::max(1.0, hi - lo);
    const double step = width - overlap;
    std::vector<double> starts;
    for (std::size_t k = 0;; ++k) {
      const double start = lo + static_cast<double>(k) * step;
      starts.push_back(start);
      if (start + width - tol > hi) break;
    }
    n_windows[d] = starts.size();
    hits[d].assign(n, {});
    for (std::size_t x = 0; x < n; ++x) {
      const double c = space->point(x)[d];
      for (std::size_t k = 0; k < starts.size(); ++k)
        if (c >= starts[k] - tol && c < starts[k] + width - tol) hits[d][x].push_back(k);
    }
  }

  std::size_t n_boxes = 1;
  for (auto w : n_windows) n_boxes *= w;
  std::vector<IndexSet> sets(n_boxes);
  for (std::size_t x = 0; x < n; ++x) {
    // Enumerate every combination of per-axis windows containing x.
    std::vector<std::size_t> pick(dim, 0);
    bool any = true;
    for (std::size_t d = 0; d < dim; ++d) any = any && !hits[d][x].empty();
    while (any) {
      std::size_t box = 0;
      for (std::size_t d = 0; d < dim; ++d) box = box * n_windows[d] + hits[d][x][pick[d]];
      sets[box].push_back(x);
      std::size_t d = dim;
      while (d > 0) {
        --d;
        if (++pick[d] < hits[d][x].size()) break;
        pick[d] = 0;
        if (d == 0) any = false;
      }
      if (dim == 0) any = false;
    }
  }
  for (std::size_t b = 0; b < sets.size(); ++b)
    if (sets[b].empty())
      throw ConfigError("uniform_covering: window " + std::to_string(b) +
                        " contains no grid point; the grid is too sparse for this width");
  return Covering(std::move(space), std::move(sets));
}

Covering singleton_covering(SpacePtr space) {
  std::vector<IndexSet> sets(space->size());
  for (std::size_t x = 0; x < sets.size(); ++x) sets[x] = {x};
  return Covering(std::move(space), std::move(sets));
}

// ---------------------------------------------------------------------------
// lambda^+ regularity

Eigen::VectorXcd lambda_plus(const Covering& cov, const Eigen::VectorXcd& lambda) {
  if (lambda.size() != as_index(cov.size()))
    throw StructuralError("lambda_plus: sequence length does not match the index set");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(lambda.size());
  for (std::size_t i = 0; i < cov.size(); ++i)
    for (auto j : cov.neighbors(i)) out(as_index(i)) += lambda(as_index(j));
  return out;
}

bool is_admissible_permutation(const Covering& cov, const std::vector<std::size_t>& pi) {
  if (pi.size() != cov.size()) return false;
  std::vector<bool> seen(pi.size(), false);
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] >= pi.size() || seen[pi[i]]) return false;
    seen[pi[i]] = true;
    const auto& nb = cov.neighbors(i);
    if (!std::binary_search(nb.begin(), nb.end(), pi[i])) return false;
  }
  return true;
}

Kernel permutation_kernel(const Covering& cov, const std::vector<std::size_t>& pi) {
  if (pi.size() != cov.size()) throw StructuralError("permutation_kernel: wrong length");
  std::vector<std::size_t> inverse(pi.size(), pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] >= pi.size() || inverse[pi[i]] != pi.size())
      throw StructuralError("permutation_kernel: not a permutation");
    inverse[pi[i]] = i;
  }
  const auto n = as_index(cov.space().size());
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < cov.size(); ++i) {
    const std::size_t src = inverse[i];
    const double scale = 1.0 / cov.measure(src);
    for (auto x : cov.set(src))
      for (auto y : cov.set(i)) k(as_index(x), as_index(y)) += scale;
  }
  return Kernel(cov.space_ptr(), std::move(k));
}

std::vector<std::vector<std::size_t>> sample_admissible_permutations(const Covering& cov,
                                                                     std::size_t count,
                                                                     std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> id(cov.size());
  std::iota(id.begin(), id.end(), 0);
  out.push_back(id);

  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < count; ++t) {
    std::vector<std::size_t> pi = id;
    std::vector<std::size_t> order = id;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> matched(cov.size(), false);
    for (auto i : order) {
      if (matched[i]) continue;
      std::vector<std::size_t> candidates;
      for (auto j : cov.neighbors(i))
        if (j != i && !matched[j]) candidates.push_back(j);
      if (candidates.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      const auto j = candidates[pick(rng)];
      pi[i] = j;
      pi[j] = i;
      matched[i] = matched[j] = true;
    }
    out.push_back(std::move(pi));
  }
  return out;
}

Kernel neighbor_sum_kernel(const Covering& cov) {
  const auto n = as_index(cov.space().size());
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < cov.size(); ++i) {
    const double scale = 1.0 / cov.measure(i);
    for (auto j : cov.neighbors(i))
      for (auto x : cov.set(i))
        for (auto y : cov.set(j)) k(as_index(x), as_index(y)) += scale;
  }
  return Kernel(cov.space_ptr(), std::move(k));
}

RegularityConstants lambda_plus_constants(const Covering& cov, const Weight2D& weight,
                                          std::size_t permutations, std::uint64_t seed) {
  const auto report = validate_covering(cov);
  const double c_mu = weight_compatibility(cov, weight);
  RegularityConstants rc;
  rc.N = report.N;
  const double n = static_cast<double>(report.N);
  rc.apriori_bound = n * c_mu * c_mu * std::max(n, report.C_tilde * n);

  const auto perms = sample_admissible_permutations(cov, permutations, seed);
  rc.permutations_tested = perms.size();
  for (const auto& pi : perms)
    rc.max_permutation_norm = std::max(rc.max_permutation_norm,
                                       schur_norm(permutation_kernel(cov, pi), weight));
  rc.permutation_constant = n * rc.max_permutation_norm;
  rc.neighbor_kernel_norm = schur_norm(neighbor_sum_kernel(cov), weight);
  return rc;
}

}  // namespace framedisc
