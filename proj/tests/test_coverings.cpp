#include <set>

#include "doctest.h"
#include "framedisc/coverings.hpp"
#include "framedisc/errors.hpp"
#include "framedisc/function_spaces.hpp"
#include "oracles.hpp"

using namespace framedisc;

namespace {

std::vector<IndexSet> random_intervals(oracle::Rng& rng, std::size_t n, std::size_t count) {
  std::vector<IndexSet> sets;
  std::vector<bool> covered(n, false);
  for (std::size_t k = 0; k < count; ++k) {
    const auto a = rng.index(n);
    const auto len = 1 + rng.index(8);
    IndexSet s;
    for (std::size_t x = a; x < std::min(n, a + len); ++x) {
      s.push_back(x);
      covered[x] = true;
    }
    sets.push_back(s);
  }
  for (std::size_t x = 0; x < n; ++x)
    if (!covered[x]) sets.push_back({x});
  return sets;
}

std::vector<std::vector<std::size_t>> as_plain(const Covering& c) { return c.sets(); }

SpacePtr weighted_line(oracle::Rng& rng, std::size_t n) {
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back({static_cast<double>(i)});
    w.push_back(rng.uniform(0.5, 2.0));
  }
  return make_space(pts, w);
}

}  // namespace

TEST_CASE("validate_covering examples") {
  auto s = uniform_line(6);
  const auto part = validate_covering(singleton_covering(s));
  CHECK(part.admissible);
  CHECK(part.moderate);
  CHECK(part.N == 1);
  CHECK(part.C_tilde == 1.0);

  const IndexSet all{0, 1, 2, 3, 4, 5};
  const auto twice = validate_covering(Covering(s, {all, all}));
  CHECK(twice.N == 2);
  CHECK(twice.C_tilde == 1.0);

  const auto holes = validate_covering(Covering(s, {{0, 1}, {3, 4, 5}}));
  CHECK_FALSE(holes.admissible);
  CHECK(holes.uncovered == 1);
  const auto empty = validate_covering(Covering(s, {all, {}}));
  CHECK_FALSE(empty.admissible);
  CHECK(empty.empty_sets == 1);
  CHECK_THROWS_AS(Covering(s, {{0, 6}}), StructuralError);
}

TEST_CASE("covering constants match brute force on random interval coverings") {
  oracle::Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    auto s = weighted_line(rng, 64);
    const Covering cov(s, random_intervals(rng, 64, 20));
    const auto rep = validate_covering(cov);
    const auto ref = oracle::covering_facts(as_plain(cov), oracle::to_vec(s->weights()));
    CHECK(rep.N == ref.N);
    CHECK(rep.D == doctest::Approx(ref.D).epsilon(1e-14));
    CHECK(rep.C_tilde == doctest::Approx(ref.C_tilde).epsilon(1e-14));
    // overlap count at every point never exceeds N
    for (std::size_t x = 0; x < 64; ++x) {
      std::size_t hits = 0;
      for (const auto& set : cov.sets()) hits += oracle::in_set(set, x);
      CHECK(hits <= rep.N);
      CHECK(hits == cov.sets_containing(x).size());
    }
    // Q_y against a direct union
    for (std::size_t y = 0; y < 64; ++y) {
      std::set<std::size_t> q;
      for (const auto& set : cov.sets())
        if (oracle::in_set(set, y)) q.insert(set.begin(), set.end());
      CHECK(IndexSet(q.begin(), q.end()) == cov.q_neighborhood(y));
    }
  }
}

TEST_CASE("weight compatibility") {
  auto s = uniform_line(20, 0.05);
  const Covering cov = uniform_covering(s, 0.2, 0.0);
  CHECK(weight_compatibility(cov, Weight2D::constant_one(s)) == 1.0);

  Eigen::VectorXd w(20);
  for (int i = 0; i < 20; ++i) w(i) = std::exp(0.05 * i);
  const auto m = Weight2D::associated(s, w);
  CHECK(weight_compatibility(singleton_covering(s), m) == 1.0);
  double brute = 0.0;
  for (const auto& set : cov.sets())
    for (auto x : set)
      for (auto y : set) brute = std::max(brute, m(x, y));
  CHECK(weight_compatibility(cov, m) == brute);
  // sets hold 4 points spanning 0.15
  CHECK(brute == doctest::Approx(std::exp(0.15)).epsilon(1e-12));
}

TEST_CASE("uniform covering examples") {
  auto s = uniform_line(64);
  const auto whole = uniform_covering(s, 64.0, 0.0);
  CHECK(whole.size() == 1);
  CHECK(validate_covering(whole).N == 1);

  const auto single = uniform_covering(s, 1.0, 0.0);
  CHECK(single.size() == 64);
  for (std::size_t i = 0; i < 64; ++i) CHECK(single.set(i) == IndexSet{i});

  const auto dbl = uniform_covering(s, 4.0, 2.0);
  for (std::size_t x = 2; x < 62; ++x) {
    std::size_t hits = 0;
    for (const auto& set : dbl.sets()) hits += oracle::in_set(set, x);
    CHECK(hits == 2);
  }
  CHECK(validate_covering(dbl).admissible);

  CHECK_THROWS_AS(uniform_covering(s, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(uniform_covering(s, 2.0, 2.0), ConfigError);

  auto g = product_grid(4, 6);
  const auto boxes = uniform_covering(g, {2.0, 3.0}, {0.0, 0.0});
  CHECK(boxes.size() == 4);
  CHECK(validate_covering(boxes).N == 1);
  CHECK(boxes.set(0) == IndexSet{0, 1, 2, 6, 7, 8});
}

TEST_CASE("partitions of unity") {
  oracle::Rng rng(22);
  auto s = weighted_line(rng, 40);
  const auto part = uniform_covering(s, 5.0, 0.0);
  const auto flat = build_pou(part, PouKind::flat);
  for (std::size_t i = 0; i < part.size(); ++i) {
    CHECK(flat.c(i) == doctest::Approx(part.measure(i)).epsilon(1e-15));
    for (std::size_t x = 0; x < 40; ++x) CHECK(flat.value(i, x) == (part.contains(i, x) ? 1.0 : 0.0));
  }

  const Covering pair(uniform_line(3), {{0, 1}, {1, 2}});
  const auto half = build_pou(pair, PouKind::flat);
  CHECK(half.value(0, 1) == 0.5);
  CHECK(half.value(1, 1) == 0.5);

  const Covering bad(uniform_line(3), {{0, 1}});
  CHECK_THROWS_AS(build_pou(bad, PouKind::flat), StructuralError);

  for (auto kind : {PouKind::flat, PouKind::smooth}) {
    for (double ov : {0.0, 2.0, 4.0}) {
      const auto cov = uniform_covering(s, 6.0, ov);
      const auto pou = build_pou(cov, kind);
      double sum_c = 0.0;
      for (std::size_t i = 0; i < cov.size(); ++i) {
        sum_c += pou.c(i);
        CHECK(pou.c(i) > 0.0);
        CHECK(pou.c(i) <= cov.measure(i) * (1 + 1e-15));
      }
      CHECK(sum_c == doctest::Approx(integrate(*s, Eigen::VectorXd(Eigen::VectorXd::Ones(40)))).epsilon(1e-13));
      for (std::size_t x = 0; x < 40; ++x) {
        double total = 0.0;
        for (std::size_t i = 0; i < cov.size(); ++i) {
          const double v = pou.value(i, x);
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
          if (!cov.contains(i, x)) CHECK(v == 0.0);
          total += v;
        }
        CHECK(std::abs(total - 1.0) <= 1e-14);
      }
    }
  }
}

TEST_CASE("m-equivalent coverings") {
  auto s = uniform_line(30);
  const auto cu = uniform_covering(s, 4.0, 1.0);
  const auto m1 = Weight2D::constant_one(s);
  const auto self = check_m_equivalent(cu, cu, m1);
  CHECK(self.equivalent);
  CHECK(self.C1 == 1.0);
  CHECK(self.C2 == 1.0);
  CHECK(self.C_prime == weight_compatibility(cu, m1));

  std::vector<IndexSet> shifted;
  for (const auto& set : cu.sets()) {
    IndexSet t;
    for (auto x : set) t.push_back(std::min<std::size_t>(x + 1, 29));
    shifted.push_back(t);
  }
  const Covering cv(s, shifted);
  CHECK(check_m_equivalent(cu, cv, m1).C_prime == 1.0);
  CHECK_THROWS(check_m_equivalent(cu, uniform_covering(s, 5.0, 0.0), m1));

  // constants against enumeration, weighted
  oracle::Rng rng(23);
  auto ws = weighted_line(rng, 30);
  Eigen::VectorXd w = rng.log_uniform(30, 0.7);
  const auto m = Weight2D::associated(ws, w, 4);
  const auto u = uniform_covering(ws, 4.0, 1.0);
  std::vector<IndexSet> vs;
  for (const auto& set : u.sets()) {
    IndexSet t = set;
    t.push_back(rng.index(30));
    vs.push_back(t);
  }
  const Covering v(ws, vs);
  const auto rep = check_m_equivalent(u, v, m);
  double c1 = 1e300, c2 = 0.0, cp = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double mu_u = 0.0, mu_v = 0.0;
    for (auto x : u.set(i)) mu_u += ws->weight(x);
    for (auto x : std::set<std::size_t>(v.set(i).begin(), v.set(i).end())) mu_v += ws->weight(x);
    c1 = std::min(c1, mu_v / mu_u);
    c2 = std::max(c2, mu_v / mu_u);
    for (auto x : u.set(i))
      for (auto y : v.set(i)) cp = std::max(cp, m(x, y));
  }
  CHECK(rep.C1 == doctest::Approx(c1).epsilon(1e-14));
  CHECK(rep.C2 == doctest::Approx(c2).epsilon(1e-14));
  CHECK(rep.C_prime == cp);

  // L entry-wise by direct loop
  const auto L = equivalence_kernel(u, v);
  for (std::size_t x = 0; x < 30; ++x)
    for (std::size_t y = 0; y < 30; ++y) {
      double ref = 0.0;
      for (std::size_t j = 0; j < u.size(); ++j)
        if (u.contains(j, x) && v.contains(j, y)) ref += 1.0 / v.measure(j);
      CHECK(std::abs(L(x, y) - ref) <= 1e-14 * (1 + ref));
    }
  CHECK(schur_norm(L, m) <= equivalence_kernel_bound(u, v, m) * (1 + 1e-12));
}

TEST_CASE("equivalence kernel special cases") {
  auto s = uniform_line(12, 1.0, 0.5);
  const auto part = uniform_covering(s, 3.0, 0.0);
  const auto L = equivalence_kernel(part, part);
  for (std::size_t j = 0; j < part.size(); ++j) {
    Eigen::VectorXcd chi = Eigen::VectorXcd::Zero(12);
    for (auto x : part.set(j)) chi(x) = 1.0;
    CHECK((framedisc::apply(L, chi) - chi).norm() <= 1e-14);
  }
  const auto sing = singleton_covering(s);
  CHECK((equivalence_kernel(sing, sing).entries() - Kernel::identity(s).entries()).norm() <= 1e-15);
}

TEST_CASE("equivalent coverings give comparable flat norms") {
  oracle::Rng rng(24);
  auto s = weighted_line(rng, 48);
  const auto u = uniform_covering(s, 6.0, 2.0);
  std::vector<IndexSet> vs;
  for (const auto& set : u.sets()) {
    IndexSet t;
    for (auto x : set) t.push_back(std::min<std::size_t>(x + 2, 47));
    vs.push_back(t);
  }
  const Covering v(s, vs);
  for (double p : {1.0, 2.0, kInfinity}) {
    const WeightedLp y(s, p, rng.log_uniform(48, 0.5), 10);
    const double L = schur_norm(equivalence_kernel(u, v), y.weight());
    for (int t = 0; t < 50; ++t) {
      Eigen::VectorXcd lam(u.size());
      for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = rng.uniform();
      CHECK(norm_flat(lam, u, y) <= L * norm_flat(lam, v, y) * (1 + 1e-12));
    }
  }
}

TEST_CASE("lambda-plus regularity") {
  oracle::Rng rng(25);
  auto s = weighted_line(rng, 40);
  const auto cov = uniform_covering(s, 5.0, 2.0);
  const auto n = cov.size();

  // lambda^+ by direct neighbor scan
  Eigen::VectorXcd lam = rng.cvector(static_cast<Eigen::Index>(n));
  const auto plus = lambda_plus(cov, lam);
  for (std::size_t i = 0; i < n; ++i) {
    Complex ref = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (oracle::intersect(cov.set(i), cov.set(j))) ref += lam(j);
    CHECK(std::abs(plus(i) - ref) <= 1e-14 * (1 + std::abs(ref)));
  }

  const auto perms = sample_admissible_permutations(cov, 20, 5);
  CHECK(perms.size() == 21);
  for (std::size_t i = 0; i < n; ++i) CHECK(perms[0][i] == i);
  for (const auto& pi : perms) {
    CHECK(is_admissible_permutation(cov, pi));
    std::vector<std::size_t> sorted = pi;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(sorted[i] == i);
  }
  std::vector<std::size_t> far(n);
  for (std::size_t i = 0; i < n; ++i) far[i] = n - 1 - i;
  CHECK_FALSE(is_admissible_permutation(cov, far));

  for (double p : {1.0, 2.0, kInfinity}) {
    const WeightedLp y(s, p, rng.log_uniform(40, 0.4), 3);
    const auto& m = y.weight();
    const auto consts = lambda_plus_constants(cov, m, 20, 5);
    CHECK(consts.N == validate_covering(cov).N);
    CHECK(consts.neighbor_kernel_norm == doctest::Approx(schur_norm(neighbor_sum_kernel(cov), m)));
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXcd l = rng.cvector(static_cast<Eigen::Index>(n));
      const double base = norm_natural(l, cov, y);
      const double lhs = norm_natural(lambda_plus(cov, l), cov, y);
      CHECK(lhs <= consts.neighbor_kernel_norm * base * (1 + 1e-10));
      CHECK(lhs <= consts.permutation_constant * base * (1 + 1e-10));
      for (const auto& pi : perms) {
        Eigen::VectorXcd moved(l.size());
        for (std::size_t i = 0; i < n; ++i) moved(i) = l(pi[i]);
        CHECK(norm_natural(moved, cov, y) <=
              schur_norm(permutation_kernel(cov, pi), m) * base * (1 + 1e-10));
      }
    }
  }
}
