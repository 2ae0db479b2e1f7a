#include "doctest.h"
#include "framedisc/coverings.hpp"
#include "framedisc/discretizer.hpp"
#include "framedisc/errors.hpp"
#include "oracles.hpp"

using namespace framedisc;

namespace {

struct Setup {
  FrameModel model;
  WeightedLp y;
  Covering cov;
  OscReport osc;
  SamplingPlan plan;
};

Setup gabor_setup(std::size_t L, std::size_t nf, double window, std::vector<double> width,
                  std::vector<double> overlap = {0.0, 0.0}, PouKind pou = PouKind::flat) {
  auto model = build_gabor_model(L, nf, window);
  auto y = WeightedLp::unweighted(model.space_ptr(), 2.0);
  auto cov = uniform_covering(model.space_ptr(), width, overlap);
  const auto& m = y.weight();
  const double delta = max_admissible_delta(schur_norm(model.R(), m), weight_compatibility(cov, m));
  auto osc = check_property_D(model, cov, kernel_phase(model), m, delta);
  auto plan = make_plan(cov, pou, SampleRule::max_weight);
  return Setup{std::move(model), std::move(y), std::move(cov), std::move(osc), std::move(plan)};
}

Setup singleton_setup(FrameModel model, double p = 2.0) {
  auto y = WeightedLp::unweighted(model.space_ptr(), p);
  auto cov = singleton_covering(model.space_ptr());
  auto osc = check_property_D(model, cov, kernel_phase(model), y.weight(), 0.01);
  auto plan = make_plan(cov, PouKind::flat, SampleRule::max_weight);
  return Setup{std::move(model), std::move(y), std::move(cov), std::move(osc), std::move(plan)};
}

InverseOperator make_inverse(const Setup& s, InversionMethod method) {
  InversionOptions o;
  o.method = method;
  o.certificate = contraction_bound(s.osc).sharp;
  return invert_u_phi(s.model, s.plan, s.y, o);
}

double rel(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("sample selection") {
  oracle::Rng rng(51);
  auto line = uniform_line(20);
  const auto sing = singleton_covering(line);
  const auto sp = make_plan(sing, PouKind::flat, SampleRule::medoid);
  for (std::size_t i = 0; i < 20; ++i) CHECK(sp.points[i] == i);

  const auto cov = uniform_covering(line, 5.0, 2.0);
  const auto mw = make_plan(cov, PouKind::flat, SampleRule::max_weight);
  for (std::size_t i = 0; i < cov.size(); ++i) CHECK(mw.points[i] == cov.set(i).front());

  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < 30; ++i) {
    pts.push_back({rng.uniform(0.0, 10.0) + 10.0 * static_cast<double>(i)});
    w.push_back(static_cast<double>(1 + rng.index(4)));
  }
  auto s = make_space(pts, w);
  const Covering rc(s, [&] {
    std::vector<IndexSet> sets;
    for (std::size_t i = 0; i < 30; i += 3) sets.push_back({i, i + 1, i + 2});
    for (int k = 0; k < 5; ++k) sets.push_back({rng.index(30), rng.index(30), rng.index(30)});
    return sets;
  }());
  const auto a = make_plan(rc, PouKind::flat, SampleRule::max_weight);
  const auto b = make_plan(rc, PouKind::flat, SampleRule::medoid);
  for (std::size_t i = 0; i < rc.size(); ++i) {
    const auto& set = rc.set(i);
    std::size_t best = set.front(), med = set.front();
    double bestd = 1e300;
    for (auto x : set) {
      if (s->weight(x) > s->weight(best)) best = x;
      double dsum = 0.0;
      for (auto z : set) dsum += std::abs(s->point(x)[0] - s->point(z)[0]);
      if (dsum < bestd) {
        bestd = dsum;
        med = x;
      }
    }
    CHECK(a.points[i] == best);
    CHECK(b.points[i] == med);
    CHECK(rc.contains(i, a.points[i]));
    CHECK(rc.contains(i, b.points[i]));
  }
}

TEST_CASE("U_Phi and S_Phi") {
  oracle::Rng rng(52);
  // singleton partition: U_Phi = R
  const auto s1 = singleton_setup(build_random_smooth_model(4, 30, 2.0, 5));
  const GridFunction F = rng.cvector(30);
  CHECK((u_phi(s1.model, s1.plan, F) - framedisc::apply(s1.model.R(), F)).norm() <= 1e-13 * F.norm());
  const GridFunction RF = framedisc::apply(s1.model.R(), F);
  CHECK((u_phi(s1.model, s1.plan, RF) - RF).norm() <= 1e-11 * RF.norm());
  CHECK(u_phi(s1.model, s1.plan, GridFunction(GridFunction::Zero(30))).norm() == 0.0);
  const auto one = PhaseFunction::constant_one(30);
  CHECK((s_phi(s1.model, s1.plan, one, F) - framedisc::apply(s1.model.R(), F)).norm() <= 1e-13 * F.norm());
  CHECK(s_phi(s1.model, s1.plan, one, GridFunction(GridFunction::Zero(30))).norm() == 0.0);

  for (auto pou : {PouKind::flat, PouKind::smooth}) {
    const auto g = gabor_setup(4, 64, 4.0, {2.0, 2.0}, {0.0, 1.0}, pou);
    const auto n = static_cast<Eigen::Index>(g.model.size());
    const auto& R = g.model.R();
    const GridFunction G = rng.cvector(n);
    // direct summation
    GridFunction ref = GridFunction::Zero(n);
    for (std::size_t i = 0; i < g.plan.size(); ++i)
      for (Eigen::Index x = 0; x < n; ++x)
        ref(x) += g.plan.c()(i) * G(g.plan.points[i]) * R(x, g.plan.points[i]);
    CHECK((u_phi(g.model, g.plan, G) - ref).norm() <= 1e-13 * ref.norm());
    const Eigen::MatrixXcd U = u_phi_matrix(g.model, g.plan);
    CHECK((U * G - ref).norm() <= 1e-12 * ref.norm());
    Eigen::MatrixXcd block = rng.cmatrix(n, 3);
    const Eigen::MatrixXcd ub = u_phi(g.model, g.plan, block);
    for (Eigen::Index c = 0; c < 3; ++c)
      CHECK((ub.col(c) - u_phi(g.model, g.plan, GridFunction(block.col(c)))).norm() <= 1e-13 * ub.col(c).norm());

    const auto gamma = kernel_phase(g.model);
    const double osc = g.osc.norm;
    const double sigma = sigma_constant(g.osc.R_norm, g.osc.C_mU, osc);
    for (int t = 0; t < 20; ++t) {
      const GridFunction Fr = random_range_function(g.model, 100 + t);
      const double nf = g.y.norm(Fr);
      const GridFunction uf = u_phi(g.model, g.plan, Fr);
      const GridFunction sf = s_phi(g.model, g.plan, gamma, Fr);
      CHECK(g.y.norm(GridFunction(sf - uf)) <= osc * sigma * nf * (1 + 1e-10));
      CHECK(g.y.norm(GridFunction(Fr - sf)) <= g.osc.R_norm * osc * nf * (1 + 1e-10));
      // U_Phi keeps R(Y)
      CHECK(g.y.norm(GridFunction(framedisc::apply(R, uf) - uf)) <= 1e-10 * nf);
      // <U_Phi F, W psi_x> = <F, U_Phi W psi_x> in the mu-pairing
      const auto& w = g.model.space().weights();
      for (Eigen::Index x = 0; x < n; x += 7) {
        const GridFunction col = R.entries().col(x);
        const Complex lhs = (uf.array() * w.array().cast<Complex>() * col.conjugate().array()).sum();
        const GridFunction ucol = u_phi(g.model, g.plan, col);
        const Complex rhs = (Fr.array() * w.array().cast<Complex>() * ucol.conjugate().array()).sum();
        CHECK(std::abs(lhs - rhs) <= 1e-11 * (1 + std::abs(lhs)));
      }
    }
  }
}

TEST_CASE("contraction bounds") {
  const auto s1 = singleton_setup(build_gabor_model(8, 8, 2.0));
  CHECK(contraction_bound(s1.osc).sharp == 0.0);

  OscReport rep{.osc = Kernel::zero(uniform_line(1))};
  rep.R_norm = 1.0;
  rep.C_mU = 1.0;
  rep.delta = 0.4;
  rep.sigma = sigma_constant(1.0, 1.0, 0.4);
  rep.norm = 0.4;
  CHECK(contraction_bound(rep).nominal == doctest::Approx(0.96).epsilon(1e-15));
  CHECK(contraction_bound(rep).sharp == doctest::Approx(0.96).epsilon(1e-15));

  for (double r : {0.5, 1.0, 1.55, 3.0})
    for (double c : {1.0, 1.2, 2.0, 5.0}) {
      const double d = max_admissible_delta(r, c);
      CHECK(d > 0.0);
      CHECK(contraction_condition_holds(r, c, d));
      CHECK_FALSE(contraction_condition_holds(r, c, std::nextafter(d, 1.0) * (1 + 1e-12)));
    }

  for (const auto& cfg : std::vector<std::pair<double, double>>{{1.0, 2.0}, {2.0, 2.0}}) {
    const auto g = gabor_setup(4, 64, 4.0, {cfg.first, cfg.second});
    REQUIRE(g.osc.holds_58);
    const auto b = contraction_bound(g.osc);
    CHECK(b.sharp <= b.nominal);
    const auto obs = contraction_observed(g.model, g.plan, g.y);
    MESSAGE("observed " << obs.estimate << " sharp " << b.sharp);
    CHECK(obs.estimate <= b.sharp + 1e-9);
    CHECK(obs.iterations <= 200);
  }
}

TEST_CASE("inverting U_Phi") {
  oracle::Rng rng(53);
  const auto s1 = singleton_setup(build_random_smooth_model(5, 30, 2.0, 8));
  for (auto method : {InversionMethod::neumann, InversionMethod::direct}) {
    const auto inv = make_inverse(s1, method);
    for (int t = 0; t < 5; ++t) {
      const GridFunction F = random_range_function(s1.model, 200 + t);
      CHECK(s1.y.norm(GridFunction(inv.apply(F) - F)) <= 1e-10 * s1.y.norm(F));
    }
  }

  const auto g = gabor_setup(4, 64, 4.0, {2.0, 2.0});
  const auto neu = make_inverse(g, InversionMethod::neumann);
  const auto dir = make_inverse(g, InversionMethod::direct);
  const double observed = contraction_observed(g.model, g.plan, g.y).estimate;
  for (int t = 0; t < 20; ++t) {
    const GridFunction F = random_range_function(g.model, 300 + t);
    const GridFunction a = neu.apply(F), b = dir.apply(F);
    CHECK(g.y.norm(GridFunction(a - b)) <= 1e-9 * g.y.norm(F));
    CHECK(g.y.norm(GridFunction(u_phi(g.model, g.plan, a) - F)) <= 1e-10 * g.y.norm(F));
    const auto& terms = neu.last_term_norms();
    REQUIRE(terms.size() >= 2);
    for (std::size_t k = 1; k < terms.size(); ++k)
      if (terms[k - 1] > 1e-13 * terms[0]) CHECK(terms[k] / terms[k - 1] <= observed + 1e-6);
  }
  // matrix input is handled column by column
  Eigen::MatrixXcd block(g.model.size(), 2);
  block.col(0) = random_range_function(g.model, 1);
  block.col(1) = random_range_function(g.model, 2);
  const Eigen::MatrixXcd ab = neu.apply(block);
  CHECK((ab.col(1) - neu.apply(GridFunction(block.col(1)))).norm() <= 1e-12 * ab.col(1).norm());

  InversionOptions bare;
  CHECK_THROWS_AS(invert_u_phi(g.model, g.plan, g.y, bare), CertificationError);
  bare.certificate = 1.0;
  CHECK_THROWS_AS(invert_u_phi(g.model, g.plan, g.y, bare), CertificationError);
  bare.certificate = 0.5;
  bare.n_max = 1;
  bare.tol = 1e-15;
  const auto starved = invert_u_phi(g.model, g.plan, g.y, bare);
  CHECK_THROWS_AS(starved.apply(GridFunction(random_range_function(g.model, 3))), NumericalError);

  // one sample for a 4-dimensional model cannot be inverted
  const auto whole = Covering(g.model.space_ptr(), {[&] {
                                IndexSet all(g.model.size());
                                for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
                                return all;
                              }()});
  const auto tiny = make_plan(whole, PouKind::flat, SampleRule::max_weight);
  InversionOptions direct;
  direct.method = InversionMethod::direct;
  CHECK_THROWS_AS(invert_u_phi(g.model, tiny, g.y, direct), NumericalError);
}

TEST_CASE("atomic decomposition, Banach frame and dual frame") {
  oracle::Rng rng(54);
  std::vector<Setup> setups;
  setups.push_back(gabor_setup(4, 64, 2.0, {1.0, 2.0}));
  setups.push_back(gabor_setup(4, 64, 4.0, {2.0, 2.0}));
  setups.push_back(gabor_setup(4, 128, 2.0, {1.0, 3.0}, {0.0, 1.0}, PouKind::smooth));
  setups.push_back(singleton_setup(build_random_smooth_model(5, 24, 2.0, 1)));
  for (const auto& s : setups) {
    REQUIRE(contraction_bound(s.osc).sharp < 1.0);
    const auto inv = make_inverse(s, InversionMethod::neumann);
    for (bool swap : {false, true}) {
      const auto duals = dual_frame(s.model, s.plan, inv, swap);
      const auto& atoms = swap ? s.model.dual_atoms() : s.model.psi();
      CHECK(atomic_decomposition(s.model, s.plan, inv, HilbertVector(HilbertVector::Zero(s.model.dim())), swap).norm() == 0.0);
      CHECK(banach_frame_reconstruct(s.model, s.plan, inv, Eigen::VectorXcd::Zero(s.plan.size()), swap).norm() == 0.0);
      for (int t = 0; t < 50; ++t) {
        const HilbertVector f = rng.cvector(static_cast<Eigen::Index>(s.model.dim()));
        const auto lam = atomic_decomposition(s.model, s.plan, inv, f, swap);
        CHECK(rel(synthesize_plan(s.model, s.plan, lam, swap), f) <= 1e-8);
        const auto samples = sample(s.model, s.plan, f, swap);
        const auto fhat = banach_frame_reconstruct(s.model, s.plan, inv, samples, swap);
        CHECK(rel(fhat, f) <= 1e-8);
        CHECK((sample(s.model, s.plan, fhat, swap) - samples).norm() <= 1e-8 * samples.norm());
        // lambda_i(f) = <f, e_i>
        CHECK((lam - duals.adjoint() * f).cwiseAbs().maxCoeff() <= 1e-10);
        HilbertVector fb = HilbertVector::Zero(f.size()), fc = HilbertVector::Zero(f.size());
        for (std::size_t i = 0; i < s.plan.size(); ++i) {
          const auto a = atoms.col(static_cast<Eigen::Index>(s.plan.points[i]));
          const auto e = duals.col(static_cast<Eigen::Index>(i));
          fb += e.dot(f) * a;
          fc += a.dot(f) * e;
        }
        CHECK(rel(fb, f) <= 1e-8);
        CHECK(rel(fc, f) <= 1e-8);
      }
      // atoms are reproduced
      for (std::size_t i = 0; i < s.plan.size(); i += 5) {
        const HilbertVector a = atoms.col(static_cast<Eigen::Index>(s.plan.points[i]));
        CHECK(rel(banach_frame_reconstruct(s.model, s.plan, inv, sample(s.model, s.plan, a, swap), swap), a) <= 1e-8);
      }
    }
  }

  // orthonormal basis: e_i = psi_{x_i}
  const auto onb = singleton_setup(build_orthonormal_model(6));
  const auto inv = make_inverse(onb, InversionMethod::neumann);
  const auto duals = dual_frame(onb.model, onb.plan, inv);
  CHECK((duals - onb.model.psi()).norm() <= 1e-10);
  const HilbertVector f = rng.cvector(6);
  CHECK(rel(synthesize_plan(onb.model, onb.plan, atomic_decomposition(onb.model, onb.plan, inv, f)), f) <= 1e-10);
}

TEST_CASE("certification beyond the contraction condition") {
  oracle::Rng rng(55);
  // delta at 1 (and at 1/||R||) breaks the condition while the sharp
  // certificate, which only sees ||osc||, stays below 1
  auto g = gabor_setup(4, 64, 2.0, {1.0, 2.0});
  for (double delta : {1.0, 1.0 / g.osc.R_norm}) {
    g.osc = check_property_D(g.model, g.cov, kernel_phase(g.model), g.y.weight(), delta);
    CHECK_FALSE(g.osc.holds_58);
    CHECK(g.osc.holds_D);
    REQUIRE(contraction_bound(g.osc).sharp < 1.0);
    const auto inv = make_inverse(g, InversionMethod::neumann);
    for (int t = 0; t < 10; ++t) {
      const HilbertVector f = rng.cvector(4);
      CHECK(rel(synthesize_plan(g.model, g.plan, atomic_decomposition(g.model, g.plan, inv, f)), f) <= 1e-8);
      CHECK(rel(banach_frame_reconstruct(g.model, g.plan, inv, sample(g.model, g.plan, f)), f) <= 1e-8);
    }
  }
}

TEST_CASE("Hilbert frame bounds") {
  for (auto model : {build_gabor_model(6, 6, 1.5), build_random_smooth_model(5, 20, 2.0, 4)}) {
    const auto s = singleton_setup(model);
    const auto fb = hilbert_frame_bounds(s.model, s.plan);
    const auto& ev = s.model.S_eigenvalues();
    CHECK(std::abs(fb.C1 - ev(0)) <= 1e-10);
    CHECK(std::abs(fb.C2 - ev(ev.size() - 1)) <= 1e-10);
  }
  const auto onb = singleton_setup(build_orthonormal_model(5));
  const auto fb = hilbert_frame_bounds(onb.model, onb.plan);
  CHECK(std::abs(fb.C1 - 1.0) <= 1e-10);
  CHECK(std::abs(fb.C2 - 1.0) <= 1e-10);

  const auto g = gabor_setup(4, 64, 4.0, {2.0, 2.0});
  REQUIRE(g.osc.holds_58);
  const auto gb = hilbert_frame_bounds(g.model, g.plan);
  std::vector<double> mu;
  Eigen::MatrixXcd atoms(g.model.dim(), g.plan.size());
  for (std::size_t i = 0; i < g.plan.size(); ++i) {
    mu.push_back(g.cov.measure(i));
    atoms.col(static_cast<Eigen::Index>(i)) = g.model.psi().col(static_cast<Eigen::Index>(g.plan.points[i]));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle::frame_operator(atoms, mu));
  CHECK(gb.C1 > 0.0);
  CHECK(std::abs(gb.C1 - es.eigenvalues()(0)) <= 1e-10 * es.eigenvalues().maxCoeff());
  CHECK(std::abs(gb.C2 - es.eigenvalues().maxCoeff()) <= 1e-10 * es.eigenvalues().maxCoeff());
}

TEST_CASE("inequality suite") {
  oracle::Rng rng(56);
  std::vector<Setup> setups;
  setups.push_back(singleton_setup(build_random_smooth_model(4, 24, 2.0, 2)));
  setups.push_back(singleton_setup(build_gabor_model(4, 8, 1.5), kInfinity));
  setups.push_back(gabor_setup(4, 64, 2.0, {1.0, 2.0}));
  setups.push_back(gabor_setup(4, 128, 2.0, {1.0, 3.0}, {0.0, 1.0}, PouKind::smooth));
  for (const auto& s : setups) {
    const auto rep = verify_corollaries(s.model, s.plan, s.y, s.osc);
    CHECK(rep.all_hold());
    for (const auto* c : {&rep.samples_flat, &rep.samples_pou, &rep.coeffs_flat, &rep.l1v_into_y, &rep.y_into_linf,
                          &rep.synthesis, &rep.range_into_linf}) {
      CHECK(c->violations == 0);
      CHECK(c->trials == 50);
      CHECK(std::isfinite(c->constant));
      CHECK(c->worst_ratio <= c->constant * (1 + 1e-10));
    }
    // D against the kernel built by hand
    const auto n = s.model.size();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < s.plan.size(); ++i)
      for (auto x : s.cov.set(i))
        for (std::size_t y = 0; y < n; ++y) K(x, y) += std::abs(s.model.R()(s.plan.points[i], y));
    CHECK(rep.D_const == doctest::Approx(schur_norm(Kernel(s.model.space_ptr(), K.cast<Complex>()), s.y.weight())).epsilon(1e-13));

    const auto eq = norm_equivalence(s.model, s.plan, s.y, 50, 1);
    const auto eq2 = norm_equivalence(s.model, s.plan, s.y, 50, 2);
    for (const auto& e : {eq, eq2}) {
      CHECK(e.trials == 50);
      CHECK(e.min_ratio > 0.0);
      CHECK(e.min_ratio <= e.max_ratio);
      CHECK(std::isfinite(e.max_ratio));
      CHECK(e.min_ratio * rep.D_const >= 1.0 - 1e-10);
    }
  }
  // mismatched report
  const auto a = gabor_setup(4, 64, 2.0, {1.0, 2.0});
  const auto b = gabor_setup(4, 64, 2.0, {2.0, 2.0});
  CHECK_THROWS(verify_corollaries(a.model, a.plan, a.y, b.osc));
}
