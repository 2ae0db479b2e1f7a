#include "framedisc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "framedisc/coverings.hpp"
#include "framedisc/discretizer.hpp"
#include "framedisc/errors.hpp"
#include "framedisc/frame_models.hpp"
#include "framedisc/function_spaces.hpp"
#include "framedisc/oscillation.hpp"

namespace framedisc {

namespace {

// ---------------------------------------------------------------------------
// Typed access to the configuration

std::string get_choice(const Json& cfg, const char* key, std::initializer_list<const char*> allowed) {
  const auto& v = cfg.at(key);
  if (!v.is_string()) throw ConfigError(std::string(key) + ": expected a string");
  const auto s = v.get<std::string>();
  for (const char* a : allowed)
    if (s == a) return s;
  std::string msg = std::string(key) + ": unknown value '" + s + "' (expected one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(msg + ")");
}

double get_number(const Json& cfg, const char* key) {
  const auto& v = cfg.at(key);
  if (!v.is_number()) throw ConfigError(std::string(key) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string(key) + ": must be finite");
  return x;
}

double get_positive(const Json& cfg, const char* key) {
  const double x = get_number(cfg, key);
  if (!(x > 0.0)) throw ConfigError(std::string(key) + ": must be positive");
  return x;
}

std::size_t get_count(const Json& cfg, const char* key, std::size_t min_value = 1) {
  const auto& v = cfg.at(key);
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value))
    throw ConfigError(std::string(key) + ": expected an integer >= " + std::to_string(min_value));
  return v.get<std::size_t>();
}

bool get_bool(const Json& cfg, const char* key) {
  const auto& v = cfg.at(key);
  if (!v.is_boolean()) throw ConfigError(std::string(key) + ": expected true or false");
  return v.get<bool>();
}

std::vector<double> get_axes(const Json& cfg, const char* key, std::size_t dim) {
  const auto& v = cfg.at(key);
  std::vector<double> out;
  if (v.is_number()) {
    out.assign(dim, v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(std::string(key) + ": entries must be numbers");
      out.push_back(e.get<double>());
    }
    if (out.size() != dim)
      throw ConfigError(std::string(key) + ": need " + std::to_string(dim) +
                        " entries, one per coordinate axis");
  } else {
    throw ConfigError(std::string(key) + ": expected a number or an array of numbers");
  }
  for (double x : out)
    if (!std::isfinite(x)) throw ConfigError(std::string(key) + ": must be finite");
  return out;
}

double get_exponent(const Json& cfg) {
  const auto& v = cfg.at("p");
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity"))
    return kInfinity;
  const double p = get_number(cfg, "p");
  if (p < 1.0) throw ConfigError("p: must lie in [1, inf]");
  return p;
}

// ---------------------------------------------------------------------------
// Pipeline pieces

FrameModel build_model(const Json& cfg) {
  const auto kind = get_choice(cfg, "model", {"gabor", "random-smooth", "orthonormal"});
  if (kind == "gabor") {
    const auto nt = get_count(cfg, "n-time");
    const auto nf = get_count(cfg, "n-freq");
    if (nt * nf > kDefaultMaxPoints)
      throw ConfigError("n-time * n-freq exceeds the grid cap of " +
                        std::to_string(kDefaultMaxPoints) + " points");
    return build_gabor_model(nt, nf, get_positive(cfg, "window-width"));
  }
  if (kind == "random-smooth") {
    const auto d = get_count(cfg, "d");
    const double smooth = get_number(cfg, "smoothness");
    const auto seed = get_count(cfg, "seed", 0);
    if (!cfg.at("grid").is_null()) return build_random_smooth_model(space_from_json(cfg.at("grid")), d, smooth, seed);
    const auto n = get_count(cfg, "n-points");
    if (n > kDefaultMaxPoints)
      throw ConfigError("n-points exceeds the grid cap of " + std::to_string(kDefaultMaxPoints));
    return build_random_smooth_model(d, n, smooth, seed);
  }
  return build_orthonormal_model(get_count(cfg, "d"));
}

WeightedLp build_space(const Json& cfg, const FrameModel& model) {
  const double p = get_exponent(cfg);
  const auto ref = get_count(cfg, "reference-point", 0);
  if (ref >= model.size()) throw ConfigError("reference-point: index is off the grid");
  const auto rule = get_choice(cfg, "weight", {"one", "exp"});
  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(model.size()));
  if (rule == "exp") {
    const double alpha = get_number(cfg, "weight-alpha");
    const auto& z = model.space().point(ref);
    for (std::size_t x = 0; x < model.size(); ++x) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < z.size(); ++k) {
        const double t = model.space().point(x)[k] - z[k];
        d2 += t * t;
      }
      w(static_cast<Eigen::Index>(x)) = std::exp(alpha * std::sqrt(d2));
    }
  }
  return WeightedLp(model.space_ptr(), p, std::move(w), ref);
}

Covering build_covering(const Json& cfg, const FrameModel& model) {
  const auto kind = get_choice(cfg, "covering", {"uniform", "singleton", "explicit"});
  if (kind == "singleton") return singleton_covering(model.space_ptr());
  if (kind == "explicit") {
    if (cfg.at("sets").is_null()) throw ConfigError("sets: required for an explicit covering");
    return covering_from_json(Json{{"sets", cfg.at("sets")}}, model.space_ptr());
  }
  const auto dim = model.space().coordinate_dim();
  return uniform_covering(model.space_ptr(), get_axes(cfg, "width", dim),
                          get_axes(cfg, "overlap", dim));
}

PhaseRule phase_rule(const Json& cfg) {
  return get_choice(cfg, "gamma", {"kernel-phase", "one"}) == "one" ? PhaseRule::constant_one
                                                                     : PhaseRule::kernel_phase;
}

Json covering_json(const Covering& cov, const Weight2D& weight) {
  const auto r = validate_covering(cov);
  return Json{{"covering_id", cov.id()},
              {"n_sets", cov.size()},
              {"admissible", r.admissible},
              {"moderate", r.moderate},
              {"N", r.N},
              {"D", r.D},
              {"C_tilde", r.C_tilde},
              {"C_mU", weight_compatibility(cov, weight)},
              {"uncovered", r.uncovered},
              {"empty_sets", r.empty_sets}};
}

Json osc_json(const OscReport& r) {
  return Json{{"osc_norm", r.norm},     {"delta", r.delta},       {"sigma", r.sigma},
              {"R_norm", r.R_norm},     {"C_mU", r.C_mU},         {"condition_lhs", r.condition_lhs},
              {"holds_D", r.holds_D},   {"holds_58", r.holds_58}, {"covering_id", r.covering_id}};
}

// Covering plus oscillation report, either fixed or found by refinement.
struct CertifiedCovering {
  Covering covering;
  OscReport report;
  Json refine = nullptr;
};

CertifiedCovering certify(const Json& cfg, const FrameModel& model, const WeightedLp& y) {
  const auto rule = phase_rule(cfg);
  const auto& m = y.weight();
  std::optional<double> delta;
  if (!cfg.at("delta").is_null()) {
    delta = get_number(cfg, "delta");
    if (*delta < 0.0) throw ConfigError("delta: must be non-negative");
  }

  if (get_bool(cfg, "refine") && (!delta || *delta > 0.0)) {
    const double r_norm = schur_norm(model.R(), m);
    const double d = delta ? *delta : max_admissible_delta(r_norm, 1.0);
    RefineOptions opts;
    if (!cfg.at("width").is_null())
      opts.initial_width = get_axes(cfg, "width", model.space().coordinate_dim());
    opts.overlap_fraction = get_number(cfg, "overlap-fraction");
    opts.max_rounds = get_count(cfg, "max-rounds");
    auto res = refine_until(model, m, d, rule, opts);
    Json refine{{"rounds", res.rounds}, {"width", res.width}, {"singleton", res.width.empty()}};
    return CertifiedCovering{std::move(res.covering), std::move(res.report), std::move(refine)};
  }

  auto cov = get_bool(cfg, "refine") ? singleton_covering(model.space_ptr()) : build_covering(cfg, model);
  const auto gamma = make_phase(model, rule);
  const double d = delta ? *delta
                         : max_admissible_delta(schur_norm(model.R(), m), weight_compatibility(cov, m));
  auto rep = check_property_D(model, cov, gamma, m, d);
  return CertifiedCovering{std::move(cov), std::move(rep)};
}

Json base_report(const char* command, const Json& cfg) {
  return Json{{"schema_version", kSchemaVersion}, {"command", command}, {"config", cfg}};
}

// ---------------------------------------------------------------------------
// Residual statistics

struct Stat {
  double max = 0.0;
  double sum = 0.0;
  std::size_t count = 0;
  void add(double x) {
    max = std::max(max, x);
    sum += x;
    ++count;
  }
  Json json() const { return Json{{"max", max}, {"mean", count ? sum / count : 0.0}}; }
};

double relative(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double nb = b.norm();
  return nb > 0.0 ? (a - b).norm() / nb : a.norm();
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

Json default_config() {
  return Json{{"model", "gabor"},
              {"d", 8},
              {"n-time", 4},
              {"n-freq", 64},
              {"window-width", 2.0},
              {"n-points", 64},
              {"smoothness", 2.0},
              {"grid", nullptr},
              {"seed", 1},
              {"weight", "one"},
              {"weight-alpha", 0.0},
              {"p", 2},
              {"reference-point", 0},
              {"covering", "uniform"},
              {"width", Json::array({1, 2})},
              {"overlap", 0},
              {"sets", nullptr},
              {"refine", false},
              {"overlap-fraction", 0.5},
              {"max-rounds", 16},
              {"delta", nullptr},
              {"gamma", "kernel-phase"},
              {"pou", "flat"},
              {"sample-rule", "max-weight"},
              {"method", "neumann"},
              {"tol", 1e-12},
              {"n-max", 200},
              {"trials", 50},
              {"recon-tol", 1e-8},
              {"duality-tol", 1e-10},
              {"swap-roles", false},
              {"output", nullptr}};
}

Json merge_config(Json base, const Json& overrides) {
  if (!overrides.is_object()) throw ConfigError("configuration must be a JSON object");
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    if (!base.contains(it.key())) throw ConfigError("unknown configuration key '" + it.key() + "'");
    base[it.key()] = it.value();
  }
  return base;
}

Json parse_flag_value(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception&) {
    return Json(text);
  }
}

// ---------------------------------------------------------------------------
// Commands

RunResult cmd_validate(const Json& cfg) {
  RunResult res;
  res.report = base_report("validate", cfg);
  const auto model = build_model(cfg);
  const auto y = build_space(cfg, model);
  const auto cov = build_covering(cfg, model);
  res.report["covering"] = covering_json(cov, y.weight());
  res.exit_code = res.report["covering"]["moderate"].get<bool>() ? kExitOk : kExitPropertyFails;
  return res;
}

RunResult cmd_osc(const Json& cfg) {
  RunResult res;
  res.report = base_report("osc", cfg);
  const auto model = build_model(cfg);
  const auto y = build_space(cfg, model);
  auto cert = certify(cfg, model, y);
  res.report["covering"] = covering_json(cert.covering, y.weight());
  res.report["osc"] = osc_json(cert.report);
  res.report["refine"] = cert.refine;
  res.exit_code = cert.report.holds_D && cert.report.holds_58 ? kExitOk : kExitPropertyFails;
  return res;
}

RunResult cmd_discretize(const Json& cfg) {
  RunResult res;
  res.report = base_report("discretize", cfg);
  Json& rep = res.report;

  const auto model = build_model(cfg);
  const auto y = build_space(cfg, model);
  auto cert = certify(cfg, model, y);
  const auto& osc = cert.report;
  rep["covering"] = covering_json(cert.covering, y.weight());
  rep["osc"] = osc_json(osc);
  rep["refine"] = cert.refine;

  const auto pou = get_choice(cfg, "pou", {"flat", "smooth"}) == "flat" ? PouKind::flat : PouKind::smooth;
  const auto rule = get_choice(cfg, "sample-rule", {"max-weight", "medoid"}) == "max-weight"
                        ? SampleRule::max_weight
                        : SampleRule::medoid;
  const auto plan = make_plan(cert.covering, pou, rule);
  rep["plan"] = Json{{"covering_id", plan.covering.id()}, {"points", plan.points}};

  const auto bounds = contraction_bound(osc);
  const auto seed = get_count(cfg, "seed", 0);
  const auto observed = contraction_observed(model, plan, y, seed + 7);
  const double recon_tol = get_positive(cfg, "recon-tol");
  const double duality_tol = get_positive(cfg, "duality-tol");
  const bool swap = get_bool(cfg, "swap-roles");
  const auto trials = get_count(cfg, "trials");

  InversionOptions opts;
  opts.method = get_choice(cfg, "method", {"neumann", "direct"}) == "neumann" ? InversionMethod::neumann
                                                                            : InversionMethod::direct;
  opts.tol = get_positive(cfg, "tol");
  opts.n_max = get_count(cfg, "n-max");
  opts.certificate = bounds.sharp;
  const InverseOperator inverse(model, plan, y, opts);

  // The other method, when it applies, serves as a cross-check.
  std::optional<InverseOperator> other;
  try {
    auto o = opts;
    o.method = opts.method == InversionMethod::neumann ? InversionMethod::direct : InversionMethod::neumann;
    other.emplace(model, plan, y, o);
  } catch (const std::runtime_error&) {
  }

  const auto frame = hilbert_frame_bounds(model, plan);
  const auto duals = dual_frame(model, plan, inverse, swap);
  const auto& atoms = swap ? model.dual_atoms() : model.psi();

  Stat atomic, banach, duality, expansion_b, expansion_c, cross;
  for (std::size_t t = 0; t < trials; ++t) {
    HilbertVector f = random_vector(model.dim(), seed * 1000003ULL + t);
    f.normalize();
    const auto lambda = atomic_decomposition(model, plan, inverse, f, swap);
    atomic.add(relative(synthesize_plan(model, plan, lambda, swap), f));
    banach.add(relative(banach_frame_reconstruct(model, plan, inverse, sample(model, plan, f, swap), swap), f));
    const Eigen::VectorXcd paired = duals.adjoint() * f;  // <f, e_i>
    duality.add((lambda - paired).cwiseAbs().maxCoeff());
    HilbertVector fb = HilbertVector::Zero(f.size()), fc = HilbertVector::Zero(f.size());
    for (std::size_t i = 0; i < plan.size(); ++i) {
      const auto xi = static_cast<Eigen::Index>(plan.points[i]);
      fb += paired(static_cast<Eigen::Index>(i)) * atoms.col(xi);
      fc += atoms.col(xi).dot(f) * duals.col(static_cast<Eigen::Index>(i));
    }
    expansion_b.add(relative(fb, f));
    expansion_c.add(relative(fc, f));
    if (other) {
      const GridFunction g = random_range_function(model, seed * 7919ULL + t);
      const double gn = y.norm(g);
      cross.add(gn > 0.0 ? y.norm(GridFunction(inverse.apply(g) - other->apply(g))) / gn : 0.0);
    }
  }

  const auto cor = verify_corollaries(model, plan, y, osc, trials, seed + 11);
  const auto equiv = norm_equivalence(model, plan, y, trials, seed + 13);

  rep["constants"] = Json{{"delta", osc.delta},
                          {"sigma", osc.sigma},
                          {"R_norm", osc.R_norm},
                          {"osc_norm", osc.norm},
                          {"C_mU", osc.C_mU},
                          {"contraction_bound", bounds.nominal},
                          {"contraction_bound_sharp", bounds.sharp},
                          {"contraction_observed", observed.estimate},
                          {"C1", frame.C1},
                          {"C2", frame.C2},
                          {"D_const", cor.D_const},
                          {"sigma_kernel", cor.sigma_kernel},
                          {"norm_equiv_min", equiv.min_ratio},
                          {"norm_equiv_max", equiv.max_ratio}};
  rep["residuals"] = Json{{"atomic", atomic.json()},
                          {"banach", banach.json()},
                          {"duality", duality.json()},
                          {"expansion_b", expansion_b.json()},
                          {"expansion_c", expansion_c.json()},
                          {"cross_method", other ? cross.json() : Json(nullptr)}};
  rep["seeds"] = Json{{"seed", seed}, {"trials", trials}};
  rep["inversion"] = Json{{"method", cfg.at("method")},
                          {"swap_roles", swap},
                          {"tol", opts.tol},
                          {"n_max", opts.n_max}};

  Json checks = Json::array();
  Json failing = Json::array();
  auto check = [&](const char* name, double value, double limit) {
    const bool pass = value <= limit;
    checks.push_back(Json{{"name", name}, {"value", value}, {"limit", limit}, {"pass", pass}});
    if (!pass) failing.push_back(name);
  };
  check("atomic_residual", atomic.max, recon_tol);
  check("banach_residual", banach.max, recon_tol);
  check("duality", duality.max, duality_tol);
  check("expansion_b", expansion_b.max, recon_tol);
  check("expansion_c", expansion_c.max, recon_tol);
  if (other) check("cross_method", cross.max, 1e-9);
  check("contraction_observed", observed.estimate, bounds.sharp + 1e-9);
  auto ineq = [&](const char* name, const InequalityCheck& c) {
    checks.push_back(Json{{"name", name},
                          {"constant", c.constant},
                          {"worst_ratio", c.worst_ratio},
                          {"violations", c.violations},
                          {"pass", c.violations == 0}});
    if (c.violations) failing.push_back(name);
  };
  ineq("samples_flat", cor.samples_flat);
  ineq("samples_pou", cor.samples_pou);
  ineq("coeffs_flat", cor.coeffs_flat);
  ineq("l1v_into_y", cor.l1v_into_y);
  ineq("y_into_linf", cor.y_into_linf);
  ineq("synthesis", cor.synthesis);
  ineq("range_into_linf", cor.range_into_linf);
  if (osc.holds_58) {
    const bool pass = frame.C1 > 0.0;
    checks.push_back(Json{{"name", "frame_lower_bound"}, {"value", frame.C1}, {"pass", pass}});
    if (!pass) failing.push_back("frame_lower_bound");
  }
  rep["checks"] = checks;
  rep["failing"] = failing;
  res.exit_code = failing.empty() ? kExitOk : kExitPropertyFails;
  return res;
}

RunResult run_command(const std::string& command, const Json& config) {
  auto fail = [&](int code, const std::string& msg) {
    RunResult r;
    r.exit_code = code;
    r.report = Json{{"schema_version", kSchemaVersion}, {"command", command}, {"error", msg}};
    return r;
  };
  try {
    RunResult r;
    if (command == "validate")
      r = cmd_validate(config);
    else if (command == "osc")
      r = cmd_osc(config);
    else if (command == "discretize")
      r = cmd_discretize(config);
    else
      return fail(kExitConfigError, "unknown command '" + command + "'");
    r.report["exit_code"] = r.exit_code;
    return r;
  } catch (const RefineError& e) {
    auto r = fail(kExitPropertyFails, e.what());
    r.report["osc"] = osc_json(e.last_report());
    r.report["exit_code"] = r.exit_code;
    return r;
  } catch (const CertificationError& e) {
    auto r = fail(kExitCertificationRefusal, e.what());
    r.report["exit_code"] = r.exit_code;
    return r;
  } catch (const NumericalError& e) {
    auto r = fail(kExitNumericalFailure, e.what());
    r.report["exit_code"] = r.exit_code;
    return r;
  } catch (const std::invalid_argument& e) {
    auto r = fail(kExitConfigError, e.what());
    r.report["exit_code"] = r.exit_code;
    return r;
  } catch (const Json::exception& e) {
    auto r = fail(kExitConfigError, e.what());
    r.report["exit_code"] = r.exit_code;
    return r;
  }
}

std::string report_merge(const std::vector<Json>& reports, const std::vector<std::string>& names) {
  static const std::vector<std::pair<const char*, const char*>> columns = {
      {"covering", "covering_id"}, {"covering", "N"},     {"covering", "D"},
      {"covering", "C_tilde"},     {"osc", "C_mU"},       {"osc", "osc_norm"},
      {"osc", "delta"},            {"osc", "sigma"},      {"osc", "R_norm"},
      {"osc", "holds_D"},          {"osc", "holds_58"},   {"constants", "contraction_bound"},
      {"constants", "contraction_bound_sharp"},           {"constants", "contraction_observed"},
      {"constants", "C1"},         {"constants", "C2"},   {"constants", "D_const"}};
  std::ostringstream out;
  out << "report,command,exit_code";
  for (const auto& [group, key] : columns) out << ',' << key;
  out << '\n';
  auto cell = [](const Json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
  };
  for (std::size_t r = 0; r < reports.size(); ++r) {
    const auto& rep = reports[r];
    out << (r < names.size() ? names[r] : std::to_string(r)) << ','
        << cell(rep.value("command", Json(nullptr))) << ','
        << cell(rep.value("exit_code", Json(nullptr)));
    for (const auto& [group, key] : columns) {
      out << ',';
      if (rep.contains(group) && rep[group].is_object() && rep[group].contains(key))
        out << cell(rep[group][key]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace framedisc
