#include "duffing/report.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "duffing/oracle.hpp"

namespace duffing::report {

namespace {

using fock::NOPoly;
using meanfield::MeanFieldSolution;

constexpr double kRatioLo = 3.4;
constexpr double kRatioHi = 4.7;
constexpr double kBaseLo = 1.9;
constexpr double kBaseHi = 2.1;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

void add_check(VerifyReport& r, std::string name, double value, std::string bound, bool pass) {
  r.checks.push_back({std::move(name), value, std::move(bound), pass});
}

void add_below(VerifyReport& r, const std::string& name, double value, double limit) {
  add_check(r, name, value, "< " + fmt(limit), value < limit);
}

void add_window(VerifyReport& r, const std::string& name, double value, double lo, double hi) {
  add_check(r, name, value, "[" + fmt(lo) + ", " + fmt(hi) + "]", value >= lo && value <= hi);
}

double eval_at(Quantity quantity, const MeanFieldSolution& sol, const VerifyConfig& cfg) {
  const double t = cfg.phase / sol.Omega;
  switch (quantity) {
    case Quantity::liouville:
      return forge::liouville_residual(forge::generators_at(sol, t, cfg.mode), forge::build_h_sectors(sol, t),
                                       sol, cfg.dim);
    case Quantity::liouville_bare:
      return forge::liouville_residual(forge::bare_generators(sol, t), forge::build_h_sectors(sol, t), sol,
                                       cfg.dim);
    case Quantity::commutator:
      return forge::commutator_defect(forge::generators_at(sol, t, cfg.mode), cfg.dim);
    case Quantity::density: {
      const double w0 = cfg.omega0 > 0.0 ? cfg.omega0 : sol.Omega;
      return forge::density_liouville_residual(sol, cfg.mode, t, {w0, cfg.dim, true});
    }
  }
  return 0.0;
}

void add_scaling(VerifyReport& r, const VerifyConfig& cfg, Quantity quantity, const std::string& key,
                 double lo, double hi) {
  const ScalingSeries s = scaling_series(cfg, quantity);
  for (std::size_t i = 0; i < s.ratios.size(); ++i) {
    add_window(r, key + "_ratio_" + std::to_string(i + 1), s.ratios[i], lo, hi);
  }
}

void add_improvement(VerifyReport& r, const VerifyConfig& cfg, Quantity quantity, const std::string& key) {
  const ScalingSeries gen = scaling_series(cfg, quantity);
  const ScalingSeries base = scaling_series(cfg, Quantity::liouville_bare);
  for (std::size_t i = 0; i < gen.ratios.size(); ++i) {
    r.extras[key + "_baseline_ratio_" + std::to_string(i + 1)] = base.ratios[i];
    add_check(r, key + "_ratio_" + std::to_string(i + 1), gen.ratios[i], "> baseline " + fmt(base.ratios[i]),
              gen.ratios[i] > base.ratios[i]);
  }
}

void suite_algebra(VerifyReport& r, const VerifyConfig&) {
  const AlgebraCheck a = random_algebra_identities(20240611, 200, 48);
  r.extras["algebra_identities"] = a.identities;
  add_below(r, "algebra_product_error", a.max_product_error, 1e-10);
  add_below(r, "algebra_adjoint_error", a.max_adjoint_error, 1e-10);
  const flow::ModeDiscrepancy d = flow::compare_modes(0.05);
  const std::array<double, 4> expected{1.0, 3.0, 3.0, 1.0};
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(d.source_factors[k] - expected[k]));
  add_below(r, "source_factor_pattern", worst, 1e-10);
}

void suite_h2(VerifyReport& r, const VerifyConfig& cfg) {
  const MeanFieldSolution sol = meanfield::solve_omega(cfg.params);
  const double t = cfg.phase / sol.Omega;
  const forge::SectorSplit split = forge::build_h_sectors(sol, t);
  const double offdiag = std::max({std::abs(split.h2.coeff(2, 0)), std::abs(split.h2.coeff(0, 2)),
                                   std::abs(split.h2.coeff(1, 0)), std::abs(split.h2.coeff(0, 1))});
  const std::complex<double> number = split.h2.coeff(1, 1);
  r.h2_offdiag_max = offdiag;
  r.h2_number_coeff = number.real();
  add_below(r, "h2_offdiag_max", offdiag, 1e-12);
  add_below(r, "h2_number_coeff", std::abs(number - sol.Omega), 1e-12 * std::max(1.0, sol.Omega));
  add_below(r, "sector_completeness", sector_completeness(sol, t, 48), 1e-10);
}

void suite_liouville(VerifyReport& r, const VerifyConfig& cfg) {
  const MeanFieldSolution sol = meanfield::solve_omega(cfg.params);
  const double value = eval_at(Quantity::liouville, sol, cfg);
  r.liouville_residual = value;
  if (cfg.params.lambda == 0.0) {
    add_below(r, "liouville_residual", value, 1e-10);
    return;
  }
  if (cfg.alpha_fixed) {
    add_scaling(r, cfg, Quantity::liouville, "liouville", kRatioLo, kRatioHi);
    add_scaling(r, cfg, Quantity::liouville_bare, "liouville_baseline", kBaseLo, kBaseHi);
  } else {
    add_improvement(r, cfg, Quantity::liouville, "liouville");
  }
}

void suite_commutator(VerifyReport& r, const VerifyConfig& cfg) {
  const MeanFieldSolution sol = meanfield::solve_omega(cfg.params);
  const double value = eval_at(Quantity::commutator, sol, cfg);
  r.commutator_defect = value;
  if (cfg.params.lambda == 0.0) {
    add_below(r, "commutator_defect", value, 1e-10);
    return;
  }
  if (cfg.alpha_fixed) {
    add_scaling(r, cfg, Quantity::commutator, "commutator", kRatioLo, kRatioHi);
  } else {
    const ScalingSeries s = scaling_series(cfg, Quantity::commutator);
    for (std::size_t i = 0; i < s.ratios.size(); ++i) {
      add_check(r, "commutator_ratio_" + std::to_string(i + 1), s.ratios[i], "> 2", s.ratios[i] > 2.0);
    }
  }
}

void suite_variational(VerifyReport& r, const VerifyConfig& cfg) {
  const MeanFieldSolution sol = meanfield::solve_omega(cfg.params);
  const oracle::SpectrumResult ed = oracle::exact_diagonalize(cfg.params, {256, 384});
  const double e0 = ed.ground_energy();
  const double emf = meanfield::mean_energy(sol, 0.0);
  r.extras["exact_e0"] = e0;
  r.extras["mean_energy"] = emf;
  r.extras["variational_gap"] = (emf - e0) / std::abs(e0);
  add_check(r, "exact_e0_converged", std::abs(ed.energies.back()[0] - ed.energies.front()[0]), "< 1e-08",
            ed.converged.front());
  add_check(r, "variational_bound", emf - e0, "> 0", emf > e0);
}

void suite_rho(VerifyReport& r, const VerifyConfig& cfg) {
  const MeanFieldSolution sol = meanfield::solve_omega(cfg.params);
  const double t = cfg.phase / sol.Omega;
  const double w0 = cfg.omega0 > 0.0 ? cfg.omega0 : sol.Omega;
  const forge::GeneratorPair g = forge::generators_at(sol, t, cfg.mode);
  const fock::FockMatrix rho = forge::density_operator(g, {w0, cfg.dim, true});
  const Eigen::MatrixXcd& m = rho.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  const forge::CumulantReport c = forge::quadrature_cumulants(rho, sol, t);
  r.kurtosis_excess = c.kurtosis_excess;
  r.purity = c.purity;
  r.extras["omega0"] = w0;
  r.extras["q2"] = c.q2;
  r.extras["q4"] = c.q4;
  add_below(r, "rho_hermiticity", (m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  add_check(r, "rho_min_eigenvalue", es.eigenvalues().minCoeff(), ">= -1e-12", es.eigenvalues().minCoeff() >= -1e-12);
  add_below(r, "rho_trace", std::abs(m.trace() - 1.0), 1e-10);
  if (cfg.params.lambda == 0.0) {
    add_below(r, "kurtosis_excess", std::abs(c.kurtosis_excess), 1e-10);
  } else {
    add_check(r, "kurtosis_excess", std::abs(c.kurtosis_excess), "> 1e-06", std::abs(c.kurtosis_excess) > 1e-6);
    if (cfg.alpha_fixed) add_scaling(r, cfg, Quantity::density, "rho_liouville", kRatioLo, kRatioHi);
  }
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<std::string> VerifyReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.pass) out.push_back(c.name);
  }
  return out;
}

nlohmann::ordered_json VerifyReport::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["mode"] = flow::to_string(mode);
  j["convention"] = meanfield::to_string(convention);
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("h2_offdiag_max", h2_offdiag_max);
  put("h2_number_coeff", h2_number_coeff);
  put("liouville_residual", liouville_residual);
  put("commutator_defect", commutator_defect);
  put("kurtosis_excess", kurtosis_excess);
  put("purity", purity);
  for (const auto& [k, v] : extras) j[k] = v;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});
  }
  j["checks"] = list;
  j["pass"] = passed();
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "h2", "liouville", "commutator", "variational", "rho"};
  return names;
}

VerifyReport run_suite(const std::string& suite, const VerifyConfig& cfg) {
  cfg.params.validate();
  if (cfg.dim < 32) throw std::invalid_argument("nfock must be at least 32");
  if (!(cfg.phase > 0.0) || !std::isfinite(cfg.phase)) throw std::invalid_argument("time must be positive");
  VerifyReport r;
  r.suite = suite;
  r.mode = cfg.mode;
  r.convention = cfg.params.convention;
  if (suite == "all") {
    suite_algebra(r, cfg);
    suite_h2(r, cfg);
    suite_liouville(r, cfg);
    suite_commutator(r, cfg);
    suite_variational(r, cfg);
    suite_rho(r, cfg);
  } else if (suite == "algebra") {
    suite_algebra(r, cfg);
  } else if (suite == "h2") {
    suite_h2(r, cfg);
  } else if (suite == "liouville") {
    suite_liouville(r, cfg);
  } else if (suite == "commutator") {
    suite_commutator(r, cfg);
  } else if (suite == "variational") {
    suite_variational(r, cfg);
  } else if (suite == "rho") {
    suite_rho(r, cfg);
  } else {
    throw std::invalid_argument("unknown suite '" + suite + "'");
  }
  return r;
}

AlgebraCheck random_algebra_identities(std::uint64_t seed, int count, int dim, int band) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> power(0, 3);
  std::uniform_int_distribution<int> terms(1, 4);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  auto random_poly = [&] {
    NOPoly p;
    const int n = terms(rng);
    for (int i = 0; i < n; ++i) {
      const int j = power(rng);
      const int k = power(rng);
      p.add_term({j, k}, {coeff(rng), coeff(rng)});
    }
    return p;
  };

  AlgebraCheck out;
  for (int i = 0; i < count; ++i) {
    const NOPoly p = random_poly();
    const NOPoly q = random_poly();
    const Eigen::MatrixXcd engine = fock::to_matrix(fock::no_product(p, q), dim).interior(band);
    const Eigen::MatrixXcd dense = (fock::to_matrix(p, dim) * fock::to_matrix(q, dim)).interior(band);
    const double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
    out.max_product_error = std::max(out.max_product_error, (engine - dense).cwiseAbs().maxCoeff() / scale);
    const Eigen::MatrixXcd adj = fock::to_matrix(fock::adjoint(p), dim).matrix();
    const Eigen::MatrixXcd dense_adj = fock::to_matrix(p, dim).matrix().adjoint();
    const double adj_scale = std::max(1.0, dense_adj.cwiseAbs().maxCoeff());
    out.max_adjoint_error = std::max(out.max_adjoint_error, (adj - dense_adj).cwiseAbs().maxCoeff() / adj_scale);
    ++out.identities;
  }
  return out;
}

double sector_completeness(const meanfield::MeanFieldSolution& sol, double t, int dim, int band) {
  const forge::SectorSplit split = forge::build_h_sectors(sol, t);
  const Eigen::MatrixXcd sectors = fock::to_matrix(split.h2, dim).matrix() +
                                   split.coupling * fock::to_matrix(split.h4, dim).matrix() +
                                   split.e0 * Eigen::MatrixXcd::Identity(dim, dim);
  const Eigen::MatrixXcd dense =
      oracle::hamiltonian_matrix(sol.params, dim, oracle::Quadratures::mode(meanfield::mode_at(sol, t)));
  const int n = dim - band;
  return fock::inf_norm((sectors - dense).topLeftCorner(n, n));
}

ScalingSeries scaling_series(const VerifyConfig& cfg, Quantity quantity) {
  if (!(cfg.params.lambda > 0.0)) throw std::invalid_argument("scaling series needs lambda > 0");
  ScalingSeries s;
  const MeanFieldSolution ref = meanfield::solve_omega(cfg.params);
  for (double f : {1.0, 0.5, 0.25}) {
    const double lam = cfg.params.lambda * f;
    meanfield::PhysParams p = cfg.params;
    if (cfg.alpha_fixed) {
      p = meanfield::with_fixed_frequency(ref, lam);
    } else {
      p.lambda = lam;
    }
    s.lambdas.push_back(lam);
    s.values.push_back(eval_at(quantity, meanfield::solve_omega(p), cfg));
  }
  for (std::size_t i = 1; i < s.values.size(); ++i) s.ratios.push_back(s.values[i - 1] / s.values[i]);
  return s;
}

}  // namespace duffing::report
