#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "duffing/coeff_flow.hpp"
#include "duffing/meanfield.hpp"
#include "duffing/operator_forge.hpp"
#include "duffing/oracle.hpp"
#include "duffing/report.hpp"

using namespace duffing;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitGate = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  double m = 1.0;
  double omega = 1.0;
  double lambda = 0.0;
  int nfock = 64;
  std::string mode = "paper_literal";
  std::string convention = "m_normalized";
  double omega0 = 0.0;
  std::string out_path;
  std::string format;
  std::string config_path;

  double alpha_min = 0.0;
  double alpha_max = 0.3;
  int steps = 301;
  std::string suite = "all";
  bool alpha_fixed = false;
  double phase = forge::kDefaultPhase;
  double amplitude = 1.0;
  std::vector<int> dims;

  meanfield::PhysParams params() const {
    meanfield::PhysParams p{m, omega, lambda, meanfield::convention_from_string(convention)};
    p.validate();
    return p;
  }
};

struct Output {
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw UsageError("cannot open output file " + path);
    }
  }
  std::ostream& data() { return file.is_open() ? static_cast<std::ostream&>(file) : std::cout; }
  /// Human-readable summary lines: stdout when data goes to a file.
  std::ostream& note() { return file.is_open() ? std::cout : std::cerr; }

  std::ofstream file;
};

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void emit_json(Output& out, const json& j) { out.data() << j.dump(2) << "\n"; }

/// Returns true when the file supplied the mode.
bool apply_file_config(RunConfig& cfg, const CLI::App& app) {
  if (cfg.config_path.empty()) return false;
  std::ifstream in(cfg.config_path);
  if (!in) throw UsageError("cannot read config " + cfg.config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed config: ") + e.what());
  }
  auto given = [&](const std::string& flag) {
    for (const CLI::App* a : {&app, app.get_subcommands().empty() ? &app : app.get_subcommands().front()}) {
      try {
        if (a->get_option(flag)->count() > 0) return true;
      } catch (const CLI::OptionNotFound&) {
      }
    }
    return false;
  };
  try {
    auto take = [&](const char* key, const std::string& flag, auto& field) {
      if (j.contains(key) && !given(flag)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("m", "--m", cfg.m);
    take("omega", "--omega", cfg.omega);
    take("lambda", "--lambda", cfg.lambda);
    take("nfock", "--nfock", cfg.nfock);
    take("mode", "--mode", cfg.mode);
    take("convention", "--convention", cfg.convention);
    take("omega0", "--omega0", cfg.omega0);
    take("out_path", "--out", cfg.out_path);
    take("format", "--format", cfg.format);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
  return j.contains("mode") && !given("--mode");
}

int cmd_omega(const RunConfig& cfg) {
  const meanfield::PhysParams p = cfg.params();
  meanfield::MeanFieldSolution sol;
  try {
    sol = meanfield::solve_omega(p);
  } catch (const meanfield::BranchFault& e) {
    std::cerr << "branch fault: " << e.what() << "\n";
    return kExitGate;
  }
  const double residual = std::abs(sol.cubic_residual);
  Output out(cfg.out_path);
  if (cfg.format == "csv") {
    out.data() << "m,omega,lambda,Omega,Omega_closed_form,Omega_bisection,cubic_residual,E0\n";
    out.data() << g17(p.m) << ',' << g17(p.omega) << ',' << g17(p.lambda) << ',' << g17(sol.Omega) << ','
               << g17(sol.Omega_closed_form) << ',' << g17(sol.Omega_bisection) << ',' << g17(sol.cubic_residual)
               << ',' << g17(sol.E0) << "\n";
  } else {
    json j;
    j["m"] = p.m;
    j["omega"] = p.omega;
    j["lambda"] = p.lambda;
    j["convention"] = meanfield::to_string(p.convention);
    j["Omega"] = sol.Omega;
    j["Omega_closed_form"] = sol.Omega_closed_form;
    j["Omega_bisection"] = sol.Omega_bisection;
    j["cubic_residual"] = sol.cubic_residual;
    j["E0"] = sol.E0;
    j["alpha"] = sol.alpha();
    emit_json(out, j);
  }
  if (residual >= 1e-10) {
    std::cerr << "cubic_residual " << residual << " above 1e-10\n";
    return kExitGate;
  }
  return 0;
}

void print_discrepancy(std::ostream& os, const std::optional<double>& alpha_crit, double alpha) {
  os << "discrepancy vs reference alpha_crit " << flow::kReferenceAlphaCrit << ": ";
  if (alpha_crit) {
    os << "computed " << g17(*alpha_crit) << ", difference " << g17(*alpha_crit - flow::kReferenceAlphaCrit) << "\n";
  } else {
    os << "computed none\n";
  }
  const flow::ModeDiscrepancy d = flow::compare_modes(alpha);
  os << "matrix entries differing at alpha=" << alpha << " (row,col,paper_literal,engine_derived):\n";
  for (const auto& e : d.matrix_entries) {
    os << "  " << e.row << ',' << e.col << ',' << g17(e.paper) << ',' << g17(e.engine) << "\n";
  }
  os << "source factors engine/paper:";
  for (double f : d.source_factors) os << ' ' << g17(f);
  os << "\n";
}

int cmd_stability(const RunConfig& cfg) {
  const flow::FlowMode mode = flow::mode_from_string(cfg.mode);
  if (!(cfg.alpha_min >= 0.0) || !(cfg.alpha_max > cfg.alpha_min)) {
    throw UsageError("need 0 <= alpha-min < alpha-max");
  }
  if (cfg.steps < 2) throw UsageError("steps must be at least 2");
  Output out(cfg.out_path);
  const flow::StabilityReport sweep = flow::sweep_stability(mode, cfg.alpha_min, cfg.alpha_max, cfg.steps);
  if (cfg.format == "json") {
    json j;
    j["mode"] = flow::to_string(mode);
    j["alpha"] = sweep.alpha_grid;
    json spectra = json::array();
    for (const auto& s : sweep.spectra) {
      json row = json::array();
      for (const auto& nu : s.nu) row.push_back({nu.real(), nu.imag()});
      spectra.push_back(row);
    }
    j["nu"] = spectra;
    emit_json(out, j);
  } else {
    sweep.write_csv(out.data());
  }

  std::optional<double> alpha_crit;
  int rc = 0;
  try {
    const flow::CriticalCoupling cc = flow::find_alpha_crit(mode, 1e-4, cfg.alpha_min, cfg.alpha_max);
    alpha_crit = cc.alpha_crit;
    out.note() << "alpha_crit=" << g17(cc.alpha_crit) << " mode=" << flow::to_string(mode)
               << " bracket=[" << g17(cc.bracket_lo) << ", " << g17(cc.bracket_hi) << "]"
               << " transitions=" << cc.transitions << "\n";
  } catch (const flow::NoTransition&) {
    out.note() << "no transition in range [" << cfg.alpha_min << ", " << cfg.alpha_max
               << "] mode=" << flow::to_string(mode) << "\n";
    rc = kExitGate;
  }
  if (mode == flow::FlowMode::engine_derived) {
    print_discrepancy(out.note(), alpha_crit, 0.05);
  }
  return rc;
}

report::VerifyConfig verify_config(const RunConfig& cfg, bool mode_given) {
  report::VerifyConfig vc;
  vc.params = cfg.params();
  vc.mode = mode_given ? flow::mode_from_string(cfg.mode) : flow::FlowMode::engine_derived;
  vc.dim = cfg.nfock;
  vc.omega0 = cfg.omega0;
  vc.alpha_fixed = cfg.alpha_fixed;
  vc.phase = cfg.phase;
  if (cfg.omega0 < 0.0) throw UsageError("omega0 must be positive");
  return vc;
}

int finish_report(const report::VerifyReport& r, const RunConfig& cfg) {
  Output out(cfg.out_path);
  emit_json(out, r.to_json());
  if (r.passed()) return 0;
  for (const auto& name : r.failures()) std::cerr << "check failed: " << name << "\n";
  return kExitGate;
}

int cmd_verify(const RunConfig& cfg, bool mode_given) {
  return finish_report(report::run_suite(cfg.suite, verify_config(cfg, mode_given)), cfg);
}

int cmd_rho(const RunConfig& cfg, bool mode_given) {
  return finish_report(report::run_suite("rho", verify_config(cfg, mode_given)), cfg);
}

int cmd_exact(const RunConfig& cfg) {
  const meanfield::PhysParams p = cfg.params();
  std::vector<int> dims = cfg.dims;
  if (dims.empty()) dims = {cfg.nfock, std::min(2 * cfg.nfock, 512)};
  const oracle::SpectrumResult ed = oracle::exact_diagonalize(p, dims);
  const meanfield::MeanFieldSolution sol = meanfield::solve_omega(p);
  const double emf = meanfield::mean_energy(sol, 0.0);
  Output out(cfg.out_path);
  json j;
  j["dims"] = ed.dims;
  j["energies"] = ed.energies;
  j["converged"] = ed.converged;
  j["mean_energy"] = emf;
  j["variational_bound_holds"] = emf >= ed.ground_energy();
  emit_json(out, j);
  if (!ed.converged.front()) {
    std::cerr << "ground level not converged between dims " << dims[dims.size() - 2] << " and " << dims.back()
              << "\n";
    return kExitGate;
  }
  return 0;
}

int cmd_classical(const RunConfig& cfg) {
  const meanfield::PhysParams p = cfg.params();
  Output out(cfg.out_path);
  if (cfg.format == "csv") {
    const oracle::ClassicalRun run = oracle::integrate_classical(p, cfg.amplitude);
    out.data() << "t,q,p\n";
    for (const auto& s : run.samples) out.data() << g17(s.t) << ',' << g17(s.q) << ',' << g17(s.p) << "\n";
    return 0;
  }
  const oracle::ClassicalFrequency f = oracle::classical_frequency(p, cfg.amplitude);
  json j;
  j["amplitude"] = cfg.amplitude;
  j["numeric"] = f.numeric;
  j["first_order"] = f.first_order;
  j["energy_drift"] = f.energy_drift;
  const oracle::FrequencyComparison c = oracle::compare_with_classical(meanfield::solve_omega(p));
  j["meanfield_comparison"] = {{"amplitude", c.amplitude},
                               {"meanfield_shift", c.meanfield_shift},
                               {"classical_shift_first_order", c.classical_shift_first_order},
                               {"classical_shift_numeric", c.classical_shift_numeric},
                               {"ratio", c.ratio}};
  emit_json(out, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field construction for the quantum Duffing oscillator"};
  app.require_subcommand(1);
  RunConfig cfg;

  app.add_option("--m", cfg.m, "mass");
  app.add_option("--omega", cfg.omega, "bare frequency");
  app.add_option("--lambda", cfg.lambda, "quartic coupling");
  app.add_option("--nfock", cfg.nfock, "Fock truncation");
  auto* mode_opt = app.add_option("--mode", cfg.mode, "paper_literal | engine_derived");
  app.add_option("--convention", cfg.convention, "literal | m_normalized");
  app.add_option("--omega0", cfg.omega0, "density-operator scale (default Omega)");
  app.add_option("--out", cfg.out_path, "output file (default stdout)");
  app.add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", cfg.config_path, "JSON file with RunConfig keys");
  app.add_option("--time", cfg.phase, "evaluation phase Omega t");
  app.add_flag("--alpha-fixed", cfg.alpha_fixed, "hold Omega fixed under lambda scaling");
  app.fallthrough();

  auto* omega_cmd = app.add_subcommand("omega", "solve the gap equation");
  auto* stability_cmd = app.add_subcommand("stability", "sweep the coefficient-matrix spectrum");
  stability_cmd->add_option("--alpha-min", cfg.alpha_min);
  stability_cmd->add_option("--alpha-max", cfg.alpha_max);
  stability_cmd->add_option("--steps", cfg.steps);
  auto* verify_cmd = app.add_subcommand("verify", "run an invariant suite");
  verify_cmd->add_option("--suite", cfg.suite)
      ->check(CLI::IsMember({"all", "algebra", "h2", "liouville", "commutator", "variational", "rho"}));
  auto* exact_cmd = app.add_subcommand("exact", "exact diagonalization oracle");
  exact_cmd->add_option("--dims", cfg.dims, "truncations, increasing");
  auto* rho_cmd = app.add_subcommand("rho", "density operator and cumulants");
  auto* classical_cmd = app.add_subcommand("classical", "classical Duffing frequency");
  classical_cmd->add_option("--amplitude", cfg.amplitude);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const bool mode_from_file = apply_file_config(cfg, app);
    const bool mode_given = mode_opt->count() > 0 || mode_from_file;
    if (*omega_cmd) return cmd_omega(cfg);
    if (*stability_cmd) {
      if (cfg.format.empty()) cfg.format = "csv";
      return cmd_stability(cfg);
    }
    if (*verify_cmd) return cmd_verify(cfg, mode_given);
    if (*exact_cmd) return cmd_exact(cfg);
    if (*rho_cmd) return cmd_rho(cfg, mode_given);
    if (*classical_cmd) return cmd_classical(cfg);
  } catch (const meanfield::InvalidParams& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGate;
  }
  return kExitUsage;
}
