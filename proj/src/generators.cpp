#include <cmath>
#include <sstream>

#include "duffing/operator_forge.hpp"

namespace duffing::forge {

namespace {

const Complex kI{0.0, 1.0};

double literal_alpha_crit() {
  static const double crit = flow::find_alpha_crit(flow::FlowMode::paper_literal, 1e-8).alpha_crit;
  return crit;
}

NOPoly cubic_combination(const Eigen::Vector4cd& coeffs, double scale) {
  NOPoly p;
  for (int k = 0; k < 4; ++k) p.add_term({3 - k, k}, scale * coeffs(k));
  return p;
}

}  // namespace

NOPoly GeneratorPair::a_reference_dot() const {
  NOPoly rate = to_reference_frame(cubic_combination(b3.b_dot, coupling), Omega, t);
  for (const auto& [key, c] : a_op.terms()) {
    const double w = Omega * (key.annihilation - key.dagger);
    rate.add_term(key, kI * w * c * std::polar(1.0, w * t));
  }
  return rate;
}

flow::CoeffVector generator_coefficients(const meanfield::MeanFieldSolution& sol, double t,
                                         flow::FlowMode mode) {
  const flow::CoeffSystem sys = flow::build_constant_system(flow::FlowFrame::from(sol), mode);
  return flow::closed_form(sys, Eigen::Vector4cd::Zero(), t);
}

GeneratorPair build_generators(const meanfield::MeanFieldSolution& sol, const flow::CoeffVector& b3,
                               double t, flow::FlowMode mode) {
  const double alpha = sol.alpha();
  if (alpha >= literal_alpha_crit()) {
    std::ostringstream os;
    os << "alpha = " << alpha << " is beyond the critical coupling " << literal_alpha_crit()
       << "; the generator coefficients grow secularly";
    throw BeyondCriticalCoupling(os.str());
  }
  GeneratorPair g;
  g.b3 = b3;
  g.mode = mode;
  g.t = t;
  g.Omega = sol.Omega;
  g.coupling = sol.coupling();
  g.a_op = NOPoly::annihilator() + cubic_combination(b3.b, g.coupling);
  g.adag_op = fock::adjoint(g.a_op);
  return g;
}

GeneratorPair generators_at(const meanfield::MeanFieldSolution& sol, double t, flow::FlowMode mode) {
  return build_generators(sol, generator_coefficients(sol, t, mode), t, mode);
}

GeneratorPair bare_generators(const meanfield::MeanFieldSolution& sol, double t) {
  GeneratorPair g;
  g.t = t;
  g.Omega = sol.Omega;
  g.coupling = sol.coupling();
  g.b3.t = t;
  g.a_op = NOPoly::annihilator();
  g.adag_op = NOPoly::creator();
  return g;
}

double liouville_residual(const GeneratorPair& g, const SectorSplit& split,
                          const meanfield::MeanFieldSolution& sol, int dim, int band) {
  if (dim < 32) throw fock::TruncationError("liouville_residual needs dim >= 32");
  const NOPoly h = to_reference_frame(split.total(), sol.Omega, split.t);
  const NOPoly a = g.a_reference();
  const NOPoly r = kI * g.a_reference_dot() + fock::commutator(a, h);
  return fock::spectral_norm(fock::to_matrix(r, dim).interior(band));
}

double commutator_defect(const GeneratorPair& g, int dim, int band) {
  const NOPoly d = fock::commutator(g.a_op, g.adag_op) - NOPoly::identity();
  return fock::inf_norm(fock::to_matrix(d, dim).interior(band));
}

}  // namespace duffing::forge
