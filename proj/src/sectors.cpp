#include <cmath>

#include "duffing/operator_forge.hpp"

namespace duffing::forge {

NOPoly SectorSplit::total() const {
  return h2 + coupling * h4 + NOPoly::identity(e0);
}

NOPoly quartic_sector(Complex u) {
  const NOPoly x = NOPoly::monomial(0, 1, u) + NOPoly::monomial(1, 0, -std::conj(u));
  return fock::power(x, 4).homogeneous_part(4) * 0.25;
}

SectorSplit build_h_sectors(const meanfield::MeanFieldSolution& sol, double t) {
  const auto& p = sol.params;
  const meanfield::ModeValues mv = meanfield::mode_at(sol, t);
  const NOPoly q = meanfield::position_operator(mv);
  const NOPoly mom = meanfield::momentum_operator(mv);
  const NOPoly q2 = fock::no_product(q, q);
  const NOPoly q4 = fock::no_product(q2, q2);

  const NOPoly quadratic = fock::no_product(mom, mom) * (0.5 / p.m) + q2 * (0.5 * p.m * p.omega * p.omega);
  const NOPoly h = quadratic + q4 * (0.25 * p.m * p.lambda);

  SectorSplit split;
  split.t = t;
  split.coupling = p.m * p.lambda;
  split.h2 = h.homogeneous_part(2);
  split.h4 = q4.homogeneous_part(4) * 0.25;
  split.e0 = h.coeff(0, 0).real();
  return split;
}

NOPoly to_reference_frame(const NOPoly& p, double Omega, double t) {
  NOPoly r;
  for (const auto& [key, c] : p.terms()) {
    r.add_term(key, c * std::polar(1.0, Omega * t * (key.annihilation - key.dagger)));
  }
  return r;
}

}  // namespace duffing::forge
