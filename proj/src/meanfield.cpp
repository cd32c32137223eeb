#include "duffing/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <sstream>

namespace duffing::meanfield {

namespace {

constexpr double kBranchTolerance = 1e-9;

std::string describe(const PhysParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(m=" << p.m << ", omega=" << p.omega << ", lambda=" << p.lambda << ")";
  return os.str();
}

}  // namespace

std::string to_string(Convention c) {
  return c == Convention::literal ? "literal" : "m_normalized";
}

Convention convention_from_string(const std::string& s) {
  if (s == "literal") return Convention::literal;
  if (s == "m_normalized") return Convention::m_normalized;
  throw InvalidParams("unknown convention '" + s + "'");
}

void PhysParams::validate() const {
  if (!std::isfinite(m) || m <= 0.0) throw InvalidParams("m must be positive, got " + describe(*this));
  if (!std::isfinite(omega) || omega <= 0.0) {
    throw InvalidParams("omega must be positive, got " + describe(*this));
  }
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw InvalidParams("lambda must be finite and nonnegative, got " + describe(*this));
  }
  if (convention == Convention::m_normalized && m != 1.0) {
    throw InvalidParams("convention m_normalized requires m = 1, got " + describe(*this));
  }
}

double MeanFieldSolution::alpha() const {
  return params.lambda / (4.0 * params.m * Omega * Omega * Omega);
}

double gap_cubic(const PhysParams& params, double Omega) {
  return Omega * (Omega * Omega - params.omega * params.omega) -
         1.5 * params.lambda / params.m;
}

Complex closed_form_omega(const PhysParams& params) {
  const double r = params.lambda / params.m;
  const double w6 = std::pow(params.omega, 6);
  const Complex radicand{-6912.0 * w6 + 104976.0 * r * r, 0.0};
  const Complex cube = std::pow(324.0 * r + std::sqrt(radicand), 1.0 / 3.0);
  const double cbrt2 = std::cbrt(2.0);
  return 2.0 * cbrt2 * params.omega * params.omega / cube + cube / (6.0 * cbrt2);
}

double bisect_omega(const PhysParams& params) {
  double lo = params.omega;
  double hi = params.omega + 1.5 * params.lambda / (params.m * params.omega * params.omega) + 1.0;
  double flo = gap_cubic(params, lo);
  if (flo == 0.0) return lo;
  if (flo > 0.0 || gap_cubic(params, hi) < 0.0) {
    throw BranchFault("gap cubic not bracketed for " + describe(params));
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = gap_cubic(params, mid);
    if (fmid == 0.0) return mid;
    if (fmid < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(gap_cubic(params, lo)) <= std::abs(gap_cubic(params, hi)) ? lo : hi;
}

MeanFieldSolution solve_omega(const PhysParams& params) {
  params.validate();
  MeanFieldSolution sol;
  sol.params = params;
  sol.Omega_closed_form = closed_form_omega(params).real();
  sol.Omega_bisection = bisect_omega(params);
  if (!(std::abs(sol.Omega_closed_form - sol.Omega_bisection) <= kBranchTolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << "branch fault: closed form " << sol.Omega_closed_form << " vs bisection "
       << sol.Omega_bisection << " for " << describe(params);
    throw BranchFault(os.str());
  }
  sol.Omega = sol.Omega_bisection;
  sol.cubic_residual = std::abs(gap_cubic(params, sol.Omega));
  sol.E0 = mean_energy(sol, 0.0);
  return sol;
}

MeanFieldSolution solution_at_alpha(double m, double omega, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0 / 6.0)) {
    throw InvalidParams("alpha must lie in [0, 1/6) for a real bare frequency");
  }
  const double Omega = omega / std::sqrt(1.0 - 6.0 * alpha);
  PhysParams p;
  p.m = m;
  p.omega = omega;
  p.lambda = 4.0 * m * alpha * Omega * Omega * Omega;
  p.convention = m == 1.0 ? Convention::m_normalized : Convention::literal;
  return solve_omega(p);
}

PhysParams with_fixed_frequency(const MeanFieldSolution& reference, double lambda) {
  PhysParams p = reference.params;
  const double Om = reference.Omega;
  const double w2 = Om * Om - 1.5 * lambda / (p.m * Om);
  if (!(w2 > 0.0)) throw InvalidParams("coupling too large to keep Omega fixed");
  p.omega = std::sqrt(w2);
  p.lambda = lambda;
  return p;
}

ModeValues mode_at(const MeanFieldSolution& sol, double t) {
  const double m = sol.params.m;
  ModeValues mv;
  mv.t = t;
  mv.u = std::polar(1.0 / std::sqrt(2.0 * m * sol.Omega), -sol.Omega * t);
  mv.udot = Complex{0.0, -sol.Omega} * mv.u;
  mv.v = -m * mv.udot;
  mv.pi = m * std::conj(mv.udot);
  return mv;
}

double mean_energy(const MeanFieldSolution& sol, double t) {
  const auto& p = sol.params;
  const ModeValues mv = mode_at(sol, t);
  const double uu = std::norm(mv.u);
  return std::norm(mv.pi) / (2.0 * p.m) + 0.5 * p.m * p.omega * p.omega * uu +
         0.75 * p.lambda * uu * uu;
}

double trial_residual(const PhysParams& params, double frequency, Complex amplitude, double t) {
  const Complex u = amplitude * std::polar(1.0, -frequency * t);
  const Complex uddot = -frequency * frequency * u;
  return std::abs(uddot + params.omega * params.omega * u + 3.0 * params.lambda * std::norm(u) * u);
}

double meanfield_residual(const MeanFieldSolution& sol, double t) {
  return trial_residual(sol.params, sol.Omega, 1.0 / std::sqrt(2.0 * sol.params.m * sol.Omega), t);
}

fock::NOPoly position_operator(const ModeValues& mv) {
  const Complex i{0.0, 1.0};
  return fock::NOPoly::monomial(0, 1, i * mv.u) + fock::NOPoly::monomial(1, 0, -i * std::conj(mv.u));
}

fock::NOPoly momentum_operator(const ModeValues& mv) {
  const Complex i{0.0, 1.0};
  return fock::NOPoly::monomial(0, 1, -i * mv.v) + fock::NOPoly::monomial(1, 0, i * std::conj(mv.v));
}

int positive_root_count(const PhysParams& params) {
  // x^3 + p x + q
  const double p = -params.omega * params.omega;
  const double q = -1.5 * params.lambda / params.m;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  std::vector<double> roots;
  if (disc > 0.0) {
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double phi = std::acos(std::clamp(3.0 * q / (p * r), -1.0, 1.0));
    for (int k = 0; k < 3; ++k) roots.push_back(r * std::cos((phi - 2.0 * M_PI * k) / 3.0));
  } else {
    const double s = std::sqrt(-disc / 108.0);
    roots.push_back(std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s));
  }
  int count = 0;
  for (double x : roots) count += x > 1e-12 * params.omega ? 1 : 0;
  return count;
}

}  // namespace duffing::meanfield
