#pragma once

// Gap equation, mode functions and mean energy for the Gaussian mean-field
// vacuum of H = p^2/2m + m w^2 q^2/2 + m lambda q^4/4 (hbar = 1).

#include <complex>
#include <stdexcept>
#include <string>

#include "duffing/fock_algebra.hpp"

namespace duffing::meanfield {

using Complex = std::complex<double>;

enum class Convention { literal, m_normalized };

std::string to_string(Convention c);
Convention convention_from_string(const std::string& s);

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Closed-form root and bisection root disagree.
class BranchFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PhysParams {
  double m = 1.0;
  double omega = 1.0;
  double lambda = 0.0;
  Convention convention = Convention::m_normalized;

  /// Throws InvalidParams.  m_normalized requires m == 1.
  void validate() const;
};

struct MeanFieldSolution {
  double Omega = 0.0;
  double Omega_closed_form = 0.0;
  double Omega_bisection = 0.0;
  /// |Omega^3 - w^2 Omega - 3 lambda / 2m|
  double cubic_residual = 0.0;
  double E0 = 0.0;
  PhysParams params;

  /// lambda / (4 m Omega^3)
  double alpha() const;
  /// m * lambda, the prefactor of the quartic sector.
  double coupling() const { return params.m * params.lambda; }
};

struct ModeValues {
  double t = 0.0;
  Complex u;
  Complex udot;
  Complex v;
  Complex pi;

  /// u* v - u v*; equals i for a canonical pair.
  Complex wronskian() const { return std::conj(u) * v - u * std::conj(v); }
};

/// Omega^3 - w^2 Omega - 3 lambda / (2m).
double gap_cubic(const PhysParams& params, double Omega);

/// Cardano root evaluated with principal complex branches.
/// The imaginary part is branch-cancellation residue.
Complex closed_form_omega(const PhysParams& params);

/// Bisection on [w, w + 3 lambda/(2 m w^2) + 1] to full double precision.
double bisect_omega(const PhysParams& params);

/// Throws BranchFault if the two roots disagree beyond 1e-9.
MeanFieldSolution solve_omega(const PhysParams& params);

/// Mean-field point with prescribed alpha < 1/6 at given m and w; lambda is
/// reconstructed from w^2 = Omega^2 (1 - 6 alpha).
MeanFieldSolution solution_at_alpha(double m, double omega, double alpha);

/// Keeps Omega (and so the mode u) of `reference` fixed while the coupling is
/// changed to `lambda`; the bare frequency absorbs the difference,
/// w'^2 = Omega^2 - 3 lambda / (2 m Omega).
PhysParams with_fixed_frequency(const MeanFieldSolution& reference, double lambda);

/// u = exp(-i Omega t)/sqrt(2 m Omega), udot = -i Omega u, v = -m udot,
/// pi = m conj(udot).
ModeValues mode_at(const MeanFieldSolution& sol, double t);

/// pi* pi / 2m + (m w^2/2) |u|^2 + (3 lambda/4) |u|^4 (no mass factor on the quartic term).
double mean_energy(const MeanFieldSolution& sol, double t);

/// |u'' + w^2 u + 3 lambda |u|^2 u| for u = amplitude * exp(-i frequency t).
double trial_residual(const PhysParams& params, double frequency, Complex amplitude, double t);

/// trial_residual at the solution mode.
double meanfield_residual(const MeanFieldSolution& sol, double t);

/// q = i(u a - u* a+) in the Fock basis of the mode at `mv`.
fock::NOPoly position_operator(const ModeValues& mv);
/// p = -i(v a - v* a+).
fock::NOPoly momentum_operator(const ModeValues& mv);

/// Number of real positive roots of the gap cubic, from the discriminant.
int positive_root_count(const PhysParams& params);

}  // namespace duffing::meanfield
