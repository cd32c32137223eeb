#pragma once

// Operator-level construction on top of the mean-field mode: the sector split
// H = H2 + m lambda H4 + E0, the first-order generators A = a + m lambda B3,
// their Liouville diagnostics, and the density operator exp(-Omega0 A+ A).
//
// Polynomials returned by build_h_sectors and build_generators are written in
// the mode operators a(t) of the time at which they were built.  Matrices are
// realized in the reference basis a(0); since a(t) = exp(i Omega t) a(0) the
// two are related by to_reference_frame.

#include <complex>
#include <stdexcept>
#include <string>

#include "duffing/coeff_flow.hpp"
#include "duffing/fock_algebra.hpp"
#include "duffing/meanfield.hpp"

namespace duffing::forge {

using Complex = std::complex<double>;
using fock::FockMatrix;
using fock::NOPoly;

inline constexpr int kDefaultDim = 64;
inline constexpr int kDefaultBand = 8;
/// Default evaluation phase Omega t for time-dependent diagnostics.
inline constexpr double kDefaultPhase = 0.5;

struct SectorSplit {
  NOPoly h2;
  NOPoly h4;
  double e0 = 0.0;
  /// m lambda
  double coupling = 0.0;
  double t = 0.0;

  NOPoly total() const;
};

/// H4 = :(u a - u* a+)^4: / 4.
NOPoly quartic_sector(Complex u);

/// Full Hamiltonian with q = i(u a - u* a+), p = -i(v a - v* a+), split by degree.
SectorSplit build_h_sectors(const meanfield::MeanFieldSolution& sol, double t);

/// Rewrites a polynomial in a(t) as one in a(0): (j,k) picks up exp(i Omega t (k - j)).
NOPoly to_reference_frame(const NOPoly& p, double Omega, double t);

class BeyondCriticalCoupling : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeneratorPair {
  NOPoly a_op;
  NOPoly adag_op;
  flow::CoeffVector b3;
  flow::FlowMode mode = flow::FlowMode::engine_derived;
  double t = 0.0;
  double Omega = 1.0;
  double coupling = 0.0;

  NOPoly a_reference() const { return to_reference_frame(a_op, Omega, t); }
  /// d/dt of a_reference(), from the phase rotation and b_dot.
  NOPoly a_reference_dot() const;
};

/// b3 at time t for the generator that starts from A(0) = a: the closed-form
/// flow solution with b(0) = 0.
flow::CoeffVector generator_coefficients(const meanfield::MeanFieldSolution& sol, double t,
                                         flow::FlowMode mode = flow::FlowMode::engine_derived);

/// A = a + m lambda sum_k b_k a+^{3-k} a^k, A+ = adjoint(A).  Throws
/// BeyondCriticalCoupling when alpha >= the critical coupling of the literal matrix.
GeneratorPair build_generators(const meanfield::MeanFieldSolution& sol, const flow::CoeffVector& b3,
                               double t, flow::FlowMode mode = flow::FlowMode::engine_derived);

/// generator_coefficients + build_generators.
GeneratorPair generators_at(const meanfield::MeanFieldSolution& sol, double t,
                            flow::FlowMode mode = flow::FlowMode::engine_derived);

/// The uncorrected mode operator a(t) packaged as a generator (b3 = 0).
GeneratorPair bare_generators(const meanfield::MeanFieldSolution& sol, double t);

/// Largest singular value of i dA/dt + [A, H] on the interior band, with dA/dt
/// taken analytically.  Requires dim >= 32.
double liouville_residual(const GeneratorPair& g, const SectorSplit& split,
                          const meanfield::MeanFieldSolution& sol, int dim = kDefaultDim,
                          int band = kDefaultBand);

/// ||[A, A+] - 1||_inf on the interior band.
double commutator_defect(const GeneratorPair& g, int dim = kDefaultDim, int band = kDefaultBand);

struct DensitySpec {
  double omega0 = 1.0;
  int dim = kDefaultDim;
  bool normalize = true;

  void validate() const;
};

/// rho = exp(-Omega0 M(A)^dagger M(A)) in the reference basis via a Hermitian
/// eigen-decomposition; optionally trace-normalized.
FockMatrix density_operator(const GeneratorPair& g, const DensitySpec& spec);

/// ||i d rho/dt + [rho, H]||_2 on the interior band; d/dt by central
/// differences with steps h and h/2 (h = 1e-4/Omega), Richardson-combined.
double density_liouville_residual(const meanfield::MeanFieldSolution& sol, flow::FlowMode mode,
                                  double t, const DensitySpec& spec, int band = kDefaultBand);

struct CumulantReport {
  double mean_q = 0.0;
  double q2 = 0.0;
  double q4 = 0.0;
  /// <q^4> - 3 <q^2>^2
  double kurtosis_excess = 0.0;
  double purity = 0.0;
};

/// Moments of q = i(u a - u* a+) (taken at t, rotated to the reference basis).
/// Throws std::invalid_argument if rho is not trace-normalized, and
/// std::runtime_error if <q> breaks parity beyond 1e-10.
CumulantReport quadrature_cumulants(const FockMatrix& rho, const meanfield::MeanFieldSolution& sol,
                                    double t);

}  // namespace duffing::forge
