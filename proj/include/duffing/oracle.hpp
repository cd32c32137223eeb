#pragma once

// Independent reference computations: dense diagonalization of the quartic
// oscillator from padded ladder matrices, exact Heisenberg evolution, and the
// classical Duffing period.

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "duffing/fock_algebra.hpp"
#include "duffing/meanfield.hpp"

namespace duffing::oracle {

using Complex = std::complex<double>;

/// q = q_a a + q_adag a+, p = p_a a + p_adag a+ for the ladder operators of
/// the chosen basis.
struct Quadratures {
  Complex q_a, q_adag, p_a, p_adag;

  /// Harmonic basis of the bare frequency: q = (a + a+)/sqrt(2 m w),
  /// p = i sqrt(m w / 2)(a+ - a).
  static Quadratures bare(const meanfield::PhysParams& params);
  /// Mean-field mode basis at time t: q = i(u a - u* a+), p = -i(v a - v* a+).
  static Quadratures mode(const meanfield::ModeValues& mv);
};

/// H built by dense products of ladder matrices at dim + 4 and cropped, so every
/// kept entry is exact.
Eigen::MatrixXcd hamiltonian_matrix(const meanfield::PhysParams& params, int dim,
                                    const Quadratures& basis);

class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectrumResult {
  std::vector<int> dims;
  /// energies[i] = lowest levels at dims[i]
  std::vector<std::vector<double>> energies;
  /// per level: change < 1e-8 between the two largest dims
  std::vector<bool> converged;

  double ground_energy() const { return energies.back().front(); }
};

/// Lowest `levels` eigenvalues of H in the bare basis for each truncation.
/// Requires increasing dims with max <= 512.
SpectrumResult exact_diagonalize(const meanfield::PhysParams& params, const std::vector<int>& dims,
                                 int levels = 10);

/// Cached eigen-decomposition of H in a given basis.
class ExactEvolution {
 public:
  ExactEvolution(const meanfield::PhysParams& params, int dim, const Quadratures& basis);

  int dim() const { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& energies() const { return values_; }

  /// exp(-i H t)
  Eigen::MatrixXcd propagator(double t) const;

  /// exp(i H t) op exp(-i H t).  Throws std::invalid_argument on a
  /// dimension mismatch.
  fock::FockMatrix evolve(const fock::FockMatrix& op, double t) const;

 private:
  Eigen::VectorXd values_;
  Eigen::MatrixXcd vectors_;
};

/// One-shot Heisenberg evolution in the bare basis.
fock::FockMatrix heisenberg_evolve(const fock::FockMatrix& op, const meanfield::PhysParams& params,
                                   double t);

struct ClassicalSample {
  double t, q, p;
};

struct ClassicalRun {
  double q0 = 0.0;
  double p0 = 0.0;
  double dt = 0.0;
  std::vector<ClassicalSample> samples;
  double period = 0.0;
  double energy_drift = 0.0;
};

/// RK4 integration of q'' + w^2 q + lambda q^3 = 0 from (amplitude, 0) with
/// dt = T_est / 2000 over `periods` estimated periods.  Period from successive
/// upward zero crossings, linearly interpolated.  Throws ConvergenceFailure
/// when the relative energy drift exceeds 1e-8.
ClassicalRun integrate_classical(const meanfield::PhysParams& params, double amplitude,
                                 int periods = 4);

struct ClassicalFrequency {
  double numeric = 0.0;
  /// w (1 + 3 lambda a^2 / (8 w^2))
  double first_order = 0.0;
  double energy_drift = 0.0;
};

ClassicalFrequency classical_frequency(const meanfield::PhysParams& params, double amplitude);

/// Mean-field shift Omega - w against the classical first-order shift at the
/// amplitude a^2 = 2|u|^2 = 1/(m Omega).
struct FrequencyComparison {
  double meanfield_shift = 0.0;
  double classical_shift_first_order = 0.0;
  double classical_shift_numeric = 0.0;
  double amplitude = 0.0;
  double ratio = 0.0;
};

FrequencyComparison compare_with_classical(const meanfield::MeanFieldSolution& sol);

}  // namespace duffing::oracle
