#pragma once

// Order-(m lambda) coefficient flow of the cubic generator correction
//   B3 = sum_k b_k (a+)^{3-k} a^k,   db/dt = K(t) b + s(t),
// its constant-coefficient reduction under b_k = c_k exp(i (4-2k) Omega t),
//   dc/dt = i Omega M c + i s~,
// and the stability analysis of M(alpha).

#include <array>
#include <complex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "duffing/meanfield.hpp"

namespace duffing::flow {

using Complex = std::complex<double>;

enum class FlowMode { paper_literal, engine_derived };

std::string to_string(FlowMode mode);
FlowMode mode_from_string(const std::string& s);

/// Reference critical coupling of the literal matrix.
inline constexpr double kReferenceAlphaCrit = 0.1365;
/// max |Im nu| above this counts as a secular (complex) spectrum.
inline constexpr double kSecularThreshold = 1e-8;

class PhaseBookkeepingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EigenFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSystem : public std::runtime_error {
 public:
  SingularSystem(const std::string& what, double condition)
      : std::runtime_error(what), condition(condition) {}
  double condition;
};

class StepRejected : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Frequency, mass and alpha = lambda / (4 m Omega^3) of the mean-field mode.
/// Can be built for alpha beyond the physical range alpha < 1/6.
struct FlowFrame {
  double Omega = 1.0;
  double m = 1.0;
  double alpha = 0.0;

  static FlowFrame from(const meanfield::MeanFieldSolution& sol);
  static FlowFrame unit(double alpha) { return {1.0, 1.0, alpha}; }

  /// m * lambda = 4 alpha m^2 Omega^3
  double coupling() const { return 4.0 * alpha * m * m * Omega * Omega * Omega; }
  Complex u(double t) const;
};

struct TimeSystem {
  Eigen::Matrix4cd K;
  Eigen::Vector4cd s;
};

/// Right-hand side of db/dt = K b + s at time t.
TimeSystem build_time_system(const FlowFrame& frame, double t, FlowMode mode);

struct CoeffSystem {
  FlowMode mode = FlowMode::paper_literal;
  double alpha = 0.0;
  double Omega = 1.0;
  Eigen::Matrix4d matrix;
  /// s~ in dc/dt = i Omega M c + i s~
  Eigen::Vector4cd source;
};

/// Phase-reduces build_time_system at t in {0, 0.37, 1.91}/Omega and checks
/// that the result is real and time-independent to 1e-10.
CoeffSystem build_constant_system(const FlowFrame& frame, FlowMode mode);
CoeffSystem build_constant_system(double alpha, FlowMode mode);

/// Literal M(alpha), fourth diagonal entry -6 alpha + 2.
Eigen::Matrix4d literal_matrix(double alpha);

struct Spectrum {
  /// Sorted by (Re, Im).
  std::array<Complex, 4> nu;
  std::array<Eigen::Vector4cd, 4> vectors;
  double backward_error = 0.0;

  double max_imag() const;
  bool secular() const { return max_imag() > kSecularThreshold; }
};

/// Eigenpairs of the real 4x4 matrix with backward error
/// ||(M - nu) x|| / (||M|| ||x||) < 1e-10.  Throws EigenFailure.
Spectrum eigen_spectrum(const CoeffSystem& sys);
Spectrum eigen_spectrum(const Eigen::Matrix4d& matrix);

struct StabilityReport {
  FlowMode mode = FlowMode::paper_literal;
  std::vector<double> alpha_grid;
  std::vector<Spectrum> spectra;
  std::optional<double> alpha_crit;

  /// Largest move of any sorted eigenvalue between neighbouring grid points.
  double max_path_step() const;
  /// Number of real/complex indicator changes along the grid.
  int transitions() const;
  void write_csv(std::ostream& os) const;
};

StabilityReport sweep_stability(FlowMode mode, double alpha_min, double alpha_max, int steps);

class NoTransition : public std::runtime_error {
 public:
  NoTransition(const std::string& what, StabilityReport sweep)
      : std::runtime_error(what), sweep(std::move(sweep)) {}
  StabilityReport sweep;
};

struct CriticalCoupling {
  double alpha_crit = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// Indicator changes seen on the coarse sweep; 1 means a unique transition.
  int transitions = 0;
};

/// Bisection on the secular indicator over [lo, hi] to within tol.  A coarse
/// 501-point sweep locates the first real-to-complex change and counts changes.
/// Throws NoTransition with the sweep attached.
CriticalCoupling find_alpha_crit(FlowMode mode, double tol, double lo = 0.0, double hi = 0.5);

struct ParticularSolution {
  Eigen::Vector4cd c;
  double condition = 0.0;
  double residual = 0.0;
};

/// Constant solution c_p = -(i Omega M)^{-1} (i s~).  Throws SingularSystem
/// when cond(M) > 1e12.
ParticularSolution particular_solution(const CoeffSystem& sys);

struct CoeffVector {
  Eigen::Vector4cd b = Eigen::Vector4cd::Zero();
  Eigen::Vector4cd c = Eigen::Vector4cd::Zero();
  Eigen::Vector4cd b_dot = Eigen::Vector4cd::Zero();
  double t = 0.0;
};

/// exp(i (4 - 2k) Omega t)
Eigen::Vector4cd ansatz_phases(double Omega, double t);

/// Exact solution of the constant system from b(0) = b0, through the
/// eigen-decomposition of M.  Equals c_p + V exp(i Omega nu t) V^-1 (b0 - c_p)
/// when M is nonsingular; resonant (nu = 0) modes grow linearly.
CoeffVector closed_form(const CoeffSystem& sys, const Eigen::Vector4cd& b0, double t);

/// Classical RK4 on the time-dependent system.  dt must satisfy
/// dt <= (2 pi / Omega) / 200; samples every `stride` steps plus the end point.
std::vector<CoeffVector> integrate_flow(const FlowFrame& frame, FlowMode mode,
                                        const Eigen::Vector4cd& b0, double t_end, double dt,
                                        int stride = 1);

/// (nu(alpha) - nu(0)) / alpha per sorted eigenvalue.
std::array<double, 4> weak_coupling_slopes(FlowMode mode, double alpha);

struct EntryDiscrepancy {
  int row = 0;
  int col = 0;
  double paper = 0.0;
  double engine = 0.0;
};

struct ModeDiscrepancy {
  double alpha = 0.0;
  std::vector<EntryDiscrepancy> matrix_entries;
  /// engine s~_k / paper s~_k
  std::array<double, 4> source_factors{};
};

/// Entrywise comparison of the two modes at alpha (unit frame).
ModeDiscrepancy compare_modes(double alpha, double tol = 1e-12);

}  // namespace duffing::flow
