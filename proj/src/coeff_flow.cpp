#include "duffing/coeff_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "duffing/fock_algebra.hpp"
#include "duffing/operator_forge.hpp"

namespace duffing::flow {

namespace {

using fock::NOPoly;

constexpr double kPhaseTolerance = 1e-10;
constexpr double kCertification = 1e-10;
constexpr double kMaxCondition = 1e12;
constexpr std::array<double, 3> kReductionPhases{0.0, 0.37, 1.91};

const Complex kI{0.0, 1.0};

// (4 - 2k) for the ansatz b_k = c_k exp(i (4 - 2k) Omega t)
constexpr std::array<int, 4> kPhaseIndex{4, 2, 0, -2};

NOPoly cubic_monomial(int k) { return NOPoly::monomial(3 - k, k); }

Eigen::Vector4cd project_cubic(const NOPoly& p) {
  Eigen::Vector4cd v;
  for (int k = 0; k < 4; ++k) v(k) = p.coeff(3 - k, k);
  return v;
}

// (exp(z) - 1) / z
Complex phi1(Complex z) {
  if (std::abs(z) < 1e-4) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
  return (std::exp(z) - 1.0) / z;
}

std::string format_alpha(double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", a);
  return buf;
}

}  // namespace

std::string to_string(FlowMode mode) {
  return mode == FlowMode::paper_literal ? "paper_literal" : "engine_derived";
}

FlowMode mode_from_string(const std::string& s) {
  if (s == "paper_literal") return FlowMode::paper_literal;
  if (s == "engine_derived") return FlowMode::engine_derived;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

FlowFrame FlowFrame::from(const meanfield::MeanFieldSolution& sol) {
  return {sol.Omega, sol.params.m, sol.alpha()};
}

Complex FlowFrame::u(double t) const {
  return std::polar(1.0 / std::sqrt(2.0 * m * Omega), -Omega * t);
}

TimeSystem build_time_system(const FlowFrame& frame, double t, FlowMode mode) {
  const Complex u = frame.u(t);
  const Complex uc = std::conj(u);
  const double ml = frame.coupling();
  TimeSystem sys;
  if (mode == FlowMode::paper_literal) {
    const Complex n2 = std::norm(u) * std::norm(u);
    const Complex u4 = u * u * u * u;
    const Complex uc4 = uc * uc * uc * uc;
    const Complex uc_u3 = uc * u * u * u;
    const Complex uc3_u = uc * uc * uc * u;
    Eigen::Matrix4cd pattern;
    pattern << -9.0 * n2, 0.0, 3.0 * uc4, 0.0,
               18.0 * uc_u3, -3.0 * n2, -6.0 * uc3_u, 9.0 * uc4,
               -9.0 * u4, 6.0 * uc_u3, 3.0 * n2, -18.0 * uc3_u,
               0.0, -3.0 * u4, 0.0, -6.0 * n2;
    sys.K = kI * ml * pattern;
    sys.s << uc4, -uc3_u, n2, -uc_u3;
    sys.s *= kI;
    return sys;
  }
  const NOPoly h4 = forge::quartic_sector(u);
  for (int l = 0; l < 4; ++l) {
    sys.K.col(l) = kI * ml * project_cubic(fock::commutator(cubic_monomial(l), h4));
  }
  sys.s = kI * project_cubic(fock::commutator(NOPoly::annihilator(), h4));
  return sys;
}

Eigen::Vector4cd ansatz_phases(double Omega, double t) {
  Eigen::Vector4cd ph;
  for (int k = 0; k < 4; ++k) ph(k) = std::polar(1.0, kPhaseIndex[k] * Omega * t);
  return ph;
}

CoeffSystem build_constant_system(const FlowFrame& frame, FlowMode mode) {
  CoeffSystem out;
  out.mode = mode;
  out.alpha = frame.alpha;
  out.Omega = frame.Omega;
  const Complex iOmega = kI * frame.Omega;

  Eigen::Matrix4cd first_m;
  Eigen::Vector4cd first_s;
  for (std::size_t n = 0; n < kReductionPhases.size(); ++n) {
    const double t = kReductionPhases[n] / frame.Omega;
    const TimeSystem ts = build_time_system(frame, t, mode);
    const Eigen::Vector4cd ph = ansatz_phases(frame.Omega, t);
    Eigen::Matrix4cd m;
    Eigen::Vector4cd s;
    for (int k = 0; k < 4; ++k) {
      for (int l = 0; l < 4; ++l) m(k, l) = ts.K(k, l) * ph(l) / ph(k) / iOmega;
      m(k, k) -= static_cast<double>(kPhaseIndex[k]);
      s(k) = ts.s(k) / ph(k) / kI;
    }
    if (n == 0) {
      first_m = m;
      first_s = s;
      const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
      if (m.imag().cwiseAbs().maxCoeff() > kPhaseTolerance * scale) {
        throw PhaseBookkeepingError("phase-reduced matrix is not real");
      }
      continue;
    }
    const double dm = (m - first_m).cwiseAbs().maxCoeff();
    const double ds = (s - first_s).cwiseAbs().maxCoeff() / std::max(1e-300, first_s.cwiseAbs().maxCoeff());
    if (dm > kPhaseTolerance || ds > kPhaseTolerance) {
      throw PhaseBookkeepingError("phase-reduced system depends on time (matrix drift " +
                                  std::to_string(dm) + ", source drift " + std::to_string(ds) + ")");
    }
  }
  out.matrix = first_m.real();
  out.source = first_s;
  return out;
}

CoeffSystem build_constant_system(double alpha, FlowMode mode) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
  return build_constant_system(FlowFrame::unit(alpha), mode);
}

Eigen::Matrix4d literal_matrix(double a) {
  Eigen::Matrix4d m;
  m << -9 * a - 4, 0, 3 * a, 0,
       18 * a, -3 * a - 2, -6 * a, 9 * a,
       -9 * a, 6 * a, 3 * a, -18 * a,
       0, -3 * a, 0, -6 * a + 2;
  return m;
}

double Spectrum::max_imag() const {
  double m = 0.0;
  for (const auto& z : nu) m = std::max(m, std::abs(z.imag()));
  return m;
}

Spectrum eigen_spectrum(const Eigen::Matrix4d& matrix) {
  Eigen::EigenSolver<Eigen::Matrix4d> es(matrix, true);
  if (es.info() != Eigen::Success) throw EigenFailure("eigen-solver did not converge");

  std::array<int, 4> order{0, 1, 2, 3};
  const Eigen::Vector4cd values = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    if (values(lhs).real() != values(rhs).real()) return values(lhs).real() < values(rhs).real();
    return values(lhs).imag() < values(rhs).imag();
  });

  Spectrum out;
  const double norm = std::max(matrix.norm(), 1e-300);
  const Eigen::Matrix4cd mc = matrix.cast<Complex>();
  for (int i = 0; i < 4; ++i) {
    out.nu[i] = values(order[i]);
    out.vectors[i] = es.eigenvectors().col(order[i]);
    const Eigen::Vector4cd r = mc * out.vectors[i] - out.nu[i] * out.vectors[i];
    out.backward_error = std::max(out.backward_error, r.norm() / (norm * out.vectors[i].norm()));
  }
  if (out.backward_error > kCertification) {
    throw EigenFailure("eigenpair backward error " + std::to_string(out.backward_error) +
                       " above certification bound");
  }
  return out;
}

Spectrum eigen_spectrum(const CoeffSystem& sys) { return eigen_spectrum(sys.matrix); }

double StabilityReport::max_path_step() const {
  double step = 0.0;
  for (std::size_t i = 1; i < spectra.size(); ++i) {
    for (int k = 0; k < 4; ++k) {
      step = std::max(step, std::abs(spectra[i].nu[k] - spectra[i - 1].nu[k]));
    }
  }
  return step;
}

int StabilityReport::transitions() const {
  int n = 0;
  for (std::size_t i = 1; i < spectra.size(); ++i) {
    n += spectra[i].secular() != spectra[i - 1].secular() ? 1 : 0;
  }
  return n;
}

void StabilityReport::write_csv(std::ostream& os) const {
  os << "alpha,re_nu1,im_nu1,re_nu2,im_nu2,re_nu3,im_nu3,re_nu4,im_nu4\n";
  char buf[32];
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", alpha_grid[i]);
    os << buf;
    for (const auto& z : spectra[i].nu) {
      std::snprintf(buf, sizeof buf, "%.17g", z.real());
      os << ',' << buf;
      std::snprintf(buf, sizeof buf, "%.17g", z.imag());
      os << ',' << buf;
    }
    os << '\n';
  }
}

StabilityReport sweep_stability(FlowMode mode, double alpha_min, double alpha_max, int steps) {
  if (!(alpha_min >= 0.0 && alpha_max > alpha_min) || steps < 2) {
    throw std::invalid_argument("sweep needs 0 <= alpha_min < alpha_max and steps >= 2");
  }
  StabilityReport rep;
  rep.mode = mode;
  rep.alpha_grid.reserve(steps);
  rep.spectra.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    const double a = alpha_min + (alpha_max - alpha_min) * i / (steps - 1);
    rep.alpha_grid.push_back(a);
    rep.spectra.push_back(eigen_spectrum(build_constant_system(a, mode)));
  }
  return rep;
}

CriticalCoupling find_alpha_crit(FlowMode mode, double tol, double lo, double hi) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  StabilityReport sweep = sweep_stability(mode, lo, hi, 501);
  CriticalCoupling out;
  out.transitions = sweep.transitions();

  std::size_t first = 0;
  while (first < sweep.spectra.size() && !sweep.spectra[first].secular()) ++first;
  if (first == sweep.spectra.size()) {
    throw NoTransition("no real-to-complex transition for " + to_string(mode) + " in [" +
                           format_alpha(lo) + ", " + format_alpha(hi) + "]",
                       std::move(sweep));
  }
  if (first == 0) {
    out.alpha_crit = out.bracket_lo = out.bracket_hi = lo;
    return out;
  }
  auto secular = [&](double a) { return eigen_spectrum(build_constant_system(a, mode)).secular(); };
  double a_lo = sweep.alpha_grid[first - 1];
  double a_hi = sweep.alpha_grid[first];
  while (a_hi - a_lo > tol) {
    const double mid = 0.5 * (a_lo + a_hi);
    if (secular(mid)) {
      a_hi = mid;
    } else {
      a_lo = mid;
    }
  }
  out.bracket_lo = a_lo;
  out.bracket_hi = a_hi;
  out.alpha_crit = 0.5 * (a_lo + a_hi);
  return out;
}

ParticularSolution particular_solution(const CoeffSystem& sys) {
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(sys.matrix);
  const auto& sv = svd.singularValues();
  const double condition = sv(3) > 0.0 ? sv(0) / sv(3) : INFINITY;
  if (!(condition <= kMaxCondition)) {
    throw SingularSystem("constant system is singular (resonance), condition " +
                             std::to_string(condition),
                         condition);
  }
  ParticularSolution out;
  out.condition = condition;
  const Eigen::Matrix4cd a = kI * sys.Omega * sys.matrix.cast<Complex>();
  const Eigen::Vector4cd f = kI * sys.source;
  out.c = -a.partialPivLu().solve(f);
  out.residual = (a * out.c + f).norm();
  return out;
}

CoeffVector closed_form(const CoeffSystem& sys, const Eigen::Vector4cd& b0, double t) {
  // dc/dt = A c + f, A = i Omega M = V diag(i Omega nu) V^-1
  Eigen::EigenSolver<Eigen::Matrix4d> es(sys.matrix, true);
  if (es.info() != Eigen::Success) throw EigenFailure("eigen-solver did not converge");
  const Eigen::Matrix4cd v = es.eigenvectors();
  const auto lu = v.partialPivLu();
  const Eigen::Vector4cd lam = kI * sys.Omega * es.eigenvalues();
  const Eigen::Vector4cd f = kI * sys.source;

  const Eigen::Vector4cd y0 = lu.solve(b0);
  const Eigen::Vector4cd g = lu.solve(f);
  Eigen::Vector4cd y;
  for (int k = 0; k < 4; ++k) {
    y(k) = std::exp(lam(k) * t) * y0(k) + g(k) * t * phi1(lam(k) * t);
  }
  CoeffVector out;
  out.t = t;
  out.c = v * y;
  const Eigen::Vector4cd c_dot = kI * sys.Omega * sys.matrix.cast<Complex>() * out.c + f;
  const Eigen::Vector4cd ph = ansatz_phases(sys.Omega, t);
  for (int k = 0; k < 4; ++k) {
    out.b(k) = out.c(k) * ph(k);
    out.b_dot(k) = (c_dot(k) + kI * (kPhaseIndex[k] * sys.Omega) * out.c(k)) * ph(k);
  }
  return out;
}

std::vector<CoeffVector> integrate_flow(const FlowFrame& frame, FlowMode mode,
                                        const Eigen::Vector4cd& b0, double t_end, double dt,
                                        int stride) {
  const double max_dt = 2.0 * std::numbers::pi / frame.Omega / 200.0;
  if (!(dt > 0.0 && dt <= max_dt)) {
    throw StepRejected("step " + std::to_string(dt) + " does not resolve the fast phase (max " +
                       std::to_string(max_dt) + ")");
  }
  if (!(t_end > 0.0) || stride < 1) throw std::invalid_argument("need t_end > 0 and stride >= 1");
  const long steps = static_cast<long>(std::ceil(t_end / dt));
  const double h = t_end / static_cast<double>(steps);

  auto rhs = [&](double t, const Eigen::Vector4cd& b) {
    const TimeSystem ts = build_time_system(frame, t, mode);
    return Eigen::Vector4cd(ts.K * b + ts.s);
  };
  auto sample = [&](double t, const Eigen::Vector4cd& b) {
    CoeffVector cv;
    cv.t = t;
    cv.b = b;
    cv.b_dot = rhs(t, b);
    cv.c = b.cwiseQuotient(ansatz_phases(frame.Omega, t));
    return cv;
  };

  std::vector<CoeffVector> out;
  out.reserve(steps / stride + 2);
  Eigen::Vector4cd b = b0;
  out.push_back(sample(0.0, b));
  for (long n = 0; n < steps; ++n) {
    const double t = n * h;
    const Eigen::Vector4cd k1 = rhs(t, b);
    const Eigen::Vector4cd k2 = rhs(t + 0.5 * h, b + 0.5 * h * k1);
    const Eigen::Vector4cd k3 = rhs(t + 0.5 * h, b + 0.5 * h * k2);
    const Eigen::Vector4cd k4 = rhs(t + h, b + h * k3);
    b += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((n + 1) % stride == 0 || n + 1 == steps) out.push_back(sample((n + 1) * h, b));
  }
  return out;
}

std::array<double, 4> weak_coupling_slopes(FlowMode mode, double alpha) {
  const Spectrum s0 = eigen_spectrum(build_constant_system(0.0, mode));
  const Spectrum s1 = eigen_spectrum(build_constant_system(alpha, mode));
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) out[k] = (s1.nu[k].real() - s0.nu[k].real()) / alpha;
  return out;
}

ModeDiscrepancy compare_modes(double alpha, double tol) {
  const CoeffSystem paper = build_constant_system(alpha, FlowMode::paper_literal);
  const CoeffSystem engine = build_constant_system(alpha, FlowMode::engine_derived);
  ModeDiscrepancy out;
  out.alpha = alpha;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (std::abs(paper.matrix(r, c) - engine.matrix(r, c)) > tol) {
        out.matrix_entries.push_back({r, c, paper.matrix(r, c), engine.matrix(r, c)});
      }
    }
    out.source_factors[r] = (engine.source(r) / paper.source(r)).real();
  }
  return out;
}

}  // namespace duffing::flow
