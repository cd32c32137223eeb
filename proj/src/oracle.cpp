#include "duffing/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace duffing::oracle {

namespace {

constexpr double kConvergence = 1e-8;
constexpr double kEnergyDrift = 1e-8;
constexpr int kPad = 4;

Eigen::MatrixXcd lowering(int dim) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

}  // namespace

Quadratures Quadratures::bare(const meanfield::PhysParams& params) {
  const double xq = 1.0 / std::sqrt(2.0 * params.m * params.omega);
  const double xp = std::sqrt(0.5 * params.m * params.omega);
  return {xq, xq, Complex{0.0, -xp}, Complex{0.0, xp}};
}

Quadratures Quadratures::mode(const meanfield::ModeValues& mv) {
  const Complex i{0.0, 1.0};
  return {i * mv.u, -i * std::conj(mv.u), -i * mv.v, i * std::conj(mv.v)};
}

Eigen::MatrixXcd hamiltonian_matrix(const meanfield::PhysParams& params, int dim,
                                    const Quadratures& basis) {
  const int big = dim + kPad;
  const Eigen::MatrixXcd a = lowering(big);
  const Eigen::MatrixXcd ad = a.adjoint();
  const Eigen::MatrixXcd q = basis.q_a * a + basis.q_adag * ad;
  const Eigen::MatrixXcd p = basis.p_a * a + basis.p_adag * ad;
  const Eigen::MatrixXcd q2 = q * q;
  const Eigen::MatrixXcd h = p * p / (2.0 * params.m) +
                             0.5 * params.m * params.omega * params.omega * q2 +
                             0.25 * params.m * params.lambda * q2 * q2;
  return h.topLeftCorner(dim, dim);
}

SpectrumResult exact_diagonalize(const meanfield::PhysParams& params, const std::vector<int>& dims,
                                 int levels) {
  params.validate();
  if (dims.empty() || !std::is_sorted(dims.begin(), dims.end()) ||
      std::adjacent_find(dims.begin(), dims.end()) != dims.end()) {
    throw std::invalid_argument("dims must be strictly increasing");
  }
  if (dims.back() > 512 || dims.front() < levels) throw std::invalid_argument("dims out of range");

  SpectrumResult out;
  out.dims = dims;
  const Quadratures basis = Quadratures::bare(params);
  for (int dim : dims) {
    // The bare-basis Hamiltonian is real symmetric.
    const Eigen::MatrixXd h = hamiltonian_matrix(params, dim, basis).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("diagonalization failed at dim " + std::to_string(dim));
    const Eigen::VectorXd& ev = es.eigenvalues();
    out.energies.emplace_back(ev.data(), ev.data() + levels);
  }
  out.converged.assign(levels, dims.size() == 1 ? false : true);
  if (dims.size() > 1) {
    const auto& last = out.energies.back();
    const auto& prev = out.energies[out.energies.size() - 2];
    for (int k = 0; k < levels; ++k) {
      out.converged[k] = std::abs(last[k] - prev[k]) < kConvergence * std::max(1.0, std::abs(last[k]));
    }
  }
  return out;
}

ExactEvolution::ExactEvolution(const meanfield::PhysParams& params, int dim, const Quadratures& basis) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian_matrix(params, dim, basis));
  if (es.info() != Eigen::Success) throw ConvergenceFailure("diagonalization failed");
  values_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

Eigen::MatrixXcd ExactEvolution::propagator(double t) const {
  Eigen::VectorXcd phases(values_.size());
  for (Eigen::Index k = 0; k < values_.size(); ++k) phases(k) = std::polar(1.0, -values_(k) * t);
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

fock::FockMatrix ExactEvolution::evolve(const fock::FockMatrix& op, double t) const {
  if (op.dim() != dim()) throw std::invalid_argument("operator and Hamiltonian dimensions differ");
  const Eigen::MatrixXcd u = propagator(t);
  return fock::FockMatrix(u.adjoint() * op.matrix() * u);
}

fock::FockMatrix heisenberg_evolve(const fock::FockMatrix& op, const meanfield::PhysParams& params,
                                   double t) {
  return ExactEvolution(params, op.dim(), Quadratures::bare(params)).evolve(op, t);
}

ClassicalRun integrate_classical(const meanfield::PhysParams& params, double amplitude, int periods) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("amplitude must be positive");
  const double w2 = params.omega * params.omega;
  const double lam = params.lambda;
  const double f_est = params.omega * (1.0 + 3.0 * lam * amplitude * amplitude / (8.0 * w2));
  const double t_est = 2.0 * std::numbers::pi / f_est;

  ClassicalRun run;
  run.q0 = amplitude;
  run.p0 = 0.0;
  run.dt = t_est / 2000.0;
  const double dt = run.dt;
  const long steps = 2000L * periods;

  auto accel = [&](double q) { return -w2 * q - lam * q * q * q; };
  auto energy = [&](double q, double p) { return 0.5 * p * p + 0.5 * w2 * q * q + 0.25 * lam * q * q * q * q; };

  double q = amplitude, p = 0.0;
  const double e0 = energy(q, p);
  run.samples.reserve(steps + 1);
  run.samples.push_back({0.0, q, p});
  std::vector<double> crossings;
  for (long n = 0; n < steps; ++n) {
    const double k1q = p, k1p = accel(q);
    const double k2q = p + 0.5 * dt * k1p, k2p = accel(q + 0.5 * dt * k1q);
    const double k3q = p + 0.5 * dt * k2p, k3p = accel(q + 0.5 * dt * k2q);
    const double k4q = p + dt * k3p, k4p = accel(q + dt * k3q);
    const double qn = q + dt / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
    const double pn = p + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    if (q < 0.0 && qn >= 0.0) crossings.push_back(n * dt + dt * (-q) / (qn - q));
    q = qn;
    p = pn;
    run.samples.push_back({(n + 1) * dt, q, p});
    run.energy_drift = std::max(run.energy_drift, std::abs(energy(q, p) - e0) / std::abs(e0));
  }
  if (run.energy_drift > kEnergyDrift) {
    throw ConvergenceFailure("classical energy drift " + std::to_string(run.energy_drift) + " above bound");
  }
  if (crossings.size() < 2) throw ConvergenceFailure("fewer than two upward zero crossings");
  run.period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  return run;
}

ClassicalFrequency classical_frequency(const meanfield::PhysParams& params, double amplitude) {
  const ClassicalRun run = integrate_classical(params, amplitude);
  ClassicalFrequency out;
  out.numeric = 2.0 * std::numbers::pi / run.period;
  out.first_order = params.omega * (1.0 + 3.0 * params.lambda * amplitude * amplitude /
                                              (8.0 * params.omega * params.omega));
  out.energy_drift = run.energy_drift;
  return out;
}

FrequencyComparison compare_with_classical(const meanfield::MeanFieldSolution& sol) {
  FrequencyComparison out;
  const auto& p = sol.params;
  out.amplitude = 1.0 / std::sqrt(p.m * sol.Omega);
  out.meanfield_shift = sol.Omega - p.omega;
  out.classical_shift_first_order = 3.0 * p.lambda * out.amplitude * out.amplitude / (8.0 * p.omega);
  out.classical_shift_numeric = classical_frequency(p, out.amplitude).numeric - p.omega;
  out.ratio = out.classical_shift_first_order > 0.0 ? out.meanfield_shift / out.classical_shift_first_order : 0.0;
  return out;
}

}  // namespace duffing::oracle
