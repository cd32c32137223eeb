#include <cmath>
#include <stdexcept>

#include "duffing/operator_forge.hpp"

namespace duffing::forge {

namespace {
const Complex kI{0.0, 1.0};
}

void DensitySpec::validate() const {
  if (!std::isfinite(omega0) || omega0 <= 0.0) throw std::invalid_argument("omega0 must be positive");
  if (dim < 8) throw std::invalid_argument("density truncation too small");
}

FockMatrix density_operator(const GeneratorPair& g, const DensitySpec& spec) {
  spec.validate();
  const Eigen::MatrixXcd a = fock::to_matrix(g.a_reference(), spec.dim).matrix();
  const Eigen::MatrixXcd n = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(n);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen-decomposition of A+A failed");
  const Eigen::VectorXd w = (-spec.omega0 * es.eigenvalues().array()).exp();
  Eigen::MatrixXcd rho = es.eigenvectors() * w.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  if (spec.normalize) rho /= rho.trace().real();
  return FockMatrix(std::move(rho));
}

double density_liouville_residual(const meanfield::MeanFieldSolution& sol, flow::FlowMode mode,
                                  double t, const DensitySpec& spec, int band) {
  const double h = 1e-4 / sol.Omega;
  auto rho_at = [&](double s) { return density_operator(generators_at(sol, s, mode), spec).matrix(); };
  auto central = [&](double step) {
    return Eigen::MatrixXcd((rho_at(t + step) - rho_at(t - step)) / (2.0 * step));
  };
  const Eigen::MatrixXcd drho = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  const Eigen::MatrixXcd rho = rho_at(t);
  const SectorSplit split = build_h_sectors(sol, t);
  const Eigen::MatrixXcd hm =
      fock::to_matrix(to_reference_frame(split.total(), sol.Omega, t), spec.dim).matrix();
  const Eigen::MatrixXcd r = kI * drho + rho * hm - hm * rho;
  return fock::spectral_norm(r.topLeftCorner(spec.dim - band, spec.dim - band));
}

CumulantReport quadrature_cumulants(const FockMatrix& rho, const meanfield::MeanFieldSolution& sol,
                                    double t) {
  const Complex tr = rho.matrix().trace();
  if (std::abs(tr - 1.0) > 1e-10) throw std::invalid_argument("density matrix is not trace-normalized");
  const int dim = rho.dim();
  const NOPoly q = to_reference_frame(meanfield::position_operator(meanfield::mode_at(sol, t)), sol.Omega, t);
  const NOPoly q2 = fock::no_product(q, q);
  const NOPoly q4 = fock::no_product(q2, q2);
  auto expect = [&](const NOPoly& op) {
    return (rho.matrix() * fock::to_matrix(op, dim).matrix()).trace();
  };
  CumulantReport out;
  out.mean_q = std::abs(expect(q));
  if (out.mean_q > 1e-10) throw std::runtime_error("<q> breaks parity");
  out.q2 = expect(q2).real();
  out.q4 = expect(q4).real();
  out.kurtosis_excess = out.q4 - 3.0 * out.q2 * out.q2;
  out.purity = (rho.matrix() * rho.matrix()).trace().real();
  return out;
}

}  // namespace duffing::forge
