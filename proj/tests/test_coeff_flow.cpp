#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "duffing/coeff_flow.hpp"
#include "duffing/meanfield.hpp"

using namespace duffing::flow;
using duffing::meanfield::solution_at_alpha;

namespace {

double sup_diff(const Eigen::Vector4cd& a, const Eigen::Vector4cd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("harmonic spectrum in both modes") {
  for (FlowMode mode : {FlowMode::paper_literal, FlowMode::engine_derived}) {
    const Spectrum s = eigen_spectrum(build_constant_system(0.0, mode));
    const double expected[4] = {-4.0, -2.0, 0.0, 2.0};
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(s.nu[k] - Complex(expected[k])) < 1e-10);
    }
    CHECK(s.backward_error < 1e-10);
    CHECK_FALSE(s.secular());
  }
}

TEST_CASE("literal mode matches the reference matrix") {
  for (double alpha : {0.0, 0.01, 0.1365, 0.3}) {
    const CoeffSystem sys = build_constant_system(alpha, FlowMode::paper_literal);
    CHECK((sys.matrix - literal_matrix(alpha)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("phase reduction is frame independent") {
  const FlowFrame frame = FlowFrame::from(solution_at_alpha(1.0, 1.0, 0.08));
  for (FlowMode mode : {FlowMode::paper_literal, FlowMode::engine_derived}) {
    const CoeffSystem a = build_constant_system(frame, mode);
    const CoeffSystem b = build_constant_system(0.08, mode);
    CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("modes differ in one entry and in the source factors") {
  const ModeDiscrepancy d = compare_modes(0.05);
  REQUIRE(d.matrix_entries.size() == 1);
  CHECK(d.matrix_entries[0].row == 3);
  CHECK(d.matrix_entries[0].col == 3);
  CHECK(d.matrix_entries[0].paper == doctest::Approx(-6.0 * 0.05 + 2.0));
  CHECK(d.matrix_entries[0].engine == doctest::Approx(9.0 * 0.05 + 2.0));
  const double factors[4] = {1.0, 3.0, 3.0, 1.0};
  for (int k = 0; k < 4; ++k) CHECK(d.source_factors[k] == doctest::Approx(factors[k]).epsilon(1e-12));
}

TEST_CASE("secular spectra come in conjugate pairs") {
  const Spectrum s = eigen_spectrum(literal_matrix(0.2));
  CHECK(s.secular());
  int complex_count = 0;
  for (int i = 0; i < 4; ++i) {
    if (std::abs(s.nu[i].imag()) < kSecularThreshold) continue;
    ++complex_count;
    bool paired = false;
    for (int j = 0; j < 4; ++j) paired = paired || (j != i && std::abs(s.nu[j] - std::conj(s.nu[i])) < 1e-10);
    CHECK(paired);
  }
  CHECK(complex_count == 2);
}

TEST_CASE("eigenvalue paths are continuous") {
  for (FlowMode mode : {FlowMode::paper_literal, FlowMode::engine_derived}) {
    const StabilityReport r = sweep_stability(mode, 0.0, 0.3, 301);
    CHECK(r.alpha_grid.size() == 301);
    CHECK(r.max_path_step() < 0.1);
  }
}

TEST_CASE("critical coupling of the literal matrix") {
  const CriticalCoupling cc = find_alpha_crit(FlowMode::paper_literal, 1e-6);
  CHECK(cc.alpha_crit > 0.1315);
  CHECK(cc.alpha_crit < 0.1415);
  CHECK(std::abs(cc.alpha_crit - kReferenceAlphaCrit) < 2e-4);
  CHECK(cc.transitions == 1);
  CHECK(cc.bracket_hi - cc.bracket_lo <= 1e-6);
  // the onset is where the indicator flips
  CHECK_FALSE(eigen_spectrum(literal_matrix(cc.bracket_lo)).secular());
  CHECK(eigen_spectrum(literal_matrix(cc.bracket_hi)).secular());
}

TEST_CASE("engine mode has no transition") {
  try {
    find_alpha_crit(FlowMode::engine_derived, 1e-4);
    FAIL("expected NoTransition");
  } catch (const NoTransition& e) {
    CHECK(e.sweep.transitions() == 0);
    CHECK_FALSE(e.sweep.spectra.empty());
  }
  CHECK_THROWS_AS(find_alpha_crit(FlowMode::paper_literal, 1e-4, 0.0, 0.01), NoTransition);
}

TEST_CASE("weak-coupling slopes") {
  const auto s = weak_coupling_slopes(FlowMode::paper_literal, 1e-4);
  CHECK(s[0] == doctest::Approx(-9.0).epsilon(0.02));
  CHECK(s[1] == doctest::Approx(-3.0).epsilon(0.02));
  CHECK(s[2] == doctest::Approx(3.0).epsilon(0.02));
  CHECK(s[3] == doctest::Approx(-6.0).epsilon(0.02));
  const auto e = weak_coupling_slopes(FlowMode::engine_derived, 1e-4);
  CHECK(e[3] == doctest::Approx(9.0).epsilon(0.02));
}

TEST_CASE("particular solution") {
  CHECK_THROWS_AS(particular_solution(build_constant_system(0.0, FlowMode::paper_literal)), SingularSystem);

  // the resonant component grows like s~_2 / (3 alpha)
  auto scaled = [](double alpha, FlowMode mode) {
    const CoeffSystem sys = build_constant_system(alpha, mode);
    const ParticularSolution p = particular_solution(sys);
    CHECK(p.residual < 1e-10);
    CHECK(p.condition < 1e12);
    return 3.0 * alpha * std::abs(p.c(2)) / std::abs(sys.source(2));
  };
  for (double alpha : {0.05, 0.025, 0.0125}) {
    CHECK(scaled(alpha, FlowMode::engine_derived) == doctest::Approx(1.0).epsilon(0.1));
  }
  double prev = 0.0;
  for (double alpha : {0.05, 0.025, 0.0125, 0.003125}) {
    const double r = scaled(alpha, FlowMode::paper_literal);
    CHECK(r > prev);
    prev = r;
  }
  CHECK(scaled(0.0125, FlowMode::paper_literal) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(prev == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("closed form starts at b0 and solves the flow") {
  const FlowFrame frame = FlowFrame::from(solution_at_alpha(1.0, 1.0, 0.05));
  const CoeffSystem sys = build_constant_system(frame, FlowMode::engine_derived);
  const Eigen::Vector4cd b0(Complex(0.1, 0.2), Complex(-0.3, 0.0), Complex(0.0, 0.5), Complex(0.2, -0.1));
  CHECK(sup_diff(closed_form(sys, b0, 0.0).b, b0) < 1e-12);

  const double t = 0.9;
  const CoeffVector cv = closed_form(sys, b0, t);
  const TimeSystem ts = build_time_system(frame, t, FlowMode::engine_derived);
  CHECK(sup_diff(cv.b_dot, ts.K * cv.b + ts.s) < 1e-10);
}

TEST_CASE("closed form tolerates the resonant harmonic point") {
  const CoeffSystem sys = build_constant_system(FlowFrame::unit(0.0), FlowMode::paper_literal);
  const CoeffVector cv = closed_form(sys, Eigen::Vector4cd::Zero(), 1.0);
  CHECK(cv.b.allFinite());
}

TEST_CASE("RK4 agrees with the closed form") {
  const FlowFrame frame = FlowFrame::from(solution_at_alpha(1.0, 1.0, 0.05));
  const CoeffSystem sys = build_constant_system(frame, FlowMode::paper_literal);
  const double period = 2.0 * std::numbers::pi / frame.Omega;
  const auto traj = integrate_flow(frame, FlowMode::paper_literal, Eigen::Vector4cd::Zero(), 2.0 * period,
                                   period / 2000.0, 50);
  double worst = 0.0;
  for (const auto& s : traj) worst = std::max(worst, sup_diff(s.b, closed_form(sys, Eigen::Vector4cd::Zero(), s.t).b));
  CHECK(worst < 1e-8);
  CHECK(traj.back().t == doctest::Approx(2.0 * period));
  CHECK_THROWS_AS(integrate_flow(frame, FlowMode::paper_literal, Eigen::Vector4cd::Zero(), 1.0, period / 100.0),
                  StepRejected);
}

TEST_CASE("stability CSV is deterministic") {
  std::ostringstream a, b;
  sweep_stability(FlowMode::paper_literal, 0.0, 0.2, 21).write_csv(a);
  sweep_stability(FlowMode::paper_literal, 0.0, 0.2, 21).write_csv(b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("alpha,re_nu1,im_nu1,", 0) == 0);
}

TEST_CASE("mode names") {
  CHECK(mode_from_string("engine_derived") == FlowMode::engine_derived);
  CHECK(to_string(FlowMode::paper_literal) == "paper_literal");
  CHECK_THROWS_AS(mode_from_string("paper"), std::invalid_argument);
}
