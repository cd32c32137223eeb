#include <doctest.h>

#include <cmath>
#include <limits>

#include "duffing/meanfield.hpp"
#include "duffing/operator_forge.hpp"

using namespace duffing::meanfield;

TEST_CASE("harmonic limit") {
  const MeanFieldSolution sol = solve_omega({1.0, 1.0, 0.0});
  CHECK(sol.Omega == 1.0);
  CHECK(sol.Omega_bisection == 1.0);
  CHECK(std::abs(sol.Omega_closed_form - 1.0) < 1e-12);
  CHECK(sol.E0 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sol.alpha() == 0.0);
}

TEST_CASE("frozen gap solution at lambda = 1") {
  const MeanFieldSolution sol = solve_omega({1.0, 1.0, 1.0});
  CHECK(sol.Omega == doctest::Approx(1.4311271443936895).epsilon(1e-13));
  CHECK(std::abs(sol.Omega - 1.4306) < 1e-3);
  CHECK(sol.cubic_residual < 1e-10);
  CHECK(mean_energy(sol, 0.0) == doctest::Approx(0.62401642109933642).epsilon(1e-12));
  CHECK(std::abs(mean_energy(sol, 0.0) - 0.624) < 1e-4);
}

TEST_CASE("closed form and bisection agree across couplings") {
  for (double lam : {0.0, 1e-4, 0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0}) {
    CAPTURE(lam);
    const PhysParams p{1.0, 1.0, lam};
    const Complex cf = closed_form_omega(p);
    const double bis = bisect_omega(p);
    CHECK(std::abs(cf.real() - bis) < 1e-9);
    CHECK(std::abs(gap_cubic(p, bis)) < 1e-10);
  }
}

TEST_CASE("closed form survives the negative-radicand regime at other frequencies") {
  for (double w : {0.3, 2.0, 5.0}) {
    for (double lam : {0.01, 0.7}) {
      const PhysParams p{1.0, w, lam};
      CHECK(std::abs(closed_form_omega(p).real() - bisect_omega(p)) < 1e-9 * std::max(1.0, w));
    }
  }
}

TEST_CASE("Omega increases with lambda") {
  double prev = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double lam = 0.05 * i;
    const double om = solve_omega({1.0, 1.0, lam}).Omega;
    CHECK(om > prev);
    prev = om;
  }
}

TEST_CASE("one positive root") {
  for (double lam : {0.0, 0.1, 1.0, 50.0}) CHECK(positive_root_count({1.0, 1.0, lam}) == 1);
}

TEST_CASE("parameter validation") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_omega({-1.0, 1.0, 0.0}), InvalidParams);
  CHECK_THROWS_AS(solve_omega({1.0, 0.0, 0.0}), InvalidParams);
  CHECK_THROWS_AS(solve_omega({1.0, 1.0, -0.1}), InvalidParams);
  CHECK_THROWS_AS(solve_omega({1.0, nan, 0.1}), InvalidParams);
  CHECK_THROWS_AS(solve_omega({2.0, 1.0, 0.1, Convention::m_normalized}), InvalidParams);
  CHECK_NOTHROW(solve_omega({2.0, 1.0, 0.1, Convention::literal}));
  CHECK_THROWS_AS(convention_from_string("other"), std::invalid_argument);
  CHECK(convention_from_string(to_string(Convention::literal)) == Convention::literal);
}

TEST_CASE("mode functions") {
  const MeanFieldSolution sol = solve_omega({1.0, 1.0, 0.5});
  for (double t : {0.0, 0.3, 2.0}) {
    const ModeValues mv = mode_at(sol, t);
    CHECK(std::abs(mv.wronskian() - Complex(0.0, 1.0)) < 1e-14);
    CHECK(std::abs(std::norm(mv.u) - 1.0 / (2.0 * sol.Omega)) < 1e-14);
    CHECK(meanfield_residual(sol, t) < 1e-12);
  }
  CHECK(trial_residual(sol.params, 1.0, mode_at(sol, 0.0).u, 0.0) > 1e-3);
}

TEST_CASE("quadratures are canonical") {
  const MeanFieldSolution sol = solve_omega({1.0, 1.0, 0.3});
  const ModeValues mv = mode_at(sol, 0.4);
  const auto c = duffing::fock::commutator(position_operator(mv), momentum_operator(mv));
  CHECK(c.size() == 1);
  CHECK(std::abs(c.coeff(0, 0) - Complex(0.0, 1.0)) < 1e-14);
}

TEST_CASE("mean energy against the sector constant") {
  const MeanFieldSolution one = solve_omega({1.0, 1.0, 0.8});
  CHECK(mean_energy(one, 0.0) == doctest::Approx(one.E0).epsilon(1e-13));
  CHECK(mean_energy(one, 1.3) == doctest::Approx(mean_energy(one, 0.0)).epsilon(1e-13));

  const auto split_one = duffing::forge::build_h_sectors(one, 0.0);
  CHECK(split_one.e0 == doctest::Approx(one.E0).epsilon(1e-13));

  // With m != 1 the mean-energy formula carries 1/m^2 on the quartic term,
  // the vacuum expectation of H carries 1/m.
  const MeanFieldSolution heavy = solve_omega({2.0, 1.0, 0.8, Convention::literal});
  const double quartic = 3.0 * 0.8 / (16.0 * heavy.Omega * heavy.Omega);
  const double e0 = duffing::forge::build_h_sectors(heavy, 0.0).e0;
  CHECK(e0 - mean_energy(heavy, 0.0) == doctest::Approx(quartic / 2.0 - quartic / 4.0).epsilon(1e-12));
}

TEST_CASE("solution at prescribed alpha") {
  const MeanFieldSolution sol = solution_at_alpha(1.0, 1.0, 0.05);
  CHECK(sol.alpha() == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(sol.Omega == doctest::Approx(1.0 / std::sqrt(0.7)).epsilon(1e-12));
  CHECK_THROWS_AS(solution_at_alpha(1.0, 1.0, 1.0 / 6.0), InvalidParams);
  CHECK_THROWS_AS(solution_at_alpha(1.0, 1.0, -0.01), InvalidParams);
}

TEST_CASE("fixed-frequency rescaling keeps Omega") {
  const MeanFieldSolution ref = solve_omega({1.0, 1.0, 0.2});
  for (double lam : {0.1, 0.05, 0.0}) {
    const MeanFieldSolution s = solve_omega(with_fixed_frequency(ref, lam));
    CHECK(s.Omega == doctest::Approx(ref.Omega).epsilon(1e-12));
  }
}

TEST_CASE("H2 is diagonal at the gap frequency") {
  for (double lam : {0.1, 1.0, 3.0}) {
    const MeanFieldSolution sol = solve_omega({1.0, 1.0, lam});
    const auto split = duffing::forge::build_h_sectors(sol, 0.7);
    CHECK(std::abs(split.h2.coeff(2, 0)) < 1e-12);
    CHECK(std::abs(split.h2.coeff(0, 2)) < 1e-12);
    CHECK(std::abs(split.h2.coeff(1, 1) - sol.Omega) < 1e-12);
  }
}
