#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "duffing/fock_algebra.hpp"
#include "duffing/report.hpp"

using namespace duffing::fock;

namespace {

NOPoly random_poly(std::mt19937_64& rng, int max_power = 3) {
  std::uniform_int_distribution<int> power(0, max_power);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  NOPoly p;
  for (int i = 0; i < 3; ++i) p.add_term({power(rng), power(rng)}, {c(rng), c(rng)});
  return p;
}

double interior_diff(const FockMatrix& a, const FockMatrix& b, int band) {
  return (a.interior(band) - b.interior(band)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("number operator squared") {
  const NOPoly n = NOPoly::number();
  const NOPoly n2 = no_product(n, n);
  CHECK(n2.size() == 2);
  CHECK(n2.coeff(2, 2) == Complex(1.0));
  CHECK(n2.coeff(1, 1) == Complex(1.0));

  const FockMatrix dense = to_matrix(n, 16) * to_matrix(n, 16);
  CHECK(interior_diff(dense, to_matrix(n2, 16), 2) < 1e-12);
}

TEST_CASE("canonical commutators") {
  const NOPoly a = NOPoly::annihilator();
  const NOPoly ad = NOPoly::creator();
  const NOPoly c = commutator(a, ad);
  CHECK(c.size() == 1);
  CHECK(c.coeff(0, 0) == Complex(1.0));

  for (int n = 1; n <= 5; ++n) {
    const NOPoly cn = commutator(a, power(ad, n));
    CHECK(cn.size() == 1);
    CHECK(cn.coeff(n - 1, 0) == Complex(static_cast<double>(n)));
  }
}

TEST_CASE("reorder weights") {
  CHECK(reorder_weight(2, 2, 0) == 1);
  CHECK(reorder_weight(2, 2, 1) == 4);
  CHECK(reorder_weight(2, 2, 2) == 2);
  CHECK(reorder_weight(3, 4, 3) == 24);
  CHECK(reorder_weight(1, 1, 2) == 0);
}

TEST_CASE("a a+ normal orders to a+ a + 1") {
  const NOPoly p = no_product(NOPoly::annihilator(), NOPoly::creator());
  CHECK(p.coeff(1, 1) == Complex(1.0));
  CHECK(p.coeff(0, 0) == Complex(1.0));
  CHECK(p.size() == 2);
}

TEST_CASE("report order for cubic monomials") {
  NOPoly p;
  for (int k = 3; k >= 0; --k) p.add_term({3 - k, k}, static_cast<double>(k + 1));
  std::vector<int> seen;
  for (const auto& [key, c] : p.terms()) seen.push_back(key.annihilation);
  CHECK(seen == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("add_term drops exact cancellations") {
  NOPoly p = NOPoly::monomial(2, 1, {0.5, -1.0});
  p.add_term({2, 1}, {-0.5, 1.0});
  CHECK(p.is_zero());
  CHECK(p.degree() == 0);
  CHECK((NOPoly::number() - NOPoly::number()).is_zero());
}

TEST_CASE("homogeneous parts and degree") {
  const NOPoly x = NOPoly::annihilator() + NOPoly::creator();
  const NOPoly x4 = power(x, 4);
  CHECK(x4.degree() == 4);
  const NOPoly top = x4.homogeneous_part(4);
  CHECK(top.size() == 5);
  CHECK(top.coeff(2, 2) == Complex(6.0));
  CHECK(x4.homogeneous_part(2).coeff(1, 1) == Complex(12.0));
  CHECK(x4.homogeneous_part(0).coeff(0, 0) == Complex(3.0));
  CHECK(x4.homogeneous_part(3).is_zero());
}

TEST_CASE("matrix elements of monomials") {
  const FockMatrix m = to_matrix(NOPoly::monomial(2, 1), 10);
  // <n| a+^2 a |k> is nonzero only for n = k + 1
  CHECK(std::abs(m.matrix()(4, 3) - std::sqrt(3.0) * std::sqrt(4.0 * 3.0)) < 1e-12);
  CHECK(std::abs(m.matrix()(3, 3)) == 0.0);
  CHECK(std::abs(m.matrix()(1, 0)) == 0.0);
}

TEST_CASE("power of the quadrature matches dense products") {
  const NOPoly x = NOPoly::annihilator() + NOPoly::creator();
  const int dim = 24;
  const FockMatrix xm = to_matrix(x, dim);
  const FockMatrix dense = xm * xm * xm * xm;
  CHECK(interior_diff(dense, to_matrix(power(x, 4), dim), 4) < 1e-10);
}

TEST_CASE("truncation errors") {
  CHECK_THROWS_AS(to_matrix(power(NOPoly::creator(), 5), 6), TruncationError);
  CHECK_NOTHROW(to_matrix(power(NOPoly::creator(), 5), 7));
  CHECK_THROWS_AS(to_matrix(NOPoly::number(), 8).interior(8), TruncationError);
}

TEST_CASE("randomized products and adjoints against the matrix realization") {
  const duffing::report::AlgebraCheck r = duffing::report::random_algebra_identities(7, 200, 48);
  CHECK(r.identities == 200);
  CHECK(r.max_product_error < 1e-10);
  CHECK(r.max_adjoint_error < 1e-10);
}

TEST_CASE("adjoint is an involutive anti-homomorphism") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const NOPoly p = random_poly(rng);
    const NOPoly q = random_poly(rng);
    CHECK(max_coeff_diff(adjoint(adjoint(p)), p) == 0.0);
    CHECK(max_coeff_diff(adjoint(no_product(p, q)), no_product(adjoint(q), adjoint(p))) < 1e-12);
  }
}

TEST_CASE("commutator is bilinear, antisymmetric and obeys Jacobi") {
  std::mt19937_64 rng(23);
  const Complex s{0.3, -1.7};
  for (int i = 0; i < 40; ++i) {
    const NOPoly p = random_poly(rng, 2);
    const NOPoly q = random_poly(rng, 2);
    const NOPoly r = random_poly(rng, 2);
    CHECK(max_coeff_diff(commutator(p, q), -commutator(q, p)) < 1e-12);
    CHECK(max_coeff_diff(commutator(s * p + r, q), s * commutator(p, q) + commutator(r, q)) < 1e-12);
    const NOPoly jacobi =
        commutator(p, commutator(q, r)) + commutator(q, commutator(r, p)) + commutator(r, commutator(p, q));
    double worst = 0.0;
    for (const auto& [key, c] : jacobi.terms()) worst = std::max(worst, std::abs(c));
    CHECK(worst < 1e-11);
  }
}

TEST_CASE("norms") {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, -2.0, Complex(0.0, 3.0), 4.0;
  CHECK(inf_norm(m) == doctest::Approx(7.0));
  CHECK(spectral_norm(Eigen::MatrixXcd::Identity(3, 3) * 2.5) == doctest::Approx(2.5));
}
